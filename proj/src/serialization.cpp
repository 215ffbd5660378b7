#include "ssboost/serialization.hpp"

#include "ssboost/io.hpp"

namespace ssb {

namespace {

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error("ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

template <class T>
void read_opt(const Json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

}  // namespace

void to_json(Json& j, const Band& b) { j = Json::array({b.low_hz, b.high_hz}); }
void from_json(const Json& j, Band& b) {
  if (!j.is_array() || j.size() != 2) throw Error("band must be [low, high]");
  b = Band{j.at(0).get<int>(), j.at(1).get<int>()};
}

void to_json(Json& j, const ChannelSet& s) { j = s.to_string(); }
void from_json(const Json& j, ChannelSet& s) { s = ChannelSet::parse(j.get<std::string>(), 0); }

void to_json(Json& j, const Precondition& p) {
  j = Json{{"channels", p.channels}, {"band", p.band}, {"mode", to_string(p.mode)}};
}
void from_json(const Json& j, Precondition& p) {
  j.at("channels").get_to(p.channels);
  j.at("band").get_to(p.band);
  p.mode = parse_mode(j.at("mode").get<std::string>());
}

void to_json(Json& j, const BoostConfig& c) {
  j = Json{{"k_max", c.k_max},
           {"subset_fraction", c.subset_fraction},
           {"epsilon", c.epsilon},
           {"pool_cap_multiple", c.pool_cap_multiple},
           {"candidate_sample_size", c.candidate_sample_size},
           {"csp_dim", c.csp_dim},
           {"svm_cost", c.svm_cost},
           {"validation_fraction", c.validation_fraction},
           {"rng_seed", c.rng_seed},
           {"min_channels", c.min_channels}};
}
void from_json(const Json& j, BoostConfig& c) {
  read_opt(j, "k_max", c.k_max);
  read_opt(j, "subset_fraction", c.subset_fraction);
  read_opt(j, "epsilon", c.epsilon);
  read_opt(j, "pool_cap_multiple", c.pool_cap_multiple);
  read_opt(j, "candidate_sample_size", c.candidate_sample_size);
  read_opt(j, "csp_dim", c.csp_dim);
  read_opt(j, "svm_cost", c.svm_cost);
  read_opt(j, "validation_fraction", c.validation_fraction);
  read_opt(j, "rng_seed", c.rng_seed);
  read_opt(j, "min_channels", c.min_channels);
}

void to_json(Json& j, const BandUniverseSpec& s) {
  j = Json{{"global_low", s.global_low},
           {"global_high", s.global_high},
           {"window_lengths", s.window_lengths},
           {"strides", s.strides}};
}
void from_json(const Json& j, BandUniverseSpec& s) {
  read_opt(j, "global_low", s.global_low);
  read_opt(j, "global_high", s.global_high);
  read_opt(j, "window_lengths", s.window_lengths);
  read_opt(j, "strides", s.strides);
}

void to_json(Json& j, const UniverseConfig& c) {
  j = Json{{"n_channels", c.n_channels}, {"min_channels", c.min_channels}, {"bands", c.bands},
           {"max_subsets", c.max_subsets}, {"sfb_pairs", c.sfb_pairs},     {"seed", c.seed}};
}
void from_json(const Json& j, UniverseConfig& c) {
  read_opt(j, "n_channels", c.n_channels);
  read_opt(j, "min_channels", c.min_channels);
  read_opt(j, "bands", c.bands);
  read_opt(j, "max_subsets", c.max_subsets);
  read_opt(j, "sfb_pairs", c.sfb_pairs);
  read_opt(j, "seed", c.seed);
}

void to_json(Json& j, const CspModel& m) {
  j = Json{{"filters", matrix_to_json(m.filters)},
           {"eigenvalues", m.eigenvalues},
           {"n_channels", m.n_channels},
           {"csp_dim", m.csp_dim}};
}
void from_json(const Json& j, CspModel& m) {
  m.filters = matrix_from_json(j.at("filters"));
  j.at("eigenvalues").get_to(m.eigenvalues);
  j.at("n_channels").get_to(m.n_channels);
  j.at("csp_dim").get_to(m.csp_dim);
  if (m.filters.rows() != m.csp_dim || m.filters.cols() != m.n_channels)
    throw Error("CSP filter matrix shape does not match csp_dim x n_channels");
}

void to_json(Json& j, const LinearModel& m) {
  j = Json{{"weights", std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size())},
           {"bias", m.bias},
           {"cost", m.cost}};
}
void from_json(const Json& j, LinearModel& m) {
  const auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  j.at("bias").get_to(m.bias);
  j.at("cost").get_to(m.cost);
}

void to_json(Json& j, const AdditiveModel& m) {
  Json terms = Json::array();
  for (const auto& t : m.terms)
    terms.push_back(Json{{"alpha", t.alpha}, {"precondition", t.precondition}, {"csp", t.learner.csp},
                         {"linear", t.learner.linear}});
  j = Json{{"format", "ssboost-model"},
           {"version", kModelFormatVersion},
           {"mode", to_string(m.mode)},
           {"sample_rate_hz", m.sample_rate_hz},
           {"channel_names", m.channel_names},
           {"intercept", m.intercept},
           {"selected_k", m.selected_k},
           {"terms", std::move(terms)}};
}
void from_json(const Json& j, AdditiveModel& m) {
  if (j.value("format", std::string{}) != "ssboost-model") throw Error("not a model file");
  if (j.at("version").get<int>() != kModelFormatVersion) throw Error("unsupported model version");
  m.mode = parse_mode(j.at("mode").get<std::string>());
  j.at("sample_rate_hz").get_to(m.sample_rate_hz);
  j.at("channel_names").get_to(m.channel_names);
  j.at("intercept").get_to(m.intercept);
  j.at("selected_k").get_to(m.selected_k);
  m.terms.clear();
  for (const auto& t : j.at("terms")) {
    ModelTerm term;
    t.at("alpha").get_to(term.alpha);
    t.at("precondition").get_to(term.precondition);
    t.at("csp").get_to(term.learner.csp);
    t.at("linear").get_to(term.learner.linear);
    m.terms.push_back(std::move(term));
  }
  m.validate();
}

void to_json(Json& j, const TraceRecord& r) {
  j = Json{{"iteration", r.iteration},
           {"precondition", r.precondition},
           {"alpha", r.alpha},
           {"rho", r.rho},
           {"sse", r.sse},
           {"training_error", r.training_error},
           {"training_loss", r.training_loss},
           {"duplication", r.duplication},
           {"pool_size", r.pool_size},
           {"validation_error", r.validation_error},
           {"n_candidates", r.n_candidates}};
}
void from_json(const Json& j, TraceRecord& r) {
  j.at("iteration").get_to(r.iteration);
  j.at("precondition").get_to(r.precondition);
  j.at("alpha").get_to(r.alpha);
  j.at("rho").get_to(r.rho);
  j.at("sse").get_to(r.sse);
  j.at("training_error").get_to(r.training_error);
  j.at("training_loss").get_to(r.training_loss);
  j.at("duplication").get_to(r.duplication);
  j.at("pool_size").get_to(r.pool_size);
  j.at("validation_error").get_to(r.validation_error);
  j.at("n_candidates").get_to(r.n_candidates);
}

void to_json(Json& j, const BoostTrace& t) {
  j = Json{{"initial_loss", t.initial_loss},
           {"initial_validation_error", t.initial_validation_error},
           {"train_indices", t.train_indices},
           {"validation_indices", t.validation_indices},
           {"records", t.records}};
}
void from_json(const Json& j, BoostTrace& t) {
  j.at("initial_loss").get_to(t.initial_loss);
  j.at("initial_validation_error").get_to(t.initial_validation_error);
  j.at("train_indices").get_to(t.train_indices);
  j.at("validation_indices").get_to(t.validation_indices);
  j.at("records").get_to(t.records);
}

void to_json(Json& j, const PlantSpec& s) {
  j = Json{{"planted_channels", s.planted_channels},
           {"planted_band", s.planted_band},
           {"snr", s.snr},
           {"n_trials", s.n_trials},
           {"n_samples", s.n_samples},
           {"sample_rate_hz", s.sample_rate_hz},
           {"seed", s.seed},
           {"delta", s.delta},
           {"amplitude_jitter", s.amplitude_jitter},
           {"noise_jitter", s.noise_jitter},
           {"nuisance_jitter", s.nuisance_jitter},
           {"channel_names", s.channel_names}};
}
void from_json(const Json& j, PlantSpec& s) {
  if (j.contains("planted_channels")) {
    const auto& pc = j.at("planted_channels");
    // Either a mask string or a list of channel indices (needs n_channels).
    if (pc.is_string()) {
      s.planted_channels = ChannelSet::parse(pc.get<std::string>(), 1);
    } else {
      const auto n = j.value("n_channels", static_cast<int>(s.planted_channels.size()));
      s.planted_channels = ChannelSet::from_indices(static_cast<std::size_t>(n), pc.get<std::vector<std::size_t>>(), 1);
    }
  }
  read_opt(j, "planted_band", s.planted_band);
  read_opt(j, "snr", s.snr);
  read_opt(j, "n_trials", s.n_trials);
  read_opt(j, "n_samples", s.n_samples);
  read_opt(j, "sample_rate_hz", s.sample_rate_hz);
  read_opt(j, "seed", s.seed);
  read_opt(j, "delta", s.delta);
  read_opt(j, "amplitude_jitter", s.amplitude_jitter);
  read_opt(j, "noise_jitter", s.noise_jitter);
  read_opt(j, "nuisance_jitter", s.nuisance_jitter);
  read_opt(j, "channel_names", s.channel_names);
}

void to_json(Json& j, const DriftSchedule& s) {
  j = Json{{"sessions", s.sessions}, {"band_centers", s.band_centers}};
}
void from_json(const Json& j, DriftSchedule& s) {
  j.at("sessions").get_to(s.sessions);
  read_opt(j, "band_centers", s.band_centers);
}

void to_json(Json& j, const BandConstraintReport& r) {
  j = Json{{"cover_ok", r.cover_ok},
           {"length_ok", r.length_ok},
           {"overlap_ok", r.overlap_ok},
           {"equal_ok", r.equal_ok},
           {"coverage", r.coverage}};
}

void to_json(Json& j, const ImportanceProfile& p) {
  j = Json{{"session_index", p.session_index},
           {"channel_importance", p.channel_importance},
           {"band_importance", p.band_importance},
           {"channel_variance", p.channel_variance}};
}
void from_json(const Json& j, ImportanceProfile& p) {
  j.at("session_index").get_to(p.session_index);
  j.at("channel_importance").get_to(p.channel_importance);
  j.at("band_importance").get_to(p.band_importance);
  j.at("channel_variance").get_to(p.channel_variance);
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error("invalid " + what + ": " + e.what());
  }
}

void save_model(const AdditiveModel& m, const std::filesystem::path& path) {
  write_text_file(path, Json(m).dump(1) + "\n");
}

AdditiveModel load_model(const std::filesystem::path& path) {
  return json_as<AdditiveModel>(parse_json(read_text_file(path), "model file " + path.string()),
                                "model file " + path.string());
}

}  // namespace ssb
