#include "ssboost/experiment.hpp"

#include "ssboost/io.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ssb {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Evaluation evaluate(const AdditiveModel& model, const SessionDataset& data, unsigned threads) {
  const auto predictions = predict_all(model, data, threads);
  Evaluation e;
  e.n = predictions.size();
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int y = data.trials[i].label;
    const int p = predictions[i].label;
    if (y == kRight) (p == kRight ? e.true_positive : e.false_negative)++;
    else (p == kLeft ? e.true_negative : e.false_positive)++;
  }
  return e;
}

Json to_json(const Evaluation& e) {
  return Json{{"n", e.n},
              {"accuracy", e.accuracy()},
              {"confusion",
               {{"true_positive", e.true_positive},
                {"true_negative", e.true_negative},
                {"false_positive", e.false_positive},
                {"false_negative", e.false_negative}}}};
}

std::pair<SessionDataset, SessionDataset> split_by_order(const SessionDataset& d, int numerator, int denominator) {
  if (numerator <= 0 || denominator <= numerator) throw Error("invalid split ratio");
  const std::size_t n_train = d.trials.size() * static_cast<std::size_t>(numerator) / static_cast<std::size_t>(denominator);
  SessionDataset train = d, test = d;
  train.trials.assign(d.trials.begin(), d.trials.begin() + static_cast<std::ptrdiff_t>(n_train));
  test.trials.assign(d.trials.begin() + static_cast<std::ptrdiff_t>(n_train), d.trials.end());
  if (train.trials.empty() || test.trials.empty()) throw Error("session too small to split");
  return {std::move(train), std::move(test)};
}

DriftSchedule schedule_from_json(const Json& j) {
  if (j.contains("sessions")) {
    auto s = json_as<DriftSchedule>(j, "drift schedule");
    if (s.band_centers.empty())
      for (const auto& p : s.sessions) s.band_centers.push_back(0.5 * (p.planted_band.low_hz + p.planted_band.high_hz));
    s.validate();
    return s;
  }
  if (j.contains("n_sessions")) {
    const auto base = json_as<PlantSpec>(j.value("base", Json::object()), "drift base spec");
    const auto n = base.n_channels();
    auto channels = [&](const char* key) {
      const auto& v = j.at(key);
      if (v.is_string()) return ChannelSet::parse(v.get<std::string>(), 1);
      return ChannelSet::from_indices(n, v.get<std::vector<std::size_t>>(), 1);
    };
    try {
      return generate_drift_series(j.at("n_sessions").get<int>(), j.at("start_band").get<Band>(),
                                   j.at("end_band").get<Band>(), channels("start_channels"),
                                   channels("end_channels"), base);
    } catch (const Json::exception& e) {
      throw Error(std::string("invalid drift request: ") + e.what());
    }
  }
  DriftSchedule s;
  s.sessions.push_back(json_as<PlantSpec>(j, "plant spec"));
  const auto& b = s.sessions.front().planted_band;
  s.band_centers.push_back(0.5 * (b.low_hz + b.high_hz));
  s.validate();
  return s;
}

std::string importance_csv(std::span<const ImportanceProfile> profiles, const std::vector<std::string>& channel_names) {
  std::ostringstream out;
  out << "session";
  for (const auto& c : channel_names) out << ',' << c;
  for (int u = 0; u < kBandBins; ++u) out << ",hz_" << (kGlobalLowHz + u) << '_' << (kGlobalLowHz + u + 1);
  out << ",variance,band_com\n";
  for (const auto& p : profiles) {
    out << p.session_index;
    for (double v : p.channel_importance) out << ',' << format_number(v);
    for (double v : p.band_importance) out << ',' << format_number(v);
    out << ',' << format_number(p.channel_variance);
    const double total = std::accumulate(p.band_importance.begin(), p.band_importance.end(), 0.0);
    out << ',' << format_number(total != 0.0 ? band_center_of_mass(p.band_importance) : std::nan(""));
    out << '\n';
  }
  return out.str();
}

Json drift_summary(std::span<const ImportanceProfile> profiles, const std::vector<std::string>& channel_names) {
  Json j;
  std::vector<double> sessions, coms, variances;
  for (const auto& p : profiles) {
    sessions.push_back(p.session_index);
    const double total = std::accumulate(p.band_importance.begin(), p.band_importance.end(), 0.0);
    coms.push_back(total != 0.0 ? band_center_of_mass(p.band_importance) : std::nan(""));
    variances.push_back(p.channel_variance);
  }
  j["sessions"] = sessions;
  j["band_com"] = Json::array();
  for (double c : coms) j["band_com"].push_back(std::isnan(c) ? Json(nullptr) : Json(c));
  j["channel_variance"] = variances;
  if (profiles.size() < 2) return j;

  bool com_defined = std::none_of(coms.begin(), coms.end(), [](double c) { return std::isnan(c); });
  if (com_defined) {
    const auto rho = spearman(sessions, coms);
    j["band_com_spearman"] = rho ? Json(*rho) : Json(0.0);
    j["band_com_constant"] = !rho.has_value();
  }

  std::vector<ImportanceTarget> targets;
  for (std::size_t c = 0; c < channel_names.size(); ++c) targets.push_back({TargetKind::Channel, c});
  for (int u = 0; u < kBandBins; ++u) targets.push_back({TargetKind::Bin, static_cast<std::size_t>(u)});
  const auto series = temporal_differences(profiles, targets);
  Json channels = Json::object(), bins = Json::object();
  for (const auto& s : series) {
    Json entry{{"differences", s.differences}, {"spearman", s.spearman}, {"constant", s.constant}};
    if (s.target.kind == TargetKind::Channel) channels[channel_names[s.target.index]] = std::move(entry);
    else bins["hz_" + std::to_string(kGlobalLowHz + static_cast<int>(s.target.index))] = std::move(entry);
  }
  j["channels"] = std::move(channels);
  j["bins"] = std::move(bins);
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  try {
    if (j.contains("inputs"))
      for (const auto& p : j.at("inputs")) c.inputs.push_back(resolve(p.get<std::string>()));
    if (j.contains("drift")) c.schedule = schedule_from_json(j.at("drift"));
    if (c.inputs.empty() == !c.schedule.has_value())
      throw Error("experiment config needs exactly one of 'inputs' or 'drift'");
    if (j.contains("modes")) {
      c.modes.clear();
      for (const auto& m : j.at("modes")) c.modes.push_back(parse_mode(m.get<std::string>()));
      if (c.modes.empty()) throw Error("experiment config lists no modes");
    }
    if (j.contains("boost")) c.boost = json_as<BoostConfig>(j.at("boost"), "boost config");
    if (j.contains("universe")) c.universe = json_as<UniverseConfig>(j.at("universe"), "universe config");
    if (j.contains("seed")) {
      const auto seed = j.at("seed").get<std::uint64_t>();
      c.boost.rng_seed = seed;
      c.universe.seed = seed;
    }
    c.output_dir = resolve(j.value("output_dir", std::string("experiment_out")));
    c.absolute_importance = j.value("absolute_importance", false);
  } catch (const Json::exception& e) {
    throw Error(std::string("invalid experiment config: ") + e.what());
  }
  c.boost.validate();
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads, const Logger& log) {
  config.boost.validate();
  auto say = [&](const std::string& m) {
    if (log) log(m);
  };

  // Inputs are checked before anything is written.
  std::vector<SessionDataset> sessions;
  if (config.schedule) {
    for (std::size_t t = 0; t < config.schedule->sessions.size(); ++t)
      sessions.push_back(generate_session(config.schedule->sessions[t], static_cast<int>(t)));
  } else {
    for (std::size_t t = 0; t < config.inputs.size(); ++t) {
      if (!fs::exists(config.inputs[t])) throw Error("input file not found: " + config.inputs[t].string());
      sessions.push_back(read_eegb(config.inputs[t], static_cast<int>(t)));
    }
  }

  const fs::path final_dir = config.output_dir;
  const fs::path staging = final_dir.string() + ".partial";
  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directories(staging / "models", ec);
  if (ec) throw Error("cannot create " + staging.string() + ": " + ec.message());
  fs::create_directories(staging / "traces");

  ExperimentResult result;
  result.modes = config.modes;
  result.output_dir = final_dir;
  try {
    std::vector<std::vector<ImportanceProfile>> profiles(config.modes.size());
    std::vector<std::string> channel_names;
    for (const auto& session : sessions) {
      const int t = session.session_index;
      require_valid(session, true);
      if (channel_names.empty()) channel_names = session.channel_names;
      else if (channel_names != session.channel_names) throw Error("sessions use different channel names");
      auto [train, test] = split_by_order(session);
      result.sessions.push_back(t);
      result.accuracy.emplace_back();
      for (std::size_t m = 0; m < config.modes.size(); ++m) {
        const Mode mode = config.modes[m];
        UniverseConfig ucfg = config.universe;
        ucfg.n_channels = static_cast<int>(session.n_channels());
        ucfg.min_channels = config.boost.min_channels;
        const auto universe = build_universe(mode, ucfg);
        const auto trained = train_session(train, universe, config.boost, mode, threads);
        const auto eval = evaluate(trained.model, test, threads);
        result.accuracy.back().push_back(eval.accuracy());
        const std::string stem = "session_" + std::to_string(t) + "_" + to_string(mode);
        save_model(trained.model, staging / "models" / (stem + ".json"));
        Json trace = trained.trace;
        trace["evaluation"] = to_json(eval);
        write_text_file(staging / "traces" / (stem + ".json"), trace.dump(1) + "\n");
        profiles[m].push_back(make_profile(trained.model, t, ImportanceOptions{config.absolute_importance}));
        say("session " + std::to_string(t) + " " + to_string(mode) + ": selected_k=" +
            std::to_string(trained.model.selected_k) + " accuracy=" + format_number(eval.accuracy()));
      }
    }

    std::ostringstream acc;
    acc << "session";
    for (auto m : config.modes) acc << ',' << to_string(m);
    acc << '\n';
    for (std::size_t s = 0; s < result.sessions.size(); ++s) {
      acc << result.sessions[s];
      for (double a : result.accuracy[s]) acc << ',' << format_number(a);
      acc << '\n';
    }
    write_text_file(staging / "accuracy.csv", acc.str());

    for (std::size_t m = 0; m < config.modes.size(); ++m) {
      const auto name = to_string(config.modes[m]);
      write_text_file(staging / ("importance_" + name + ".csv"), importance_csv(profiles[m], channel_names));
      write_text_file(staging / ("drift_" + name + ".json"), drift_summary(profiles[m], channel_names).dump(1) + "\n");
    }

    fs::remove_all(final_dir, ec);
    fs::rename(staging, final_dir, ec);
    if (ec) throw Error("cannot move outputs into " + final_dir.string() + ": " + ec.message());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  return result;
}

}  // namespace ssb
