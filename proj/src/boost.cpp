#include "ssboost/boost.hpp"

#include "ssboost/parallel.hpp"
#include "ssboost/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssb {

ResamplePool::ResamplePool(std::size_t origin_size) : counts_(origin_size, 1), total_(origin_size) {}

ResamplePool ResamplePool::from_counts(std::vector<std::size_t> counts) {
  ResamplePool pool(0);
  pool.total_ = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  pool.counts_ = std::move(counts);
  return pool;
}

std::vector<std::size_t> ResamplePool::entries() const {
  std::vector<std::size_t> out;
  out.reserve(total_);
  for (std::size_t i = 0; i < counts_.size(); ++i) out.insert(out.end(), counts_[i], i);
  return out;
}

double init_intercept(std::span<const int> labels) {
  if (labels.empty()) throw Error("no labels");
  double sum = 0.0;
  for (int y : labels) sum += y;
  return sum / static_cast<double>(labels.size());
}

std::vector<double> pseudo_residuals(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw Error("labels and scores differ in length");
  std::vector<double> r(labels.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = labels[i] - scores[i];
  return r;
}

std::vector<std::size_t> draw_subset(const ResamplePool& pool, std::size_t n_hat, std::uint64_t seed) {
  if (n_hat > pool.size()) throw Error("subset larger than pool");
  auto entries = pool.entries();
  Rng rng(seed);
  rng.partial_shuffle(std::span<std::size_t>(entries), n_hat);
  entries.resize(n_hat);
  return entries;
}

CandidateScore score_candidate(std::span<const int> outputs, std::span<const std::size_t> subset,
                               std::span<const double> residuals) {
  if (subset.empty()) throw Error("empty subset");
  double rf = 0.0, ff = 0.0;
  for (auto i : subset) {
    rf += residuals[i] * outputs[i];
    ff += static_cast<double>(outputs[i]) * outputs[i];
  }
  const double rho = ff > 0.0 ? rf / ff : 0.0;
  double sse = 0.0;
  for (auto i : subset) {
    const double e = residuals[i] - rho * outputs[i];
    sse += e * e;
  }
  return {rho, sse};
}

double line_search_alpha(std::span<const int> labels, std::span<const double> prev_scores,
                         std::span<const int> outputs) {
  if (labels.size() != prev_scores.size() || labels.size() != outputs.size())
    throw Error("line search inputs differ in length");
  double rf = 0.0, ff = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    rf += (labels[i] - prev_scores[i]) * outputs[i];
    ff += static_cast<double>(outputs[i]) * outputs[i];
  }
  return ff > 0.0 ? rf / ff : 0.0;
}

int compute_duplication(double error, double epsilon) {
  if (!(error >= 0.0 && error <= 1.0)) throw Error("error rate must be in [0, 1]");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  const double ratio = std::floor((1.0 - error) / (error + epsilon));
  return static_cast<int>(std::max(1.0, ratio));
}

ResamplePool update_pool(const ResamplePool& pool, std::span<const std::size_t> misclassified, int d,
                         std::size_t cap, std::uint64_t seed) {
  auto counts = pool.counts();
  for (auto i : misclassified) {
    if (i >= counts.size()) throw Error("misclassified position out of range");
  }
  // Each position counted once even if listed twice.
  std::vector<bool> seen(counts.size(), false);
  for (auto i : misclassified) {
    if (seen[i]) continue;
    seen[i] = true;
    counts[i] += static_cast<std::size_t>(d) * pool.counts()[i];
  }
  auto grown = ResamplePool::from_counts(counts);
  if (grown.size() <= cap || cap < counts.size()) return grown;

  std::vector<std::size_t> excess;
  excess.reserve(grown.size() - counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) excess.insert(excess.end(), counts[i] - 1, i);
  const std::size_t keep = cap - counts.size();
  Rng rng(seed);
  rng.partial_shuffle(std::span<std::size_t>(excess), keep);
  std::vector<std::size_t> reduced(counts.size(), 1);
  for (std::size_t j = 0; j < keep; ++j) ++reduced[excess[j]];
  return ResamplePool::from_counts(std::move(reduced));
}

LearnerCache::LearnerCache(const SessionDataset& data, std::vector<std::size_t> train, const BoostConfig& config,
                           unsigned threads)
    : data_(data), train_(std::move(train)), config_(config), threads_(threads) {
  std::vector<std::optional<TrialSpectrum>> spectra(data.trials.size());
  parallel_for(spectra.size(), threads_, [&](std::size_t i) {
    spectra[i].emplace(detrend(data.trials[i]).samples, data.sample_rate_hz);
  });
  spectra_.reserve(spectra.size());
  for (auto& s : spectra) spectra_.push_back(std::move(*s));
}

const std::vector<Eigen::MatrixXd>& LearnerCache::band_scatters(const Band& b) {
  auto it = scatter_.find(b);
  if (it != scatter_.end()) return it->second;
  std::vector<Eigen::MatrixXd> per_trial(spectra_.size());
  parallel_for(per_trial.size(), threads_, [&](std::size_t i) { per_trial[i] = spectra_[i].band_scatter(b); });
  return scatter_.emplace(b, std::move(per_trial)).first->second;
}

void LearnerCache::ensure_bands(std::span<const Precondition> preconditions) {
  for (const auto& p : preconditions) band_scatters(p.band);
}

LearnerCache::Entry LearnerCache::train_entry(const Precondition& p) const {
  Entry entry;
  try {
    const auto& scatters = scatter_.at(p.band);
    const auto m = static_cast<Eigen::Index>(p.channels.count());
    std::vector<Eigen::MatrixXd> sub(scatters.size());
    for (std::size_t i = 0; i < scatters.size(); ++i) sub[i] = project_scatter(scatters[i], p.channels);

    Eigen::MatrixXd left = Eigen::MatrixXd::Zero(m, m), right = Eigen::MatrixXd::Zero(m, m);
    std::size_t n_left = 0, n_right = 0;
    for (auto i : train_) {
      const double tr = sub[i].trace();
      if (!(tr > 0.0)) throw Error("degenerate trial");
      if (data_.trials[i].label == kLeft) {
        left += sub[i] / tr;
        ++n_left;
      } else {
        right += sub[i] / tr;
        ++n_right;
      }
    }
    if (n_left == 0 || n_right == 0) throw Error("single-class training set");
    const CspModel csp = fit_csp_from_covariances(left / static_cast<double>(n_left),
                                                  right / static_cast<double>(n_right), config_.csp_dim);

    Eigen::MatrixXd features(static_cast<Eigen::Index>(sub.size()), csp.csp_dim);
    for (std::size_t i = 0; i < sub.size(); ++i)
      features.row(static_cast<Eigen::Index>(i)) = features_from_scatter(csp, sub[i]).transpose();
    Eigen::MatrixXd train_features(static_cast<Eigen::Index>(train_.size()), csp.csp_dim);
    std::vector<int> train_labels;
    train_labels.reserve(train_.size());
    for (std::size_t j = 0; j < train_.size(); ++j) {
      train_features.row(static_cast<Eigen::Index>(j)) = features.row(static_cast<Eigen::Index>(train_[j]));
      train_labels.push_back(data_.trials[train_[j]].label);
    }
    const auto seed = mix_seed(config_.rng_seed, Stream::learner, hash_key(p.key()));
    LinearModel linear = train_linear(train_features, train_labels, config_.svm_cost, seed);

    entry.outputs.resize(sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i)
      entry.outputs[i] = predict_label(linear, features.row(static_cast<Eigen::Index>(i)).transpose());
    entry.learner = BaseLearner{csp, std::move(linear)};
  } catch (const Error& e) {
    entry.learner.reset();
    entry.outputs.clear();
    entry.failure = e.what();
  }
  return entry;
}

void LearnerCache::ensure(std::span<const Precondition> preconditions) {
  std::vector<const Precondition*> missing;
  for (const auto& p : preconditions)
    if (!entries_.contains(p.key())) missing.push_back(&p);
  if (missing.empty()) return;
  ensure_bands(preconditions);
  std::vector<Entry> trained(missing.size());
  parallel_for(missing.size(), threads_, [&](std::size_t i) { trained[i] = train_entry(*missing[i]); });
  for (std::size_t i = 0; i < missing.size(); ++i) entries_.emplace(missing[i]->key(), std::move(trained[i]));
}

const LearnerCache::Entry& LearnerCache::get(const Precondition& p) const {
  auto it = entries_.find(p.key());
  if (it == entries_.end()) throw Error("precondition not trained: " + p.key());
  return it->second;
}

Selection select_base_learner(std::span<const Precondition> candidates, std::span<const std::size_t> subset,
                              std::span<const double> residuals, std::span<const std::size_t> train,
                              LearnerCache& cache) {
  if (candidates.empty()) throw Error("no candidates");
  cache.ensure(candidates);
  std::optional<Selection> best;
  std::vector<int> outputs(train.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& entry = cache.get(candidates[c]);
    if (!entry.learner) continue;
    for (std::size_t j = 0; j < train.size(); ++j) outputs[j] = entry.outputs[train[j]];
    const auto score = score_candidate(outputs, subset, residuals);
    if (!best || score.sse < best->score.sse) best = Selection{c, score};
  }
  if (!best) throw Error("no viable candidate");
  return *best;
}

SplitIndices stratified_split(std::span<const int> labels, double fraction, std::uint64_t seed) {
  SplitIndices split;
  std::vector<bool> is_validation(labels.size(), false);
  Rng rng(seed);
  for (int cls : {kLeft, kRight}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    if (members.empty()) continue;
    auto n_val = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size()) + 0.5));
    n_val = std::min(n_val, members.size() - 1);
    rng.partial_shuffle(std::span<std::size_t>(members), n_val);
    for (std::size_t j = 0; j < n_val; ++j) is_validation[members[j]] = true;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) (is_validation[i] ? split.validation : split.train).push_back(i);
  return split;
}

namespace {

double squared_loss(std::span<const int> y, std::span<const double> f) {
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) loss += 0.5 * (y[i] - f[i]) * (y[i] - f[i]);
  return loss;
}

double error_rate(std::span<const int> y, std::span<const double> f) {
  if (y.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < y.size(); ++i) wrong += sign_label(f[i]) != y[i];
  return static_cast<double>(wrong) / static_cast<double>(y.size());
}

}  // namespace

TrainResult train_session(const SessionDataset& data, std::span<const Precondition> universe,
                          const BoostConfig& config, Mode mode, unsigned threads) {
  config.validate();
  require_valid(data, true);
  if (universe.empty()) throw Error("empty precondition universe");
  for (const auto& p : universe)
    if (p.channels.size() != static_cast<std::size_t>(data.n_channels()))
      throw Error("precondition mask length does not match dataset channels");

  std::vector<Precondition> ordered(universe.begin(), universe.end());
  std::sort(ordered.begin(), ordered.end(), canonical_less);
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
  const Precondition anchor{ChannelSet::full(static_cast<std::size_t>(data.n_channels())), kGlobalBand, mode};
  const auto anchor_it = std::find(ordered.begin(), ordered.end(), anchor);
  const std::optional<std::size_t> anchor_pos =
      anchor_it == ordered.end() ? std::nullopt
                                 : std::optional<std::size_t>(static_cast<std::size_t>(anchor_it - ordered.begin()));

  const auto labels = data.labels();
  auto split = stratified_split(labels, config.validation_fraction, mix_seed(config.rng_seed, Stream::split));

  TrainResult result;
  auto& model = result.model;
  auto& trace = result.trace;
  trace.train_indices = split.train;
  trace.validation_indices = split.validation;

  std::vector<int> y_train, y_val;
  for (auto i : split.train) y_train.push_back(labels[i]);
  for (auto i : split.validation) y_val.push_back(labels[i]);
  const std::size_t n = y_train.size();

  model.intercept = init_intercept(y_train);
  model.mode = mode;
  model.sample_rate_hz = data.sample_rate_hz;
  model.channel_names = data.channel_names;

  std::vector<double> f_train(n, model.intercept), f_val(y_val.size(), model.intercept);
  trace.initial_loss = squared_loss(y_train, f_train);
  trace.initial_validation_error = error_rate(y_val, f_val);

  LearnerCache cache(data, split.train, config, threads);
  ResamplePool pool(n);
  const auto n_hat = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(config.subset_fraction * static_cast<double>(n) + 0.5)), 1, n);
  const std::size_t cap = static_cast<std::size_t>(config.pool_cap_multiple) * n;
  const auto sample_size = static_cast<std::size_t>(config.candidate_sample_size);

  double best_val = trace.initial_validation_error;
  int best_k = 0;
  double loss = trace.initial_loss;

  for (int k = 1; k <= config.k_max; ++k) {
    const auto subset = draw_subset(pool, n_hat, mix_seed(config.rng_seed, Stream::subset, static_cast<std::uint64_t>(k)));

    std::vector<Precondition> candidates;
    if (sample_size >= ordered.size()) {
      candidates = ordered;
    } else {
      std::vector<std::size_t> positions(ordered.size());
      std::iota(positions.begin(), positions.end(), std::size_t{0});
      Rng rng(mix_seed(config.rng_seed, Stream::candidates, static_cast<std::uint64_t>(k)));
      rng.partial_shuffle(std::span<std::size_t>(positions), sample_size);
      positions.resize(sample_size);
      if (anchor_pos && std::find(positions.begin(), positions.end(), *anchor_pos) == positions.end())
        positions.push_back(*anchor_pos);
      std::sort(positions.begin(), positions.end());
      for (auto pos : positions) candidates.push_back(ordered[pos]);
    }

    const auto residuals = pseudo_residuals(y_train, f_train);
    const auto chosen = select_base_learner(candidates, subset, residuals, split.train, cache);
    const auto& precondition = candidates[chosen.candidate];
    const auto& entry = cache.get(precondition);

    std::vector<int> out_train(n), out_val(y_val.size());
    for (std::size_t j = 0; j < n; ++j) out_train[j] = entry.outputs[split.train[j]];
    for (std::size_t j = 0; j < y_val.size(); ++j) out_val[j] = entry.outputs[split.validation[j]];

    const double alpha = line_search_alpha(y_train, f_train, out_train);
    for (std::size_t j = 0; j < n; ++j) f_train[j] += alpha * out_train[j];
    for (std::size_t j = 0; j < y_val.size(); ++j) f_val[j] += alpha * out_val[j];

    std::vector<std::size_t> misclassified;
    for (std::size_t j = 0; j < n; ++j)
      if (sign_label(f_train[j]) != y_train[j]) misclassified.push_back(j);
    const double e = static_cast<double>(misclassified.size()) / static_cast<double>(n);
    const int d = compute_duplication(e, config.epsilon);
    pool = update_pool(pool, misclassified, d, cap, mix_seed(config.rng_seed, Stream::pool, static_cast<std::uint64_t>(k)));

    loss = squared_loss(y_train, f_train);
    const double val_error = error_rate(y_val, f_val);

    Precondition stored = precondition;
    stored.mode = mode;
    model.terms.push_back(ModelTerm{alpha, *entry.learner, stored});
    trace.records.push_back(TraceRecord{k, stored, alpha, chosen.score.rho, chosen.score.sse, e, loss, d, pool.size(),
                                        val_error, candidates.size()});
    if (!y_val.empty() && val_error < best_val) {
      best_val = val_error;
      best_k = k;
    }
  }
  model.selected_k = y_val.empty() ? static_cast<int>(model.terms.size()) : best_k;
  return result;
}

}  // namespace ssb
