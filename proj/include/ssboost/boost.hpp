#pragma once

#include "ssboost/core.hpp"
#include "ssboost/dsp.hpp"
#include "ssboost/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ssb {

/// Multiset of training positions, stored as per-position multiplicities.
class ResamplePool {
 public:
  /// One copy of every position 0..origin_size-1.
  explicit ResamplePool(std::size_t origin_size);
  static ResamplePool from_counts(std::vector<std::size_t> counts);

  std::size_t origin_size() const { return counts_.size(); }
  std::size_t size() const { return total_; }
  std::size_t multiplicity(std::size_t position) const { return counts_.at(position); }
  const std::vector<std::size_t>& counts() const { return counts_; }
  /// Expanded entries in ascending position order.
  std::vector<std::size_t> entries() const;

 private:
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

/// Squared-loss minimizer over a constant: mean(labels).
double init_intercept(std::span<const int> labels);

/// r = y - F under L = (y - F)^2 / 2.
std::vector<double> pseudo_residuals(std::span<const int> labels, std::span<const double> scores);

/// Uniform random permutation of the pool entries, first n_hat kept.
std::vector<std::size_t> draw_subset(const ResamplePool& pool, std::size_t n_hat, std::uint64_t seed);

struct CandidateScore {
  double rho = 0.0;
  double sse = 0.0;
};

/// Least-squares fit of residuals by rho * f over the subset; `outputs` and
/// `residuals` are indexed by training position.
CandidateScore score_candidate(std::span<const int> outputs, std::span<const std::size_t> subset,
                               std::span<const double> residuals);

/// Closed-form squared-loss step over the full training set.
double line_search_alpha(std::span<const int> labels, std::span<const double> prev_scores,
                         std::span<const int> outputs);

/// max(1, floor((1 - e) / (e + epsilon))).
int compute_duplication(double error, double epsilon);

/// Adds d*M copies of every misclassified position held M times, then
/// downsamples to `cap` keeping one copy of every position.
ResamplePool update_pool(const ResamplePool& pool, std::span<const std::size_t> misclassified, int d,
                         std::size_t cap, std::uint64_t seed);

/// Memoized preprocessing and base learners for one session. Band scatter
/// matrices are computed once per (band, trial) and shared by every channel
/// subset; learners are trained once per precondition on the training split.
class LearnerCache {
 public:
  struct Entry {
    std::optional<BaseLearner> learner;
    std::vector<int> outputs;  // hard output per dataset trial
    std::string failure;
  };

  LearnerCache(const SessionDataset& data, std::vector<std::size_t> train, const BoostConfig& config,
               unsigned threads);

  void ensure(std::span<const Precondition> preconditions);
  const Entry& get(const Precondition& p) const;
  std::size_t trained_count() const { return entries_.size(); }
  const std::vector<Eigen::MatrixXd>& band_scatters(const Band& b);

 private:
  void ensure_bands(std::span<const Precondition> preconditions);
  Entry train_entry(const Precondition& p) const;

  const SessionDataset& data_;
  std::vector<std::size_t> train_;
  BoostConfig config_;
  unsigned threads_;
  std::vector<TrialSpectrum> spectra_;
  std::map<Band, std::vector<Eigen::MatrixXd>> scatter_;
  std::map<std::string, Entry> entries_;
};

struct Selection {
  std::size_t candidate = 0;
  CandidateScore score;
};

/// Trains (or fetches) every candidate and returns the one with the smallest
/// residual SSE on the subset; ties go to the earlier candidate.
Selection select_base_learner(std::span<const Precondition> candidates, std::span<const std::size_t> subset,
                              std::span<const double> residuals, std::span<const std::size_t> train,
                              LearnerCache& cache);

struct TraceRecord {
  int iteration = 0;
  Precondition precondition;
  double alpha = 0.0;
  double rho = 0.0;
  double sse = 0.0;
  double training_error = 0.0;
  double training_loss = 0.0;
  int duplication = 0;
  std::size_t pool_size = 0;
  double validation_error = 0.0;
  std::size_t n_candidates = 0;
};

struct BoostTrace {
  double initial_loss = 0.0;
  double initial_validation_error = 0.0;
  std::vector<TraceRecord> records;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
};

struct TrainResult {
  AdditiveModel model;
  BoostTrace trace;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Stratified holdout: round(fraction * n_c) trials of each class, at least one
/// trial of each class kept for training.
SplitIndices stratified_split(std::span<const int> labels, double fraction, std::uint64_t seed);

TrainResult train_session(const SessionDataset& data, std::span<const Precondition> universe,
                          const BoostConfig& config, Mode mode, unsigned threads = 1);

}  // namespace ssb
