#pragma once

#include "ssboost/analysis.hpp"
#include "ssboost/boost.hpp"
#include "ssboost/precondition.hpp"
#include "ssboost/serialization.hpp"
#include "ssboost/synthgen.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ssb {

struct Evaluation {
  std::size_t n = 0;
  std::size_t true_positive = 0;   // label +1 predicted +1
  std::size_t true_negative = 0;   // label -1 predicted -1
  std::size_t false_positive = 0;  // label -1 predicted +1
  std::size_t false_negative = 0;  // label +1 predicted -1

  double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(true_positive + true_negative) / n; }
};

Evaluation evaluate(const AdditiveModel& model, const SessionDataset& data, unsigned threads = 1);
Json to_json(const Evaluation& e);

/// First `numerator/denominator` of trials (by order) for training, rest for test.
std::pair<SessionDataset, SessionDataset> split_by_order(const SessionDataset& d, int numerator = 7, int denominator = 8);

/// Accepts a PlantSpec, a DriftSchedule ({"sessions": [...]}) or a drift
/// request ({"n_sessions", "start_band", "end_band", "start_channels",
/// "end_channels", "base"}).
DriftSchedule schedule_from_json(const Json& j);

/// Rows: session, one column per channel, per unit bin, variance, band_com.
std::string importance_csv(std::span<const ImportanceProfile> profiles, const std::vector<std::string>& channel_names);

/// Per-channel and per-bin drift series plus the band center-of-mass trend.
Json drift_summary(std::span<const ImportanceProfile> profiles, const std::vector<std::string>& channel_names);

/// Shortest round-trip formatting used by every CSV writer.
std::string format_number(double v);

struct ExperimentConfig {
  std::vector<std::filesystem::path> inputs;
  std::optional<DriftSchedule> schedule;
  std::vector<Mode> modes{Mode::Plain, Mode::SFB};
  BoostConfig boost;
  UniverseConfig universe;
  std::filesystem::path output_dir = "experiment_out";
  bool absolute_importance = false;
};

/// Relative paths resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const Json& j, const std::filesystem::path& base_dir);

struct ExperimentResult {
  std::vector<int> sessions;
  std::vector<Mode> modes;
  /// accuracy[session][mode]
  std::vector<std::vector<double>> accuracy;
  std::filesystem::path output_dir;
};

using Logger = std::function<void(const std::string&)>;

/// For every session: 7/8 train, 1/8 test by trial order; trains every
/// requested mode, writes models, traces, accuracy.csv and importance exports.
/// Outputs are staged and moved into place only on success.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads, const Logger& log = {});

}  // namespace ssb
