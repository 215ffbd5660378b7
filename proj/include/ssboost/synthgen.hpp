#pragma once

#include "ssboost/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ssb {

/// Electrode names of the default 12-channel montage.
std::vector<std::string> default_channel_names(std::size_t n_channels = 12);

/// Ground truth for one synthetic session.
struct PlantSpec {
  ChannelSet planted_channels = ChannelSet::from_indices(12, {0, 8}, 1);
  Band planted_band{25, 35};
  /// Mean power of the planted source over the noise power inside the planted
  /// band, on a planted channel.
  double snr = 5.0;
  int n_trials = 120;
  int n_samples = 1024;
  double sample_rate_hz = 256.0;
  std::uint64_t seed = 1;
  /// Class modulation: amplitude a(1 + delta) for +1, a(1 - delta) for -1.
  double delta = 0.5;
  /// Log-normal spread of the per-trial source amplitude.
  double amplitude_jitter = 0.15;
  /// Log-normal spread of the per-trial noise gain on planted channels.
  double noise_jitter = 0.3;
  /// Same, on the remaining channels.
  double nuisance_jitter = 0.6;
  std::vector<std::string> channel_names;  // empty: default montage names

  std::size_t n_channels() const { return planted_channels.size(); }
  void validate() const;
};

struct DriftSchedule {
  std::vector<PlantSpec> sessions;
  std::vector<double> band_centers;

  void validate() const;
};

/// Broadband unit-power noise on every channel plus one class-modulated
/// narrowband source shared by the planted channels. Labels are balanced and
/// shuffled; output depends only on the spec (including its seed).
SessionDataset generate_session(const PlantSpec& spec, int session_index = 0);

/// Linear interpolation of the planted band (rounded half up, width kept) and
/// stepwise migration from start_channels to end_channels. Session t uses
/// seed base.seed + t.
DriftSchedule generate_drift_series(int n_sessions, const Band& start_band, const Band& end_band,
                                    const ChannelSet& start_channels, const ChannelSet& end_channels,
                                    const PlantSpec& base);

}  // namespace ssb
