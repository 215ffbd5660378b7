#include "ssboost/synthgen.hpp"

#include "ssboost/dsp.hpp"
#include "ssboost/random.hpp"

#include <algorithm>
#include <cmath>

namespace ssb {

namespace {

// Number of FFT bins kept by the brickwall filter, counting both signs.
double kept_fraction(const Band& b, int n, double fs) {
  int kept = 0;
  for (int k = 0; k < n; ++k) {
    const double f = static_cast<double>(std::min(k, n - k)) * fs / n;
    if (f >= b.low_hz - 1e-9 && f <= b.high_hz + 1e-9) ++kept;
  }
  return static_cast<double>(kept) / n;
}

// Band-limited Gaussian noise with unit expected power.
Eigen::MatrixXd unit_band_noise(Rng& rng, int n, int channels, const Band& b, double fs, double kept) {
  Eigen::MatrixXd white(n, channels);
  for (int c = 0; c < channels; ++c)
    for (int i = 0; i < n; ++i) white(i, c) = rng.normal();
  return bandpass_samples(white, b, fs) / std::sqrt(kept);
}

double lognormal_gain(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 1.0;
  // E[gain^2] = 1.
  return std::exp(sigma * rng.normal() - sigma * sigma);
}

}  // namespace

std::vector<std::string> default_channel_names(std::size_t n_channels) {
  static const std::vector<std::string> montage{"C5", "C6", "FC3", "FC4", "C3", "C4",
                                                "CP3", "CP4", "P3", "P4", "C1", "C2"};
  if (n_channels == montage.size()) return montage;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_channels; ++i) names.push_back("Ch" + std::to_string(i + 1));
  return names;
}

void PlantSpec::validate() const {
  if (planted_channels.size() == 0) throw Error("plant spec has no channels");
  if (planted_channels.count() == 0) throw Error("plant spec has no planted channels");
  require_valid_band(planted_band);
  if (!(snr > 0.0) || !std::isfinite(snr)) throw Error("snr must be positive");
  if (n_trials < 2 || n_trials % 2 != 0) throw Error("n_trials must be even and >= 2");
  if (n_samples < 2) throw Error("n_samples must be >= 2");
  if (!(sample_rate_hz > 2.0 * kGlobalHighHz)) throw Error("band above Nyquist");
  if (!(delta >= 0.0 && delta < 1.0)) throw Error("delta must be in [0, 1)");
  if (amplitude_jitter < 0.0 || noise_jitter < 0.0 || nuisance_jitter < 0.0) throw Error("jitter must be non-negative");
  if (!channel_names.empty() && channel_names.size() != n_channels())
    throw Error("channel name count does not match planted mask length");
}

void DriftSchedule::validate() const {
  if (sessions.empty()) throw Error("drift schedule has no sessions");
  for (const auto& s : sessions) {
    s.validate();
    if (s.n_channels() != sessions.front().n_channels()) throw Error("drift sessions differ in channel count");
  }
}

SessionDataset generate_session(const PlantSpec& spec, int session_index) {
  spec.validate();
  const int n = spec.n_samples;
  const int channels = static_cast<int>(spec.n_channels());
  const double fs = spec.sample_rate_hz;
  Rng rng(mix_seed(spec.seed, Stream::generator));

  std::vector<int> labels(static_cast<std::size_t>(spec.n_trials));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i < labels.size() / 2 ? kLeft : kRight;
  rng.shuffle(std::span<int>(labels));

  const double noise_kept = kept_fraction(kGlobalBand, n, fs);
  const double source_kept = kept_fraction(spec.planted_band, n, fs);
  // snr is mean in-band source power over in-band noise power on a planted channel.
  const double base_amplitude =
      std::sqrt(spec.snr * source_kept / noise_kept / (1.0 + spec.delta * spec.delta));
  const auto planted = spec.planted_channels.indices();

  SessionDataset d;
  d.sample_rate_hz = fs;
  d.session_index = session_index;
  d.channel_names = spec.channel_names.empty() ? default_channel_names(spec.n_channels()) : spec.channel_names;
  d.trials.reserve(labels.size());
  for (int label : labels) {
    Eigen::MatrixXd x = unit_band_noise(rng, n, channels, kGlobalBand, fs, noise_kept);
    for (int c = 0; c < channels; ++c) {
      const bool is_planted = spec.planted_channels.contains(static_cast<std::size_t>(c));
      x.col(c) *= lognormal_gain(rng, is_planted ? spec.noise_jitter : spec.nuisance_jitter);
    }
    const double modulation = label == kRight ? 1.0 + spec.delta : 1.0 - spec.delta;
    const Eigen::VectorXd source = unit_band_noise(rng, n, 1, spec.planted_band, fs, source_kept).col(0);
    const double amplitude = base_amplitude * modulation * lognormal_gain(rng, spec.amplitude_jitter);
    for (std::size_t c : planted) x.col(static_cast<Eigen::Index>(c)) += amplitude * source;
    d.trials.push_back(make_trial(std::move(x), label));
  }
  return d;
}

DriftSchedule generate_drift_series(int n_sessions, const Band& start_band, const Band& end_band,
                                    const ChannelSet& start_channels, const ChannelSet& end_channels,
                                    const PlantSpec& base) {
  if (n_sessions < 2) throw Error("drift series needs at least 2 sessions");
  if (start_band.width() != end_band.width()) throw Error("incompatible band widths");
  require_valid_band(start_band);
  require_valid_band(end_band);
  if (start_channels.size() != end_channels.size()) throw Error("channel masks differ in length");
  if (start_channels.count() != end_channels.count()) throw Error("channel sets differ in size");

  std::vector<std::size_t> leaving, arriving;
  for (std::size_t c = 0; c < start_channels.size(); ++c) {
    if (start_channels.contains(c) && !end_channels.contains(c)) leaving.push_back(c);
    if (!start_channels.contains(c) && end_channels.contains(c)) arriving.push_back(c);
  }

  DriftSchedule schedule;
  const int width = start_band.width();
  for (int t = 0; t < n_sessions; ++t) {
    const double frac = static_cast<double>(t) / (n_sessions - 1);
    const int low = static_cast<int>(std::floor(start_band.low_hz + (end_band.low_hz - start_band.low_hz) * frac + 0.5));
    const auto swapped = static_cast<std::size_t>(std::floor(static_cast<double>(leaving.size()) * frac + 0.5));
    std::vector<bool> mask = start_channels.mask();
    for (std::size_t j = 0; j < swapped; ++j) {
      mask[leaving[j]] = false;
      mask[arriving[j]] = true;
    }
    PlantSpec s = base;
    s.planted_band = Band{low, low + width};
    s.planted_channels = ChannelSet(std::move(mask), 1);
    s.seed = base.seed + static_cast<std::uint64_t>(t);
    schedule.sessions.push_back(std::move(s));
    schedule.band_centers.push_back(low + 0.5 * width);
  }
  schedule.validate();
  return schedule;
}

}  // namespace ssb
