#pragma once

#include "ssboost/core.hpp"
#include "ssboost/random.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

namespace testing {

inline Eigen::MatrixXd white_noise(std::uint64_t seed, Eigen::Index n, Eigen::Index channels) {
  ssb::Rng rng(seed);
  Eigen::MatrixXd m(n, channels);
  for (Eigen::Index c = 0; c < channels; ++c)
    for (Eigen::Index i = 0; i < n; ++i) m(i, c) = rng.normal();
  return m;
}

inline Eigen::VectorXd sine(Eigen::Index n, double hz, double fs, double amplitude = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * i / fs);
  return v;
}

inline double power(const Eigen::MatrixXd& m) { return m.squaredNorm() / static_cast<double>(m.size()); }

inline ssb::SessionDataset noise_dataset(std::uint64_t seed, int n_trials, Eigen::Index n, Eigen::Index channels) {
  ssb::SessionDataset d;
  d.sample_rate_hz = 256.0;
  for (Eigen::Index c = 0; c < channels; ++c) d.channel_names.push_back("ch" + std::to_string(c));
  for (int i = 0; i < n_trials; ++i)
    d.trials.push_back(ssb::make_trial(white_noise(seed * 1000 + static_cast<std::uint64_t>(i), n, channels),
                                       i % 2 == 0 ? ssb::kLeft : ssb::kRight));
  return d;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("ssboost_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
