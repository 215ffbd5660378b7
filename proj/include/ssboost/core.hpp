#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssb {

/// Every recoverable failure in the library is reported as ssb::Error; the
/// C API maps it to a status code and keeps the message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kLeft = -1;
inline constexpr int kRight = +1;
inline constexpr std::size_t kDefaultMinChannels = 4;
inline constexpr int kGlobalLowHz = 5;
inline constexpr int kGlobalHighHz = 40;

/// One imagery trial, time-major (rows are samples, columns are channels).
struct TrialMatrix {
  Eigen::MatrixXd samples;
  int label = kRight;

  Eigen::Index n_samples() const { return samples.rows(); }
  Eigen::Index n_channels() const { return samples.cols(); }
};

/// Builds a trial and checks shape, finiteness and the label.
TrialMatrix make_trial(Eigen::MatrixXd samples, int label);

struct SessionDataset {
  std::vector<TrialMatrix> trials;
  double sample_rate_hz = 256.0;
  std::vector<std::string> channel_names;
  int session_index = 0;

  std::size_t n_trials() const { return trials.size(); }
  Eigen::Index n_samples() const { return trials.empty() ? 0 : trials.front().n_samples(); }
  Eigen::Index n_channels() const { return static_cast<Eigen::Index>(channel_names.size()); }
  std::vector<int> labels() const;
};

/// Report-style check; an empty result means the dataset is valid.
std::vector<std::string> validate_dataset(const SessionDataset& d, bool require_both_classes = true);

/// Throws Error listing every violation from validate_dataset.
void require_valid(const SessionDataset& d, bool require_both_classes = true);

/// Channel subset as a binary mask. Channel 0 is the least significant bit of
/// the canonical binary value, which defines the ordering.
class ChannelSet {
 public:
  ChannelSet() = default;
  explicit ChannelSet(std::vector<bool> mask, std::size_t min_channels = kDefaultMinChannels);

  static ChannelSet full(std::size_t n_channels);
  static ChannelSet from_indices(std::size_t n_channels, const std::vector<std::size_t>& indices,
                                 std::size_t min_channels = kDefaultMinChannels);
  /// Parses the "1100..." form produced by to_string().
  static ChannelSet parse(const std::string& bits, std::size_t min_channels = 1);

  std::size_t size() const { return mask_.size(); }
  std::size_t count() const;
  bool contains(std::size_t channel) const { return mask_.at(channel); }
  bool is_full() const { return count() == size(); }
  std::vector<std::size_t> indices() const;
  const std::vector<bool>& mask() const { return mask_; }
  /// Character i is channel i.
  std::string to_string() const;

  friend bool operator==(const ChannelSet&, const ChannelSet&) = default;
  friend std::strong_ordering operator<=>(const ChannelSet& a, const ChannelSet& b);

 private:
  std::vector<bool> mask_;
};

/// Integer-Hz band [low_hz, high_hz].
struct Band {
  int low_hz = kGlobalLowHz;
  int high_hz = kGlobalHighHz;

  int width() const { return high_hz - low_hz; }
  bool contains_unit(int unit_low) const { return low_hz <= unit_low && unit_low + 1 <= high_hz; }

  friend bool operator==(const Band&, const Band&) = default;
  friend auto operator<=>(const Band&, const Band&) = default;
};

inline constexpr Band kGlobalBand{kGlobalLowHz, kGlobalHighHz};

/// True when the band satisfies the Length constraint inside `global`.
bool is_valid_band(const Band& b, const Band& global = kGlobalBand);
void require_valid_band(const Band& b, const Band& global = kGlobalBand);
std::string to_string(const Band& b);

enum class Mode { Plain, SB, FB, SFB };

std::string to_string(Mode m);
Mode parse_mode(const std::string& text);

/// A (channel subset, band) pair: the identity of one base learner.
struct Precondition {
  ChannelSet channels;
  Band band;
  Mode mode = Mode::Plain;

  /// Stable text key, e.g. "111111111111@5-40".
  std::string key() const;

  friend bool operator==(const Precondition& a, const Precondition& b) {
    return a.channels == b.channels && a.band == b.band;
  }
};

/// Canonical order: channel mask value, then band.
bool canonical_less(const Precondition& a, const Precondition& b);

/// Checks the mode-specific invariants against the global band.
std::vector<std::string> validate_precondition(const Precondition& p, const Band& global = kGlobalBand);

struct BoostConfig {
  int k_max = 60;
  double subset_fraction = 0.7;
  double epsilon = 0.01;
  int pool_cap_multiple = 20;
  int candidate_sample_size = 256;
  int csp_dim = 4;
  double svm_cost = 1.0;
  double validation_fraction = 0.1;
  std::uint64_t rng_seed = 1;
  std::size_t min_channels = kDefaultMinChannels;

  /// Throws Error on the first violated field constraint.
  void validate() const;
};

}  // namespace ssb
