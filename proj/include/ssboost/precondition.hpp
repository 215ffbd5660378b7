#pragma once

#include "ssboost/core.hpp"

#include <cstdint>
#include <iterator>
#include <vector>

namespace ssb {

struct BandUniverseSpec {
  int global_low = kGlobalLowHz;
  int global_high = kGlobalHighHz;
  std::vector<int> window_lengths{5, 10, 15, 20, 25, 30, 35};
  std::vector<int> strides{2, 3, 4, 5, 5, 5, 5};

  Band global() const { return Band{global_low, global_high}; }
  void validate() const;
};

inline constexpr int kMaxEnumeratedChannels = 20;

/// Closed form sum_{i >= min_size} C(n, i).
std::uint64_t count_channel_subsets(int n_channels, int min_size);

/// Every mask with popcount >= min_size, ascending binary value.
class ChannelSubsetRange {
 public:
  ChannelSubsetRange(int n_channels, int min_size);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = ChannelSet;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const ChannelSubsetRange* range, std::uint64_t value);
    ChannelSet operator*() const;
    iterator& operator++();
    iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.value_ == b.value_; }

   private:
    void skip_invalid();
    const ChannelSubsetRange* range_ = nullptr;
    std::uint64_t value_ = 0;
  };

  iterator begin() const;
  iterator end() const;
  std::uint64_t count() const { return count_channel_subsets(n_channels_, min_size_); }

 private:
  int n_channels_;
  int min_size_;
};

ChannelSubsetRange enumerate_channel_subsets(int n_channels, int min_size);

ChannelSet mask_from_bits(std::uint64_t bits, int n_channels);

/// q distinct valid masks, uniform without replacement, always containing the
/// full mask; canonical order. Returns the whole universe when q exceeds it.
std::vector<ChannelSet> sample_channel_subsets(int n_channels, int min_size, std::size_t q,
                                               std::uint64_t seed);

/// Sliding windows per (length, stride), plus the right-edge window, sorted by
/// (low, high) and deduplicated.
std::vector<Band> generate_band_universe(const BandUniverseSpec& spec);

struct BandConstraintReport {
  bool cover_ok = false;
  bool length_ok = false;
  bool overlap_ok = false;
  /// Relaxed Equal constraint: min coverage >= 2 and max/min <= 4.
  bool equal_ok = false;
  /// coverage[u] = number of bands containing [global.low + u, global.low + u + 1].
  std::vector<int> coverage;
};

BandConstraintReport verify_band_constraints(const std::vector<Band>& bands, const Band& global);

struct UniverseConfig {
  int n_channels = 12;
  std::size_t min_channels = kDefaultMinChannels;
  BandUniverseSpec bands;
  /// SB: enumerate when the subset universe is at most this large, else sample.
  std::size_t max_subsets = 4096;
  /// SFB: number of (subset, band) pairs sampled from the Cartesian product.
  std::size_t sfb_pairs = 2048;
  std::uint64_t seed = 1;
};

/// Canonically ordered, duplicate-free precondition universe for `mode`.
std::vector<Precondition> build_universe(Mode mode, const UniverseConfig& config);

}  // namespace ssb
