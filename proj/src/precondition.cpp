#include "ssboost/precondition.hpp"

#include "ssboost/random.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

namespace ssb {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

void check_subset_args(int n_channels, int min_size) {
  if (n_channels < 1 || min_size < 1 || min_size > n_channels)
    throw Error("need 1 <= min_size <= n_channels");
}

}  // namespace

void BandUniverseSpec::validate() const {
  if (global_low < 0 || global_high <= global_low) throw Error("invalid global band");
  if (window_lengths.empty()) throw Error("no window lengths");
  if (window_lengths.size() != strides.size()) throw Error("window lengths and strides differ in count");
  for (std::size_t i = 0; i < window_lengths.size(); ++i) {
    if (window_lengths[i] < 5 || window_lengths[i] > 35) throw Error("window length outside [5, 35]");
    if (window_lengths[i] > global_high - global_low) throw Error("window longer than global band");
    if (strides[i] < 1) throw Error("stride must be >= 1");
  }
}

std::uint64_t count_channel_subsets(int n_channels, int min_size) {
  check_subset_args(n_channels, min_size);
  std::uint64_t total = 0;
  for (int i = min_size; i <= n_channels; ++i) total += binomial(n_channels, i);
  return total;
}

ChannelSet mask_from_bits(std::uint64_t bits, int n_channels) {
  std::vector<bool> mask(static_cast<std::size_t>(n_channels));
  for (int i = 0; i < n_channels; ++i) mask[static_cast<std::size_t>(i)] = (bits >> i) & 1U;
  return ChannelSet(std::move(mask), 0);
}

ChannelSubsetRange::ChannelSubsetRange(int n_channels, int min_size)
    : n_channels_(n_channels), min_size_(min_size) {
  check_subset_args(n_channels, min_size);
  if (n_channels > kMaxEnumeratedChannels) throw Error("universe too large; use sampler");
}

ChannelSubsetRange::iterator::iterator(const ChannelSubsetRange* range, std::uint64_t value)
    : range_(range), value_(value) {
  skip_invalid();
}

void ChannelSubsetRange::iterator::skip_invalid() {
  const std::uint64_t end = std::uint64_t{1} << range_->n_channels_;
  while (value_ < end && std::popcount(value_) < range_->min_size_) ++value_;
}

ChannelSet ChannelSubsetRange::iterator::operator*() const {
  return mask_from_bits(value_, range_->n_channels_);
}

ChannelSubsetRange::iterator& ChannelSubsetRange::iterator::operator++() {
  ++value_;
  skip_invalid();
  return *this;
}

ChannelSubsetRange::iterator ChannelSubsetRange::begin() const { return iterator(this, 0); }
ChannelSubsetRange::iterator ChannelSubsetRange::end() const {
  return iterator(this, std::uint64_t{1} << n_channels_);
}

ChannelSubsetRange enumerate_channel_subsets(int n_channels, int min_size) {
  return ChannelSubsetRange(n_channels, min_size);
}

std::vector<ChannelSet> sample_channel_subsets(int n_channels, int min_size, std::size_t q,
                                               std::uint64_t seed) {
  check_subset_args(n_channels, min_size);
  if (q < 1) throw Error("sample size must be >= 1");
  std::vector<ChannelSet> out;
  Rng rng(seed);
  if (n_channels <= kMaxEnumeratedChannels) {
    std::vector<std::uint64_t> values;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n_channels); ++v)
      if (std::popcount(v) >= min_size) values.push_back(v);
    const std::uint64_t full = (std::uint64_t{1} << n_channels) - 1;
    if (q >= values.size()) {
      for (auto v : values) out.push_back(mask_from_bits(v, n_channels));
      return out;
    }
    // Full mask is always last in ascending order; keep it, sample the rest.
    values.pop_back();
    rng.partial_shuffle(std::span<std::uint64_t>(values), q - 1);
    std::vector<std::uint64_t> picked(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(q - 1));
    picked.push_back(full);
    std::sort(picked.begin(), picked.end());
    for (auto v : picked) out.push_back(mask_from_bits(v, n_channels));
    return out;
  }

  // Large universes: rejection sampling over uniform random masks.
  std::set<ChannelSet> picked;
  picked.insert(ChannelSet::full(static_cast<std::size_t>(n_channels)));
  while (picked.size() < q) {
    std::vector<bool> mask(static_cast<std::size_t>(n_channels));
    for (auto&& bit : mask) bit = (rng.next() >> 63) != 0;
    if (static_cast<int>(std::count(mask.begin(), mask.end(), true)) < min_size) continue;
    picked.insert(ChannelSet(std::move(mask), 0));
  }
  return {picked.begin(), picked.end()};
}

std::vector<Band> generate_band_universe(const BandUniverseSpec& spec) {
  spec.validate();
  std::set<Band> bands;
  for (std::size_t i = 0; i < spec.window_lengths.size(); ++i) {
    const int w = spec.window_lengths[i];
    for (int l = spec.global_low; l + w <= spec.global_high; l += spec.strides[i]) bands.insert({l, l + w});
    bands.insert({spec.global_high - w, spec.global_high});
  }
  return {bands.begin(), bands.end()};
}

BandConstraintReport verify_band_constraints(const std::vector<Band>& bands, const Band& global) {
  BandConstraintReport r;
  const int units = global.high_hz - global.low_hz;
  r.coverage.assign(static_cast<std::size_t>(std::max(units, 0)), 0);
  r.length_ok = !bands.empty();
  for (const auto& b : bands) {
    if (b.width() < 5 || b.width() > 35) r.length_ok = false;
    for (int u = 0; u < units; ++u)
      if (b.contains_unit(global.low_hz + u)) ++r.coverage[static_cast<std::size_t>(u)];
  }
  if (r.coverage.empty()) return r;
  const auto [lo, hi] = std::minmax_element(r.coverage.begin(), r.coverage.end());
  r.cover_ok = *lo >= 1;
  r.overlap_ok = *lo >= 2;
  r.equal_ok = *lo >= 2 && *hi <= 4 * *lo;
  return r;
}

std::vector<Precondition> build_universe(Mode mode, const UniverseConfig& config) {
  const Band global = config.bands.global();
  const auto n = static_cast<std::size_t>(config.n_channels);
  const int min_size = static_cast<int>(config.min_channels);
  std::vector<Precondition> out;

  auto subsets = [&]() {
    const auto total = count_channel_subsets(config.n_channels, min_size);
    if (config.n_channels <= kMaxEnumeratedChannels && total <= config.max_subsets) {
      std::vector<ChannelSet> all;
      for (auto s : enumerate_channel_subsets(config.n_channels, min_size)) all.push_back(std::move(s));
      return all;
    }
    return sample_channel_subsets(config.n_channels, min_size, config.max_subsets,
                                  mix_seed(config.seed, Stream::universe, 1));
  };

  switch (mode) {
    case Mode::Plain:
      out.push_back({ChannelSet::full(n), global, Mode::Plain});
      break;
    case Mode::SB:
      for (auto& s : subsets()) out.push_back({std::move(s), global, Mode::SB});
      break;
    case Mode::FB:
      for (const auto& b : generate_band_universe(config.bands)) out.push_back({ChannelSet::full(n), b, Mode::FB});
      break;
    case Mode::SFB: {
      const auto bands = generate_band_universe(config.bands);
      const auto sets = config.n_channels <= kMaxEnumeratedChannels
                            ? subsets()
                            : sample_channel_subsets(config.n_channels, min_size,
                                                     std::max<std::size_t>(config.sfb_pairs, 1),
                                                     mix_seed(config.seed, Stream::universe, 2));
      const std::uint64_t total = sets.size() * bands.size();
      std::vector<std::uint64_t> picked;
      if (config.sfb_pairs >= total) {
        picked.resize(total);
        std::iota(picked.begin(), picked.end(), std::uint64_t{0});
      } else {
        // Floyd's algorithm: distinct indices into the Cartesian product.
        Rng rng(mix_seed(config.seed, Stream::universe, 3));
        std::set<std::uint64_t> chosen;
        for (std::uint64_t j = total - config.sfb_pairs; j < total; ++j) {
          const std::uint64_t t = rng.uniform_index(j + 1);
          if (!chosen.insert(t).second) chosen.insert(j);
        }
        picked.assign(chosen.begin(), chosen.end());
      }
      const Precondition anchor{ChannelSet::full(n), global, Mode::SFB};
      bool has_anchor = false;
      for (auto idx : picked) {
        Precondition p{sets[idx / bands.size()], bands[idx % bands.size()], Mode::SFB};
        has_anchor |= p == anchor;
        out.push_back(std::move(p));
      }
      if (!has_anchor) {
        // Replace the last draw so the size stays at sfb_pairs.
        if (out.size() >= config.sfb_pairs && !out.empty()) out.pop_back();
        out.push_back(anchor);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), canonical_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ssb
