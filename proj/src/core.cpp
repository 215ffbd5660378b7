#include "ssboost/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ssb {

TrialMatrix make_trial(Eigen::MatrixXd samples, int label) {
  if (samples.rows() < 2) throw Error("trial needs at least 2 samples");
  if (samples.cols() < 1) throw Error("trial needs at least 1 channel");
  if (!samples.allFinite()) throw Error("non-finite samples");
  if (label != kLeft && label != kRight) throw Error("invalid label");
  return TrialMatrix{std::move(samples), label};
}

std::vector<int> SessionDataset::labels() const {
  std::vector<int> out;
  out.reserve(trials.size());
  for (const auto& t : trials) out.push_back(t.label);
  return out;
}

std::vector<std::string> validate_dataset(const SessionDataset& d, bool require_both_classes) {
  std::vector<std::string> report;
  if (d.trials.empty()) report.emplace_back("empty dataset");
  if (!(d.sample_rate_hz > 0.0) || !std::isfinite(d.sample_rate_hz))
    report.emplace_back("sample rate must be positive");
  if (d.channel_names.empty()) report.emplace_back("no channel names");
  if (std::set<std::string>(d.channel_names.begin(), d.channel_names.end()).size() !=
      d.channel_names.size())
    report.emplace_back("duplicate channel names");
  if (d.session_index < 0) report.emplace_back("negative session index");

  bool channel_mismatch = false, sample_mismatch = false, bad_label = false, non_finite = false,
       too_short = false;
  const auto n_channels = d.n_channels();
  const auto n_samples = d.n_samples();
  bool has_left = false, has_right = false;
  for (const auto& t : d.trials) {
    channel_mismatch |= t.n_channels() != n_channels;
    sample_mismatch |= t.n_samples() != n_samples;
    too_short |= t.n_samples() < 2;
    bad_label |= t.label != kLeft && t.label != kRight;
    non_finite |= !t.samples.allFinite();
    has_left |= t.label == kLeft;
    has_right |= t.label == kRight;
  }
  if (channel_mismatch) report.emplace_back("channel count mismatch");
  if (sample_mismatch) report.emplace_back("sample count mismatch");
  if (too_short) report.emplace_back("trial shorter than 2 samples");
  if (bad_label) report.emplace_back("invalid label");
  if (non_finite) report.emplace_back("non-finite samples");
  if (require_both_classes && !d.trials.empty() && !(has_left && has_right))
    report.emplace_back("single-class dataset");
  return report;
}

void require_valid(const SessionDataset& d, bool require_both_classes) {
  const auto report = validate_dataset(d, require_both_classes);
  if (report.empty()) return;
  std::string msg = "invalid dataset:";
  for (const auto& r : report) msg += " " + r + ";";
  msg.pop_back();
  throw Error(msg);
}

ChannelSet::ChannelSet(std::vector<bool> mask, std::size_t min_channels) : mask_(std::move(mask)) {
  if (count() < min_channels)
    throw Error("channel set has " + std::to_string(count()) + " channels, minimum is " +
                std::to_string(min_channels));
}

ChannelSet ChannelSet::full(std::size_t n_channels) {
  return ChannelSet(std::vector<bool>(n_channels, true), 0);
}

ChannelSet ChannelSet::from_indices(std::size_t n_channels, const std::vector<std::size_t>& indices,
                                    std::size_t min_channels) {
  std::vector<bool> mask(n_channels, false);
  for (auto i : indices) {
    if (i >= n_channels) throw Error("channel index out of range");
    mask[i] = true;
  }
  return ChannelSet(std::move(mask), min_channels);
}

ChannelSet ChannelSet::parse(const std::string& bits, std::size_t min_channels) {
  std::vector<bool> mask;
  mask.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw Error("channel mask must contain only 0/1");
    mask.push_back(c == '1');
  }
  return ChannelSet(std::move(mask), min_channels);
}

std::size_t ChannelSet::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

std::vector<std::size_t> ChannelSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) out.push_back(i);
  return out;
}

std::string ChannelSet::to_string() const {
  std::string s;
  s.reserve(mask_.size());
  for (bool b : mask_) s.push_back(b ? '1' : '0');
  return s;
}

std::strong_ordering operator<=>(const ChannelSet& a, const ChannelSet& b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  // Highest channel is the most significant bit.
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a.mask_[i] != b.mask_[i]) return a.mask_[i] ? std::strong_ordering::greater
                                                     : std::strong_ordering::less;
  }
  return std::strong_ordering::equal;
}

bool is_valid_band(const Band& b, const Band& global) {
  return global.low_hz <= b.low_hz && b.low_hz < b.high_hz && b.high_hz <= global.high_hz &&
         b.width() >= 5 && b.width() <= 35;
}

void require_valid_band(const Band& b, const Band& global) {
  if (!is_valid_band(b, global))
    throw Error("invalid band " + to_string(b) + " (global " + to_string(global) + ")");
}

std::string to_string(const Band& b) {
  return std::to_string(b.low_hz) + "-" + std::to_string(b.high_hz);
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Plain: return "plain";
    case Mode::SB: return "sb";
    case Mode::FB: return "fb";
    case Mode::SFB: return "sfb";
  }
  return "plain";
}

Mode parse_mode(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "plain") return Mode::Plain;
  if (t == "sb") return Mode::SB;
  if (t == "fb") return Mode::FB;
  if (t == "sfb") return Mode::SFB;
  throw Error("unknown mode '" + text + "' (expected plain, sb, fb or sfb)");
}

std::string Precondition::key() const { return channels.to_string() + "@" + to_string(band); }

bool canonical_less(const Precondition& a, const Precondition& b) {
  if (auto c = a.channels <=> b.channels; c != 0) return c < 0;
  return a.band < b.band;
}

std::vector<std::string> validate_precondition(const Precondition& p, const Band& global) {
  std::vector<std::string> out;
  if (!is_valid_band(p.band, global)) out.emplace_back("invalid band");
  if (p.channels.count() == 0) out.emplace_back("empty channel set");
  const bool global_band = p.band == global;
  const bool full = p.channels.is_full();
  switch (p.mode) {
    case Mode::Plain:
      if (!global_band || !full) out.emplace_back("plain precondition must be (full, global)");
      break;
    case Mode::SB:
      if (!global_band) out.emplace_back("SB precondition must use the global band");
      break;
    case Mode::FB:
      if (!full) out.emplace_back("FB precondition must use the full channel set");
      break;
    case Mode::SFB: break;
  }
  return out;
}

void BoostConfig::validate() const {
  if (k_max < 0) throw Error("k_max must be non-negative");
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0))
    throw Error("subset_fraction must be in (0, 1]");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (pool_cap_multiple < 1) throw Error("pool_cap_multiple must be >= 1");
  if (candidate_sample_size < 1) throw Error("candidate_sample_size must be >= 1");
  if (csp_dim < 2 || csp_dim % 2 != 0) throw Error("csp_dim must be a positive even integer");
  if (min_channels < 1) throw Error("min_channels must be >= 1");
  if (static_cast<std::size_t>(csp_dim) > 2 * min_channels)
    throw Error("csp_dim must not exceed 2 * min_channels");
  if (!(svm_cost > 0.0)) throw Error("svm_cost must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw Error("validation_fraction must be in [0, 1)");
}

}  // namespace ssb
