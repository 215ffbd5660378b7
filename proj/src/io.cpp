#include "ssboost/io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

namespace ssb {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error("length mismatch");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::int8_t i8() {
    need(1);
    return static_cast<std::int8_t>(bytes_[pos_++]);
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw Error(std::string(what) + " too large for EEGB");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::size_t eegb_header_bytes(const SessionDataset& d) {
  std::size_t bytes = 4 + 4 * 4 + 4;
  for (const auto& name : d.channel_names) bytes += 4 + name.size();
  return bytes + d.trials.size();
}

std::vector<std::uint8_t> encode_eegb(const SessionDataset& d) {
  if (d.trials.empty()) throw Error("empty dataset");
  require_valid(d, false);
  const auto n_samples = d.n_samples();
  const auto n_channels = d.n_channels();
  std::vector<std::uint8_t> out;
  out.reserve(eegb_header_bytes(d) + 4 * d.trials.size() * static_cast<std::size_t>(n_samples * n_channels));
  out.insert(out.end(), std::begin(kEegbMagic), std::end(kEegbMagic));
  put_u32(out, kEegbVersion);
  put_u32(out, checked_u32(d.trials.size(), "trial count"));
  put_u32(out, checked_u32(static_cast<std::size_t>(n_samples), "sample count"));
  put_u32(out, checked_u32(static_cast<std::size_t>(n_channels), "channel count"));
  put_f32(out, static_cast<float>(d.sample_rate_hz));
  for (const auto& name : d.channel_names) {
    put_u32(out, checked_u32(name.size(), "channel name"));
    out.insert(out.end(), name.begin(), name.end());
  }
  for (const auto& t : d.trials) out.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(t.label)));
  for (const auto& t : d.trials)
    for (Eigen::Index i = 0; i < n_samples; ++i)
      for (Eigen::Index c = 0; c < n_channels; ++c) put_f32(out, static_cast<float>(t.samples(i, c)));
  return out;
}

SessionDataset decode_eegb(const std::vector<std::uint8_t>& bytes, int session_index) {
  if (bytes.size() < 4 || !std::equal(std::begin(kEegbMagic), std::end(kEegbMagic), bytes.begin()))
    throw Error("not an EEGB file");
  Reader r(bytes);
  r.str(4);
  const auto version = r.u32();
  if (version != kEegbVersion) throw Error("unsupported EEGB version " + std::to_string(version));
  const auto n_trials = r.u32();
  const auto n_samples = r.u32();
  const auto n_channels = r.u32();
  if (n_trials == 0 || n_samples == 0 || n_channels == 0) throw Error("EEGB counts must be positive");
  SessionDataset d;
  d.session_index = session_index;
  d.sample_rate_hz = r.f32();
  for (std::uint32_t c = 0; c < n_channels; ++c) d.channel_names.push_back(r.str(r.u32()));
  const std::uint64_t payload = std::uint64_t{4} * n_trials * n_samples * n_channels;
  if (r.remaining() != n_trials + payload) throw Error("length mismatch");
  std::vector<int> labels(n_trials);
  for (auto& l : labels) {
    l = r.i8();
    if (l != kLeft && l != kRight) throw Error("invalid label");
  }
  d.trials.reserve(n_trials);
  for (std::uint32_t t = 0; t < n_trials; ++t) {
    Eigen::MatrixXd x(n_samples, n_channels);
    for (std::uint32_t i = 0; i < n_samples; ++i)
      for (std::uint32_t c = 0; c < n_channels; ++c) x(i, c) = r.f32();
    if (!x.allFinite()) throw Error("non-finite samples");
    d.trials.push_back(TrialMatrix{std::move(x), labels[t]});
  }
  return d;
}

void write_eegb(const SessionDataset& d, const std::filesystem::path& path) {
  const auto bytes = encode_eegb(d);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot write " + path.string() + ": " + ec.message());
}

SessionDataset read_eegb(const std::filesystem::path& path, int session_index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_eegb(bytes, session_index);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("cannot write " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot write " + path.string() + ": " + ec.message());
}

}  // namespace ssb
