#include "ssboost/dsp.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace ssb {

namespace {

constexpr double kBinTolerance = 1e-9;

bool bin_in_band(Eigen::Index k, Eigen::Index n, double fs, const Band& b) {
  const Eigen::Index folded = std::min(k, n - k);
  const double freq = static_cast<double>(folded) * fs / static_cast<double>(n);
  return freq >= b.low_hz - kBinTolerance && freq <= b.high_hz + kBinTolerance;
}

}  // namespace

void require_below_nyquist(const Band& b, double fs) {
  if (!(fs > 2.0 * b.high_hz)) throw Error("band above Nyquist");
}

TrialMatrix detrend(const TrialMatrix& t) {
  if (!t.samples.allFinite()) throw Error("non-finite samples");
  const Eigen::Index n = t.n_samples();
  const double t_mean = 0.5 * static_cast<double>(n - 1);
  Eigen::VectorXd centered_time(n);
  for (Eigen::Index i = 0; i < n; ++i) centered_time[i] = static_cast<double>(i) - t_mean;
  const double t_ss = centered_time.squaredNorm();

  TrialMatrix out{t.samples, t.label};
  for (Eigen::Index c = 0; c < t.n_channels(); ++c) {
    auto col = out.samples.col(c);
    const double mean = col.mean();
    const double slope = t_ss > 0.0 ? centered_time.dot(col.array().matrix()) / t_ss : 0.0;
    col.array() -= mean;
    col -= slope * centered_time;
  }
  return out;
}

Eigen::MatrixXd bandpass_samples(const Eigen::MatrixXd& samples, const Band& b, double fs) {
  require_below_nyquist(b, fs);
  if (b.low_hz < 0 || b.low_hz >= b.high_hz) throw Error("invalid band " + to_string(b));
  const Eigen::Index n = samples.rows();
  Eigen::FFT<double> fft;
  std::vector<double> in(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spectrum;
  std::vector<double> back;
  Eigen::MatrixXd out(n, samples.cols());
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = samples(i, c);
    fft.fwd(spectrum, in);
    for (Eigen::Index k = 0; k < n; ++k)
      if (!bin_in_band(k, n, fs, b)) spectrum[static_cast<std::size_t>(k)] = 0.0;
    fft.inv(back, spectrum);
    for (Eigen::Index i = 0; i < n; ++i) out(i, c) = back[static_cast<std::size_t>(i)];
  }
  return out;
}

TrialMatrix bandpass(const TrialMatrix& t, const Band& b, double fs) {
  return TrialMatrix{bandpass_samples(t.samples, b, fs), t.label};
}

TrialMatrix project_channels(const TrialMatrix& t, const ChannelSet& s) {
  if (s.size() != static_cast<std::size_t>(t.n_channels()))
    throw Error("channel mask length does not match trial");
  const auto idx = s.indices();
  if (idx.empty()) throw Error("empty channel set");
  TrialMatrix out{Eigen::MatrixXd(t.n_samples(), static_cast<Eigen::Index>(idx.size())), t.label};
  for (std::size_t j = 0; j < idx.size(); ++j)
    out.samples.col(static_cast<Eigen::Index>(j)) = t.samples.col(static_cast<Eigen::Index>(idx[j]));
  return out;
}

Eigen::MatrixXd project_scatter(const Eigen::MatrixXd& scatter, const ChannelSet& s) {
  if (s.size() != static_cast<std::size_t>(scatter.rows()))
    throw Error("channel mask length does not match scatter");
  const auto idx = s.indices();
  if (idx.empty()) throw Error("empty channel set");
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      out(i, j) = scatter(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
  return out;
}

CovarianceMatrix covariance_normalized(const TrialMatrix& t) {
  Eigen::MatrixXd scatter = t.samples.transpose() * t.samples;
  const double trace = scatter.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) throw Error("degenerate trial");
  scatter /= trace;
  return CovarianceMatrix{0.5 * (scatter + scatter.transpose())};
}

TrialSpectrum::TrialSpectrum(const Eigen::MatrixXd& samples, double fs)
    : n_samples_(samples.rows()), fs_(fs) {
  if (!samples.allFinite()) throw Error("non-finite samples");
  const Eigen::Index n = n_samples_;
  const Eigen::Index half = n / 2;
  bins_.resize(half + 1, samples.cols());
  Eigen::FFT<double> fft;
  std::vector<double> in(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spectrum;
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = samples(i, c);
    fft.fwd(spectrum, in);
    for (Eigen::Index k = 0; k <= half; ++k) bins_(k, c) = spectrum[static_cast<std::size_t>(k)];
  }
}

Eigen::MatrixXd TrialSpectrum::band_scatter(const Band& b) const {
  require_below_nyquist(b, fs_);
  const Eigen::Index n = n_samples_;
  const Eigen::Index half = n / 2;
  const Eigen::Index channels = bins_.cols();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(channels, channels);
  // Sum_t x_a x_b = (1/n) Sum_k conj(X_a[k]) X_b[k]; bins k and n-k are a
  // conjugate pair, so each interior positive bin counts twice.
  for (Eigen::Index k = 0; k <= half; ++k) {
    if (!bin_in_band(k, n, fs_, b)) continue;
    const bool self_paired = (k == 0) || (2 * k == n);
    const double weight = self_paired ? 1.0 : 2.0;
    const auto row = bins_.row(k);
    acc.noalias() += weight * (row.adjoint() * row).real();
  }
  acc /= static_cast<double>(n);
  return 0.5 * (acc + acc.transpose());
}

}  // namespace ssb
