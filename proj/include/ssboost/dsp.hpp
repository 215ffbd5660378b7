#pragma once

#include "ssboost/core.hpp"

#include <complex>
#include <vector>

namespace ssb {

/// Symmetric, trace-one spatial covariance.
struct CovarianceMatrix {
  Eigen::MatrixXd values;
};

/// Removes the least-squares line (intercept and slope) from each channel.
TrialMatrix detrend(const TrialMatrix& t);

/// Zero-phase brickwall band-pass: every FFT bin whose |frequency| falls
/// outside [low_hz, high_hz] is zeroed.
TrialMatrix bandpass(const TrialMatrix& t, const Band& b, double fs);
Eigen::MatrixXd bandpass_samples(const Eigen::MatrixXd& samples, const Band& b, double fs);

TrialMatrix project_channels(const TrialMatrix& t, const ChannelSet& s);
Eigen::MatrixXd project_scatter(const Eigen::MatrixXd& scatter, const ChannelSet& s);

/// X^T X / trace(X^T X). Callers detrend first.
CovarianceMatrix covariance_normalized(const TrialMatrix& t);

/// Per-channel spectrum of one (already detrended) trial. Band-limited
/// scatter matrices are read straight off the spectrum via Parseval, which
/// avoids an inverse transform per band and gives the same X_B^T X_B as
/// bandpass() followed by a time-domain product.
class TrialSpectrum {
 public:
  TrialSpectrum(const Eigen::MatrixXd& samples, double fs);

  /// X_B^T X_B where X_B = bandpass_samples(samples, b, fs).
  Eigen::MatrixXd band_scatter(const Band& b) const;

  Eigen::Index n_samples() const { return n_samples_; }
  Eigen::Index n_channels() const { return bins_.cols(); }

 private:
  Eigen::Index n_samples_ = 0;
  double fs_ = 0.0;
  // Non-negative frequency bins 0..n/2, one column per channel.
  Eigen::MatrixXcd bins_;
};

void require_below_nyquist(const Band& b, double fs);

}  // namespace ssb
