#pragma once

#include "ssboost/core.hpp"
#include "ssboost/dsp.hpp"

#include <span>
#include <vector>

namespace ssb {

/// Common spatial patterns. Rows of `filters` are spatial filters; the first
/// csp_dim/2 have the largest generalized eigenvalues, the rest the smallest.
struct CspModel {
  Eigen::MatrixXd filters;
  std::vector<double> eigenvalues;
  int n_channels = 0;
  int csp_dim = 4;
};

inline constexpr double kCspRegularization = 1e-6;

/// Mean of per-trial trace-normalized covariances.
Eigen::MatrixXd class_mean_covariance(std::span<const TrialMatrix> trials);

/// cov + 1e-6 * trace(cov) * I.
Eigen::MatrixXd regularize_covariance(const Eigen::MatrixXd& cov);

/// Learns CSP filters with `left` as the numerator class of the generalized
/// eigenproblem  S_left w = mu (S_left + S_right) w.
CspModel fit_csp(std::span<const TrialMatrix> left, std::span<const TrialMatrix> right, int csp_dim);

/// Same as fit_csp, starting from the class mean covariances (unregularized).
CspModel fit_csp_from_covariances(const Eigen::MatrixXd& mean_left, const Eigen::MatrixXd& mean_right,
                                  int csp_dim);

/// log(var_j / sum_j' var_j') over the filter outputs.
Eigen::VectorXd extract_features(const CspModel& m, const TrialMatrix& t);

/// The same features computed from the trial's scatter X^T X (zero-mean data).
Eigen::VectorXd features_from_scatter(const CspModel& m, const Eigen::MatrixXd& scatter);

/// Log mean-square amplitude per (band, channel), band-major.
Eigen::VectorXd extract_bandpower_baseline(const TrialMatrix& t, std::span<const Band> bands, double fs);

}  // namespace ssb
