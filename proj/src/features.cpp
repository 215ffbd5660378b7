#include "ssboost/features.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssb {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest-magnitude component positive, so filters are reproducible across
// eigen solvers and permutations.
void fix_sign(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> w) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < w.size(); ++i)
    if (std::abs(w[i]) > std::abs(w[best]) + 1e-12) best = i;
  if (w[best] < 0.0) w = -w;
}

}  // namespace

Eigen::MatrixXd class_mean_covariance(std::span<const TrialMatrix> trials) {
  if (trials.empty()) throw Error("empty class");
  const auto c = trials.front().n_channels();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(c, c);
  for (const auto& t : trials) {
    if (t.n_channels() != c) throw Error("trials differ in channel count");
    acc += covariance_normalized(t).values;
  }
  return acc / static_cast<double>(trials.size());
}

Eigen::MatrixXd regularize_covariance(const Eigen::MatrixXd& cov) {
  const double lambda = kCspRegularization * cov.trace();
  Eigen::MatrixXd out = symmetrize(cov);
  out.diagonal().array() += lambda;
  return out;
}

CspModel fit_csp(std::span<const TrialMatrix> left, std::span<const TrialMatrix> right, int csp_dim) {
  if (left.empty() || right.empty()) throw Error("both classes need at least one trial");
  const auto shape_rows = left.front().n_samples();
  const auto shape_cols = left.front().n_channels();
  for (auto side : {left, right})
    for (const auto& t : side)
      if (t.n_samples() != shape_rows || t.n_channels() != shape_cols)
        throw Error("trials differ in shape");
  return fit_csp_from_covariances(class_mean_covariance(left), class_mean_covariance(right), csp_dim);
}

CspModel fit_csp_from_covariances(const Eigen::MatrixXd& mean_left, const Eigen::MatrixXd& mean_right,
                                  int csp_dim) {
  const auto n = mean_left.rows();
  if (mean_right.rows() != n || mean_left.cols() != n || mean_right.cols() != n)
    throw Error("covariance shape mismatch");
  if (!mean_left.allFinite() || !mean_right.allFinite()) throw Error("covariance not finite");
  if (csp_dim < 2 || csp_dim % 2 != 0) throw Error("csp_dim must be a positive even integer");
  if (csp_dim > n) throw Error("insufficient channels");

  const Eigen::MatrixXd left = regularize_covariance(mean_left);
  const Eigen::MatrixXd right = regularize_covariance(mean_right);
  const Eigen::MatrixXd composite = left + right;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> comp(composite);
  if (comp.info() != Eigen::Success) throw Error("composite covariance eigen-decomposition failed");
  const Eigen::VectorXd comp_values = comp.eigenvalues();
  if (comp_values.minCoeff() <= 0.0) throw Error("composite covariance is not positive definite");
  // Rows of `whitening` map the composite covariance to the identity.
  const Eigen::MatrixXd whitening =
      comp_values.cwiseSqrt().cwiseInverse().asDiagonal() * comp.eigenvectors().transpose();

  const Eigen::MatrixXd whitened_left = symmetrize(whitening * left * whitening.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gen(whitened_left);
  if (gen.info() != Eigen::Success) throw Error("whitened covariance eigen-decomposition failed");

  // Descending eigenvalue, ties by ascending index.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd mu = gen.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return mu[a] > mu[b]; });

  CspModel m;
  m.n_channels = static_cast<int>(n);
  m.csp_dim = csp_dim;
  m.filters.resize(csp_dim, n);
  const int half = csp_dim / 2;
  std::vector<Eigen::Index> picked;
  for (int j = 0; j < half; ++j) picked.push_back(order[static_cast<std::size_t>(j)]);
  for (int j = half; j > 0; --j) picked.push_back(order[static_cast<std::size_t>(n - j)]);
  for (int r = 0; r < csp_dim; ++r) {
    const Eigen::Index idx = picked[static_cast<std::size_t>(r)];
    m.filters.row(r) = gen.eigenvectors().col(idx).transpose() * whitening;
    fix_sign(m.filters.row(r));
    m.eigenvalues.push_back(std::clamp(mu[idx], 0.0, 1.0));
  }
  return m;
}

Eigen::VectorXd features_from_scatter(const CspModel& m, const Eigen::MatrixXd& scatter) {
  if (scatter.rows() != m.n_channels) throw Error("trial channel count does not match CSP model");
  Eigen::VectorXd var(m.csp_dim);
  for (int j = 0; j < m.csp_dim; ++j) {
    const auto w = m.filters.row(j);
    var[j] = std::max(0.0, (w * scatter * w.transpose())(0, 0));
  }
  const double total = var.sum();
  if (!(total > 0.0) || !std::isfinite(total)) throw Error("degenerate trial");
  Eigen::VectorXd f(m.csp_dim);
  for (int j = 0; j < m.csp_dim; ++j) {
    // Floor keeps a filter with exactly zero output from producing -inf.
    f[j] = std::log(std::max(var[j] / total, 1e-300));
  }
  return f;
}

Eigen::VectorXd extract_features(const CspModel& m, const TrialMatrix& t) {
  if (t.n_channels() != m.n_channels) throw Error("trial channel count does not match CSP model");
  const Eigen::MatrixXd projected = t.samples * m.filters.transpose();  // samples x D
  Eigen::VectorXd var(m.csp_dim);
  for (int j = 0; j < m.csp_dim; ++j) {
    const auto col = projected.col(j);
    var[j] = (col.array() - col.mean()).square().sum() / static_cast<double>(t.n_samples() - 1);
  }
  const double total = var.sum();
  if (!(total > 0.0) || !std::isfinite(total)) throw Error("degenerate trial");
  Eigen::VectorXd f(m.csp_dim);
  for (int j = 0; j < m.csp_dim; ++j) f[j] = std::log(std::max(var[j] / total, 1e-300));
  return f;
}

Eigen::VectorXd extract_bandpower_baseline(const TrialMatrix& t, std::span<const Band> bands, double fs) {
  const auto channels = t.n_channels();
  Eigen::VectorXd out(static_cast<Eigen::Index>(bands.size()) * channels);
  Eigen::Index pos = 0;
  for (const auto& b : bands) {
    const Eigen::MatrixXd filtered = bandpass_samples(t.samples, b, fs);
    for (Eigen::Index c = 0; c < channels; ++c) {
      const double power = filtered.col(c).squaredNorm() / static_cast<double>(t.n_samples());
      if (!(power > 0.0)) throw Error("degenerate trial");
      out[pos++] = std::log(power);
    }
  }
  return out;
}

}  // namespace ssb
