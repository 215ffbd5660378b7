#include "ssboost/learner.hpp"

#include "ssboost/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ssb {

namespace {

// Row-major samples with a trailing constant 1 for the bias.
struct Augmented {
  std::vector<double> x;
  std::size_t stride;

  const double* row(std::size_t i) const { return x.data() + i * stride; }
};

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

double primal_objective(const Augmented& x, std::span<const int> y, const std::vector<double>& w, double cost) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) hinge += std::max(0.0, 1.0 - y[i] * dot(x.row(i), w.data(), x.stride));
  return 0.5 * dot(w.data(), w.data(), w.size()) + cost * hinge;
}

constexpr int kGapCheckInterval = 8;

}  // namespace

LinearModel train_linear(const Eigen::MatrixXd& features, std::span<const int> labels, double cost,
                         std::uint64_t seed, const LinearTrainOptions& options) {
  const Eigen::Index n = features.rows();
  const Eigen::Index dim = features.cols();
  if (static_cast<std::size_t>(n) != labels.size()) throw Error("feature/label count mismatch");
  if (n < 2) throw Error("need at least 2 training samples");
  if (!(cost > 0.0)) throw Error("cost must be positive");
  if (!features.allFinite()) throw Error("non-finite features");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y != 1 && y != -1) throw Error("labels must be +1 or -1");
    has_pos |= y == 1;
    has_neg |= y == -1;
  }
  if (!(has_pos && has_neg)) throw Error("single-class training set");

  const auto count = static_cast<std::size_t>(n);
  Augmented x{std::vector<double>(count * static_cast<std::size_t>(dim + 1)), static_cast<std::size_t>(dim + 1)};
  for (std::size_t i = 0; i < count; ++i) {
    double* r = x.x.data() + i * x.stride;
    for (Eigen::Index k = 0; k < dim; ++k) r[k] = features(static_cast<Eigen::Index>(i), k);
    r[dim] = 1.0;
  }
  std::vector<double> w(x.stride, 0.0);
  std::vector<double> alpha(count, 0.0);
  std::vector<double> q_diag(count);
  for (std::size_t i = 0; i < count; ++i) q_diag[i] = dot(x.row(i), x.row(i), x.stride);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);

  // Dual coordinate descent with shrinking; convergence is only accepted on
  // the full (unshrunk) set or by the duality gap.
  const double inf = std::numeric_limits<double>::infinity();
  double pg_max_old = inf, pg_min_old = -inf;
  std::size_t active = count;
  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order.data(), active));
    double pg_max = -inf, pg_min = inf;
    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = order[s];
      const double* row = x.row(i);
      const double yi = labels[i];
      const double grad = yi * dot(row, w.data(), x.stride) - 1.0;
      double pg = 0.0;
      if (alpha[i] <= 0.0) {
        if (grad > pg_max_old) {
          std::swap(order[s], order[--active]);
          --s;
          continue;
        }
        pg = std::min(grad, 0.0);
      } else if (alpha[i] >= cost) {
        if (grad < pg_min_old) {
          std::swap(order[s], order[--active]);
          --s;
          continue;
        }
        pg = std::max(grad, 0.0);
      } else {
        pg = grad;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - grad / q_diag[i], 0.0, cost);
      const double step = (alpha[i] - old) * yi;
      for (std::size_t k = 0; k < x.stride; ++k) w[k] += step * row[k];
    }
    if (pg_max - pg_min < options.tolerance) {
      if (active == count) break;
      active = count;
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? inf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -inf : pg_min;
    if ((epoch + 1) % kGapCheckInterval == 0) {
      const double dual = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * dot(w.data(), w.data(), w.size());
      const double primal = primal_objective(x, labels, w, cost);
      if (primal - dual <= options.tolerance * std::max(1.0, std::abs(primal))) break;
    }
  }
  Eigen::VectorXd weights(dim);
  for (Eigen::Index k = 0; k < dim; ++k) weights[k] = w[static_cast<std::size_t>(k)];
  const double bias = w[static_cast<std::size_t>(dim)];
  if (!weights.allFinite() || !std::isfinite(bias)) throw Error("linear model diverged");
  return LinearModel{std::move(weights), bias, cost};
}

double decision_value(const LinearModel& m, const Eigen::VectorXd& feature) {
  if (feature.size() != m.weights.size()) throw Error("feature dimension mismatch");
  return m.weights.dot(feature) + m.bias;
}

int predict_label(const LinearModel& m, const Eigen::VectorXd& feature) {
  return decision_value(m, feature) >= 0.0 ? 1 : -1;
}

}  // namespace ssb
