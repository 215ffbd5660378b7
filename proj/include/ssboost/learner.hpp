#pragma once

#include "ssboost/core.hpp"

#include <cstdint>
#include <span>

namespace ssb {

struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double cost = 1.0;
};

struct LinearTrainOptions {
  double tolerance = 1e-6;
  int max_epochs = 2000;
};

/// L2-regularized hinge-loss linear SVM, solved by dual coordinate descent.
/// Rows of `features` are samples. The bias is an extra constant feature and
/// is regularized along with the weights.
LinearModel train_linear(const Eigen::MatrixXd& features, std::span<const int> labels, double cost,
                         std::uint64_t seed, const LinearTrainOptions& options = {});

double decision_value(const LinearModel& m, const Eigen::VectorXd& feature);

/// sign(w.x + b), with 0 mapped to +1.
int predict_label(const LinearModel& m, const Eigen::VectorXd& feature);

}  // namespace ssb
