#pragma once

#include "ssboost/core.hpp"
#include "ssboost/dsp.hpp"
#include "ssboost/features.hpp"
#include "ssboost/learner.hpp"

#include <string>
#include <vector>

namespace ssb {

/// CSP filters plus the linear classifier, trained under one precondition.
struct BaseLearner {
  CspModel csp;
  LinearModel linear;
};

/// Hard +-1 output of a learner on a full-channel, zero-mean band scatter.
int learner_output(const BaseLearner& learner, const Precondition& p, const Eigen::MatrixXd& band_scatter);

struct ModelTerm {
  double alpha = 0.0;
  BaseLearner learner;
  Precondition precondition;
};

/// F(x) = intercept + sum_{k < selected_k} alpha_k f_k(x).
struct AdditiveModel {
  double intercept = 0.0;
  std::vector<ModelTerm> terms;
  int selected_k = 0;
  Mode mode = Mode::Plain;
  double sample_rate_hz = 256.0;
  std::vector<std::string> channel_names;

  std::size_t n_channels() const { return channel_names.size(); }
  void validate() const;
};

struct Prediction {
  double score = 0.0;
  int label = 1;
};

Prediction predict(const AdditiveModel& model, const TrialMatrix& trial);
std::vector<Prediction> predict_all(const AdditiveModel& model, const SessionDataset& data, unsigned threads = 1);

inline int sign_label(double score) { return score >= 0.0 ? 1 : -1; }

}  // namespace ssb
