#include "ssboost/model.hpp"

#include "ssboost/parallel.hpp"

#include <cmath>
#include <map>

namespace ssb {

int learner_output(const BaseLearner& learner, const Precondition& p, const Eigen::MatrixXd& band_scatter) {
  const Eigen::MatrixXd sub = project_scatter(band_scatter, p.channels);
  return predict_label(learner.linear, features_from_scatter(learner.csp, sub));
}

void AdditiveModel::validate() const {
  if (!std::isfinite(intercept)) throw Error("model intercept is not finite");
  if (selected_k < 0 || static_cast<std::size_t>(selected_k) > terms.size())
    throw Error("selected_k out of range");
  if (channel_names.empty()) throw Error("model has no channels");
  if (!(sample_rate_hz > 0.0)) throw Error("model sample rate must be positive");
  for (const auto& t : terms) {
    if (!std::isfinite(t.alpha)) throw Error("model alpha is not finite");
    if (t.precondition.channels.size() != n_channels()) throw Error("term channel mask length mismatch");
    if (t.learner.csp.n_channels != static_cast<int>(t.precondition.channels.count()))
      throw Error("term CSP width does not match its channel set");
  }
}

Prediction predict(const AdditiveModel& model, const TrialMatrix& trial) {
  if (static_cast<std::size_t>(trial.n_channels()) != model.n_channels())
    throw Error("trial has " + std::to_string(trial.n_channels()) + " channels, model expects " +
                std::to_string(model.n_channels()));
  double score = model.intercept;
  if (model.selected_k > 0) {
    const TrialSpectrum spectrum(detrend(trial).samples, model.sample_rate_hz);
    std::map<Band, Eigen::MatrixXd> scatter;
    for (int k = 0; k < model.selected_k; ++k) {
      const auto& term = model.terms[static_cast<std::size_t>(k)];
      auto it = scatter.find(term.precondition.band);
      if (it == scatter.end())
        it = scatter.emplace(term.precondition.band, spectrum.band_scatter(term.precondition.band)).first;
      score += term.alpha * learner_output(term.learner, term.precondition, it->second);
    }
  }
  return Prediction{score, sign_label(score)};
}

std::vector<Prediction> predict_all(const AdditiveModel& model, const SessionDataset& data, unsigned threads) {
  std::vector<Prediction> out(data.trials.size());
  parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = predict(model, data.trials[i]); });
  return out;
}

}  // namespace ssb
