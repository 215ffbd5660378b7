#include "ssboost/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace ssb {

namespace {

double weight_of(const ModelTerm& t, const ImportanceOptions& o) { return o.absolute ? std::abs(t.alpha) : t.alpha; }

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<double> channel_importance(const AdditiveModel& model, const ImportanceOptions& options) {
  std::vector<double> out(model.n_channels(), 0.0);
  for (int k = 0; k < model.selected_k; ++k) {
    const auto& term = model.terms[static_cast<std::size_t>(k)];
    for (auto c : term.precondition.channels.indices()) out.at(c) += weight_of(term, options);
  }
  return out;
}

std::vector<double> band_importance(const AdditiveModel& model, const ImportanceOptions& options) {
  std::vector<double> out(kBandBins, 0.0);
  for (int k = 0; k < model.selected_k; ++k) {
    const auto& term = model.terms[static_cast<std::size_t>(k)];
    for (int u = 0; u < kBandBins; ++u)
      if (term.precondition.band.contains_unit(kGlobalLowHz + u)) out[static_cast<std::size_t>(u)] += weight_of(term, options);
  }
  return out;
}

double normalized_variance(std::span<const double> importance) {
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (importance.empty() || total == 0.0 || !std::isfinite(total)) throw Error("empty profile");
  const double n = static_cast<double>(importance.size());
  const double mean = 1.0 / n;
  double var = 0.0;
  for (double v : importance) {
    const double d = v / total - mean;
    var += d * d;
  }
  return var / n;
}

double band_center_of_mass(std::span<const double> band_importance) {
  double weight = 0.0, moment = 0.0;
  for (std::size_t u = 0; u < band_importance.size(); ++u) {
    weight += band_importance[u];
    moment += (kGlobalLowHz + static_cast<double>(u) + 0.5) * band_importance[u];
  }
  if (weight == 0.0 || !std::isfinite(weight)) throw Error("empty profile");
  return moment / weight;
}

ImportanceProfile make_profile(const AdditiveModel& model, int session_index, const ImportanceOptions& options) {
  ImportanceProfile p;
  p.session_index = session_index;
  p.channel_importance = channel_importance(model, options);
  p.band_importance = band_importance(model, options);
  const double total = std::accumulate(p.channel_importance.begin(), p.channel_importance.end(), 0.0);
  p.channel_variance = total != 0.0 ? normalized_variance(p.channel_importance) : 0.0;
  return p;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("spearman needs two equal-length series");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<DriftSeries> temporal_differences(std::span<const ImportanceProfile> profiles,
                                              std::span<const ImportanceTarget> targets) {
  if (profiles.size() < 2) throw Error("need at least 2 profiles");
  for (const auto& p : profiles) {
    if (p.channel_importance.size() != profiles.front().channel_importance.size() ||
        p.band_importance.size() != profiles.front().band_importance.size())
      throw Error("profile vector lengths differ");
  }
  std::vector<double> sessions;
  for (const auto& p : profiles) sessions.push_back(p.session_index);

  std::vector<DriftSeries> out;
  for (const auto& target : targets) {
    std::vector<double> series;
    for (const auto& p : profiles) {
      const auto& v = target.kind == TargetKind::Channel ? p.channel_importance : p.band_importance;
      if (target.index >= v.size()) throw Error("importance target out of range");
      series.push_back(v[target.index]);
    }
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
    DriftSeries d;
    d.target = target;
    for (double v : series) d.differences.push_back(v - mean);
    const auto rho = spearman(sessions, series);
    d.constant = !rho.has_value();
    d.spearman = rho.value_or(0.0);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace ssb
