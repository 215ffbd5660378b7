#pragma once

#include "ssboost/model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ssb {

inline constexpr int kBandBins = kGlobalHighHz - kGlobalLowHz;  // unit bins [5,6) .. [39,40)

struct ImportanceProfile {
  int session_index = 0;
  std::vector<double> channel_importance;
  std::vector<double> band_importance;
  /// Population variance of the normalized channel importance (0 when empty).
  double channel_variance = 0.0;
};

struct ImportanceOptions {
  /// Accumulate |alpha| instead of the signed alpha.
  bool absolute = false;
};

/// L = sum_{k < selected_k} alpha_k * mask(S_k).
std::vector<double> channel_importance(const AdditiveModel& model, const ImportanceOptions& options = {});

/// Unit bin [l, l+1) accumulates alpha_k of every term whose band contains it.
std::vector<double> band_importance(const AdditiveModel& model, const ImportanceOptions& options = {});

/// Normalizes to sum 1 and returns the population variance.
double normalized_variance(std::span<const double> importance);

/// sum(center * w) / sum(w) with bin centers l + 0.5.
double band_center_of_mass(std::span<const double> band_importance);

ImportanceProfile make_profile(const AdditiveModel& model, int session_index, const ImportanceOptions& options = {});

enum class TargetKind { Channel, Bin };

struct ImportanceTarget {
  TargetKind kind = TargetKind::Channel;
  std::size_t index = 0;
};

struct DriftSeries {
  ImportanceTarget target;
  std::vector<double> differences;
  double spearman = 0.0;
  bool constant = false;
};

/// Spearman rank correlation with average ranks for ties; nullopt when either
/// side is constant.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// For each target: importance_t - mean_t(importance), plus its Spearman
/// correlation with the session index.
std::vector<DriftSeries> temporal_differences(std::span<const ImportanceProfile> profiles,
                                              std::span<const ImportanceTarget> targets);

}  // namespace ssb
