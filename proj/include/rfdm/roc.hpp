#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rfdm/importance.hpp"

namespace rfdm {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1), fpr nondecreasing
  double auc = 0.0;
  friend bool operator==(const RocCurve&, const RocCurve&) = default;
};

double trapezoid_auc(std::span<const RocPoint> points);

/// ROC of the ranking implied by `scores` (higher = more likely positive).
/// Items with equal scores form one diagonal step. Throws DataError when
/// either class is empty.
RocCurve roc(std::span<const double> scores, std::span<const bool> positive);

RocCurve roc(const std::vector<RankedFeature>& ranking, std::span<const std::size_t> truth);
RocCurve roc(const std::vector<RankedPair>& ranking,
             std::span<const std::pair<std::size_t, std::size_t>> truth);

/// TPR at `fpr`; at a vertical segment the upper value is taken.
double interpolate_tpr(const RocCurve& curve, double fpr);

/// Vertical averaging on an equispaced FPR grid of `grid_points` values.
RocCurve mean_roc(std::span<const RocCurve> curves, std::size_t grid_points = 101);

}  // namespace rfdm
