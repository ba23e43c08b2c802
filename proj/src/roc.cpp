#include "rfdm/roc.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

#include "rfdm/error.hpp"

namespace rfdm {

double trapezoid_auc(std::span<const RocPoint> pts) {
  double a = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    a += (pts[k].fpr - pts[k - 1].fpr) * (pts[k].tpr + pts[k - 1].tpr) * 0.5;
  }
  return a;
}

RocCurve roc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) throw DataError("roc: scores and truth flags differ in length");
  const auto n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t n_neg = positive.size() - n_pos;
  if (n_pos == 0) throw DataError("roc: truth set is empty");
  if (n_neg == 0) throw DataError("roc: every item is a positive");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve c;
  c.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    // One step per group of tied scores.
    while (k < order.size() && scores[order[k]] == s) {
      (positive[order[k]] ? tp : fp) += 1;
      ++k;
    }
    c.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                        static_cast<double>(tp) / static_cast<double>(n_pos)});
  }
  c.auc = trapezoid_auc(c.points);
  return c;
}

RocCurve roc(const std::vector<RankedFeature>& ranking, std::span<const std::size_t> truth) {
  std::vector<double> scores(ranking.size());
  std::unique_ptr<bool[]> positive(new bool[ranking.size()]());
  std::vector<char> seen(ranking.size(), 0);
  for (const auto& r : ranking) {
    if (r.feature >= ranking.size() || seen[r.feature]) throw DataError("roc: ranking is not a permutation of its universe");
    seen[r.feature] = 1;
    scores[r.feature] = r.score;
  }
  for (std::size_t t : truth) {
    if (t >= ranking.size()) throw DataError("roc: truth item outside the ranked universe");
    positive[t] = true;
  }
  return roc(scores, std::span<const bool>(positive.get(), ranking.size()));
}

RocCurve roc(const std::vector<RankedPair>& ranking,
             std::span<const std::pair<std::size_t, std::size_t>> truth) {
  std::vector<std::pair<std::size_t, std::size_t>> t;
  for (auto [a, b] : truth) t.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::vector<double> scores(ranking.size());
  std::unique_ptr<bool[]> positive(new bool[ranking.size()]);
  std::size_t matched = 0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    scores[k] = ranking[k].score;
    const std::pair<std::size_t, std::size_t> key{std::min(ranking[k].a, ranking[k].b),
                                                  std::max(ranking[k].a, ranking[k].b)};
    positive[k] = std::binary_search(t.begin(), t.end(), key);
    if (positive[k]) ++matched;
  }
  if (matched != t.size()) throw DataError("roc: truth pair outside the ranked universe");
  return roc(scores, std::span<const bool>(positive.get(), ranking.size()));
}

double interpolate_tpr(const RocCurve& curve, double fpr) {
  const auto& p = curve.points;
  if (p.empty()) throw DataError("interpolate_tpr: empty curve");
  double upper = -1.0;
  for (const RocPoint& pt : p) {
    if (pt.fpr == fpr) upper = std::max(upper, pt.tpr);
  }
  if (upper >= 0.0) return upper;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k - 1].fpr < fpr && fpr < p[k].fpr) {
      const double t = (fpr - p[k - 1].fpr) / (p[k].fpr - p[k - 1].fpr);
      return p[k - 1].tpr + t * (p[k].tpr - p[k - 1].tpr);
    }
  }
  return fpr < p.front().fpr ? p.front().tpr : p.back().tpr;
}

RocCurve mean_roc(std::span<const RocCurve> curves, std::size_t grid_points) {
  if (curves.empty()) throw DataError("mean_roc: no curves");
  if (grid_points < 2) throw DataError("mean_roc: grid needs at least 2 points");
  RocCurve m;
  m.points.push_back({0.0, 0.0});
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    double s = 0.0;
    for (const RocCurve& c : curves) s += interpolate_tpr(c, x);
    m.points.push_back({x, s / static_cast<double>(curves.size())});
  }
  m.auc = trapezoid_auc(m.points);
  return m;
}

}  // namespace rfdm
