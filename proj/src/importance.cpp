#include "rfdm/importance.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "rfdm/error.hpp"

namespace rfdm {

ImportanceReport gini_importance(const Forest& forest) {
  const std::size_t p = forest.n_features;
  ImportanceReport rep;
  rep.score.assign(p, 0.0);
  rep.candidacy.assign(p, 0);
  rep.selections.assign(p, 0);
  std::vector<double> gain_sum(p, 0.0);
  for (const Tree& t : forest.trees) {
    for (const TreeNode& n : t.nodes) {
      for (std::uint32_t c : t.candidates_of(n)) ++rep.candidacy[c];
      if (!n.is_leaf()) {
        const auto f = static_cast<std::size_t>(n.feature);
        ++rep.selections[f];
        gain_sum[f] += n.gain;
      }
    }
  }
  for (std::size_t f = 0; f < p; ++f) {
    if (rep.candidacy[f] > 0) rep.score[f] = gain_sum[f] / static_cast<double>(rep.candidacy[f]);
  }
  return rep;
}

PairInteractionReport::PairInteractionReport(std::size_t p)
    : p_(p), given_lower_(p > 1 ? p * (p - 1) / 2 : 0, 0.0), given_upper_(given_lower_.size(), 0.0) {}

std::size_t PairInteractionReport::index(std::size_t a, std::size_t b) const noexcept {
  if (a > b) std::swap(a, b);
  return a * p_ - a * (a + 1) / 2 + (b - a - 1);
}

std::pair<std::size_t, std::size_t> PairInteractionReport::pair_at(std::size_t k) const noexcept {
  std::size_t a = 0;
  while (k >= p_ - 1 - a) {
    k -= p_ - 1 - a;
    ++a;
  }
  return {a, a + 1 + k};
}

double PairInteractionReport::conditional(std::size_t inner, std::size_t outer) const noexcept {
  const std::size_t k = index(inner, outer);
  return outer < inner ? given_lower_[k] : given_upper_[k];
}

double PairInteractionReport::combined(std::size_t a, std::size_t b) const noexcept {
  return combined_at(index(a, b));
}

void PairInteractionReport::add(std::size_t inner, std::size_t outer, double value) noexcept {
  const std::size_t k = index(inner, outer);
  (outer < inner ? given_lower_[k] : given_upper_[k]) += value;
}

namespace {

using Contribution = std::tuple<std::uint32_t, std::uint32_t, double>;  // inner, outer, value

// Gains per split feature over the subtree rooted at `root`.
void subtree_gains(const Tree& t, std::int32_t root, std::vector<double>& acc,
                   std::vector<char>& seen, std::vector<std::uint32_t>& touched) {
  std::vector<std::int32_t> stack{root};
  while (!stack.empty()) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (n.is_leaf()) continue;
    const auto f = static_cast<std::uint32_t>(n.feature);
    if (!seen[f]) {
      seen[f] = 1;
      touched.push_back(f);
    }
    acc[f] += n.gain;
    stack.push_back(n.right);
    stack.push_back(n.left);
  }
}

std::vector<Contribution> tree_contributions(const Tree& t, std::size_t p, InteractionVariant variant) {
  std::vector<Contribution> out;
  std::vector<double> left(p, 0.0), right(p, 0.0);
  std::vector<char> seen(p, 0);
  std::vector<std::uint32_t> touched, features;
  for (const TreeNode& n : t.nodes) {
    if (n.is_leaf()) continue;
    const TreeNode& ln = t.nodes[static_cast<std::size_t>(n.left)];
    const TreeNode& rn = t.nodes[static_cast<std::size_t>(n.right)];
    if (ln.is_leaf() && rn.is_leaf()) continue;

    touched.clear();
    subtree_gains(t, n.left, left, seen, touched);
    subtree_gains(t, n.right, right, seen, touched);
    features = touched;
    std::sort(features.begin(), features.end());

    const double wl = static_cast<double>(n.size()) / static_cast<double>(ln.size());
    const double wr = static_cast<double>(n.size()) / static_cast<double>(rn.size());
    const auto alpha = static_cast<std::uint32_t>(n.feature);
    for (std::uint32_t beta : features) {
      if (beta != alpha) {
        const double diff = wl * left[beta] - wr * right[beta];
        const double c = variant == InteractionVariant::squared ? diff * diff : std::abs(diff);
        if (c != 0.0) out.emplace_back(beta, alpha, 0.5 * c);
      }
      left[beta] = 0.0;
      right[beta] = 0.0;
      seen[beta] = 0;
    }
  }
  return out;
}

}  // namespace

PairInteractionReport pairwise_interaction(const Forest& forest, InteractionVariant variant,
                                           Execution exec) {
  const std::size_t p = forest.n_features;
  PairInteractionReport rep(p);
  std::vector<std::vector<Contribution>> per_tree(forest.trees.size());
  const auto n_trees = static_cast<std::ptrdiff_t>(forest.trees.size());
#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::parallel)
  for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
    per_tree[static_cast<std::size_t>(t)] =
        tree_contributions(forest.trees[static_cast<std::size_t>(t)], p, variant);
  }
  // Ordered merge keeps the floating-point sums independent of scheduling.
  for (const auto& list : per_tree) {
    for (const auto& [inner, outer, value] : list) rep.add(inner, outer, value);
  }
  return rep;
}

std::vector<RankedFeature> rank(const ImportanceReport& report) {
  std::vector<RankedFeature> out;
  out.reserve(report.size());
  for (std::size_t f = 0; f < report.size(); ++f) out.push_back({f, report.score[f]});
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedFeature& a, const RankedFeature& b) { return a.score > b.score; });
  return out;
}

std::vector<RankedPair> rank(const PairInteractionReport& report) {
  std::vector<RankedPair> out;
  out.reserve(report.n_pairs());
  const std::size_t p = report.n_features();
  std::size_t k = 0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b, ++k) out.push_back({a, b, report.combined_at(k)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedPair& a, const RankedPair& b) { return a.score > b.score; });
  return out;
}

}  // namespace rfdm
