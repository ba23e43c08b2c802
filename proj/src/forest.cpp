#include "rfdm/forest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "rfdm/error.hpp"

namespace rfdm {

std::size_t default_mtry(TaskKind task, std::size_t p) {
  if (p == 0) return 0;
  if (task == TaskKind::classification) {
    std::size_t m = static_cast<std::size_t>(std::sqrt(static_cast<double>(p)));
    while (m * m < p) ++m;
    while (m > 1 && (m - 1) * (m - 1) >= p) --m;
    return m;
  }
  return (p + 2) / 3;
}

std::size_t ForestParams::resolved_mtry(std::size_t p) const {
  const std::size_t m = mtry ? mtry : default_mtry(task, p);
  if (m == 0 || m > p) {
    throw DataError("mtry " + std::to_string(m) + " is not in [1, " + std::to_string(p) + "]");
  }
  return m;
}

bool operator==(const ForestParams& a, const ForestParams& b) {
  return a.n_trees == b.n_trees && a.mtry == b.mtry && a.task == b.task &&
         a.max_depth == b.max_depth && a.min_node_size == b.min_node_size && a.seed == b.seed &&
         a.gain_variant == b.gain_variant;
}

bool operator==(const Forest& a, const Forest& b) {
  return a.params == b.params && a.n_subjects == b.n_subjects && a.n_features == b.n_features &&
         a.feature_names == b.feature_names && a.trees == b.trees;
}

namespace {

double gain_from_sums(double s_parent, double s_left, double s_right, std::size_t n_parent,
                      std::size_t n_left, std::size_t n_right, GainVariant variant) {
  if (variant == GainVariant::literal) {
    return -(s_parent - s_left - s_right) / (2.0 * static_cast<double>(n_parent));
  }
  return s_parent / (2.0 * static_cast<double>(n_parent)) -
         s_left / (2.0 * static_cast<double>(n_left)) -
         s_right / (2.0 * static_cast<double>(n_right));
}

double pair_sum(const DistanceMatrix& d, std::span<const std::size_t> set) {
  double s = 0.0;
  for (std::size_t i : set) {
    for (std::size_t j : set) s += d(i, j) * d(i, j);
  }
  return s;
}

}  // namespace

double generalized_gain(const DistanceMatrix& d, std::span<const std::size_t> parent,
                        std::span<const std::size_t> left, std::span<const std::size_t> right,
                        GainVariant variant) {
  if (left.empty() || right.empty()) throw DataError("generalized_gain: empty child");
  if (left.size() + right.size() != parent.size()) {
    throw DataError("generalized_gain: children do not partition the parent");
  }
  std::vector<std::size_t> a(parent.begin(), parent.end());
  std::vector<std::size_t> b(left.begin(), left.end());
  b.insert(b.end(), right.begin(), right.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw DataError("generalized_gain: children do not partition the parent");
  for (std::size_t i : a) {
    if (i >= d.size()) throw DataError("generalized_gain: index out of range");
  }
  return gain_from_sums(pair_sum(d, parent), pair_sum(d, left), pair_sum(d, right), parent.size(),
                        left.size(), right.size(), variant);
}

std::optional<SplitResult> best_split_squared(const Eigen::MatrixXd& squared,
                                              std::span<const std::size_t> node,
                                              const FeatureMatrix& x,
                                              std::span<const std::size_t> candidates,
                                              GainVariant variant) {
  const std::size_t n = node.size();
  if (n < 2 || candidates.empty()) return std::nullopt;

  // Node-local squared distances and row sums.
  Eigen::MatrixXd q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t a = 0; a < n; ++a) {
      q(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          squared(static_cast<Eigen::Index>(node[a]), static_cast<Eigen::Index>(node[b]));
    }
  }
  const Eigen::VectorXd r = q.colwise().sum().transpose();
  const double s_parent = r.sum();

  std::vector<std::size_t> features(candidates.begin(), candidates.end());
  std::sort(features.begin(), features.end());

  std::optional<SplitResult> best;
  std::vector<std::size_t> order(n);
  std::vector<double> value(n);
  std::vector<std::size_t> thresholds;
  std::vector<double> s_small(n + 1), r_small(n + 1);

  for (std::size_t f : features) {
    if (f >= x.n_cols()) throw DataError("best_split: candidate feature out of range");
    for (std::size_t a = 0; a < n; ++a) value[a] = x(node[a], f);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    thresholds.clear();
    for (std::size_t k = 1; k < n; ++k) {
      if (value[order[k - 1]] < value[order[k]]) thresholds.push_back(k);
    }
    if (thresholds.empty()) continue;

    // Pair sums of the smaller side: prefixes from the left for k <= n - k,
    // suffixes from the right otherwise. s_small[k] = S of that side.
    std::size_t left_reach = 0;
    std::size_t right_reach = n;
    for (std::size_t k : thresholds) {
      if (k <= n - k) left_reach = std::max(left_reach, k);
      else right_reach = std::min(right_reach, k);
    }
    {
      double s = 0.0, rs = 0.0;
      for (std::size_t m = 0; m < left_reach; ++m) {
        const auto i = static_cast<Eigen::Index>(order[m]);
        double cross = 0.0;
        for (std::size_t t = 0; t < m; ++t) cross += q(static_cast<Eigen::Index>(order[t]), i);
        s += 2.0 * cross + q(i, i);
        rs += r(i);
        s_small[m + 1] = s;
        r_small[m + 1] = rs;
      }
    }
    {
      double s = 0.0, rs = 0.0;
      for (std::size_t m = n; m > right_reach; --m) {
        const auto i = static_cast<Eigen::Index>(order[m - 1]);
        double cross = 0.0;
        for (std::size_t t = m; t < n; ++t) cross += q(static_cast<Eigen::Index>(order[t]), i);
        s += 2.0 * cross + q(i, i);
        rs += r(i);
        s_small[m - 1] = s;
        r_small[m - 1] = rs;
      }
    }

    for (std::size_t k : thresholds) {
      double s_left, s_right;
      if (k <= n - k) {
        s_left = s_small[k];
        s_right = s_parent + s_left - 2.0 * r_small[k];
      } else {
        s_right = s_small[k];
        s_left = s_parent + s_right - 2.0 * r_small[k];
      }
      const double g = gain_from_sums(s_parent, s_left, s_right, n, k, n - k, variant);
      if (!best || g > best->gain + kGainTieTolerance) {
        const double lo = value[order[k - 1]];
        const double hi = value[order[k]];
        double s = lo + 0.5 * (hi - lo);
        if (!(s < hi)) s = lo;
        best = SplitResult{SplitCriterion{f, s}, g};
      }
    }
  }
  if (best && variant == GainVariant::per_node_normalized) {
    const double scale = std::max(1.0, s_parent / (2.0 * static_cast<double>(n)));
    if (best->gain <= kGainTieTolerance * scale) return std::nullopt;
  }
  return best;
}

std::optional<SplitResult> best_split(const DistanceMatrix& d, std::span<const std::size_t> node,
                                      const FeatureMatrix& x,
                                      std::span<const std::size_t> candidates,
                                      GainVariant variant) {
  for (std::size_t i : node) {
    if (i >= d.size() || i >= x.n_rows()) throw DataError("best_split: subject index out of range");
  }
  return best_split_squared(d.squared(), node, x, candidates, variant);
}

std::int32_t route(const Tree& tree, const FeatureMatrix& x, std::size_t row) {
  std::int32_t k = 0;
  while (!tree.nodes[static_cast<std::size_t>(k)].is_leaf()) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(k)];
    k = x(row, static_cast<std::size_t>(n.feature)) <= n.split_point ? n.left : n.right;
  }
  return k;
}

Rng tree_stream(std::uint64_t seed, std::size_t tree_index) {
  return Rng(seed).substream(tree_index);
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, const Eigen::MatrixXd& squared, const ForestParams& params,
              Rng& rng, Tree& tree)
      : x_(x), squared_(squared), params_(params), rng_(rng), tree_(tree),
        mtry_(params.resolved_mtry(x.n_cols())), perm_(x.n_cols()) {}

  void grow(std::size_t index) {
    const TreeNode node = tree_.nodes[index];
    const std::size_t n = node.size();
    if (node.depth >= params_.max_depth || n < 2 * params_.min_node_size) return;

    // Partial Fisher-Yates draw of mtry features, stored ascending.
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const std::size_t p = perm_.size();
    for (std::size_t k = 0; k < mtry_; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng_.below(p - k));
      std::swap(perm_[k], perm_[j]);
    }
    std::vector<std::size_t> cands(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(mtry_));
    std::sort(cands.begin(), cands.end());
    tree_.nodes[index].candidate_begin = static_cast<std::uint32_t>(tree_.candidates.size());
    tree_.nodes[index].candidate_count = static_cast<std::uint32_t>(mtry_);
    for (std::size_t c : cands) tree_.candidates.push_back(static_cast<std::uint32_t>(c));

    members_.assign(tree_.samples.begin() + node.begin, tree_.samples.begin() + node.end);
    const auto split = best_split_squared(squared_, members_, x_, cands, params_.gain_variant);
    if (!split) return;

    const std::size_t f = split->criterion.feature;
    const double s = split->criterion.split_point;
    auto first = tree_.samples.begin() + node.begin;
    auto last = tree_.samples.begin() + node.end;
    const auto mid = std::stable_partition(first, last, [&](std::uint32_t i) { return x_(i, f) <= s; });
    const auto split_at = static_cast<std::uint32_t>(mid - tree_.samples.begin());

    TreeNode left;
    left.begin = node.begin;
    left.end = split_at;
    left.depth = node.depth + 1;
    TreeNode right;
    right.begin = split_at;
    right.end = node.end;
    right.depth = node.depth + 1;

    const auto li = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back(left);
    const auto ri = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back(right);
    TreeNode& self = tree_.nodes[index];
    self.feature = static_cast<std::int32_t>(f);
    self.split_point = s;
    self.gain = split->gain;
    self.left = li;
    self.right = ri;

    grow(static_cast<std::size_t>(li));
    grow(static_cast<std::size_t>(ri));
  }

 private:
  const FeatureMatrix& x_;
  const Eigen::MatrixXd& squared_;
  const ForestParams& params_;
  Rng& rng_;
  Tree& tree_;
  std::size_t mtry_;
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> members_;
};

}  // namespace

Tree grow_tree(const FeatureMatrix& x, const Eigen::MatrixXd& squared, const ForestParams& params,
               Rng rng) {
  const std::size_t n = x.n_rows();
  if (static_cast<std::size_t>(squared.rows()) != n || static_cast<std::size_t>(squared.cols()) != n) {
    throw DataError("grow_tree: distance matrix does not match the feature rows");
  }
  Tree tree;
  tree.in_bag_count.assign(n, 0);
  tree.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::uint32_t>(rng.below(n));
    tree.samples[k] = i;
    ++tree.in_bag_count[i];
  }
  std::sort(tree.samples.begin(), tree.samples.end());

  TreeNode root;
  root.begin = 0;
  root.end = static_cast<std::uint32_t>(n);
  tree.nodes.push_back(root);
  TreeBuilder(x, squared, params, rng, tree).grow(0);

  tree.terminal.resize(n);
  for (std::size_t i = 0; i < n; ++i) tree.terminal[i] = route(tree, x, i);
  return tree;
}

Forest grow_forest(const FeatureMatrix& x, const DistanceMatrix& d, ForestParams params,
                   Execution exec) {
  if (d.size() != x.n_rows()) throw DataError("grow_forest: distance matrix and features disagree on N");
  if (x.n_rows() < 2) throw DataError("grow_forest: need at least 2 subjects");
  if (x.n_rows() > 65535) throw DataError("grow_forest: at most 65535 subjects");
  if (params.n_trees == 0) throw DataError("grow_forest: n_trees must be positive");
  if (params.min_node_size == 0) throw DataError("grow_forest: min_node_size must be positive");
  params.mtry = params.resolved_mtry(x.n_cols());

  Forest forest;
  forest.params = params;
  forest.n_subjects = x.n_rows();
  forest.n_features = x.n_cols();
  forest.feature_names = x.names();
  forest.trees.resize(params.n_trees);

  const Eigen::MatrixXd squared = d.squared();
  std::exception_ptr failure;
  const auto n_trees = static_cast<std::ptrdiff_t>(params.n_trees);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::parallel)
  for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
    try {
      forest.trees[static_cast<std::size_t>(t)] =
          grow_tree(x, squared, params, tree_stream(params.seed, static_cast<std::size_t>(t)));
    } catch (...) {
#pragma omp critical(rfdm_forest_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return forest;
}

Forest grow_forest(const Dataset& data, ForestParams params, Execution exec) {
  data.validate();
  return grow_forest(FeatureMatrix::from_genotypes(data.genotypes), data.distances, params, exec);
}

namespace {

ProximityMatrix proximity_from_terminals(const Forest& forest,
                                         const std::vector<const std::int32_t*>& terminals,
                                         Execution exec) {
  const auto n = static_cast<Eigen::Index>(forest.n_subjects);
  ProximityMatrix pm;
  pm.values = Eigen::MatrixXd::Zero(n, n);
  pm.joint_oob = Eigen::MatrixXi::Zero(n, n);
  Eigen::MatrixXi same = Eigen::MatrixXi::Zero(n, n);

#pragma omp parallel for schedule(dynamic, 4) if (exec == Execution::parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      const Tree& tree = forest.trees[t];
      if (!tree.is_oob(static_cast<std::size_t>(i))) continue;
      const std::int32_t* term = terminals[t];
      const std::int32_t leaf = term[i];
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!tree.is_oob(static_cast<std::size_t>(j))) continue;
        ++pm.joint_oob(j, i);
        if (term[j] == leaf) ++same(j, i);
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        pm.values(i, j) = 1.0;
      } else if (pm.joint_oob(i, j) == 0) {
        pm.values(i, j) = 0.0;
        if (i < j) ++pm.never_joint_oob_pairs;
      } else {
        pm.values(i, j) = static_cast<double>(same(i, j)) / static_cast<double>(pm.joint_oob(i, j));
      }
    }
  }
  return pm;
}

}  // namespace

ProximityMatrix proximity(const Forest& forest, Execution exec) {
  std::vector<const std::int32_t*> terminals;
  for (const Tree& t : forest.trees) {
    if (t.terminal.size() != forest.n_subjects) throw DataError("proximity: tree lacks terminal map");
    terminals.push_back(t.terminal.data());
  }
  return proximity_from_terminals(forest, terminals, exec);
}

ProximityMatrix proximity(const Forest& forest, const FeatureMatrix& x, Execution exec) {
  if (x.n_rows() != forest.n_subjects || x.n_cols() != forest.n_features) {
    throw DataError("proximity: features do not match the forest");
  }
  std::vector<std::vector<std::int32_t>> routed(forest.trees.size());
  std::vector<const std::int32_t*> terminals;
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    routed[t].resize(x.n_rows());
    for (std::size_t i = 0; i < x.n_rows(); ++i) routed[t][i] = route(forest.trees[t], x, i);
    terminals.push_back(routed[t].data());
  }
  return proximity_from_terminals(forest, terminals, exec);
}

}  // namespace rfdm
