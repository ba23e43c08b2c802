#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfdm/dataset.hpp"
#include "rfdm/distance_matrix.hpp"
#include "rfdm/execution.hpp"
#include "rfdm/genotype.hpp"
#include "rfdm/random.hpp"

namespace rfdm {

enum class GainVariant {
  /// (1/2N_n) S_n - (1/2N_l) S_l - (1/2N_r) S_r, S = sum of squared
  /// distances over ordered pairs. Reproduces the sum-of-squares regression
  /// criterion exactly for Euclidean distances.
  per_node_normalized,
  /// -(1/2N_n)(S_n - S_l - S_r), always <= 0.
  literal,
};

/// Decides the default mtry: ceil(sqrt(p)) for classification-style runs,
/// ceil(p/3) for regression-style runs.
enum class TaskKind { regression, classification };

struct ForestParams {
  std::size_t n_trees = 500;
  std::size_t mtry = 0;  // 0 = task default
  TaskKind task = TaskKind::regression;
  std::size_t max_depth = 7;
  std::size_t min_node_size = 5;
  std::uint64_t seed = 0;
  GainVariant gain_variant = GainVariant::per_node_normalized;

  std::size_t resolved_mtry(std::size_t n_features) const;
};

std::size_t default_mtry(TaskKind task, std::size_t n_features);

/// Branch rule: x <= split_point goes left.
struct SplitCriterion {
  std::size_t feature = 0;
  double split_point = 0.0;
  friend bool operator==(const SplitCriterion&, const SplitCriterion&) = default;
};

struct SplitResult {
  SplitCriterion criterion;
  double gain = 0.0;
};

/// Gains closer than this are ties (lowest feature, then lowest split point wins).
inline constexpr double kGainTieTolerance = 1e-12;

/// Generalized information gain of splitting `parent` into `left` and
/// `right`. Index sets are multisets (bootstrap duplicates allowed); `left`
/// and `right` must be nonempty and together form `parent`.
double generalized_gain(const DistanceMatrix& d, std::span<const std::size_t> parent,
                        std::span<const std::size_t> left, std::span<const std::size_t> right,
                        GainVariant variant = GainVariant::per_node_normalized);

/// Best (feature, split point) over `candidates` x midpoints between distinct
/// observed values. Absent when no split point exists, or, for the
/// per-node-normalized variant, when the best gain is not positive.
std::optional<SplitResult> best_split(const DistanceMatrix& d, std::span<const std::size_t> node,
                                      const FeatureMatrix& x,
                                      std::span<const std::size_t> candidates,
                                      GainVariant variant = GainVariant::per_node_normalized);

/// Same search, on a precomputed squared distance matrix.
std::optional<SplitResult> best_split_squared(const Eigen::MatrixXd& squared,
                                              std::span<const std::size_t> node,
                                              const FeatureMatrix& x,
                                              std::span<const std::size_t> candidates,
                                              GainVariant variant);

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  double split_point = 0.0;
  double gain = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t begin = 0;  // member range in Tree::samples
  std::uint32_t end = 0;
  std::uint32_t depth = 0;
  std::uint32_t candidate_begin = 0;  // range in Tree::candidates
  std::uint32_t candidate_count = 0;

  bool is_leaf() const noexcept { return feature < 0; }
  std::uint32_t size() const noexcept { return end - begin; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary split tree. Node 0 is the root; `samples` holds the bootstrap
/// multiset, partitioned so that every node's members are contiguous.
struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<std::uint32_t> samples;
  std::vector<std::uint32_t> candidates;
  std::vector<std::uint16_t> in_bag_count;  // per subject
  std::vector<std::int32_t> terminal;       // leaf reached by every subject

  bool is_oob(std::size_t subject) const noexcept { return in_bag_count[subject] == 0; }
  std::span<const std::uint32_t> members(const TreeNode& n) const noexcept {
    return {samples.data() + n.begin, n.size()};
  }
  std::span<const std::uint32_t> candidates_of(const TreeNode& n) const noexcept {
    return {candidates.data() + n.candidate_begin, n.candidate_count};
  }

  friend bool operator==(const Tree&, const Tree&) = default;
};

struct Forest {
  ForestParams params;  // mtry resolved
  std::size_t n_subjects = 0;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;
};

bool operator==(const ForestParams& a, const ForestParams& b);
bool operator==(const Forest& a, const Forest& b);

/// Leaf reached by row `row` of `x`.
std::int32_t route(const Tree& tree, const FeatureMatrix& x, std::size_t row);

/// Grows one tree on a bootstrap sample drawn from `rng`. `squared` is the
/// element-wise squared distance matrix; `params.mtry` must be resolved.
Tree grow_tree(const FeatureMatrix& x, const Eigen::MatrixXd& squared, const ForestParams& params,
               Rng rng);

/// Seed-derived tree stream: tree t uses Rng(params.seed).substream(t).
Rng tree_stream(std::uint64_t seed, std::size_t tree_index);

Forest grow_forest(const FeatureMatrix& x, const DistanceMatrix& d, ForestParams params,
                   Execution exec = Execution::parallel);
Forest grow_forest(const Dataset& data, ForestParams params, Execution exec = Execution::parallel);

/// Out-of-bag terminal-node co-occurrence rates.
struct ProximityMatrix {
  Eigen::MatrixXd values;    // W_ij, unit diagonal
  Eigen::MatrixXi joint_oob; // w_ij: trees where both i and j are OOB
  std::size_t never_joint_oob_pairs = 0;  // unordered pairs with w_ij = 0 (W_ij set to 0)
};

ProximityMatrix proximity(const Forest& forest, Execution exec = Execution::parallel);

/// Reroutes every subject through each tree with `x` instead of using the
/// stored terminal assignments.
ProximityMatrix proximity(const Forest& forest, const FeatureMatrix& x,
                          Execution exec = Execution::parallel);

}  // namespace rfdm
