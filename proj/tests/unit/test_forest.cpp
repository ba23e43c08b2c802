#include <fstream>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "rfdm/error.hpp"
#include "rfdm/forest.hpp"
#include "rfdm/forest_io.hpp"
#include "rfdm/metric.hpp"

using namespace rfdm;

namespace {

using Idx = std::vector<std::size_t>;

FeatureMatrix random_genotypes(Rng& rng, std::size_t n, std::size_t p) {
  std::vector<double> v(n * p);
  for (auto& x : v) x = static_cast<double>(rng.below(3));
  return FeatureMatrix(n, p, std::move(v));
}

// Every (feature, midpoint) split of `node`, scored with generalized_gain.
std::optional<SplitResult> exhaustive_best(const DistanceMatrix& d, const Idx& node, const FeatureMatrix& x,
                                           const Idx& candidates) {
  std::optional<SplitResult> best;
  for (auto f : candidates) {
    std::vector<double> values;
    for (auto i : node) values.push_back(x(i, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double s = 0.5 * (values[k] + values[k + 1]);
      Idx l, r;
      for (auto i : node) (x(i, f) <= s ? l : r).push_back(i);
      const double g = generalized_gain(d, node, l, r);
      if (!best || g > best->gain + kGainTieTolerance) best = SplitResult{{f, s}, g};
    }
  }
  if (best && best->gain <= 1e-12) best.reset();
  return best;
}

void check_structure(const Tree& t, std::size_t max_depth) {
  REQUIRE_FALSE(t.nodes.empty());
  for (const auto& n : t.nodes) {
    CHECK(n.depth <= max_depth);
    if (n.is_leaf()) continue;
    const auto& l = t.nodes[static_cast<std::size_t>(n.left)];
    const auto& r = t.nodes[static_cast<std::size_t>(n.right)];
    CHECK(l.depth == n.depth + 1);
    CHECK(r.depth == n.depth + 1);
    CHECK(l.begin == n.begin);
    CHECK(l.end == r.begin);
    CHECK(r.end == n.end);
    CHECK(l.size() > 0);
    CHECK(r.size() > 0);
  }
}

}  // namespace

TEST_CASE("generalized gain worked examples") {
  const Idx all{0, 1, 2};
  CHECK(generalized_gain(validate_distance_matrix(Eigen::MatrixXd::Zero(3, 3)), all, Idx{0}, Idx{1, 2}) == 0.0);

  Eigen::MatrixXd two(2, 2);
  two << 0, 2, 2, 0;
  CHECK(generalized_gain(validate_distance_matrix(two), Idx{0, 1}, Idx{0}, Idx{1}) == doctest::Approx(2.0));

  Eigen::MatrixXd y(3, 1);
  y << 0, 1, 4;
  const DistanceMatrix d = euclidean_distances(y);
  const double g = generalized_gain(d, all, Idx{0, 1}, Idx{2});
  const double ss = oracle::sum_of_squares(y, all) - oracle::sum_of_squares(y, {0, 1}) - oracle::sum_of_squares(y, {2});
  CHECK(g == doctest::Approx(26.0 / 3.0 - 0.5).epsilon(1e-12));
  CHECK(g == doctest::Approx(ss).epsilon(1e-12));

  const std::vector<int> z{0, 0, 1, 1};
  const double gc = generalized_gain(discrete_distances(z), Idx{0, 1, 2, 3}, Idx{0, 1}, Idx{2, 3});
  CHECK(gc == doctest::Approx(0.5 * (4 * oracle::gini(z, {0, 1, 2, 3}))).epsilon(1e-15));
  CHECK(gc == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("generalized gain handles bootstrap multisets and rejects bad partitions") {
  Eigen::MatrixXd y(3, 2);
  y << 0, 1, 2, 0, 5, 5;
  const DistanceMatrix d = euclidean_distances(y);
  const Idx parent{0, 0, 1, 2, 2, 2};
  const double g = generalized_gain(d, parent, Idx{0, 0, 1}, Idx{2, 2, 2});
  const double ss = oracle::sum_of_squares(y, parent) - oracle::sum_of_squares(y, {0, 0, 1}) -
                    oracle::sum_of_squares(y, {2, 2, 2});
  CHECK(g == doctest::Approx(ss).epsilon(1e-12));
  CHECK_THROWS_AS(generalized_gain(d, parent, Idx{0, 1}, Idx{2, 2, 2}), DataError);
  CHECK_THROWS_AS(generalized_gain(d, Idx{0, 1}, Idx{}, Idx{0, 1}), DataError);
}

TEST_CASE("literal variant is the negated, uniformly normalized form") {
  Eigen::MatrixXd y(4, 1);
  y << 0, 1, 3, 7;
  const DistanceMatrix d = euclidean_distances(y);
  const Idx all{0, 1, 2, 3}, l{0, 1}, r{2, 3};
  double sp = 0, sl = 0, sr = 0;
  for (auto i : all)
    for (auto j : all) sp += d(i, j) * d(i, j);
  for (auto i : l)
    for (auto j : l) sl += d(i, j) * d(i, j);
  for (auto i : r)
    for (auto j : r) sr += d(i, j) * d(i, j);
  const double lit = generalized_gain(d, all, l, r, GainVariant::literal);
  CHECK(lit == doctest::Approx(-(sp - sl - sr) / 8.0).epsilon(1e-14));
  CHECK(lit <= 0.0);
}

TEST_CASE("best split: constant columns have no split") {
  const FeatureMatrix x(4, 2, std::vector<double>(8, 1.0));
  Eigen::MatrixXd y(4, 1);
  y << 0, 1, 2, 3;
  CHECK_FALSE(best_split(euclidean_distances(y), Idx{0, 1, 2, 3}, x, Idx{0, 1}).has_value());
}

TEST_CASE("best split picks the separating feature") {
  Rng rng(12);
  const std::size_t n = 24, p = 6;
  std::vector<double> v(n * p);
  for (auto& e : v) e = static_cast<double>(rng.below(3));
  std::vector<int> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = i < n / 2 ? 0 : 1;
    v[3 * n + i] = z[i] ? 2.0 : 0.0;  // feature 3 separates the two clusters
  }
  const FeatureMatrix x(n, p, v);
  const DistanceMatrix d = discrete_distances(z);
  Idx node(n), cand(p);
  std::iota(node.begin(), node.end(), 0);
  std::iota(cand.begin(), cand.end(), 0);
  const auto b = best_split(d, node, x, cand);
  REQUIRE(b.has_value());
  CHECK(b->criterion.feature == 3);
  const auto o = exhaustive_best(d, node, x, cand);
  REQUIRE(o.has_value());
  CHECK(b->criterion == o->criterion);
  CHECK(b->gain == doctest::Approx(o->gain).epsilon(1e-12));
}

TEST_CASE("best split agrees with exhaustive enumeration on random nodes") {
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 5 + rng.below(30), p = 1 + rng.below(6);
    const FeatureMatrix x = random_genotypes(rng, n, p);
    const DistanceMatrix d = euclidean_distances(oracle::random_matrix(rng, static_cast<Eigen::Index>(n), 3));
    Idx node;
    for (std::size_t k = 0; k < n; ++k) node.push_back(rng.below(n));
    std::sort(node.begin(), node.end());
    Idx cand(p);
    std::iota(cand.begin(), cand.end(), 0);
    const auto b = best_split(d, node, x, cand);
    const auto o = exhaustive_best(d, node, x, cand);
    REQUIRE(b.has_value() == o.has_value());
    if (!b) continue;
    CHECK(b->criterion == o->criterion);
    CHECK(b->gain == doctest::Approx(o->gain).epsilon(1e-9));
    const auto s = best_split_squared(d.squared(), node, x, cand, GainVariant::per_node_normalized);
    REQUIRE(s.has_value());
    CHECK(s->criterion == b->criterion);
  }
}

TEST_CASE("best split tie goes to the lower feature index") {
  std::vector<double> v{0, 0, 2, 2, 0, 0, 2, 2};
  const FeatureMatrix x(4, 2, v);
  const std::vector<int> z{0, 0, 1, 1};
  const auto b = best_split(discrete_distances(z), Idx{0, 1, 2, 3}, x, Idx{0, 1});
  REQUIRE(b.has_value());
  CHECK(b->criterion.feature == 0);
  CHECK(b->criterion.split_point == 1.0);
}

TEST_CASE("grow_tree structure and determinism") {
  Rng rng(14);
  const FeatureMatrix x = random_genotypes(rng, 40, 8);
  const DistanceMatrix d = euclidean_distances(oracle::random_matrix(rng, 40, 3));
  ForestParams p;
  p.mtry = 3;
  p.max_depth = 0;
  const Tree root = grow_tree(x, d.squared(), p, Rng(1));
  REQUIRE(root.nodes.size() == 1);
  CHECK(root.nodes[0].is_leaf());

  p.max_depth = 4;
  p.min_node_size = 2;
  const Tree a = grow_tree(x, d.squared(), p, Rng(9));
  const Tree b = grow_tree(x, d.squared(), p, Rng(9));
  CHECK(a == b);
  check_structure(a, 4);
  for (const auto& n : a.nodes) {
    if (!n.is_leaf()) CHECK(n.candidate_count == 3);
  }
  // Every subject's stored leaf is the one its split rules lead to.
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(a.terminal[i] == oracle::walk(a, x, i));
    CHECK(route(a, x, i) == a.terminal[i]);
  }
  // Bootstrap multiset has N draws; in-bag counts agree with it.
  CHECK(a.samples.size() == 40);
  std::vector<std::uint16_t> count(40, 0);
  for (auto s : a.samples) ++count[s];
  CHECK(count == a.in_bag_count);
}

TEST_CASE("grow_forest: mtry defaults, single tree, serial equals parallel") {
  CHECK(default_mtry(TaskKind::regression, 385) == 129);
  CHECK(default_mtry(TaskKind::classification, 385) == 20);
  ForestParams dp;
  CHECK(dp.resolved_mtry(385) == 129);

  Rng rng(15);
  const FeatureMatrix x = random_genotypes(rng, 30, 10);
  const DistanceMatrix d = euclidean_distances(oracle::random_matrix(rng, 30, 2));
  ForestParams p;
  p.n_trees = 1;
  p.max_depth = 5;
  p.seed = 77;
  const Forest one = grow_forest(x, d, p);
  ForestParams resolved = p;
  resolved.mtry = resolved.resolved_mtry(10);
  CHECK(one.trees.at(0) == grow_tree(x, d.squared(), resolved, tree_stream(77, 0)));

  p.n_trees = 25;
  const Forest par = grow_forest(x, d, p, Execution::parallel);
  const Forest ser = grow_forest(x, d, p, Execution::serial);
  CHECK(par == ser);
  for (const auto& t : par.trees) check_structure(t, 5);

  p.mtry = 11;
  CHECK_THROWS_AS(grow_forest(x, d, p), DataError);
}

TEST_CASE("proximity: single-leaf tree and the never-jointly-OOB case") {
  Forest f;
  f.n_subjects = 3;
  f.n_features = 1;
  Tree leaf;
  leaf.nodes.push_back(TreeNode{});
  leaf.terminal = {0, 0, 0};
  leaf.in_bag_count = {0, 0, 3};
  f.trees.push_back(leaf);
  ProximityMatrix w = proximity(f);
  CHECK(w.values(0, 1) == 1.0);
  CHECK(w.values(0, 2) == 0.0);
  CHECK(w.joint_oob(0, 1) == 1);
  CHECK(w.never_joint_oob_pairs == 2);
  CHECK(w.values(2, 2) == 1.0);
}

TEST_CASE("proximity matches exhaustive co-occurrence enumeration") {
  Rng rng(16);
  const FeatureMatrix x = random_genotypes(rng, 20, 6);
  const DistanceMatrix d = euclidean_distances(oracle::random_matrix(rng, 20, 2));
  ForestParams p;
  p.n_trees = 50;
  p.max_depth = 4;
  p.min_node_size = 1;
  p.seed = 3;
  const Forest f = grow_forest(x, d, p);
  const ProximityMatrix w = proximity(f);
  CHECK(w.values == oracle::brute_force_proximity(f, x));
  CHECK(proximity(f, x).values == w.values);
  CHECK(proximity(f, Execution::serial).values == w.values);
}

TEST_CASE("forest binary round trip") {
  Rng rng(17);
  const FeatureMatrix x = random_genotypes(rng, 25, 5);
  const DistanceMatrix d = euclidean_distances(oracle::random_matrix(rng, 25, 2));
  ForestParams p;
  p.n_trees = 7;
  p.seed = 4;
  const Forest f = grow_forest(x, d, p);
  const auto path = std::filesystem::temp_directory_path() / "rfdm_forest_rt.bin";
  io::save_forest(f, path);
  CHECK(io::load_forest(path) == f);

  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "RFDMFRST garbage";
  }
  CHECK_THROWS_AS(io::load_forest(path), DataError);
}
