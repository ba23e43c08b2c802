#include <functional>

#include "doctest.h"
#include "oracles.hpp"
#include "rfdm/importance.hpp"
#include "rfdm/metric.hpp"

using namespace rfdm;

namespace {

TreeNode node(std::int32_t feature, double gain, std::int32_t left, std::int32_t right, std::uint32_t begin,
              std::uint32_t end, std::uint32_t depth) {
  TreeNode n;
  n.feature = feature;
  n.gain = gain;
  n.left = left;
  n.right = right;
  n.begin = begin;
  n.end = end;
  n.depth = depth;
  return n;
}

// Root splits on feature 0 (8 members, 4/4); its left child splits on
// feature 1 with gain 1.0; everything else is a leaf.
Forest hand_built_forest() {
  Tree t;
  t.samples = {0, 1, 2, 3, 4, 5, 6, 7};
  t.nodes = {
      node(0, 3.0, 1, 2, 0, 8, 0),
      node(1, 1.0, 3, 4, 0, 4, 1),
      node(-1, 0.0, -1, -1, 4, 8, 1),
      node(-1, 0.0, -1, -1, 0, 2, 2),
      node(-1, 0.0, -1, -1, 2, 4, 2),
  };
  t.candidates = {0, 1};
  t.nodes[0].candidate_begin = 0;
  t.nodes[0].candidate_count = 1;
  t.nodes[1].candidate_begin = 1;
  t.nodes[1].candidate_count = 1;
  t.in_bag_count.assign(8, 1);
  t.terminal = {3, 3, 4, 4, 2, 2, 2, 2};
  Forest f;
  f.n_subjects = 8;
  f.n_features = 3;
  f.trees.push_back(t);
  return f;
}

Forest random_forest(std::uint64_t seed, std::size_t n, std::size_t p, std::size_t trees) {
  Rng rng(seed);
  std::vector<double> v(n * p);
  for (auto& x : v) x = static_cast<double>(rng.below(3));
  const FeatureMatrix x(n, p, v);
  const DistanceMatrix d = euclidean_distances(oracle::random_matrix(rng, static_cast<Eigen::Index>(n), 2));
  ForestParams params;
  params.n_trees = trees;
  params.max_depth = 5;
  params.min_node_size = 2;
  params.seed = seed;
  return grow_forest(x, d, params);
}

double subtree_gain(const Tree& t, std::int32_t k, std::size_t feature) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(k)];
  if (n.is_leaf()) return 0.0;
  return (static_cast<std::size_t>(n.feature) == feature ? n.gain : 0.0) + subtree_gain(t, n.left, feature) +
         subtree_gain(t, n.right, feature);
}

// G_{inner|outer} by recursion from each root.
Eigen::MatrixXd conditional_oracle(const Forest& f, bool squared) {
  const auto p = static_cast<Eigen::Index>(f.n_features);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);  // g(inner, outer)
  for (const Tree& t : f.trees) {
    std::function<void(std::int32_t)> visit = [&](std::int32_t k) {
      const TreeNode& n = t.nodes[static_cast<std::size_t>(k)];
      if (n.is_leaf()) return;
      const TreeNode& l = t.nodes[static_cast<std::size_t>(n.left)];
      const TreeNode& r = t.nodes[static_cast<std::size_t>(n.right)];
      if (!l.is_leaf() || !r.is_leaf()) {
        for (Eigen::Index beta = 0; beta < p; ++beta) {
          if (beta == n.feature) continue;
          const double diff = double(n.size()) / l.size() * subtree_gain(t, n.left, std::size_t(beta)) -
                              double(n.size()) / r.size() * subtree_gain(t, n.right, std::size_t(beta));
          g(beta, n.feature) += 0.5 * (squared ? diff * diff : std::abs(diff));
        }
      }
      visit(n.left);
      visit(n.right);
    };
    visit(0);
  }
  return g;
}

}  // namespace

TEST_CASE("gini importance of a hand-built tree") {
  const ImportanceReport r = gini_importance(hand_built_forest());
  CHECK(r.score[0] == 3.0);
  CHECK(r.score[1] == 1.0);
  CHECK(r.score[2] == 0.0);  // never a candidate
  CHECK(r.candidacy == std::vector<std::uint64_t>{1, 1, 0});
  CHECK(r.selections == std::vector<std::uint64_t>{1, 1, 0});
}

TEST_CASE("single split with gain 2 gives importance 2") {
  Tree t;
  t.samples = {0, 1};
  t.nodes = {node(0, 2.0, 1, 2, 0, 2, 0), node(-1, 0, -1, -1, 0, 1, 1), node(-1, 0, -1, -1, 1, 2, 1)};
  t.candidates = {0};
  t.nodes[0].candidate_count = 1;
  Forest f;
  f.n_features = 2;
  f.n_subjects = 2;
  f.trees.push_back(t);
  CHECK(gini_importance(f).score[0] == 2.0);
}

TEST_CASE("gini importance matches a node-walk tally") {
  const Forest f = random_forest(21, 60, 10, 30);
  const ImportanceReport r = gini_importance(f);
  std::vector<double> gain(10, 0.0);
  std::vector<double> cand(10, 0.0);
  for (const Tree& t : f.trees) {
    std::function<void(std::int32_t)> visit = [&](std::int32_t k) {
      const TreeNode& n = t.nodes[static_cast<std::size_t>(k)];
      for (std::uint32_t c = 0; c < n.candidate_count; ++c) cand[t.candidates[n.candidate_begin + c]] += 1.0;
      if (n.is_leaf()) return;
      gain[static_cast<std::size_t>(n.feature)] += n.gain;
      visit(n.left);
      visit(n.right);
    };
    visit(0);
  }
  for (std::size_t a = 0; a < 10; ++a) {
    CHECK(double(r.candidacy[a]) == cand[a]);
    CHECK(r.score[a] == doctest::Approx(cand[a] > 0 ? gain[a] / cand[a] : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("pairwise interaction on the hand-built tree") {
  const PairInteractionReport r = pairwise_interaction(hand_built_forest());
  CHECK(r.conditional(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.conditional(0, 1) == 0.0);
  CHECK(r.combined(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.combined(0, 2) == 0.0);  // never co-occur
  CHECK(r.combined(1, 2) == 0.0);
  CHECK(pairwise_interaction(hand_built_forest(), InteractionVariant::absolute).conditional(1, 0) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pairwise interaction matches a recursive oracle") {
  const Forest f = random_forest(22, 50, 8, 20);
  for (bool squared : {true, false}) {
    const auto variant = squared ? InteractionVariant::squared : InteractionVariant::absolute;
    const PairInteractionReport r = pairwise_interaction(f, variant);
    const Eigen::MatrixXd g = conditional_oracle(f, squared);
    for (std::size_t a = 0; a < 8; ++a) {
      for (std::size_t b = 0; b < 8; ++b) {
        if (a == b) continue;
        CHECK(r.conditional(a, b) ==
              doctest::Approx(g(Eigen::Index(a), Eigen::Index(b))).epsilon(1e-10).scale(1e-12));
      }
    }
    CHECK(pairwise_interaction(f, variant, Execution::serial) == r);
  }
}

TEST_CASE("pair index layout") {
  PairInteractionReport r(5);
  CHECK(r.n_pairs() == 10);
  std::size_t k = 0;
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = a + 1; b < 5; ++b, ++k) {
      CHECK(r.index(a, b) == k);
      CHECK(r.index(b, a) == k);
      CHECK(r.pair_at(k) == std::pair<std::size_t, std::size_t>{a, b});
    }
  }
  CHECK(PairInteractionReport(385).n_pairs() == 73920);
}

TEST_CASE("ranking order and ties") {
  ImportanceReport r;
  r.score = {3, 1, 2};
  const auto ranked = rank(r);
  CHECK(ranked[0].feature == 0);
  CHECK(ranked[1].feature == 2);
  CHECK(ranked[2].feature == 1);

  r.score.assign(4, 0.0);
  const auto zeros = rank(r);
  for (std::size_t k = 0; k < 4; ++k) CHECK(zeros[k].feature == k);

  const auto pairs = rank(PairInteractionReport(385));
  CHECK(pairs.size() == 73920);
  CHECK(pairs.front().a == 0);
  CHECK(pairs.front().b == 1);
  CHECK(pairs.back().a == 383);
  CHECK(pairs.back().b == 384);
}

TEST_CASE("XOR-style pair is the top interaction") {
  // The phenotype is the parity of x_a * x_b and ignores every other SNP.
  const std::size_t n = 200, p = 20, a = 4, b = 13;
  int wins = 0;
  for (std::uint64_t run = 0; run < 8; ++run) {
    Rng rng(100 + run);
    std::vector<double> v(n * p);
    for (auto& x : v) x = static_cast<double>(rng.below(3));
    const FeatureMatrix x(n, p, v);
    std::vector<int> parity(n);
    for (std::size_t i = 0; i < n; ++i) parity[i] = static_cast<int>(x(i, a) * x(i, b)) % 2;
    ForestParams params;
    params.n_trees = 300;
    params.max_depth = 7;
    params.seed = run;
    const Forest f = grow_forest(x, discrete_distances(parity), params);
    const auto ranked = rank(pairwise_interaction(f));
    if (ranked.front().a == a && ranked.front().b == b) ++wins;
  }
  CHECK(wins >= 7);
}
