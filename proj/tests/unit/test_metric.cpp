#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rfdm/error.hpp"
#include "rfdm/metric.hpp"

using namespace rfdm;

TEST_CASE("euclidean distances") {
  Eigen::MatrixXd y(2, 2);
  y << 0, 0, 3, 4;
  CHECK(euclidean_distances(y)(0, 1) == 5.0);
  CHECK(euclidean_distances(Eigen::MatrixXd::Ones(4, 3)).values().isZero(0.0));

  Rng rng(1);
  const Eigen::MatrixXd r = oracle::random_matrix(rng, 10, 4);
  const DistanceMatrix d = euclidean_distances(r);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += (r(i, k) - r(j, k)) * (r(i, k) - r(j, k));
      CHECK(d(i, j) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
    }
  }
  CHECK(euclidean_distances(r, Execution::serial).values() == d.values());
}

TEST_CASE("discrete distances") {
  const std::vector<int> z{0, 0, 1};
  Eigen::MatrixXd expected(3, 3);
  expected << 0, 0, 1, 0, 0, 1, 1, 1, 0;
  CHECK(discrete_distances(z).values() == expected);
  CHECK(discrete_distances(std::vector<int>{2, 2, 2}).values().isZero(0.0));

  Rng rng(2);
  std::vector<int> labels(6);
  for (auto& l : labels) l = static_cast<int>(rng.below(3));
  const DistanceMatrix d = discrete_distances(labels);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(d(i, j) == (labels[i] == labels[j] ? 0.0 : 1.0));
}

TEST_CASE("graph distances") {
  const auto with_edges = [](std::size_t e) {
    Graph g;
    g.n_vertices = 12;
    for (std::size_t k = 0; k < e; ++k) g.edges.push_back({k, k + 1, 1.0});
    return g;
  };
  const std::vector<Graph> same{with_edges(4), with_edges(4)};
  CHECK(graph_distances(same)(0, 1) == 0.0);
  const std::vector<Graph> g{with_edges(10), with_edges(7), with_edges(2)};
  const DistanceMatrix d = graph_distances(g);
  CHECK(d(0, 1) == 3.0);
  CHECK(d(0, 1) + d(1, 2) >= d(0, 2));
  CHECK(d(0, 2) + d(2, 1) >= d(0, 1));
}

TEST_CASE("SPD distance identities") {
  Rng rng(3);
  const Eigen::MatrixXd a = oracle::random_spd(rng, 5);
  CHECK(spd_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  for (int n : {1, 3, 8}) {
    for (double c : {0.25, 2.0, 7.5}) {
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      CHECK(std::abs(spd_distance(id, c * id) - std::sqrt(double(n)) * std::abs(std::log(c))) < 1e-10);
    }
  }
}

TEST_CASE("SPD distance matches a determinant-root oracle") {
  Rng rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd a = oracle::random_spd(rng, 4);
    const Eigen::MatrixXd b = oracle::random_spd(rng, 4);
    CHECK(std::abs(spd_distance(a, b) - oracle::spd_distance(a, b)) < 1e-8);
  }
}

TEST_CASE("generalized eigenvalues solve det(lambda A - B) = 0") {
  Rng rng(5);
  const Eigen::MatrixXd a = oracle::random_spd(rng, 3);
  const Eigen::MatrixXd b = oracle::random_spd(rng, 3);
  const Eigen::VectorXd l = generalized_eigenvalues(a, b);
  for (Eigen::Index k = 0; k < l.size(); ++k) {
    CHECK(std::abs((l(k) * a - b).determinant()) < 1e-9 * std::max(1.0, std::pow(l(k), 3)));
    if (k) CHECK(l(k) >= l(k - 1));
  }
}

TEST_CASE("SPD distances reject non-SPD input, parallel equals serial") {
  Rng rng(6);
  std::vector<Eigen::MatrixXd> m;
  for (int i = 0; i < 9; ++i) m.push_back(oracle::random_spd(rng, 4));
  const DistanceMatrix p = spd_distances(m, Execution::parallel);
  const DistanceMatrix s = spd_distances(m, Execution::serial);
  CHECK(p.values() == s.values());
  CHECK(p(2, 5) == doctest::Approx(spd_distance(m[2], m[5])).epsilon(1e-12));

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(4, 4);
  bad(0, 0) = -1.0;
  m.push_back(bad);
  CHECK_THROWS_AS(spd_distances(m), DataError);
}

TEST_CASE("fusion weights and fused distances") {
  CHECK_THROWS_AS(FusionWeights({0.5, 0.6}), DataError);
  CHECK_THROWS_AS(FusionWeights({1.5, -0.5}), DataError);
  const FusionWeights u = FusionWeights::uniform(3);
  CHECK(u[0] + u[1] + u[2] == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(7);
  const DistanceMatrix d1 = euclidean_distances(oracle::random_matrix(rng, 8, 3));
  const DistanceMatrix d2 = euclidean_distances(oracle::random_matrix(rng, 8, 2));
  const std::vector<DistanceMatrix> one{d1};
  CHECK(fuse_distances(one, FusionWeights({1.0})).values() == d1.values());
  const std::vector<DistanceMatrix> same{d1, d1};
  CHECK(fuse_distances(same, FusionWeights({0.5, 0.5})).values().isApprox(d1.values(), 1e-15));
  const std::vector<DistanceMatrix> two{d1, d2};
  const DistanceMatrix f = fuse_distances(two, FusionWeights({0.25, 0.75}));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(f(i, j) == doctest::Approx(0.25 * d1(i, j) + 0.75 * d2(i, j)).epsilon(1e-14));
  CHECK_NOTHROW(validate_distance_matrix(f.values()));
  const std::vector<DistanceMatrix> mismatch{d1, euclidean_distances(oracle::random_matrix(rng, 5, 2))};
  CHECK_THROWS_AS(fuse_distances(mismatch, FusionWeights::uniform(2)), DataError);
}

TEST_CASE("compute_distances dispatches and every metric output validates") {
  Rng rng(8);
  const ResponseSet vecs = VectorResponses{oracle::random_matrix(rng, 30, 5)};
  CHECK_NOTHROW(validate_distance_matrix(compute_distances(vecs, {MetricKind::euclidean}).values()));
  CHECK_THROWS_AS(compute_distances(vecs, {MetricKind::spd_geodesic}), DataError);

  std::vector<int> z(30);
  for (auto& l : z) l = static_cast<int>(rng.below(4));
  CHECK_NOTHROW(compute_distances(ResponseSet{LabelResponses{z}}, {MetricKind::discrete}));

  std::vector<Eigen::MatrixXd> m;
  for (int i = 0; i < 30; ++i) m.push_back(oracle::random_spd(rng, 3));
  const DistanceMatrix s = compute_distances(ResponseSet{SpdResponses{m}}, {MetricKind::spd_geodesic});
  CHECK_NOTHROW(validate_distance_matrix(s.values()));

  std::vector<Graph> g(30);
  for (auto& gi : g) {
    gi.n_vertices = 6;
    for (std::size_t u = 0; u < 6; ++u)
      for (std::size_t v = u + 1; v < 6; ++v)
        if (rng.bernoulli(0.4)) gi.edges.push_back({u, v, 1.0});
  }
  CHECK_NOTHROW(compute_distances(ResponseSet{GraphResponses{g}}, {MetricKind::graph_edge}));
}
