#include <filesystem>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "rfdm/dataset.hpp"
#include "rfdm/distance_matrix.hpp"
#include "rfdm/error.hpp"
#include "rfdm/genotype.hpp"
#include "rfdm/io.hpp"
#include "rfdm/random.hpp"
#include "rfdm/response.hpp"

namespace fs = std::filesystem;
using namespace rfdm;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rfdm_core_data";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("genotype CSV parses values and ids") {
  const auto p = scratch("g3x2.csv");
  write(p, "subject_id,rs1,rs2\na,0,1\nb,2,0\nc,1,2\n");
  const GenotypeMatrix g = io::load_genotypes(p);
  CHECK(g.n_subjects() == 3);
  CHECK(g.n_snps() == 2);
  CHECK(g(0, 1) == 1);
  CHECK(g(1, 0) == 2);
  CHECK(g(2, 1) == 2);
  CHECK(g.snp_ids() == std::vector<std::string>{"rs1", "rs2"});
  CHECK(g.subject_ids() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("out-of-range genotype names the cell") {
  const auto p = scratch("g_bad.csv");
  write(p, "subject_id,rs1,rs2\na,0,1\nb,3,0\n");
  CHECK_THROWS_AS(io::load_genotypes(p), DataError);
  const std::string msg = message_of([&] { io::load_genotypes(p); });
  CHECK(msg.find("'3'") != std::string::npos);
  CHECK(msg.find(":3") != std::string::npos);  // line 3
}

TEST_CASE("genotype loader rejects duplicates, empty files and ragged rows") {
  const auto dup = scratch("g_dup.csv");
  write(dup, "subject_id,rs1,rs1\na,0,1\nb,1,0\n");
  CHECK_THROWS_AS(io::load_genotypes(dup), DataError);
  const auto dups = scratch("g_dups.csv");
  write(dups, "subject_id,rs1\na,0\na,1\n");
  CHECK_THROWS_AS(io::load_genotypes(dups), DataError);
  const auto empty = scratch("g_empty.csv");
  write(empty, "");
  CHECK_THROWS_AS(io::load_genotypes(empty), DataError);
  const auto ragged = scratch("g_ragged.csv");
  write(ragged, "subject_id,rs1,rs2\na,0\nb,1,0\n");
  CHECK_THROWS_AS(io::load_genotypes(ragged), DataError);
  CHECK_THROWS_AS(GenotypeMatrix(1, 1, {0}), DataError);
}

TEST_CASE("genotype save/load round trip is exact") {
  Rng rng(3);
  std::vector<std::uint8_t> v(7 * 5);
  for (auto& x : v) x = static_cast<std::uint8_t>(rng.below(3));
  const GenotypeMatrix g(7, 5, v);
  const auto p = scratch("g_rt.csv");
  io::save_genotypes(g, p);
  CHECK(io::load_genotypes(p) == g);
}

TEST_CASE("validate_distance_matrix small cases") {
  CHECK_NOTHROW(validate_distance_matrix(Eigen::MatrixXd::Zero(4, 4)));
  Eigen::MatrixXd two(2, 2);
  two << 0, 1, 1, 0;
  CHECK(validate_distance_matrix(two)(0, 1) == 1.0);

  Eigen::MatrixXd bad(3, 3);
  bad << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  try {
    validate_distance_matrix(bad);
    FAIL("expected a triangle violation");
  } catch (const DistanceMatrixError& e) {
    CHECK(e.fault() == DistanceFault::triangle_violation);
    CHECK(std::min(e.i(), e.k()) == 0);
    CHECK(std::max(e.i(), e.k()) == 2);
    CHECK(e.j() == 1);
  }
}

TEST_CASE("validate_distance_matrix faults") {
  const auto fault_of = [](const Eigen::MatrixXd& m) {
    try {
      validate_distance_matrix(m);
    } catch (const DistanceMatrixError& e) {
      return e.fault();
    }
    FAIL("no fault raised");
    return DistanceFault::not_square;
  };
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 1) = m(1, 0) = -0.5;
  CHECK(fault_of(m) == DistanceFault::negative_distance);
  m = Eigen::MatrixXd::Zero(3, 3);
  m(1, 1) = 1e-300;
  CHECK(fault_of(m) == DistanceFault::nonzero_diagonal);
  m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 2) = 1.0;
  m(2, 0) = 1.0 + 1e-9;
  CHECK(fault_of(m) == DistanceFault::asymmetry_above_tolerance);
  CHECK(fault_of(Eigen::MatrixXd::Zero(2, 3)) == DistanceFault::not_square);
  m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 1) = m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK(fault_of(m) == DistanceFault::non_finite);
}

TEST_CASE("tiny asymmetry is symmetrized") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0 + 1e-13;
  const DistanceMatrix d = validate_distance_matrix(m);
  CHECK(d(0, 1) == d(1, 0));
}

TEST_CASE("sampled triangle check above the exhaustive limit") {
  // Points on a line are a metric. Collapsing subject 0 onto every other
  // subject breaks D_i0 + D_0k >= D_ik for most triples through 0.
  const std::size_t n = kExhaustiveTriangleLimit + 20;
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = std::abs(double(i) - double(j));
  CHECK_NOTHROW(validate_distance_matrix(m));
  for (std::size_t j = 1; j < n; ++j) m(0, j) = m(j, 0) = 0.0;
  CHECK_THROWS_AS(validate_distance_matrix(m), DistanceMatrixError);
}

TEST_CASE("distance and matrix files round trip bit-exactly") {
  Rng rng(11);
  Eigen::MatrixXd y(6, 3);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = rng.normal() * 1e3;
  Eigen::MatrixXd d(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) d(i, j) = (y.row(i) - y.row(j)).norm();
  const auto p = scratch("d.csv");
  io::save_distances(validate_distance_matrix(d), p);
  CHECK(io::load_distances(p).values() == validate_distance_matrix(d).values());
  const auto pm = scratch("m.csv");
  io::save_matrix(y, pm);
  CHECK(io::load_matrix(pm) == y);
}

TEST_CASE("labels, tables and bundles round trip") {
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto pl = scratch("labels.csv");
  io::save_labels({0, 1, 1}, ids, pl);
  std::vector<std::string> got;
  CHECK(io::load_labels(pl, &got) == std::vector<int>{0, 1, 1});
  CHECK(got == ids);

  io::Table t;
  t.subject_ids = ids;
  t.columns = {"x", "y"};
  t.values = Eigen::MatrixXd::Random(3, 2);
  const auto pt = scratch("table.csv");
  io::save_table(t, pt);
  const io::Table t2 = io::load_table(pt);
  CHECK(t2.values == t.values);
  CHECK(t2.columns == t.columns);
  CHECK(t2.subject_ids == ids);

  Rng rng(5);
  std::vector<Eigen::MatrixXd> mats;
  for (int k = 0; k < 3; ++k) {
    Eigen::MatrixXd g(3, 3);
    for (int q = 0; q < 9; ++q) g.data()[q] = rng.normal();
    mats.push_back(g * g.transpose() + Eigen::MatrixXd::Identity(3, 3));
  }
  const auto bm = scratch("bundle_m");
  fs::remove_all(bm);
  io::save_matrix_bundle(mats, ids, bm);
  std::vector<std::string> mids;
  const auto mats2 = io::load_matrix_bundle(bm, &mids);
  CHECK(mids == ids);
  for (int k = 0; k < 3; ++k) CHECK(mats2[k] == mats[k]);

  std::vector<Graph> graphs(3);
  for (auto& g : graphs) g.n_vertices = 5;
  graphs[0].edges = {{0, 1, 1.0}, {2, 3, 0.5}};
  graphs[2].edges = {{1, 4, 2.0}};
  const auto bg = scratch("bundle_g");
  fs::remove_all(bg);
  io::save_graph_bundle(graphs, ids, bg);
  const auto graphs2 = io::load_graph_bundle(bg);
  REQUIRE(graphs2.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(graphs2[k].n_vertices == 5);
    REQUIRE(graphs2[k].edges.size() == graphs[k].edges.size());
    for (std::size_t e = 0; e < graphs[k].edges.size(); ++e) {
      CHECK(graphs2[k].edges[e].u == graphs[k].edges[e].u);
      CHECK(graphs2[k].edges[e].v == graphs[k].edges[e].v);
      CHECK(graphs2[k].edges[e].weight == graphs[k].edges[e].weight);
    }
  }
}

TEST_CASE("response validation") {
  const ResponseSet ok = LabelResponses{{0, 1, 2}};
  CHECK_NOTHROW(validate_responses(ok));
  CHECK(response_count(ok) == 3);
  CHECK_THROWS_AS(validate_responses(ResponseSet{LabelResponses{{0, -1}}}), DataError);

  Eigen::MatrixXd v(2, 2);
  v << 1, std::numeric_limits<double>::infinity(), 0, 0;
  CHECK_THROWS_AS(validate_responses(ResponseSet{VectorResponses{v}}), DataError);

  Eigen::MatrixXd notspd(2, 2);
  notspd << 1, 2, 2, 1;
  CHECK_FALSE(is_spd(notspd));
  CHECK(is_spd(Eigen::MatrixXd::Identity(3, 3)));
  CHECK_THROWS_AS(validate_responses(ResponseSet{SpdResponses{{Eigen::MatrixXd::Identity(2, 2), notspd}}}),
                  DataError);
  CHECK_THROWS_AS(
      validate_responses(ResponseSet{SpdResponses{{Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3)}}}),
      DataError);

  Graph loop{3, {{1, 1, 1.0}}};
  CHECK_THROWS_AS(validate_responses(ResponseSet{GraphResponses{{loop}}}), DataError);
  Graph a{3, {{0, 1, 1.0}}}, b{4, {}};
  CHECK_THROWS_AS(validate_responses(ResponseSet{GraphResponses{{a, b}}}), DataError);
  Graph w{3, {{0, 1, 1.0}, {1, 2, 0.0}}};
  CHECK(w.edge_count() == 1);
}

TEST_CASE("dataset dimensions must agree") {
  const GenotypeMatrix g(3, 1, {0, 1, 2});
  CHECK_NOTHROW(make_dataset(g, validate_distance_matrix(Eigen::MatrixXd::Zero(3, 3))));
  CHECK_THROWS_AS(make_dataset(g, validate_distance_matrix(Eigen::MatrixXd::Zero(4, 4))), DataError);
  CHECK_THROWS_AS(make_dataset(g, validate_distance_matrix(Eigen::MatrixXd::Zero(3, 3)), std::nullopt,
                               std::vector<int>{0, 1}),
                  DataError);
}

TEST_CASE("generated ids and subject selection") {
  const GenotypeMatrix g(3, 2, {0, 1, 2, 2, 1, 0});
  CHECK(g.snp_ids() == std::vector<std::string>{"snp1", "snp2"});
  CHECK(g.subject_ids() == std::vector<std::string>{"s1", "s2", "s3"});
  const std::vector<std::size_t> rows{2, 0};
  const GenotypeMatrix s = g.select_subjects(rows);
  CHECK(s.subject_ids() == std::vector<std::string>{"s3", "s1"});
  CHECK(s(0, 0) == 2);
  CHECK(s(1, 1) == 2);
  const FeatureMatrix x = FeatureMatrix::from_genotypes(g);
  CHECK(x(2, 0) == 2.0);
  CHECK(x.names() == g.snp_ids());
}
