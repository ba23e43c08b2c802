// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rfdm/execution.hpp"
#include "rfdm/experiment.hpp"
#include "rfdm/forest.hpp"
#include "rfdm/importance.hpp"
#include "rfdm/metric.hpp"
#include "rfdm/simgen.hpp"

using namespace rfdm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

using Idx = std::vector<std::size_t>;

FeatureMatrix random_genotypes(Rng& rng, std::size_t n, std::size_t p) {
  std::vector<double> v(n * p);
  for (auto& x : v) x = static_cast<double>(rng.below(3));
  return FeatureMatrix(n, p, std::move(v));
}

// Random bootstrap-style node and a random nontrivial partition of it.
void random_partition(Rng& rng, std::size_t n, Idx& node, Idx& left, Idx& right) {
  node.clear();
  left.clear();
  right.clear();
  const std::size_t m = 2 + rng.below(n - 1);
  for (std::size_t k = 0; k < m; ++k) node.push_back(rng.below(n));
  for (std::size_t k = 0; k < m; ++k) (k == 0 || (k > 1 && rng.bernoulli(0.5)) ? left : right).push_back(node[k]);
}

Outcome euclidean_reduction() {
  Rng rng(101);
  double worst = 0;
  Idx node, left, right;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rng.below(49), q = 1 + rng.below(8);
    const Eigen::MatrixXd y = oracle::random_matrix(rng, Eigen::Index(n), Eigen::Index(q));
    const DistanceMatrix d = euclidean_distances(y, Execution::serial);
    random_partition(rng, n, node, left, right);
    const double want =
        oracle::sum_of_squares(y, node) - oracle::sum_of_squares(y, left) - oracle::sum_of_squares(y, right);
    worst = std::max(worst, std::abs(generalized_gain(d, node, left, right) - want));
  }
  return {worst <= 1e-9, fmt("max |gain - SS reduction| = %.3g over 1000 instances", worst)};
}

// Gini split criterion computed from label counts only.
std::optional<SplitResult> gini_best(const std::vector<int>& z, const Idx& node, const FeatureMatrix& x,
                                     const Idx& candidates) {
  const auto score = [&](const Idx& idx) { return double(idx.size()) * oracle::gini(z, idx); };
  std::optional<SplitResult> best;
  for (auto f : candidates) {
    std::vector<double> v;
    for (auto i : node) v.push_back(x(i, f));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const double s = 0.5 * (v[k] + v[k + 1]);
      Idx l, r;
      for (auto i : node) (x(i, f) <= s ? l : r).push_back(i);
      const double g = 0.5 * (score(node) - score(l) - score(r));
      if (!best || g > best->gain + kGainTieTolerance) best = SplitResult{{f, s}, g};
    }
  }
  if (best && best->gain <= kGainTieTolerance) best.reset();
  return best;
}

Outcome classification_reduction() {
  Rng rng(102);
  double worst = 0;
  int mismatches = 0;
  Idx node, left, right;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rng.below(39), c = 2 + rng.below(3), p = 1 + rng.below(6);
    std::vector<int> z(n);
    for (auto& v : z) v = int(rng.below(c));
    const DistanceMatrix d = discrete_distances(z);
    random_partition(rng, n, node, left, right);
    const double want = 0.5 * (double(node.size()) * oracle::gini(z, node) - double(left.size()) * oracle::gini(z, left) -
                               double(right.size()) * oracle::gini(z, right));
    worst = std::max(worst, std::abs(generalized_gain(d, node, left, right) - want));

    const FeatureMatrix x = random_genotypes(rng, n, p);
    Idx cand(p);
    std::iota(cand.begin(), cand.end(), 0);
    std::sort(node.begin(), node.end());
    const auto b = best_split(d, node, x, cand);
    const auto o = gini_best(z, node, x, cand);
    if (b.has_value() != o.has_value() || (b && !(b->criterion == o->criterion))) ++mismatches;
  }
  return {worst <= 1e-12 && mismatches == 0,
          fmt("max |gain - Gini reduction| = %.3g, best_split mismatches %.0f / 1000", worst, mismatches)};
}

Outcome spd_invariances() {
  Rng rng(103);
  double worst = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + Eigen::Index(rng.below(8));
    const Eigen::MatrixXd a = oracle::random_spd(rng, n), b = oracle::random_spd(rng, n);
    Eigen::MatrixXd m = oracle::random_matrix(rng, n, n) + 2.0 * Eigen::MatrixXd::Identity(n, n);
    const double dab = spd_distance(a, b);
    const Eigen::MatrixXd ma = m.transpose() * a * m, mb = m.transpose() * b * m;
    worst = std::max({worst, std::abs(dab - spd_distance(b, a)), spd_distance(a, a),
                      std::abs(dab - spd_distance(0.5 * (ma + ma.transpose()), 0.5 * (mb + mb.transpose()))),
                      std::abs(dab - spd_distance(a.inverse(), b.inverse()))});
  }
  double scaling = 0;
  for (Eigen::Index n : {1, 3, 8, 50}) {
    for (double c : {0.01, 0.5, 2.0, 37.0}) {
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      scaling = std::max(scaling, std::abs(spd_distance(id, c * id) - std::sqrt(double(n)) * std::abs(std::log(c))));
    }
  }
  return {worst <= 1e-6 && scaling <= 1e-10,
          fmt("max invariance error %.3g over 200 pairs, max |D(I,cI) - sqrt(n)|log c|| = %.3g", worst, scaling)};
}

Outcome glasso_kkt() {
  Rng rng(104);
  double worst_viol = 0, worst_inv = 0;
  int failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::MatrixXd s = oracle::random_spd(rng, 10);
    for (double rho : {0.1, 0.5, 1.0}) {
      try {
        const sim::GlassoResult r = sim::graphical_lasso(s, rho);
        const Eigen::MatrixXd g = r.precision.inverse() - s;
        for (Eigen::Index k = 0; k < 10; ++k) {
          for (Eigen::Index l = 0; l < 10; ++l) {
            const double t = r.precision(k, l);
            const double v = std::abs(t) > sim::kSiceEdgeThreshold ? std::abs(g(k, l) - rho * (t > 0 ? 1 : -1))
                                                                   : std::max(0.0, std::abs(g(k, l)) - rho);
            worst_viol = std::max(worst_viol, v);
          }
        }
      } catch (const std::exception&) {
        ++failures;
      }
    }
    const sim::GlassoResult exact = sim::graphical_lasso(s, 0.0);
    worst_inv = std::max(worst_inv, (exact.precision - s.inverse()).cwiseAbs().maxCoeff());
  }
  return {failures == 0 && worst_viol <= 1e-5 && worst_inv <= 1e-6,
          fmt("max KKT violation %.3g over 300 fits (%.0f failed), rho=0 max |Theta - S^-1| = %.3g", worst_viol,
              failures, worst_inv)};
}

ExperimentSpec desk_scale(ExperimentId id) {
  ExperimentSpec s = default_spec(id);
  s.iterations = 8;
  s.population.n_loci = 100;
  s.phenotype.n_roi = 100;
  s.study_size = 200;
  s.n_trees = 300;
  s.embeddings = false;
  return s;
}

double mean_auc(const ExperimentReport& r, Arm a) {
  for (const auto& s : r.summary)
    if (s.arm == a) return s.mean_auc;
  return std::nan("");
}

Outcome pair_sanity() {
  ExperimentSpec s = desk_scale(ExperimentId::E2);
  s.penetrance = 0.35;
  s.delta = 1.5;
  const ExperimentReport r = run_experiment(s);
  const double q = mean_auc(r, Arm::euclidean), cc = mean_auc(r, Arm::case_control);
  return {q > 0.6 && q > cc, fmt("mean pair AUC: euclidean %.4f, case-control %.4f", q, cc)};
}

Outcome fusion_boost() {
  ExperimentSpec s = desk_scale(ExperimentId::E5);
  s.delta = 0.75;
  s.gamma = 0.3;
  const ExperimentReport r = run_experiment(s);
  int wins = 0;
  for (const auto& it : r.iterations) {
    std::map<Arm, double> auc;
    for (const auto& o : it.arms) auc[o.arm] = o.roc.auc;
    if (auc.at(Arm::fused) >= auc.at(Arm::manifold) && auc.at(Arm::fused) >= auc.at(Arm::covariance)) ++wins;
  }
  return {wins >= 6, fmt("fused >= both single arms in %.0f/8 iterations (means: fused %.4f, manifold %.4f, "
                         "covariance %.4f)",
                         wins, mean_auc(r, Arm::fused), mean_auc(r, Arm::manifold), mean_auc(r, Arm::covariance))};
}

Outcome spurious_filtering() {
  ExperimentSpec s = desk_scale(ExperimentId::E6);
  s.spurious_multiplier = 3.0;
  const ExperimentReport r = run_experiment(s);
  const double m = mean_auc(r, Arm::manifold), e = mean_auc(r, Arm::euclidean);
  return {m >= e + 0.05, fmt("mean pair AUC: manifold %.4f, euclidean %.4f, margin %.4f", m, e, m - e)};
}

Outcome pair_universe() {
  Rng rng(108);
  const FeatureMatrix x = random_genotypes(rng, 30, 385);
  ForestParams p;
  p.n_trees = 5;
  p.seed = 1;
  const Forest f = grow_forest(x, euclidean_distances(oracle::random_matrix(rng, 30, 2)), p);
  const auto ranked = rank(pairwise_interaction(f));
  std::vector<char> seen(385 * 385, 0);
  std::size_t distinct = 0;
  for (const auto& r : ranked) {
    if (r.a < r.b && !seen[r.a * 385 + r.b]) {
      seen[r.a * 385 + r.b] = 1;
      ++distinct;
    }
  }
  return {ranked.size() == 73920 && distinct == 73920,
          fmt("ranked %.0f pairs, %.0f distinct", double(ranked.size()), double(distinct))};
}

// Calibrates on the Monte Carlo stream, then checks the realized case rate on
// fresh phenotype draws of the whole population.
Outcome penetrance_calibration() {
  sim::SimulationConfig c;
  c.population.n_loci = 100;
  c.phenotype.n_roi = 100;
  c.seed = 109;
  const Rng master(c.seed);
  const sim::SimulatedGenotypes pop = sim::to_genotypes(
      sim::evolve(sim::founder_pool(c.population, master.substream(1)), c.population, master.substream(2)));
  const sim::SnpSets sets = sim::select_snp_sets(pop.maf, master.substream(3));
  const sim::EffectTerms terms = sim::model_terms(sim::ModelKind::P1, sets.causal);
  const sim::BaseVectorModel base = sim::build_base_vector_model(c.phenotype, master.substream(4));
  sim::DiseaseModel disease;
  disease.disease_roi.resize(c.phenotype.n_disease_roi);
  std::iota(disease.disease_roi.begin(), disease.disease_roi.end(), std::size_t{10});

  bool ok = true;
  std::string detail;
  std::uint64_t stream = 100;
  for (double target : {0.20, 0.35}) {
    disease.penetrance = target;
    const Eigen::VectorXd mc = sim::monte_carlo_region_means(pop.genotypes, base, disease.disease_roi, terms, 1.5,
                                                             10000, master.substream(stream++));
    const sim::ZetaCalibration z =
        sim::calibrate_zeta(target, {mc.data(), std::size_t(mc.size())}, disease);
    std::size_t cases = 0, total = 0;
    for (int draw = 0; draw < 10; ++draw) {
      Eigen::MatrixXd y = sim::simulate_base_vectors(pop.genotypes.n_subjects(), base, disease.disease_roi, z.zeta,
                                                     master.substream(stream++));
      y = sim::apply_vector_effect(y, pop.genotypes, terms, 1.5, disease.disease_roi);
      const sim::Classification cls = sim::classify_disease(y, disease, master.substream(stream++));
      cases += std::size_t(std::count(cls.labels.begin(), cls.labels.end(), 1));
      total += cls.labels.size();
    }
    const double rate = double(cases) / double(total);
    ok = ok && std::abs(rate - target) <= 0.015;
    if (!detail.empty()) detail += "; ";
    detail += fmt("target %.2f: zeta %.4f, held-out case rate %.4f", target, z.zeta, rate);
  }
  return {ok, detail};
}

bool same_iteration(const IterationResult& a, const IterationResult& b) {
  if (a.arms.size() != b.arms.size() || a.zeta != b.zeta) return false;
  for (std::size_t k = 0; k < a.arms.size(); ++k) {
    const auto &x = a.arms[k], &y = b.arms[k];
    if (x.scores != y.scores || x.roc != y.roc || x.proximity != y.proximity) return false;
    if (x.embedding.has_value() != y.embedding.has_value()) return false;
    if (x.embedding && (x.embedding->coordinates != y.embedding->coordinates ||
                        x.embedding->eigenvalues != y.embedding->eigenvalues))
      return false;
  }
  return true;
}

Outcome determinism() {
  ExperimentSpec s = default_spec(ExperimentId::E6);
  s.iterations = 2;
  s.population.n_loci = 60;
  s.phenotype.n_roi = 100;
  s.n_trees = 100;
  s.embeddings = true;
  s.arms = {Arm::case_control, Arm::euclidean, Arm::covariance, Arm::graph, Arm::manifold, Arm::fused};
  const std::size_t original = max_threads();
  set_threads(1);
  const ExperimentReport one = run_experiment(s);
  set_threads(4);
  const ExperimentReport four = run_experiment(s);
  const ExperimentReport serial = run_experiment(s, std::nullopt, Execution::serial);
  set_threads(original);
  bool ok = true;
  for (std::size_t k = 0; k < s.iterations; ++k) {
    ok = ok && same_iteration(one.iterations[k], four.iterations[k]) &&
         same_iteration(one.iterations[k], serial.iterations[k]) &&
         same_iteration(one.iterations[k], run_iteration(s, k));
  }
  std::size_t embedded = 0;
  for (const auto& it : one.iterations)
    for (const auto& o : it.arms) embedded += o.embedding ? 1 : 0;
  return {ok, fmt("6 arms x 2 iterations, 1 vs 4 threads vs serial vs single-iteration replay; %.0f embeddings "
                  "compared",
                  double(embedded))};
}

Outcome proximity_oracle() {
  Rng rng(111);
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FeatureMatrix x = random_genotypes(rng, 20, 8);
    ForestParams p;
    p.n_trees = 50;
    p.seed = seed;
    p.min_node_size = 1;
    const Forest f = grow_forest(x, euclidean_distances(oracle::random_matrix(rng, 20, 2)), p);
    const Eigen::MatrixXd want = oracle::brute_force_proximity(f, x);
    if (proximity(f).values != want) ++mismatches;
    if (proximity(f, x).values != want) ++mismatches;
  }
  return {mismatches == 0, fmt("10 forests (N=20, 50 trees), %.0f mismatching matrices", mismatches)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  // 0 = no runtime requirement
  };
  const std::vector<Criterion> criteria{
      {1, "euclidean reduction", euclidean_reduction, 10},
      {2, "classification reduction", classification_reduction, 0},
      {3, "SPD distance invariances", spd_invariances, 0},
      {4, "graphical lasso KKT", glasso_kkt, 0},
      {5, "pairwise interaction sanity", pair_sanity, 300},
      {6, "fusion boost", fusion_boost, 600},
      {7, "spurious filtering", spurious_filtering, 600},
      {8, "pair universe count", pair_universe, 0},
      {9, "penetrance calibration", penetrance_calibration, 0},
      {10, "determinism", determinism, 0},
      {11, "proximity oracle", proximity_oracle, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.budget_s);
    }
    if (!o.pass) ++failed;
    std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
