#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "rfdm/error.hpp"
#include "rfdm/simgen.hpp"

namespace rfdm::sim {

double disease_posterior(double ybar, const DiseaseModel& m) {
  const double v = 2.0 * m.sigma * m.sigma;
  const double la = std::log(m.penetrance) - (ybar - m.mu_ad) * (ybar - m.mu_ad) / v;
  const double lc = std::log1p(-m.penetrance) - (ybar - m.mu_cn) * (ybar - m.mu_cn) / v;
  return 1.0 / (1.0 + std::exp(lc - la));
}

Eigen::VectorXd region_means(const Eigen::MatrixXd& y, std::span<const std::size_t> roi) {
  if (roi.empty()) throw DataError("region is empty");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(y.rows());
  for (std::size_t r : roi) {
    if (r >= static_cast<std::size_t>(y.cols())) throw DataError("ROI index out of range");
    m += y.col(static_cast<Eigen::Index>(r));
  }
  return m / static_cast<double>(roi.size());
}

namespace {

void validate_disease(const DiseaseModel& m) {
  if (!(m.sigma > 0.0)) throw DataError("disease model sigma must be positive");
  if (!(m.penetrance > 0.0 && m.penetrance < 1.0)) throw DataError("penetrance must be in (0, 1)");
}

}  // namespace

Classification classify_disease(const Eigen::MatrixXd& y_star, const DiseaseModel& model, Rng rng) {
  validate_disease(model);
  Classification c;
  c.region_mean = region_means(y_star, model.disease_roi);
  c.posterior.resize(c.region_mean.size());
  c.labels.resize(static_cast<std::size_t>(c.region_mean.size()));
  for (Eigen::Index i = 0; i < c.region_mean.size(); ++i) {
    c.posterior(i) = disease_posterior(c.region_mean(i), model);
    c.labels[static_cast<std::size_t>(i)] = rng.bernoulli(c.posterior(i)) ? 1 : 0;
  }
  return c;
}

ZetaCalibration calibrate_zeta(double target, std::span<const double> means, DiseaseModel model,
                               double tol, double lo, double hi) {
  if (!(target > 0.0 && target < 1.0)) throw DataError("target penetrance must be in (0, 1)");
  if (means.empty()) throw DataError("calibration needs Monte Carlo region means");
  model.penetrance = target;
  validate_disease(model);
  auto penetrance = [&](double zeta) {
    double s = 0.0;
    for (double m : means) s += disease_posterior(m - zeta, model);
    return s / static_cast<double>(means.size());
  };
  ZetaCalibration cal;
  const double at_lo = penetrance(lo);
  const double at_hi = penetrance(hi);
  if (at_lo < target - tol || at_hi > target + tol) {
    throw NumericalError("penetrance " + std::to_string(target) + " is outside [" + std::to_string(at_hi) +
                         ", " + std::to_string(at_lo) + "] reachable with zeta in [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
  }
  // Penetrance decreases in zeta; bisect to full precision.
  double a = lo, b = hi;
  while (b - a > 1e-12 * std::max(1.0, b) && cal.iterations < 200) {
    const double mid = 0.5 * (a + b);
    if (penetrance(mid) > target) a = mid;
    else b = mid;
    ++cal.iterations;
  }
  cal.zeta = 0.5 * (a + b);
  if (at_lo <= target) cal.zeta = lo;
  cal.penetrance = penetrance(cal.zeta);
  if (std::abs(cal.penetrance - target) > tol) {
    throw NumericalError("zeta calibration missed the target penetrance by " +
                         std::to_string(std::abs(cal.penetrance - target)));
  }
  return cal;
}

Eigen::VectorXd monte_carlo_region_means(const GenotypeMatrix& population, const BaseVectorModel& base,
                                         std::span<const std::size_t> disease_roi,
                                         const EffectTerms& terms, double delta,
                                         std::size_t min_subjects, Rng rng) {
  if (disease_roi.empty()) throw DataError("disease region is empty");
  const double nd = static_cast<double>(disease_roi.size());
  double mean = 0.0, var = 0.0;
  for (std::size_t a : disease_roi) {
    mean += base.mean(static_cast<Eigen::Index>(a));
    for (std::size_t b : disease_roi) {
      var += base.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  mean /= nd;
  const double sd = std::sqrt(var) / nd;
  const std::size_t n_pop = population.n_subjects();
  const std::size_t m = std::max(min_subjects, n_pop);
  Eigen::VectorXd out(static_cast<Eigen::Index>(m));
  for (std::size_t s = 0; s < m; ++s) {
    out(static_cast<Eigen::Index>(s)) = mean + sd * rng.normal() + delta * effect_load(population, s % n_pop, terms);
  }
  return out;
}

std::vector<std::size_t> sample_study(std::span<const int> labels, std::size_t n, bool balanced, Rng rng) {
  auto draw = [&](std::vector<std::size_t> pool, std::size_t k, const char* what) {
    if (pool.size() < k) {
      throw DataError("need " + std::to_string(k) + " " + what + ", only " + std::to_string(pool.size()) +
                      " available");
    }
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  };
  std::vector<std::size_t> out;
  if (balanced) {
    std::vector<std::size_t> cases, controls;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? cases : controls).push_back(i);
    out = draw(std::move(cases), n / 2, "cases");
    const auto ctrl = draw(std::move(controls), n - n / 2, "controls");
    out.insert(out.end(), ctrl.begin(), ctrl.end());
  } else {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    out = draw(std::move(all), n, "subjects");
  }
  std::sort(out.begin(), out.end());
  return out;
}

GroundTruth ground_truth(const GeneticModel& model) {
  GroundTruth t;
  t.snps = model.causal.snps();
  for (auto [a, b] : model.causal.pairs) t.pairs.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(t.pairs.begin(), t.pairs.end());
  t.pairs.erase(std::unique(t.pairs.begin(), t.pairs.end()), t.pairs.end());
  return t;
}

StudyData simulate_study(const SimulationConfig& c, Execution exec) {
  const Rng master(c.seed);
  const PhenotypeConfig& ph = c.phenotype;

  const HaplotypePool founders = founder_pool(c.population, master.substream(kStreamFounders));
  SimulatedGenotypes pop = to_genotypes(evolve(founders, c.population, master.substream(kStreamEvolution), exec));

  StudyData st;
  st.snp_sets = select_snp_sets(pop.maf, master.substream(kStreamSnpSets));

  const std::size_t n_spurious_roi = c.spurious ? 2 * ph.n_disease_roi : 0;
  if (ph.n_disease_roi < 1 || ph.n_disease_roi + n_spurious_roi > ph.n_roi) {
    throw DataError("disease and spurious regions do not fit in n_roi");
  }
  {
    Rng r = master.substream(kStreamRoi);
    std::vector<std::size_t> roi(ph.n_roi);
    std::iota(roi.begin(), roi.end(), std::size_t{0});
    for (std::size_t i = 0; i < ph.n_disease_roi + n_spurious_roi; ++i) {
      std::swap(roi[i], roi[i + static_cast<std::size_t>(r.below(roi.size() - i))]);
    }
    st.disease.disease_roi.assign(roi.begin(), roi.begin() + static_cast<std::ptrdiff_t>(ph.n_disease_roi));
    st.disease.spurious_roi.assign(roi.begin() + static_cast<std::ptrdiff_t>(ph.n_disease_roi),
                                   roi.begin() + static_cast<std::ptrdiff_t>(ph.n_disease_roi + n_spurious_roi));
    std::sort(st.disease.disease_roi.begin(), st.disease.disease_roi.end());
    std::sort(st.disease.spurious_roi.begin(), st.disease.spurious_roi.end());
  }
  st.disease.penetrance = c.penetrance;

  GeneticModel& gm = st.model;
  gm.kind = c.model;
  gm.causal_set = st.snp_sets.causal;
  gm.spurious_set = st.snp_sets.spurious;
  gm.causal = model_terms(c.model, gm.causal_set);
  if (c.spurious) {
    gm.spurious = model_terms(ModelKind::P3, gm.spurious_set);
    gm.spurious_delta = c.spurious_delta;
  }
  gm.delta = c.delta;
  gm.gamma = c.gamma;

  const BaseVectorModel base = build_base_vector_model(ph, master.substream(kStreamBaseModel));
  const Eigen::VectorXd mc = monte_carlo_region_means(pop.genotypes, base, st.disease.disease_roi, gm.causal,
                                                      gm.delta, c.calibration_subjects,
                                                      master.substream(kStreamCalibration));
  st.calibration = calibrate_zeta(c.penetrance, {mc.data(), static_cast<std::size_t>(mc.size())}, st.disease);
  gm.zeta = st.calibration.zeta;

  const std::size_t n_pop = pop.genotypes.n_subjects();
  Eigen::MatrixXd y = simulate_base_vectors(n_pop, base, st.disease.disease_roi, gm.zeta,
                                            master.substream(kStreamPopulationPhenotype));
  y = apply_vector_effect(y, pop.genotypes, gm.causal, gm.delta, st.disease.disease_roi);
  if (c.spurious) y = apply_vector_effect(y, pop.genotypes, gm.spurious, gm.spurious_delta, st.disease.spurious_roi);

  const Classification cls = classify_disease(y, st.disease, master.substream(kStreamClassification));
  st.population_case_rate =
      static_cast<double>(std::count(cls.labels.begin(), cls.labels.end(), 1)) / static_cast<double>(n_pop);

  st.population_rows = sample_study(cls.labels, c.study_size, c.balanced, master.substream(kStreamSampling));
  st.genotypes = pop.genotypes.select_subjects(st.population_rows);
  st.vectors.resize(static_cast<Eigen::Index>(st.population_rows.size()), y.cols());
  st.posterior.resize(static_cast<Eigen::Index>(st.population_rows.size()));
  for (std::size_t k = 0; k < st.population_rows.size(); ++k) {
    const auto src = static_cast<Eigen::Index>(st.population_rows[k]);
    st.vectors.row(static_cast<Eigen::Index>(k)) = y.row(src);
    st.posterior(static_cast<Eigen::Index>(k)) = cls.posterior(src);
    st.labels.push_back(cls.labels[st.population_rows[k]]);
  }

  if (c.covariances || c.graphs) {
    const Rng cov = master.substream(kStreamCovariance);
    const Eigen::MatrixXd ref = reference_covariance(base, ph, cov.substream(0));
    const auto sigmas = simulate_base_covariances(st.population_rows.size(), ref, ph.cov_noise_sd, cov.substream(1));
    st.covariances = apply_covariance_effect(sigmas, st.genotypes, gm.causal, gm.gamma);
  }
  if (c.graphs) {
    st.graphs.resize(st.covariances.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(st.covariances.size());
#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        st.graphs[static_cast<std::size_t>(i)] = sice_graph(st.covariances[static_cast<std::size_t>(i)], c.sice_rho);
      } catch (...) {
#pragma omp critical(rfdm_sice_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    if (!c.covariances) st.covariances.clear();
  }
  return st;
}

}  // namespace rfdm::sim
