#pragma once

// Imaging-genetics simulation engine: forward-time genotypes, base
// phenotypes (ROI vectors, covariance matrices, SICE graphs), genetic
// effect models P0-P4 and the Bayesian case-control classifier.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rfdm/execution.hpp"
#include "rfdm/genotype.hpp"
#include "rfdm/random.hpp"
#include "rfdm/response.hpp"

namespace rfdm::sim {

// ---------------------------------------------------------------- genotypes

struct PopulationConfig {
  std::size_t n_founders = 200;
  std::size_t n_generations = 50;
  std::size_t final_size = 2000;
  std::size_t n_loci = 385;
  double recomb_rate = 1.0e-8;   // per adjacent-locus interval per meiosis
  double mutation_rate = 1.0e-8; // per locus per generation
  double founder_maf_low = 0.05;
  double founder_maf_high = 0.5;
  std::size_t founder_ld_block = 10;
  /// Probability that a founder allele copies its block's latent allele
  /// instead of being drawn independently; sets within-block LD.
  double founder_ld_strength = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Two phased haplotypes of 0/1 alleles per individual; allele (i, s, l) is
/// at alleles[(2 i + s) * n_loci + l].
struct HaplotypePool {
  std::size_t n_individuals = 0;
  std::size_t n_loci = 0;
  std::vector<std::uint8_t> alleles;

  std::uint8_t allele(std::size_t ind, std::size_t strand, std::size_t locus) const noexcept {
    return alleles[(2 * ind + strand) * n_loci + locus];
  }
  friend bool operator==(const HaplotypePool&, const HaplotypePool&) = default;
};

HaplotypePool founder_pool(const PopulationConfig& config, Rng rng);

/// Wright-Fisher evolution with geometric growth from the founder count to
/// final_size. Offspring k of generation g draws from rng.substream(g).substream(k).
HaplotypePool evolve(const HaplotypePool& founders, const PopulationConfig& config, Rng rng,
                     Execution exec = Execution::parallel);

std::size_t generation_size(const PopulationConfig& config, std::size_t generation);

/// Frequency of allele 1 per locus.
std::vector<double> allele_frequencies(const HaplotypePool& pool);

struct SimulatedGenotypes {
  GenotypeMatrix genotypes;  // minor-allele counts
  std::vector<double> maf;
};

/// Diploid minor-allele counts (loci recoded where allele 1 is the major allele).
SimulatedGenotypes to_genotypes(const HaplotypePool& pool);

/// founder_pool + evolve + to_genotypes from config.seed.
SimulatedGenotypes simulate_genotypes(const PopulationConfig& config,
                                      Execution exec = Execution::parallel);

struct MafWindow {
  double low = 0.0;  // exclusive
  double high = 0.0; // exclusive
};

struct SnpSets {
  std::vector<std::size_t> causal;    // random order: alpha_1, alpha_2, ...
  std::vector<std::size_t> spurious;
  MafWindow causal_window;            // windows actually used
  MafWindow spurious_window;
  std::size_t widening_steps = 0;
};

inline constexpr MafWindow kCausalMafWindow{0.195, 0.205};
inline constexpr MafWindow kSpuriousMafWindow{0.22, 0.24};

/// Picks `set_size` causal then `set_size` spurious loci from the MAF
/// windows, widening a window by `widen_step` on both sides until enough
/// loci qualify. Throws DataError when even [0, 0.5] is insufficient.
SnpSets select_snp_sets(std::span<const double> maf, Rng rng, std::size_t set_size = 16,
                        MafWindow causal = kCausalMafWindow,
                        MafWindow spurious = kSpuriousMafWindow, double widen_step = 0.005);

// ------------------------------------------------------------ genetic model

enum class ModelKind { P0, P1, P2, P3, P4 };

ModelKind parse_model(const std::string& s);
std::string to_string(ModelKind m);

struct EffectTerms {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // multiplicative x_a x_b
  std::vector<std::size_t> singles;                         // additive x_c

  /// Every SNP that enters a term.
  std::vector<std::size_t> snps() const;
};

/// Interaction topology over the ordered SNP list alpha_1, alpha_2, ...:
/// P0 seven singles; P1 eight disjoint pairs; P2 eight pairs sharing
/// alpha_1; P3 an eight-pair chain; P4 the P3 chain plus seven singles.
EffectTerms model_terms(ModelKind kind, std::span<const std::size_t> snps);

/// sum_{(a,b)} x_a x_b + sum_c x_c for one subject.
double effect_load(const GenotypeMatrix& g, std::size_t subject, const EffectTerms& terms);

struct GeneticModel {
  ModelKind kind = ModelKind::P1;
  std::vector<std::size_t> causal_set;
  std::vector<std::size_t> spurious_set;
  EffectTerms causal;
  EffectTerms spurious;       // empty unless spurious effects are simulated
  double delta = 1.5;         // vector effect size on the disease ROIs
  double gamma = 0.3;         // covariance attenuation
  double spurious_delta = 0.0;
  double zeta = 0.0;          // base shift on the disease ROIs
};

struct DiseaseModel {
  double mu_cn = -0.38;
  double mu_ad = 0.57;
  double sigma = 0.90;
  double penetrance = 0.2;  // prior P(z = 1)
  std::vector<std::size_t> disease_roi;
  std::vector<std::size_t> spurious_roi;
};

// --------------------------------------------------------------- phenotypes

struct PhenotypeConfig {
  std::size_t n_roi = 400;
  std::size_t n_reference = 154;    // reference controls the base Gaussian is estimated from
  double base_mean = -0.38;
  double base_sd = 2.27;
  double roi_correlation = 0.3;     // correlation decays as rho^|k - l|
  std::size_t n_disease_roi = 28;
  std::size_t cov_dim = 10;         // ROIs in the covariance / graph phenotypes
  double cov_noise_sd = 1.0;        // per-entry perturbation of the base covariance
};

struct ShrinkageEstimate {
  Eigen::MatrixXd covariance;
  double lambda = 0.0;  // weight on the diagonal target
};

/// James-Stein-type shrinkage of the sample covariance towards its diagonal,
/// intensity from the variance-of-entries estimator. `samples` is n x q.
ShrinkageEstimate shrink_covariance(const Eigen::MatrixXd& samples);

/// Reference Gaussian the base ROI vectors are drawn from.
struct BaseVectorModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd cholesky;  // lower factor of `covariance`
  double shrinkage = 0.0;
};

/// Draws `n_reference` vectors from the calibrated AR(1) Gaussian and
/// estimates mean and shrinkage covariance from them.
BaseVectorModel build_base_vector_model(const PhenotypeConfig& config, Rng rng);

/// N x q base vectors with `zeta` subtracted on `disease_roi`.
Eigen::MatrixXd simulate_base_vectors(std::size_t n_subjects, const BaseVectorModel& model,
                                      std::span<const std::size_t> disease_roi, double zeta,
                                      Rng rng);

/// y*_beta = y_beta + delta * load on `roi_set` columns.
Eigen::MatrixXd apply_vector_effect(const Eigen::MatrixXd& y, const GenotypeMatrix& g,
                                    const EffectTerms& terms, double delta,
                                    std::span<const std::size_t> roi_set);

/// Reference covariance S_Sigma over the first `config.cov_dim` ROIs,
/// shrinkage-estimated from `n_reference` base vectors.
Eigen::MatrixXd reference_covariance(const BaseVectorModel& model, const PhenotypeConfig& config,
                                     Rng rng);

/// Sigma_i = S + noise_sd * N(0,1) entries, symmetrized, then projected to
/// SPD by clipping eigenvalues at 1e-6.
inline constexpr double kCovarianceEigenFloor = 1e-6;
std::vector<Eigen::MatrixXd> simulate_base_covariances(std::size_t n_subjects,
                                                       const Eigen::MatrixXd& reference,
                                                       double noise_sd, Rng rng);

/// Sigma*_kl = Sigma_kl exp(-gamma * load).
std::vector<Eigen::MatrixXd> apply_covariance_effect(std::span<const Eigen::MatrixXd> sigmas,
                                                     const GenotypeMatrix& g,
                                                     const EffectTerms& terms, double gamma);

// --------------------------------------------------------------------- SICE

struct GlassoResult {
  Eigen::MatrixXd precision;   // Theta
  Eigen::MatrixXd covariance;  // W, the working estimate of Theta^-1
  double duality_gap = 0.0;
  std::size_t iterations = 0;
};

/// Sweeps stop once the duality gap is below `tol` and |Theta W - I| is
/// below this entrywise.
inline constexpr double kGlassoInverseTolerance = 1e-10;

/// Maximizes log det Theta - tr(S Theta) - rho ||Theta||_1 (diagonal
/// included) by block coordinate descent. Throws ConvergenceError with the
/// final duality gap after max_iter sweeps.
GlassoResult graphical_lasso(const Eigen::MatrixXd& s, double rho, double tol = 1e-10,
                             std::size_t max_iter = 1000);

inline constexpr double kSiceEdgeThreshold = 1e-8;

/// Edge (k, l) iff |Theta_kl| > 1e-8.
Graph precision_graph(const Eigen::MatrixXd& precision);
Graph sice_graph(const Eigen::MatrixXd& sigma, double rho = 1.0, double tol = 1e-10,
                 std::size_t max_iter = 1000);

// ----------------------------------------------------------- classification

/// P(z = 1 | mean disease-ROI value) under equal-variance Gaussian likelihoods.
double disease_posterior(double region_mean, const DiseaseModel& model);

Eigen::VectorXd region_means(const Eigen::MatrixXd& y, std::span<const std::size_t> roi);

struct Classification {
  std::vector<int> labels;
  Eigen::VectorXd posterior;
  Eigen::VectorXd region_mean;
};

Classification classify_disease(const Eigen::MatrixXd& y_star, const DiseaseModel& model, Rng rng);

struct ZetaCalibration {
  double zeta = 0.0;
  double penetrance = 0.0;  // mean posterior at zeta
  std::size_t iterations = 0;
};

/// Bisection on zeta in [lo, hi] so the mean posterior of
/// (region_mean_at_zero - zeta), with prior = target, matches `target`.
/// Throws NumericalError when the target is outside the bracket or the
/// result misses it by more than `tol`.
ZetaCalibration calibrate_zeta(double target, std::span<const double> region_mean_at_zero,
                               DiseaseModel model, double tol = 0.01, double lo = 0.0,
                               double hi = 20.0);

/// Monte Carlo disease-ROI means at zeta = 0 for at least `min_subjects`
/// subjects, cycling through the population's genotypes with fresh base
/// draws. Draws the region mean from its exact marginal Gaussian.
Eigen::VectorXd monte_carlo_region_means(const GenotypeMatrix& population,
                                         const BaseVectorModel& base,
                                         std::span<const std::size_t> disease_roi,
                                         const EffectTerms& terms, double delta,
                                         std::size_t min_subjects, Rng rng);

/// Stratified sample: n/2 cases and n/2 controls when balanced, otherwise a
/// simple random sample. Indices ascending. Throws DataError when a stratum is short.
std::vector<std::size_t> sample_study(std::span<const int> labels, std::size_t n, bool balanced,
                                      Rng rng);

// ----------------------------------------------------------- full pipeline

struct SimulationConfig {
  PopulationConfig population;
  PhenotypeConfig phenotype;
  ModelKind model = ModelKind::P1;
  double delta = 1.5;
  double gamma = 0.3;
  double penetrance = 0.2;
  bool spurious = false;
  double spurious_delta = 1.5;
  std::size_t study_size = 200;
  bool balanced = true;
  double sice_rho = 1.0;
  bool covariances = true;
  bool graphs = true;
  std::size_t calibration_subjects = 10000;
  std::uint64_t seed = 0;
};

struct StudyData {
  GenotypeMatrix genotypes;          // study subjects only
  Eigen::MatrixXd vectors;           // y* of the study subjects
  std::vector<int> labels;
  Eigen::VectorXd posterior;
  std::vector<Eigen::MatrixXd> covariances;  // attenuated Sigma*
  std::vector<Graph> graphs;
  std::vector<std::size_t> population_rows;  // which population members were sampled

  GeneticModel model;
  DiseaseModel disease;
  SnpSets snp_sets;
  ZetaCalibration calibration;
  double population_case_rate = 0.0;
};

/// Simulates a population, calibrates zeta, classifies and samples one study.
/// Stream layout: Rng(config.seed).substream(kStream*) for each stage.
StudyData simulate_study(const SimulationConfig& config, Execution exec = Execution::parallel);

enum SimulationStream : std::uint64_t {
  kStreamFounders = 1,
  kStreamEvolution = 2,
  kStreamSnpSets = 3,
  kStreamRoi = 4,
  kStreamBaseModel = 5,
  kStreamCalibration = 6,
  kStreamPopulationPhenotype = 7,
  kStreamClassification = 8,
  kStreamSampling = 9,
  kStreamCovariance = 10,
};

/// Causal SNPs and SNP pairs of a simulated study, for ROC scoring.
struct GroundTruth {
  std::vector<std::size_t> snps;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (min, max)
};
GroundTruth ground_truth(const GeneticModel& model);

}  // namespace rfdm::sim
