#pragma once

// Simulation experiments E1-E6: per-iteration study simulation, forest
// runs per response arm, ranking, ROC scoring and mean-ROC aggregation.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rfdm/execution.hpp"
#include "rfdm/forest.hpp"
#include "rfdm/importance.hpp"
#include "rfdm/manifold.hpp"
#include "rfdm/roc.hpp"
#include "rfdm/simgen.hpp"

namespace rfdm {

enum class ExperimentId { E1, E2, E3, E4, E5, E6 };

ExperimentId parse_experiment_id(std::string_view s);
std::string to_string(ExperimentId id);

enum class RankingTarget { snps, pairs };

/// Response arms. Each arm builds one distance matrix over the study and
/// grows one genotype forest on it.
///   case_control  discrete metric on the labels
///   euclidean     Euclidean distances of the ROI vectors
///   covariance    SPD geodesic distances of the covariance phenotypes
///   graph         edge-count distances of the SICE graphs
///   manifold      supervised distance: labels forest on the ROI vectors, eigenmap
///   fused         eigenmap distances of the mean proximity of `manifold` and `covariance`
enum class Arm { case_control, euclidean, covariance, graph, manifold, fused };

Arm parse_arm(std::string_view s);
std::string to_string(Arm a);

struct ExperimentSpec {
  ExperimentId id = ExperimentId::E1;
  std::size_t iterations = 8;
  std::uint64_t seed = 1;

  sim::ModelKind model = sim::ModelKind::P0;
  double penetrance = 0.2;
  double delta = 1.5;
  double gamma = 0.3;
  bool spurious = false;
  double spurious_multiplier = 1.0;  // spurious effect size = multiplier * delta
  std::size_t study_size = 200;
  double sice_rho = 1.0;
  std::size_t calibration_subjects = 10000;
  sim::PopulationConfig population;
  sim::PhenotypeConfig phenotype;

  RankingTarget target = RankingTarget::snps;
  std::vector<Arm> arms;

  std::size_t n_trees = 500;
  std::size_t mtry = 0;  // 0 = task default per arm
  std::size_t max_depth = 7;
  std::size_t min_node_size = 1;  // depth-only stopping
  GainVariant gain_variant = GainVariant::per_node_normalized;
  InteractionVariant interaction = InteractionVariant::squared;

  std::size_t manifold_dims = 2;
  std::size_t supervised_trees = 0;  // 0 = n_trees
  /// Which proximity the manifold arm contributes to the fused arm: the
  /// labels-on-vectors forest behind the manifold distances (false) or the
  /// genotype forest grown on them (true).
  bool fuse_genotype_proximity = false;
  bool embeddings = true;  // eigenmap of every arm's proximity
};

/// Defaults of each experiment (full-size forest, desk-scale population).
ExperimentSpec default_spec(ExperimentId id);

/// JSON object; "experiment" is required, every other key overrides default_spec.
ExperimentSpec parse_spec(std::string_view json_text);
std::string spec_to_json(const ExperimentSpec& spec);

struct ArmOutcome {
  Arm arm = Arm::case_control;
  std::vector<double> scores;   // per SNP or per pair (PairInteractionReport order)
  std::vector<std::uint64_t> candidacy;
  RocCurve roc;
  Eigen::MatrixXd proximity;
  std::optional<Embedding> embedding;
  std::string embedding_error;  // set when the eigenmap was refused
};

struct IterationResult {
  std::size_t index = 0;
  std::uint64_t simulation_seed = 0;
  double zeta = 0.0;
  double calibrated_penetrance = 0.0;
  double population_case_rate = 0.0;
  sim::GroundTruth truth;
  std::vector<std::size_t> disease_roi;
  std::vector<std::string> snp_ids;
  std::vector<std::string> subject_ids;
  std::vector<ArmOutcome> arms;
};

struct ArmSummary {
  Arm arm = Arm::case_control;
  std::vector<double> aucs;
  RocCurve mean;
  double mean_auc = 0.0;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<IterationResult> iterations;
  std::vector<ArmSummary> summary;
};

std::uint64_t iteration_seed(std::uint64_t master_seed, std::size_t iteration);
sim::SimulationConfig simulation_config(const ExperimentSpec& spec, std::size_t iteration);

/// One iteration in isolation; identical to the corresponding entry of run_experiment.
IterationResult run_iteration(const ExperimentSpec& spec, std::size_t iteration,
                              Execution exec = Execution::parallel);

/// Aggregates per-arm AUCs and mean ROC curves in iteration order.
std::vector<ArmSummary> summarize(const ExperimentSpec& spec,
                                  const std::vector<IterationResult>& iterations);

/// Runs every iteration in order. When `out_dir` is given, writes
/// manifest.json first, then iteration_<k>/ artifacts as they finish,
/// then mean ROC CSVs, roc.svg and report.json.
ExperimentReport run_experiment(const ExperimentSpec& spec,
                                const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                                Execution exec = Execution::parallel);

/// Simulation config document: optional "population" and "phenotype"
/// objects plus the SimulationConfig scalars ("model", "delta", "seed", ...).
sim::SimulationConfig parse_simulation_config(std::string_view json_text);

/// genotypes.csv, vectors.csv, labels.csv, covariances/, graphs/ (when
/// simulated) and truth.json with the causal SNPs and pairs, R_d, zeta and seed.
void write_study(const sim::StudyData& study, const sim::SimulationConfig& config,
                 const std::filesystem::path& dir);

void write_iteration(const IterationResult& result, const ExperimentSpec& spec,
                     const std::filesystem::path& dir);

}  // namespace rfdm
