#include "rfdm/experiment.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <numeric>

#include "csv.hpp"
#include "json.hpp"
#include "rfdm/error.hpp"
#include "rfdm/io.hpp"
#include "rfdm/metric.hpp"
#include "rfdm/plot.hpp"
#include "rfdm/report_io.hpp"

namespace rfdm {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<ExperimentId, const char*>, 6> kIds{{
    {ExperimentId::E1, "E1"}, {ExperimentId::E2, "E2"}, {ExperimentId::E3, "E3"},
    {ExperimentId::E4, "E4"}, {ExperimentId::E5, "E5"}, {ExperimentId::E6, "E6"},
}};

constexpr std::array<std::pair<Arm, const char*>, 6> kArms{{
    {Arm::case_control, "case_control"}, {Arm::euclidean, "euclidean"},
    {Arm::covariance, "covariance"},     {Arm::graph, "graph"},
    {Arm::manifold, "manifold"},         {Arm::fused, "fused"},
}};

// Stream ids under the iteration seed; the simulation uses 1..10.
constexpr std::uint64_t kArmStreamBase = 1000;
constexpr std::uint64_t kSupervisedStream = 2000;

}  // namespace

ExperimentId parse_experiment_id(std::string_view s) {
  for (auto [id, name] : kIds) {
    if (s == name) return id;
  }
  throw DataError("unknown experiment id '" + std::string(s) + "'");
}

std::string to_string(ExperimentId id) {
  for (auto [v, name] : kIds) {
    if (v == id) return name;
  }
  return "?";
}

Arm parse_arm(std::string_view s) {
  for (auto [arm, name] : kArms) {
    if (s == name) return arm;
  }
  throw DataError("unknown arm '" + std::string(s) + "'");
}

std::string to_string(Arm a) {
  for (auto [v, name] : kArms) {
    if (v == a) return name;
  }
  return "?";
}

ExperimentSpec default_spec(ExperimentId id) {
  ExperimentSpec s;
  s.id = id;
  switch (id) {
    case ExperimentId::E1:
      s.model = sim::ModelKind::P0;
      s.target = RankingTarget::snps;
      s.arms = {Arm::euclidean, Arm::case_control};
      break;
    case ExperimentId::E2:
      s.model = sim::ModelKind::P1;
      s.target = RankingTarget::pairs;
      s.arms = {Arm::euclidean, Arm::case_control};
      break;
    case ExperimentId::E3:
      s.model = sim::ModelKind::P3;
      s.target = RankingTarget::pairs;
      s.arms = {Arm::covariance, Arm::case_control};
      break;
    case ExperimentId::E4:
      s.model = sim::ModelKind::P3;
      s.target = RankingTarget::pairs;
      s.arms = {Arm::graph, Arm::covariance, Arm::case_control};
      break;
    case ExperimentId::E5:
      s.model = sim::ModelKind::P3;
      s.target = RankingTarget::pairs;
      s.delta = 0.75;
      s.arms = {Arm::manifold, Arm::covariance, Arm::fused};
      break;
    case ExperimentId::E6:
      s.model = sim::ModelKind::P3;
      s.target = RankingTarget::pairs;
      s.spurious = true;
      s.spurious_multiplier = 3.0;
      s.arms = {Arm::case_control, Arm::euclidean, Arm::manifold};
      break;
  }
  return s;
}

// ------------------------------------------------------------------ JSON

namespace {

std::string gain_name(GainVariant v) {
  return v == GainVariant::literal ? "literal" : "per_node_normalized";
}

GainVariant parse_gain(const std::string& s) {
  if (s == "per_node_normalized") return GainVariant::per_node_normalized;
  if (s == "literal") return GainVariant::literal;
  throw DataError("unknown gain_variant '" + s + "'");
}

std::string interaction_name(InteractionVariant v) {
  return v == InteractionVariant::absolute ? "absolute" : "squared";
}

InteractionVariant parse_interaction(const std::string& s) {
  if (s == "squared") return InteractionVariant::squared;
  if (s == "absolute") return InteractionVariant::absolute;
  throw DataError("unknown interaction '" + s + "'");
}

json population_json(const sim::PopulationConfig& p) {
  return {{"n_founders", p.n_founders},
          {"n_generations", p.n_generations},
          {"final_size", p.final_size},
          {"n_loci", p.n_loci},
          {"recomb_rate", p.recomb_rate},
          {"mutation_rate", p.mutation_rate},
          {"founder_maf_low", p.founder_maf_low},
          {"founder_maf_high", p.founder_maf_high},
          {"founder_ld_block", p.founder_ld_block},
          {"founder_ld_strength", p.founder_ld_strength}};
}

json phenotype_json(const sim::PhenotypeConfig& p) {
  return {{"n_roi", p.n_roi},
          {"n_reference", p.n_reference},
          {"base_mean", p.base_mean},
          {"base_sd", p.base_sd},
          {"roi_correlation", p.roi_correlation},
          {"n_disease_roi", p.n_disease_roi},
          {"cov_dim", p.cov_dim},
          {"cov_noise_sd", p.cov_noise_sd}};
}

// Reads `key` into `out` when present; type mismatches become DataError.
template <class T>
void read(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("spec field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw DataError("unknown " + where + " field '" + key + "'");
    }
  }
}

void read_population(const json& p, sim::PopulationConfig& c) {
  if (!p.is_object()) throw DataError("spec field 'population' must be an object");
  reject_unknown(p,
                 {"n_founders", "n_generations", "final_size", "n_loci", "recomb_rate", "mutation_rate",
                  "founder_maf_low", "founder_maf_high", "founder_ld_block", "founder_ld_strength"},
                 "population");
  read(p, "n_founders", c.n_founders);
  read(p, "n_generations", c.n_generations);
  read(p, "final_size", c.final_size);
  read(p, "n_loci", c.n_loci);
  read(p, "recomb_rate", c.recomb_rate);
  read(p, "mutation_rate", c.mutation_rate);
  read(p, "founder_maf_low", c.founder_maf_low);
  read(p, "founder_maf_high", c.founder_maf_high);
  read(p, "founder_ld_block", c.founder_ld_block);
  read(p, "founder_ld_strength", c.founder_ld_strength);
}

void read_phenotype(const json& p, sim::PhenotypeConfig& c) {
  if (!p.is_object()) throw DataError("spec field 'phenotype' must be an object");
  reject_unknown(p,
                 {"n_roi", "n_reference", "base_mean", "base_sd", "roi_correlation", "n_disease_roi", "cov_dim",
                  "cov_noise_sd"},
                 "phenotype");
  read(p, "n_roi", c.n_roi);
  read(p, "n_reference", c.n_reference);
  read(p, "base_mean", c.base_mean);
  read(p, "base_sd", c.base_sd);
  read(p, "roi_correlation", c.roi_correlation);
  read(p, "n_disease_roi", c.n_disease_roi);
  read(p, "cov_dim", c.cov_dim);
  read(p, "cov_noise_sd", c.cov_noise_sd);
}

json parse_object(std::string_view text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(what) + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError(std::string(what) + " must be a JSON object");
  return j;
}

}  // namespace

ExperimentSpec parse_spec(std::string_view json_text) {
  const json j = parse_object(json_text, "spec");
  if (!j.contains("experiment")) throw DataError("spec is missing 'experiment'");
  reject_unknown(j,
                 {"experiment", "iterations", "seed", "model", "penetrance", "delta", "gamma", "spurious",
                  "spurious_multiplier", "study_size", "sice_rho", "calibration_subjects", "population",
                  "phenotype", "target", "arms", "n_trees", "mtry", "max_depth", "min_node_size",
                  "gain_variant", "interaction", "manifold_dims", "supervised_trees",
                  "fuse_genotype_proximity", "embeddings"},
                 "spec");

  std::string id;
  read(j, "experiment", id);
  ExperimentSpec s = default_spec(parse_experiment_id(id));

  read(j, "iterations", s.iterations);
  read(j, "seed", s.seed);
  if (j.contains("model")) {
    std::string m;
    read(j, "model", m);
    s.model = sim::parse_model(m);
  }
  read(j, "penetrance", s.penetrance);
  read(j, "delta", s.delta);
  read(j, "gamma", s.gamma);
  read(j, "spurious", s.spurious);
  read(j, "spurious_multiplier", s.spurious_multiplier);
  read(j, "study_size", s.study_size);
  read(j, "sice_rho", s.sice_rho);
  read(j, "calibration_subjects", s.calibration_subjects);

  if (const auto it = j.find("population"); it != j.end()) read_population(*it, s.population);
  if (const auto it = j.find("phenotype"); it != j.end()) read_phenotype(*it, s.phenotype);

  if (j.contains("target")) {
    std::string t;
    read(j, "target", t);
    if (t == "snps") {
      s.target = RankingTarget::snps;
    } else if (t == "pairs") {
      s.target = RankingTarget::pairs;
    } else {
      throw DataError("unknown target '" + t + "'");
    }
  }
  if (j.contains("arms")) {
    std::vector<std::string> names;
    read(j, "arms", names);
    s.arms.clear();
    for (const auto& n : names) s.arms.push_back(parse_arm(n));
  }
  read(j, "n_trees", s.n_trees);
  read(j, "mtry", s.mtry);
  read(j, "max_depth", s.max_depth);
  read(j, "min_node_size", s.min_node_size);
  if (j.contains("gain_variant")) {
    std::string g;
    read(j, "gain_variant", g);
    s.gain_variant = parse_gain(g);
  }
  if (j.contains("interaction")) {
    std::string v;
    read(j, "interaction", v);
    s.interaction = parse_interaction(v);
  }
  read(j, "manifold_dims", s.manifold_dims);
  read(j, "supervised_trees", s.supervised_trees);
  read(j, "fuse_genotype_proximity", s.fuse_genotype_proximity);
  read(j, "embeddings", s.embeddings);

  if (s.iterations == 0) throw DataError("iterations must be positive");
  if (s.arms.empty()) throw DataError("spec needs at least one arm");
  if (s.n_trees == 0) throw DataError("n_trees must be positive");
  if (s.manifold_dims == 0) throw DataError("manifold_dims must be positive");
  if (!(s.penetrance > 0.0 && s.penetrance < 1.0)) throw DataError("penetrance must lie in (0, 1)");
  s.population.validate();
  return s;
}

namespace {

json spec_json(const ExperimentSpec& s) {
  json arms = json::array();
  for (Arm a : s.arms) arms.push_back(to_string(a));
  return {{"experiment", to_string(s.id)},
          {"iterations", s.iterations},
          {"seed", s.seed},
          {"model", sim::to_string(s.model)},
          {"penetrance", s.penetrance},
          {"delta", s.delta},
          {"gamma", s.gamma},
          {"spurious", s.spurious},
          {"spurious_multiplier", s.spurious_multiplier},
          {"study_size", s.study_size},
          {"sice_rho", s.sice_rho},
          {"calibration_subjects", s.calibration_subjects},
          {"population", population_json(s.population)},
          {"phenotype", phenotype_json(s.phenotype)},
          {"target", s.target == RankingTarget::snps ? "snps" : "pairs"},
          {"arms", arms},
          {"n_trees", s.n_trees},
          {"mtry", s.mtry},
          {"max_depth", s.max_depth},
          {"min_node_size", s.min_node_size},
          {"gain_variant", gain_name(s.gain_variant)},
          {"interaction", interaction_name(s.interaction)},
          {"manifold_dims", s.manifold_dims},
          {"supervised_trees", s.supervised_trees},
          {"fuse_genotype_proximity", s.fuse_genotype_proximity},
          {"embeddings", s.embeddings}};
}

}  // namespace

std::string spec_to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2); }

sim::SimulationConfig parse_simulation_config(std::string_view json_text) {
  const json j = parse_object(json_text, "simulation config");
  reject_unknown(j,
                 {"population", "phenotype", "model", "delta", "gamma", "penetrance", "spurious", "spurious_delta",
                  "study_size", "balanced", "sice_rho", "covariances", "graphs", "calibration_subjects", "seed"},
                 "simulation config");
  sim::SimulationConfig c;
  if (const auto it = j.find("population"); it != j.end()) read_population(*it, c.population);
  if (const auto it = j.find("phenotype"); it != j.end()) read_phenotype(*it, c.phenotype);
  if (j.contains("model")) {
    std::string m;
    read(j, "model", m);
    c.model = sim::parse_model(m);
  }
  read(j, "delta", c.delta);
  read(j, "gamma", c.gamma);
  read(j, "penetrance", c.penetrance);
  read(j, "spurious", c.spurious);
  read(j, "spurious_delta", c.spurious_delta);
  read(j, "study_size", c.study_size);
  read(j, "balanced", c.balanced);
  read(j, "sice_rho", c.sice_rho);
  read(j, "covariances", c.covariances);
  read(j, "graphs", c.graphs);
  read(j, "calibration_subjects", c.calibration_subjects);
  read(j, "seed", c.seed);
  c.population.validate();
  return c;
}

// ------------------------------------------------------------- iterations

std::uint64_t iteration_seed(std::uint64_t master_seed, std::size_t iteration) {
  Rng r = Rng(master_seed).substream(iteration);
  return r.next_u64();
}

sim::SimulationConfig simulation_config(const ExperimentSpec& spec, std::size_t iteration) {
  const auto uses = [&](Arm a) { return std::find(spec.arms.begin(), spec.arms.end(), a) != spec.arms.end(); };
  sim::SimulationConfig c;
  c.population = spec.population;
  c.phenotype = spec.phenotype;
  c.model = spec.model;
  c.delta = spec.delta;
  c.gamma = spec.gamma;
  c.penetrance = spec.penetrance;
  c.spurious = spec.spurious;
  c.spurious_delta = spec.spurious_multiplier * spec.delta;
  c.study_size = spec.study_size;
  c.balanced = true;
  c.sice_rho = spec.sice_rho;
  c.covariances = uses(Arm::covariance) || uses(Arm::fused);
  c.graphs = uses(Arm::graph);
  c.calibration_subjects = spec.calibration_subjects;
  c.seed = iteration_seed(spec.seed, iteration);
  return c;
}

namespace {

struct ArmRun {
  Forest forest;
  ProximityMatrix proximity;
  Eigen::MatrixXd fusion_proximity;  // what this arm contributes to the fused arm
  bool done = false;
};

class IterationRunner {
 public:
  IterationRunner(const ExperimentSpec& spec, const sim::StudyData& study, std::uint64_t seed, Execution exec)
      : spec_(spec), study_(study), seed_(seed), exec_(exec),
        x_(FeatureMatrix::from_genotypes(study.genotypes)) {}

  const ArmRun& run(Arm arm) {
    ArmRun& r = runs_[arm];
    if (r.done) return r;

    ForestParams params;
    params.n_trees = spec_.n_trees;
    params.mtry = spec_.mtry;
    params.max_depth = spec_.max_depth;
    params.min_node_size = spec_.min_node_size;
    params.gain_variant = spec_.gain_variant;
    params.task = arm == Arm::case_control ? TaskKind::classification : TaskKind::regression;
    {
      Rng s = Rng(seed_).substream(kArmStreamBase + static_cast<std::uint64_t>(arm));
      params.seed = s.next_u64();
    }

    DistanceMatrix d;
    Eigen::MatrixXd upstream;
    switch (arm) {
      case Arm::case_control:
        d = discrete_distances(study_.labels);
        break;
      case Arm::euclidean:
        d = euclidean_distances(study_.vectors, exec_);
        break;
      case Arm::covariance:
        d = spd_distances(study_.covariances, exec_);
        break;
      case Arm::graph:
        d = graph_distances(study_.graphs);
        break;
      case Arm::manifold: {
        ForestParams sp = params;
        sp.task = TaskKind::classification;
        sp.mtry = 0;
        sp.n_trees = spec_.supervised_trees ? spec_.supervised_trees : spec_.n_trees;
        Rng s = Rng(seed_).substream(kSupervisedStream);
        sp.seed = s.next_u64();
        SupervisedDistance sd = supervised_distance(study_.labels, study_.vectors, sp, spec_.manifold_dims, exec_);
        d = std::move(sd.distances);
        upstream = std::move(sd.proximity.values);
        break;
      }
      case Arm::fused: {
        const Eigen::MatrixXd a = run(Arm::manifold).fusion_proximity;
        const Eigen::MatrixXd b = run(Arm::covariance).fusion_proximity;
        const std::array<Eigen::MatrixXd, 2> parts{a, b};
        EigenmapOptions opt;
        opt.dims = spec_.manifold_dims;
        const Embedding e = laplacian_eigenmap(fuse_proximities(parts, FusionWeights::uniform(2)), opt);
        d = embedding_distances(e, exec_);
        break;
      }
    }

    ArmRun& out = r;  // std::map references survive the recursive inserts above
    out.forest = grow_forest(x_, d, params, exec_);
    out.proximity = proximity(out.forest, exec_);
    const bool own = arm != Arm::manifold || spec_.fuse_genotype_proximity;
    out.fusion_proximity = own ? out.proximity.values : std::move(upstream);
    out.done = true;
    return out;
  }

  ArmOutcome outcome(Arm arm, const sim::GroundTruth& truth) {
    const ArmRun& r = run(arm);
    ArmOutcome o;
    o.arm = arm;
    const ImportanceReport gi = gini_importance(r.forest);
    o.candidacy = gi.candidacy;
    if (spec_.target == RankingTarget::snps) {
      o.scores = gi.score;
      o.roc = roc(rank(gi), truth.snps);
    } else {
      const PairInteractionReport pr = pairwise_interaction(r.forest, spec_.interaction, exec_);
      o.scores.resize(pr.n_pairs());
      for (std::size_t k = 0; k < pr.n_pairs(); ++k) o.scores[k] = pr.combined_at(k);
      o.roc = roc(rank(pr), truth.pairs);
    }
    o.proximity = r.proximity.values;
    if (spec_.embeddings) {
      EigenmapOptions opt;
      opt.dims = spec_.manifold_dims;
      try {
        o.embedding = laplacian_eigenmap(o.proximity, opt);
      } catch (const SpectrumError& e) {
        o.embedding_error = e.what();
      }
    }
    return o;
  }

 private:
  const ExperimentSpec& spec_;
  const sim::StudyData& study_;
  std::uint64_t seed_;
  Execution exec_;
  FeatureMatrix x_;
  std::map<Arm, ArmRun> runs_;
};

}  // namespace

IterationResult run_iteration(const ExperimentSpec& spec, std::size_t iteration, Execution exec) {
  const sim::SimulationConfig cfg = simulation_config(spec, iteration);
  const sim::StudyData study = sim::simulate_study(cfg, exec);

  IterationResult r;
  r.index = iteration;
  r.simulation_seed = cfg.seed;
  r.zeta = study.calibration.zeta;
  r.calibrated_penetrance = study.calibration.penetrance;
  r.population_case_rate = study.population_case_rate;
  r.truth = sim::ground_truth(study.model);
  r.disease_roi = study.disease.disease_roi;
  r.snp_ids = study.genotypes.snp_ids();
  r.subject_ids = study.genotypes.subject_ids();

  IterationRunner runner(spec, study, cfg.seed, exec);
  for (Arm a : spec.arms) r.arms.push_back(runner.outcome(a, r.truth));
  return r;
}

std::vector<ArmSummary> summarize(const ExperimentSpec& spec, const std::vector<IterationResult>& iterations) {
  std::vector<ArmSummary> out;
  for (std::size_t a = 0; a < spec.arms.size(); ++a) {
    ArmSummary s;
    s.arm = spec.arms[a];
    std::vector<RocCurve> curves;
    for (const auto& it : iterations) {
      const ArmOutcome& o = it.arms.at(a);
      s.aucs.push_back(o.roc.auc);
      curves.push_back(o.roc);
    }
    if (!curves.empty()) {
      s.mean = mean_roc(curves);
      s.mean_auc = std::accumulate(s.aucs.begin(), s.aucs.end(), 0.0) / static_cast<double>(s.aucs.size());
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ------------------------------------------------------------- artifacts

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = detail::open_output(path);
  out << text << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::string iteration_dir_name(std::size_t k) { return "iteration_" + std::to_string(k); }

json manifest_json(const ExperimentSpec& spec, const std::vector<IterationResult>& done) {
  json iters = json::array();
  for (std::size_t k = 0; k < spec.iterations; ++k) {
    json e = {{"index", k}, {"simulation_seed", iteration_seed(spec.seed, k)}, {"dir", iteration_dir_name(k)}};
    if (k < done.size()) {
      e["zeta"] = done[k].zeta;
      e["status"] = "complete";
    } else {
      e["status"] = "pending";
    }
    iters.push_back(std::move(e));
  }
  return {{"spec", spec_json(spec)},
          {"replay", "rfdm experiment --spec <manifest.json> --iteration <index> --out-dir <dir>"},
          {"iterations", iters}};
}

}  // namespace

void write_study(const sim::StudyData& study, const sim::SimulationConfig& config,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& ids = study.genotypes.subject_ids();
  const auto& snps = study.genotypes.snp_ids();
  io::save_genotypes(study.genotypes, dir / "genotypes.csv");

  io::Table vectors;
  vectors.subject_ids = ids;
  vectors.values = study.vectors;
  for (Eigen::Index c = 0; c < study.vectors.cols(); ++c) vectors.columns.push_back("roi" + std::to_string(c + 1));
  io::save_table(vectors, dir / "vectors.csv");
  io::save_labels(study.labels, ids, dir / "labels.csv");
  if (!study.covariances.empty()) io::save_matrix_bundle(study.covariances, ids, dir / "covariances");
  if (!study.graphs.empty()) io::save_graph_bundle(study.graphs, ids, dir / "graphs");

  const sim::GroundTruth truth = sim::ground_truth(study.model);
  json causal = json::array();
  for (auto s : truth.snps) causal.push_back(snps.at(s));
  json pairs = json::array();
  for (auto [a, b] : truth.pairs) pairs.push_back({snps.at(a), snps.at(b)});
  json spurious = json::array();
  for (auto s : study.model.spurious.snps()) spurious.push_back(snps.at(s));
  const json t = {{"seed", config.seed},
                  {"model", sim::to_string(study.model.kind)},
                  {"delta", study.model.delta},
                  {"gamma", study.model.gamma},
                  {"zeta", study.model.zeta},
                  {"target_penetrance", config.penetrance},
                  {"calibrated_penetrance", study.calibration.penetrance},
                  {"population_case_rate", study.population_case_rate},
                  {"causal_snps", causal},
                  {"causal_pairs", pairs},
                  {"spurious_snps", spurious},
                  {"causal_snp_indices", truth.snps},
                  {"disease_roi", study.disease.disease_roi},
                  {"spurious_roi", study.disease.spurious_roi},
                  {"population_rows", study.population_rows}};
  write_text(dir / "truth.json", t.dump(2));
}

void write_iteration(const IterationResult& result, const ExperimentSpec& spec,
                     const std::filesystem::path& dir) {
  const auto& names = result.snp_ids;
  const auto& subjects = result.subject_ids;

  json truth_snps = json::array();
  json truth_ids = json::array();
  for (auto s : result.truth.snps) {
    truth_snps.push_back(s);
    truth_ids.push_back(names.at(s));
  }
  json truth_pairs = json::array();
  json truth_pair_ids = json::array();
  for (auto [a, b] : result.truth.pairs) {
    truth_pairs.push_back({a, b});
    truth_pair_ids.push_back({names.at(a), names.at(b)});
  }
  json arms = json::object();
  for (const auto& o : result.arms) {
    json a = {{"auc", o.roc.auc}};
    if (!o.embedding_error.empty()) a["embedding_error"] = o.embedding_error;
    arms[to_string(o.arm)] = std::move(a);
  }
  const json truth = {{"iteration", result.index},
                      {"simulation_seed", result.simulation_seed},
                      {"zeta", result.zeta},
                      {"calibrated_penetrance", result.calibrated_penetrance},
                      {"population_case_rate", result.population_case_rate},
                      {"causal_snps", truth_ids},
                      {"causal_pairs", truth_pair_ids},
                      {"causal_snp_indices", truth_snps},
                      {"causal_pair_indices", truth_pairs},
                      {"disease_roi", result.disease_roi},
                      {"arms", arms}};
  write_text(dir / "truth.json", truth.dump(2));

  for (const auto& o : result.arms) {
    const std::string tag = to_string(o.arm);
    io::save_roc(o.roc, dir / ("roc_" + tag + ".csv"));
    if (spec.target == RankingTarget::snps) {
      ImportanceReport rep;
      rep.score = o.scores;
      io::save_snp_ranking(rank(rep), o.candidacy, names, dir / ("ranking_" + tag + ".tsv"));
    } else {
      PairInteractionReport rep(names.size());
      for (std::size_t k = 0; k < o.scores.size(); ++k) {
        const auto [a, b] = rep.pair_at(k);
        rep.add(b, a, o.scores[k]);
      }
      io::save_pair_ranking(rank(rep), o.candidacy, names, dir / ("ranking_" + tag + ".tsv"));
    }
    write_matrix_csv(o.proximity, dir / ("proximity_" + tag + ".csv"));
    if (o.embedding) io::save_embedding(*o.embedding, subjects, dir / ("embedding_" + tag + ".csv"));
  }
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& out_dir,
                                Execution exec) {
  ExperimentReport report;
  report.spec = spec;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_text(*out_dir / "manifest.json", manifest_json(spec, report.iterations).dump(2));
  }
  // Iterations run in order; each one parallelizes its own kernels.
  for (std::size_t k = 0; k < spec.iterations; ++k) {
    report.iterations.push_back(run_iteration(spec, k, exec));
    if (out_dir) {
      write_iteration(report.iterations.back(), spec, *out_dir / iteration_dir_name(k));
      write_text(*out_dir / "manifest.json", manifest_json(spec, report.iterations).dump(2));
    }
  }
  report.summary = summarize(spec, report.iterations);

  if (out_dir) {
    std::vector<PlotSeries> series;
    json summary = json::array();
    for (const auto& s : report.summary) {
      const std::string tag = to_string(s.arm);
      io::save_roc(s.mean, *out_dir / ("mean_roc_" + tag + ".csv"));
      series.push_back({tag, s.mean});
      summary.push_back({{"arm", tag}, {"aucs", s.aucs}, {"mean_auc", s.mean_auc}, {"mean_curve_auc", s.mean.auc}});
    }
    emit_plot(series, *out_dir / "roc.svg");
    json iters = json::array();
    for (const auto& it : report.iterations) {
      json arms = json::object();
      for (const auto& o : it.arms) arms[to_string(o.arm)] = o.roc.auc;
      iters.push_back({{"index", it.index},
                       {"simulation_seed", it.simulation_seed},
                       {"zeta", it.zeta},
                       {"calibrated_penetrance", it.calibrated_penetrance},
                       {"population_case_rate", it.population_case_rate},
                       {"auc", arms}});
    }
    write_text(*out_dir / "report.json",
               json{{"spec", spec_json(spec)}, {"iterations", iters}, {"summary", summary}}.dump(2));
  }
  return report;
}

}  // namespace rfdm
