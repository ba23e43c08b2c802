// rfdm command-line interface.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rfdm/error.hpp"
#include "rfdm/execution.hpp"
#include "rfdm/experiment.hpp"
#include "rfdm/forest.hpp"
#include "rfdm/forest_io.hpp"
#include "rfdm/importance.hpp"
#include "rfdm/io.hpp"
#include "rfdm/manifold.hpp"
#include "rfdm/metric.hpp"
#include "rfdm/plot.hpp"
#include "rfdm/report_io.hpp"
#include "rfdm/roc.hpp"
#include "rfdm/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw rfdm::DataError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> generated_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "s" + std::to_string(i + 1);
  return ids;
}

rfdm::LaplacianKind parse_laplacian(const std::string& s) {
  if (s == "symmetric") return rfdm::LaplacianKind::symmetric_normalized;
  if (s == "unnormalized") return rfdm::LaplacianKind::unnormalized;
  throw rfdm::DataError("unknown laplacian '" + s + "'");
}

// ------------------------------------------------------------- commands

struct DistanceArgs {
  std::string metric = "euclidean";
  fs::path in, out;
};

void run_distance(const DistanceArgs& a) {
  rfdm::DistanceMatrix d;
  if (a.metric == "euclidean") {
    d = rfdm::euclidean_distances(rfdm::io::load_table(a.in).values);
  } else if (a.metric == "discrete") {
    d = rfdm::discrete_distances(rfdm::io::load_labels(a.in));
  } else if (a.metric == "graph") {
    d = rfdm::graph_distances(rfdm::io::load_graph_bundle(a.in));
  } else if (a.metric == "spd") {
    rfdm::SpdDistanceDiagnostics diag;
    d = rfdm::spd_distances(rfdm::io::load_matrix_bundle(a.in), rfdm::Execution::parallel, &diag);
    if (diag.clipped_eigenvalues) {
      std::cerr << "warning: " << diag.clipped_eigenvalues << " generalized eigenvalues clipped at "
                << rfdm::kSpdEigenvalueFloor << '\n';
    }
  } else {
    throw rfdm::DataError("unknown metric '" + a.metric + "'");
  }
  rfdm::io::save_distances(d, a.out);
}

struct CombineArgs {
  std::vector<double> weights;
  std::vector<fs::path> in;
  fs::path out;
};

void run_combine(const CombineArgs& a) {
  std::vector<rfdm::DistanceMatrix> ds;
  for (const auto& p : a.in) ds.push_back(rfdm::io::load_distances(p));
  const rfdm::FusionWeights w =
      a.weights.empty() ? rfdm::FusionWeights::uniform(ds.size()) : rfdm::FusionWeights(a.weights);
  if (w.size() != ds.size()) throw rfdm::DataError("number of weights does not match number of inputs");
  rfdm::io::save_distances(rfdm::fuse_distances(ds, w), a.out);
}

struct TrainArgs {
  fs::path genotypes, distances, labels, out;
  std::size_t trees = 500;
  std::string mtry = "auto";
  std::size_t max_depth = 7;
  std::size_t min_node_size = 5;
  std::uint64_t seed = 0;
  std::string task = "auto";
  std::string gain = "per_node_normalized";
};

void run_train(const TrainArgs& a) {
  rfdm::GenotypeMatrix g = rfdm::io::load_genotypes(a.genotypes);
  rfdm::ForestParams p;
  p.n_trees = a.trees;
  p.max_depth = a.max_depth;
  p.min_node_size = a.min_node_size;
  p.seed = a.seed;
  if (a.gain == "per_node_normalized") {
    p.gain_variant = rfdm::GainVariant::per_node_normalized;
  } else if (a.gain == "literal") {
    p.gain_variant = rfdm::GainVariant::literal;
  } else {
    throw rfdm::DataError("unknown gain variant '" + a.gain + "'");
  }

  rfdm::DistanceMatrix d;
  bool labelled = false;
  if (!a.distances.empty() == !a.labels.empty()) {
    throw rfdm::DataError("give exactly one of --distances and --labels");
  }
  if (!a.distances.empty()) {
    d = rfdm::io::load_distances(a.distances);
  } else {
    d = rfdm::discrete_distances(rfdm::io::load_labels(a.labels));
    labelled = true;
  }
  if (a.task == "auto") {
    p.task = labelled ? rfdm::TaskKind::classification : rfdm::TaskKind::regression;
  } else if (a.task == "regression") {
    p.task = rfdm::TaskKind::regression;
  } else if (a.task == "classification") {
    p.task = rfdm::TaskKind::classification;
  } else {
    throw rfdm::DataError("unknown task '" + a.task + "'");
  }
  if (a.mtry != "auto") {
    try {
      p.mtry = std::stoul(a.mtry);
    } catch (const std::exception&) {
      throw rfdm::DataError("--mtry must be 'auto' or a positive integer");
    }
    if (p.mtry == 0) throw rfdm::DataError("--mtry must be positive");
  }
  const rfdm::Forest f = rfdm::grow_forest(rfdm::make_dataset(std::move(g), std::move(d)), p);
  rfdm::io::save_forest(f, a.out);
}

void run_proximity(const fs::path& forest, const fs::path& out) {
  const rfdm::ProximityMatrix w = rfdm::proximity(rfdm::io::load_forest(forest));
  if (w.never_joint_oob_pairs) {
    std::cerr << "warning: " << w.never_joint_oob_pairs << " subject pairs never jointly out-of-bag (set to 0)\n";
  }
  rfdm::io::save_matrix(w.values, out);
}

void run_rank_snps(const fs::path& forest, const fs::path& out) {
  const rfdm::Forest f = rfdm::io::load_forest(forest);
  const rfdm::ImportanceReport r = rfdm::gini_importance(f);
  rfdm::io::save_snp_ranking(rfdm::rank(r), r.candidacy, f.feature_names, out);
}

void run_rank_pairs(const fs::path& forest, const std::string& variant, const fs::path& out) {
  const rfdm::Forest f = rfdm::io::load_forest(forest);
  rfdm::InteractionVariant v;
  if (variant == "squared") {
    v = rfdm::InteractionVariant::squared;
  } else if (variant == "absolute") {
    v = rfdm::InteractionVariant::absolute;
  } else {
    throw rfdm::DataError("unknown interaction variant '" + variant + "'");
  }
  const rfdm::PairInteractionReport r = rfdm::pairwise_interaction(f, v);
  rfdm::io::save_pair_ranking(rfdm::rank(r), rfdm::gini_importance(f).candidacy, f.feature_names, out);
}

struct EmbedArgs {
  fs::path similarity, out;
  std::size_t dims = 2;
  std::size_t knn = 0;
  std::string laplacian = "symmetric";
};

void run_embed(const EmbedArgs& a) {
  const Eigen::MatrixXd w = rfdm::io::load_matrix(a.similarity);
  rfdm::EigenmapOptions opt;
  opt.dims = a.dims;
  opt.knn = a.knn;
  opt.kind = parse_laplacian(a.laplacian);
  const rfdm::Embedding e = rfdm::laplacian_eigenmap(w, opt);
  rfdm::io::save_embedding(e, generated_ids(static_cast<std::size_t>(w.rows())), a.out);
}

struct TrteArgs {
  fs::path vectors, out;
  rfdm::TrteParams params;
};

void run_trte(const TrteArgs& a) {
  const rfdm::io::Table t = rfdm::io::load_table(a.vectors);
  rfdm::io::save_embedding(rfdm::trte_embed(t.values, a.params), t.subject_ids, a.out);
}

struct SupervisedArgs {
  fs::path labels, vectors, out, embedding_out;
  std::size_t trees = 500;
  std::size_t max_depth = 7;
  std::size_t min_node_size = 1;
  std::size_t dims = 2;
  std::uint64_t seed = 0;
};

void run_supervised(const SupervisedArgs& a) {
  std::vector<std::string> label_ids;
  const std::vector<int> labels = rfdm::io::load_labels(a.labels, &label_ids);
  const rfdm::io::Table t = rfdm::io::load_table(a.vectors);
  if (label_ids != t.subject_ids) throw rfdm::DataError("labels and vectors list different subjects");
  rfdm::ForestParams p;
  p.n_trees = a.trees;
  p.max_depth = a.max_depth;
  p.min_node_size = a.min_node_size;
  p.seed = a.seed;
  p.task = rfdm::TaskKind::classification;
  const rfdm::SupervisedDistance sd = rfdm::supervised_distance(labels, t.values, p, a.dims);
  rfdm::io::save_distances(sd.distances, a.out);
  if (!a.embedding_out.empty()) rfdm::io::save_embedding(sd.embedding, t.subject_ids, a.embedding_out);
}

void run_simulate(const fs::path& config, const fs::path& out_dir) {
  const rfdm::sim::SimulationConfig c = rfdm::parse_simulation_config(read_file(config));
  rfdm::write_study(rfdm::sim::simulate_study(c), c, out_dir);
}

void run_experiment(const fs::path& spec_path, const fs::path& out_dir, std::optional<std::size_t> iteration) {
  // A run manifest carries its spec under "spec" and can be replayed directly.
  std::string text = read_file(spec_path);
  try {
    const json j = json::parse(text);
    if (j.is_object() && j.contains("spec") && !j.contains("experiment")) text = j["spec"].dump();
  } catch (const json::parse_error&) {
    // parse_spec reports it
  }
  const rfdm::ExperimentSpec spec = rfdm::parse_spec(text);
  if (iteration) {
    if (*iteration >= spec.iterations) throw rfdm::DataError("--iteration is beyond the spec's iteration count");
    const rfdm::IterationResult r = rfdm::run_iteration(spec, *iteration);
    rfdm::write_iteration(r, spec, out_dir / ("iteration_" + std::to_string(*iteration)));
    for (const auto& o : r.arms) std::cout << rfdm::to_string(o.arm) << "\tauc=" << o.roc.auc << '\n';
    return;
  }
  const rfdm::ExperimentReport rep = rfdm::run_experiment(spec, out_dir);
  for (const auto& s : rep.summary) {
    std::cout << rfdm::to_string(s.arm) << "\tmean_auc=" << s.mean_auc << "\taucs=";
    for (std::size_t k = 0; k < s.aucs.size(); ++k) std::cout << (k ? "," : "") << s.aucs[k];
    std::cout << '\n';
  }
}

void run_roc(const fs::path& ranking, const fs::path& truth_path, const fs::path& out) {
  const rfdm::io::RankingTable t = rfdm::io::load_ranking(ranking);
  json truth;
  try {
    truth = json::parse(read_file(truth_path));
  } catch (const json::parse_error& e) {
    throw rfdm::DataError(truth_path.string() + ": " + e.what());
  }
  std::vector<bool> positive(t.score.size(), false);
  try {
    if (t.pairs) {
      std::set<std::pair<std::string, std::string>> pairs;
      for (const auto& p : truth.at("causal_pairs")) {
        auto a = p.at(0).get<std::string>();
        auto b = p.at(1).get<std::string>();
        pairs.emplace(std::min(a, b), std::max(a, b));
      }
      std::size_t found = 0;
      for (std::size_t k = 0; k < t.score.size(); ++k) {
        positive[k] = pairs.count({std::min(t.id_a[k], t.id_b[k]), std::max(t.id_a[k], t.id_b[k])}) > 0;
        found += positive[k];
      }
      if (found != pairs.size()) throw rfdm::DataError("truth pairs missing from the ranking");
    } else {
      std::set<std::string> snps;
      for (const auto& s : truth.at("causal_snps")) snps.insert(s.get<std::string>());
      std::size_t found = 0;
      for (std::size_t k = 0; k < t.score.size(); ++k) {
        positive[k] = snps.count(t.id_a[k]) > 0;
        found += positive[k];
      }
      if (found != snps.size()) throw rfdm::DataError("truth SNPs missing from the ranking");
    }
  } catch (const json::exception& e) {
    throw rfdm::DataError(truth_path.string() + ": " + e.what());
  }
  const std::unique_ptr<bool[]> flags(new bool[positive.size()]);
  std::copy(positive.begin(), positive.end(), flags.get());
  const rfdm::RocCurve c = rfdm::roc(t.score, std::span<const bool>(flags.get(), positive.size()));
  rfdm::io::save_roc(c, out);
  std::cout << "auc=" << c.auc << '\n';
}

void run_plot(const std::vector<fs::path>& in, std::vector<std::string> labels, const fs::path& out) {
  if (labels.empty()) {
    for (const auto& p : in) labels.push_back(p.stem().string());
  }
  if (labels.size() != in.size()) throw rfdm::DataError("number of labels does not match number of curves");
  std::vector<rfdm::PlotSeries> series;
  for (std::size_t k = 0; k < in.size(); ++k) series.push_back({labels[k], rfdm::io::load_roc(in[k])});
  rfdm::emit_plot(series, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random forests on distance matrices"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");

  DistanceArgs dist;
  auto* c_dist = app.add_subcommand("distance", "Pairwise response distances");
  c_dist->add_option("--metric", dist.metric, "euclidean | discrete | graph | spd")
      ->check(CLI::IsMember({"euclidean", "discrete", "graph", "spd"}));
  c_dist->add_option("--in", dist.in, "vectors CSV, labels CSV, graph bundle or matrix bundle")->required();
  c_dist->add_option("--out", dist.out)->required();

  CombineArgs comb;
  auto* c_comb = app.add_subcommand("combine", "Weighted average of distance matrices");
  c_comb->add_option("--weights", comb.weights, "defaults to uniform")->delimiter(',');
  c_comb->add_option("--in", comb.in)->required();
  c_comb->add_option("--out", comb.out)->required();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Grow a forest on a distance matrix");
  c_train->add_option("--genotypes", train.genotypes)->required();
  c_train->add_option("--distances", train.distances);
  c_train->add_option("--labels", train.labels, "case-control labels, discrete metric");
  c_train->add_option("--trees", train.trees);
  c_train->add_option("--mtry", train.mtry, "'auto' or an integer");
  c_train->add_option("--max-depth", train.max_depth);
  c_train->add_option("--min-node-size", train.min_node_size);
  c_train->add_option("--seed", train.seed);
  c_train->add_option("--task", train.task, "auto | regression | classification (sets the default mtry)");
  c_train->add_option("--gain", train.gain, "per_node_normalized | literal");
  c_train->add_option("--out", train.out)->required();

  fs::path prox_forest, prox_out;
  auto* c_prox = app.add_subcommand("proximity", "Out-of-bag proximity matrix");
  c_prox->add_option("--forest", prox_forest)->required();
  c_prox->add_option("--out", prox_out)->required();

  fs::path rs_forest, rs_out;
  auto* c_rs = app.add_subcommand("rank-snps", "Gini importance ranking");
  c_rs->add_option("--forest", rs_forest)->required();
  c_rs->add_option("--out", rs_out)->required();

  fs::path rp_forest, rp_out;
  std::string rp_variant = "squared";
  auto* c_rp = app.add_subcommand("rank-pairs", "Gini pairwise interaction ranking");
  c_rp->add_option("--forest", rp_forest)->required();
  c_rp->add_option("--variant", rp_variant, "squared | absolute");
  c_rp->add_option("--out", rp_out)->required();

  EmbedArgs embed;
  auto* c_embed = app.add_subcommand("embed", "Laplacian eigenmap of a similarity matrix");
  c_embed->add_option("--similarity", embed.similarity)->required();
  c_embed->add_option("--dims", embed.dims);
  c_embed->add_option("--knn", embed.knn, "keep k strongest similarities per row (0 = dense)");
  c_embed->add_option("--laplacian", embed.laplacian, "symmetric | unnormalized");
  c_embed->add_option("--out", embed.out)->required();

  TrteArgs trte;
  auto* c_trte = app.add_subcommand("trte", "Totally random trees embedding");
  c_trte->add_option("--vectors", trte.vectors)->required();
  c_trte->add_option("--trees", trte.params.n_trees);
  c_trte->add_option("--max-depth", trte.params.max_depth);
  c_trte->add_option("--dims", trte.params.dims);
  c_trte->add_option("--seed", trte.params.seed);
  c_trte->add_option("--out", trte.out)->required();

  SupervisedArgs sup;
  auto* c_sup = app.add_subcommand("supervised-distance", "Manifold distance from a labels-on-vectors forest");
  c_sup->add_option("--labels", sup.labels)->required();
  c_sup->add_option("--vectors", sup.vectors)->required();
  c_sup->add_option("--trees", sup.trees);
  c_sup->add_option("--max-depth", sup.max_depth);
  c_sup->add_option("--min-node-size", sup.min_node_size);
  c_sup->add_option("--dims", sup.dims);
  c_sup->add_option("--seed", sup.seed);
  c_sup->add_option("--embedding-out", sup.embedding_out);
  c_sup->add_option("--out", sup.out)->required();

  fs::path sim_config, sim_out;
  auto* c_sim = app.add_subcommand("simulate", "Simulate one imaging-genetics study");
  c_sim->add_option("--config", sim_config)->required();
  c_sim->add_option("--out-dir", sim_out)->required();

  fs::path exp_spec, exp_out;
  std::optional<std::size_t> exp_iteration;
  auto* c_exp = app.add_subcommand("experiment", "Run an experiment or replay one iteration");
  c_exp->add_option("--spec", exp_spec, "spec JSON or a run's manifest.json")->required();
  c_exp->add_option("--out-dir", exp_out)->required();
  c_exp->add_option("--iteration", exp_iteration, "replay a single iteration");

  fs::path roc_ranking, roc_truth, roc_out;
  auto* c_roc = app.add_subcommand("roc", "ROC curve of a ranking against ground truth");
  c_roc->add_option("--ranking", roc_ranking)->required();
  c_roc->add_option("--truth", roc_truth)->required();
  c_roc->add_option("--out", roc_out)->required();

  std::vector<fs::path> plot_in;
  std::vector<std::string> plot_labels;
  fs::path plot_out;
  auto* c_plot = app.add_subcommand("plot", "SVG of ROC curves");
  c_plot->add_option("--in", plot_in)->required();
  c_plot->add_option("--labels", plot_labels)->delimiter(',');
  c_plot->add_option("--out", plot_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (threads) rfdm::set_threads(threads);
    if (*c_dist) run_distance(dist);
    if (*c_comb) run_combine(comb);
    if (*c_train) run_train(train);
    if (*c_prox) run_proximity(prox_forest, prox_out);
    if (*c_rs) run_rank_snps(rs_forest, rs_out);
    if (*c_rp) run_rank_pairs(rp_forest, rp_variant, rp_out);
    if (*c_embed) run_embed(embed);
    if (*c_trte) run_trte(trte);
    if (*c_sup) run_supervised(sup);
    if (*c_sim) run_simulate(sim_config, sim_out);
    if (*c_exp) run_experiment(exp_spec, exp_out, exp_iteration);
    if (*c_roc) run_roc(roc_ranking, roc_truth, roc_out);
    if (*c_plot) run_plot(plot_in, plot_labels, plot_out);
  } catch (const rfdm::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const rfdm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
