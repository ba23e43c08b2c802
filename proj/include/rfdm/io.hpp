#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfdm/distance_matrix.hpp"
#include "rfdm/genotype.hpp"
#include "rfdm/response.hpp"

namespace rfdm::io {

namespace fs = std::filesystem;

/// `subject_id,rs1,rs2,...` header then one row per subject.
GenotypeMatrix load_genotypes(const fs::path& path);
void save_genotypes(const GenotypeMatrix& g, const fs::path& path);

/// Headerless numeric grid. Values are written in shortest round-trip form,
/// so a save/load cycle is bit-exact.
Eigen::MatrixXd load_matrix(const fs::path& path);
void save_matrix(const Eigen::MatrixXd& m, const fs::path& path);

DistanceMatrix load_distances(const fs::path& path);
void save_distances(const DistanceMatrix& d, const fs::path& path);

/// Table with a header row whose first column is the subject id.
struct Table {
  std::vector<std::string> subject_ids;
  std::vector<std::string> columns;  // excludes the id column
  Eigen::MatrixXd values;
};
Table load_table(const fs::path& path);
void save_table(const Table& t, const fs::path& path);

/// labels.csv: `subject_id,label`.
std::vector<int> load_labels(const fs::path& path, std::vector<std::string>* subject_ids = nullptr);
void save_labels(const std::vector<int>& labels, const std::vector<std::string>& subject_ids,
                 const fs::path& path);

/// Bundle directory: manifest.txt (one subject id per line) and
/// `<subject_id>.csv` per subject.
void save_matrix_bundle(const std::vector<Eigen::MatrixXd>& matrices,
                        const std::vector<std::string>& subject_ids, const fs::path& dir);
std::vector<Eigen::MatrixXd> load_matrix_bundle(const fs::path& dir,
                                                std::vector<std::string>* subject_ids = nullptr);

/// Graph bundles hold `u,v[,weight]` edge lists. The manifest may start with
/// `#vertices <n>`; otherwise the vertex count is one past the largest index.
void save_graph_bundle(const std::vector<Graph>& graphs, const std::vector<std::string>& subject_ids,
                       const fs::path& dir);
std::vector<Graph> load_graph_bundle(const fs::path& dir,
                                     std::vector<std::string>* subject_ids = nullptr);

}  // namespace rfdm::io
