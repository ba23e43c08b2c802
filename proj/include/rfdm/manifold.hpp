#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rfdm/distance_matrix.hpp"
#include "rfdm/execution.hpp"
#include "rfdm/forest.hpp"
#include "rfdm/metric.hpp"

namespace rfdm {

enum class LaplacianKind {
  symmetric_normalized,  // I - D^-1/2 W D^-1/2, coordinates back-transformed by D^-1/2
  unnormalized,          // D - W
};

struct EigenmapOptions {
  std::size_t dims = 2;
  LaplacianKind kind = LaplacianKind::symmetric_normalized;
  /// Keep only the k strongest similarities per row (union-symmetrized).
  /// 0 keeps the dense matrix.
  std::size_t knn = 0;
};

struct Embedding {
  Eigen::MatrixXd coordinates;       // N x m, unit-norm columns
  Eigen::VectorXd eigenvalues;       // m, ascending, trivial one excluded
  Eigen::MatrixXd spectral_vectors;  // Laplacian eigenvectors before back-transform
};

/// Laplacian eigenmap of a symmetric nonnegative similarity matrix.
/// Throws SpectrumError for zero-degree rows, a disconnected similarity
/// graph, or a spectrum with no gap after the m-th eigenvalue.
Embedding laplacian_eigenmap(const Eigen::MatrixXd& similarity, const EigenmapOptions& options = {});

DistanceMatrix embedding_distances(const Embedding& e, Execution exec = Execution::parallel);

struct TrteParams {
  std::size_t n_trees = 200;
  std::size_t max_depth = 5;
  std::size_t dims = 2;
  std::uint64_t seed = 0;
};

/// Fraction of totally random trees in which subjects i and j share a leaf.
Eigen::MatrixXd trte_proximity(const Eigen::MatrixXd& vectors, const TrteParams& params,
                               Execution exec = Execution::parallel);

/// Leaf index of every subject in one totally random tree grown from `rng`.
std::vector<std::uint32_t> trte_leaves(const Eigen::MatrixXd& vectors, std::size_t max_depth,
                                       Rng rng);

Embedding trte_embed(const Eigen::MatrixXd& vectors, const TrteParams& params,
                     Execution exec = Execution::parallel);

/// sum_a w_a W^(a).
Eigen::MatrixXd fuse_proximities(std::span<const Eigen::MatrixXd> matrices, const FusionWeights& w);

struct SupervisedDistance {
  DistanceMatrix distances;
  Embedding embedding;
  ProximityMatrix proximity;
};

/// Classification forest of `labels` on the columns of `vectors`, OOB
/// proximity, Laplacian eigenmap, Euclidean distances in the embedding.
SupervisedDistance supervised_distance(std::span<const int> labels, const Eigen::MatrixXd& vectors,
                                       ForestParams params, std::size_t dims = 2,
                                       Execution exec = Execution::parallel);

}  // namespace rfdm
