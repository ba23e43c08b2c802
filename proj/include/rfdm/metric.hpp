#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rfdm/distance_matrix.hpp"
#include "rfdm/execution.hpp"
#include "rfdm/response.hpp"

namespace rfdm {

enum class MetricKind { euclidean, discrete, graph_edge, spd_geodesic };

struct MetricSpec {
  MetricKind kind = MetricKind::euclidean;
};

/// Nonnegative weights summing to one (to 1e-12).
class FusionWeights {
 public:
  explicit FusionWeights(std::vector<double> w);
  static FusionWeights uniform(std::size_t n);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t a) const noexcept { return w_[a]; }

 private:
  std::vector<double> w_;
};

/// D_ij = |y_i - y_j|_2 over the rows of `vectors`.
DistanceMatrix euclidean_distances(const Eigen::MatrixXd& vectors,
                                   Execution exec = Execution::parallel);

/// D_ij = 0 if labels agree, 1 otherwise.
DistanceMatrix discrete_distances(std::span<const int> labels);

/// D_ij = |E_i - E_j| with E the number of nonzero-weight edges.
DistanceMatrix graph_distances(std::span<const Graph> graphs);

/// Eigenvalue floor applied before the log in the SPD metric.
inline constexpr double kSpdEigenvalueFloor = 1e-12;

struct SpdDistanceDiagnostics {
  std::size_t clipped_eigenvalues = 0;
};

/// Generalized eigenvalues of (A, B), i.e. roots of det(lambda A - B),
/// ascending. Computed by whitening: A = L L^T, eig(L^-1 B L^-T).
Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// sqrt(sum_a log^2 lambda_a(A, B)).
double spd_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    SpdDistanceDiagnostics* diag = nullptr);

/// Pairwise SPD geodesic distances. Throws DataError on non-SPD input.
DistanceMatrix spd_distances(std::span<const Eigen::MatrixXd> matrices,
                             Execution exec = Execution::parallel,
                             SpdDistanceDiagnostics* diag = nullptr);

/// sum_a w_a D^(a).
DistanceMatrix fuse_distances(std::span<const DistanceMatrix> matrices, const FusionWeights& w);

/// Dispatches on the response variant; throws DataError when `spec` does
/// not match it.
DistanceMatrix compute_distances(const ResponseSet& responses, MetricSpec spec,
                                 Execution exec = Execution::parallel);

}  // namespace rfdm
