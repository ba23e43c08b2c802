#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace rfdm {

/// Tolerances used by validate_distance_matrix.
inline constexpr double kAsymmetryTolerance = 1e-12;
inline constexpr double kTriangleTolerance = 1e-9;
/// Exhaustive triangle check up to this many subjects, sampled above.
inline constexpr std::size_t kExhaustiveTriangleLimit = 200;

/// Validated N x N pairwise distance matrix. Only obtainable through
/// validate_distance_matrix (or the metric builders that call it).
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  /// Element-wise square, the quantity the split objective sums.
  Eigen::MatrixXd squared() const { return values_.cwiseProduct(values_); }

  friend DistanceMatrix validate_distance_matrix(Eigen::MatrixXd values);

 private:
  explicit DistanceMatrix(Eigen::MatrixXd v) : values_(std::move(v)) {}
  Eigen::MatrixXd values_;
};

/// Checks D_ii = 0, D_ij >= 0, |D_ij - D_ji| <= 1e-12 (then symmetrizes),
/// and the triangle inequality D_ij + D_jk >= D_ik - 1e-9 * max(1, D_ik).
/// Triples are enumerated for N <= 200; above that 10 N^2 triples are
/// sampled with a fixed-seed stream. Throws DistanceMatrixError.
DistanceMatrix validate_distance_matrix(Eigen::MatrixXd values);

}  // namespace rfdm
