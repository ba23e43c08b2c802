#include "rfdm/distance_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rfdm/error.hpp"
#include "rfdm/random.hpp"

namespace rfdm {

namespace {

std::string at(std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

void check_triangle(const Eigen::MatrixXd& d, std::size_t i, std::size_t j, std::size_t k) {
  const double lhs = d(i, j) + d(j, k);
  const double rhs = d(i, k);
  if (lhs < rhs - kTriangleTolerance * std::max(1.0, rhs)) {
    std::ostringstream os;
    os << "at " << at(i, k) << " via " << j << ": " << d(i, j) << " + " << d(j, k) << " < " << rhs;
    throw DistanceMatrixError(DistanceFault::triangle_violation, i, j, k, os.str());
  }
}

}  // namespace

DistanceMatrix validate_distance_matrix(Eigen::MatrixXd d) {
  if (d.rows() != d.cols()) {
    throw DistanceMatrixError(DistanceFault::not_square, 0, 0, 0, "distance matrix is not square");
  }
  const auto n = static_cast<std::size_t>(d.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d(i, j);
      if (!std::isfinite(v)) {
        throw DistanceMatrixError(DistanceFault::non_finite, i, j, 0, "non-finite entry at " + at(i, j));
      }
      if (v < 0.0) {
        throw DistanceMatrixError(DistanceFault::negative_distance, i, j, 0,
                                  "negative entry at " + at(i, j));
      }
    }
    if (d(i, i) != 0.0) {
      throw DistanceMatrixError(DistanceFault::nonzero_diagonal, i, i, 0,
                                "nonzero diagonal at " + at(i, i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(d(i, j) - d(j, i)) > kAsymmetryTolerance) {
        throw DistanceMatrixError(DistanceFault::asymmetry_above_tolerance, i, j, 0,
                                  "asymmetric entries at " + at(i, j));
      }
      const double m = 0.5 * (d(i, j) + d(j, i));
      d(i, j) = m;
      d(j, i) = m;
    }
  }
  if (n <= kExhaustiveTriangleLimit) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = i + 1; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i && j != k) check_triangle(d, i, j, k);
        }
      }
    }
  } else {
    Rng rng(0x7269616e676c65ull);
    for (std::size_t t = 0; t < 10 * n * n; ++t) {
      check_triangle(d, rng.below(n), rng.below(n), rng.below(n));
    }
  }
  return DistanceMatrix(std::move(d));
}

}  // namespace rfdm
