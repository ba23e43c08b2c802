#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rfdm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. The CLI maps this to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a result. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

enum class DistanceFault {
  not_square,
  non_finite,
  negative_distance,
  nonzero_diagonal,
  asymmetry_above_tolerance,
  triangle_violation,
};

const char* to_string(DistanceFault fault);

/// Raised by validate_distance_matrix. Indices name the witnessing entries;
/// `k` is only meaningful for triangle violations (D_ij + D_jk < D_ik).
class DistanceMatrixError : public DataError {
 public:
  DistanceMatrixError(DistanceFault fault, std::size_t i, std::size_t j, std::size_t k,
                      const std::string& detail);

  DistanceFault fault() const noexcept { return fault_; }
  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }
  std::size_t k() const noexcept { return k_; }

 private:
  DistanceFault fault_;
  std::size_t i_, j_, k_;
};

enum class SpectrumFault {
  invalid_similarity,
  zero_degree,
  disconnected_graph,
  degenerate_spectrum,
};

class SpectrumError : public NumericalError {
 public:
  SpectrumError(SpectrumFault fault, const std::string& detail);
  SpectrumFault fault() const noexcept { return fault_; }

 private:
  SpectrumFault fault_;
};

/// Iterative solver stopped at max_iter without meeting its tolerance.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual, std::size_t iterations);
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

}  // namespace rfdm
