#include "rfdm/error.hpp"

#include <sstream>

namespace rfdm {

const char* to_string(DistanceFault fault) {
  switch (fault) {
    case DistanceFault::not_square: return "NotSquare";
    case DistanceFault::non_finite: return "NonFinite";
    case DistanceFault::negative_distance: return "NegativeDistance";
    case DistanceFault::nonzero_diagonal: return "NonzeroDiagonal";
    case DistanceFault::asymmetry_above_tolerance: return "AsymmetryAboveTolerance";
    case DistanceFault::triangle_violation: return "TriangleViolation";
  }
  return "Unknown";
}

DistanceMatrixError::DistanceMatrixError(DistanceFault fault, std::size_t i, std::size_t j,
                                         std::size_t k, const std::string& detail)
    : DataError(std::string(to_string(fault)) + ": " + detail), fault_(fault), i_(i), j_(j), k_(k) {}

namespace {
const char* spectrum_name(SpectrumFault f) {
  switch (f) {
    case SpectrumFault::invalid_similarity: return "InvalidSimilarity";
    case SpectrumFault::zero_degree: return "ZeroDegree";
    case SpectrumFault::disconnected_graph: return "DisconnectedGraph";
    case SpectrumFault::degenerate_spectrum: return "DegenerateSpectrum";
  }
  return "Unknown";
}
}  // namespace

SpectrumError::SpectrumError(SpectrumFault fault, const std::string& detail)
    : NumericalError(std::string(spectrum_name(fault)) + ": " + detail), fault_(fault) {}

namespace {
std::string convergence_message(const std::string& what, double residual, std::size_t iterations) {
  std::ostringstream os;
  os << what << " did not converge after " << iterations << " iterations (residual " << residual
     << ")";
  return os.str();
}
}  // namespace

ConvergenceError::ConvergenceError(const std::string& what, double residual,
                                   std::size_t iterations)
    : NumericalError(convergence_message(what, residual, iterations)),
      residual_(residual),
      iterations_(iterations) {}

}  // namespace rfdm
