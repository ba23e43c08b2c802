#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace rfdm {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 1.0;
};

/// Undirected vertex-labelled graph on vertices 0..n_vertices-1.
struct Graph {
  std::size_t n_vertices = 0;
  std::vector<Edge> edges;

  /// Edges with nonzero weight.
  std::size_t edge_count() const noexcept;
};

/// Rows are subjects.
struct VectorResponses {
  Eigen::MatrixXd values;
};

struct LabelResponses {
  std::vector<int> labels;
};

struct SpdResponses {
  std::vector<Eigen::MatrixXd> matrices;
};

struct GraphResponses {
  std::vector<Graph> graphs;
};

/// Exactly one response representation per dataset.
using ResponseSet = std::variant<VectorResponses, LabelResponses, SpdResponses, GraphResponses>;

std::size_t response_count(const ResponseSet& r);

/// Throws DataError: non-finite vectors, negative labels, non-SPD or
/// mismatched matrices, graphs with self-loops or differing vertex sets.
void validate_responses(const ResponseSet& r);

/// SPD gate shared with the SPD metric: symmetric to 1e-10 (relative to the
/// largest entry) and smallest eigenvalue > 1e-10 * largest.
bool is_spd(const Eigen::MatrixXd& m);

}  // namespace rfdm
