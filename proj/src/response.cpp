#include "rfdm/response.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "rfdm/error.hpp"

namespace rfdm {

std::size_t Graph::edge_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.weight != 0.0; }));
}

std::size_t response_count(const ResponseSet& r) {
  struct {
    std::size_t operator()(const VectorResponses& v) const { return static_cast<std::size_t>(v.values.rows()); }
    std::size_t operator()(const LabelResponses& v) const { return v.labels.size(); }
    std::size_t operator()(const SpdResponses& v) const { return v.matrices.size(); }
    std::size_t operator()(const GraphResponses& v) const { return v.graphs.size(); }
  } count;
  return std::visit(count, r);
}

bool is_spd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.rows() != m.cols() || !m.allFinite()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev(0) > 1e-10 * ev(ev.size() - 1) && ev(0) > 0.0;
}

void validate_responses(const ResponseSet& r) {
  if (const auto* v = std::get_if<VectorResponses>(&r)) {
    if (v->values.rows() == 0 || v->values.cols() == 0) throw DataError("empty response vectors");
    if (!v->values.allFinite()) throw DataError("non-finite response vector entry");
  } else if (const auto* l = std::get_if<LabelResponses>(&r)) {
    for (std::size_t i = 0; i < l->labels.size(); ++i) {
      if (l->labels[i] < 0) throw DataError("negative label at subject " + std::to_string(i));
    }
  } else if (const auto* s = std::get_if<SpdResponses>(&r)) {
    if (s->matrices.empty()) throw DataError("no SPD responses");
    const auto n = s->matrices.front().rows();
    for (std::size_t i = 0; i < s->matrices.size(); ++i) {
      if (s->matrices[i].rows() != n || s->matrices[i].cols() != n) {
        throw DataError("SPD response " + std::to_string(i) + " has a different dimension");
      }
      if (!is_spd(s->matrices[i])) throw DataError("response " + std::to_string(i) + " is not SPD");
    }
  } else if (const auto* g = std::get_if<GraphResponses>(&r)) {
    if (g->graphs.empty()) throw DataError("no graph responses");
    const std::size_t nv = g->graphs.front().n_vertices;
    for (std::size_t i = 0; i < g->graphs.size(); ++i) {
      const Graph& gr = g->graphs[i];
      if (gr.n_vertices != nv) throw DataError("graph " + std::to_string(i) + " has a different vertex set");
      for (const Edge& e : gr.edges) {
        if (e.u >= nv || e.v >= nv) throw DataError("graph " + std::to_string(i) + " edge vertex out of range");
        if (e.u == e.v) throw DataError("graph " + std::to_string(i) + " has a self-loop");
      }
    }
  }
}

}  // namespace rfdm
