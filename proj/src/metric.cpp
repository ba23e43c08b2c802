#include "rfdm/metric.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rfdm/error.hpp"

namespace rfdm {

FusionWeights::FusionWeights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw DataError("fusion weights are empty");
  double sum = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("fusion weights must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DataError("fusion weights must sum to 1");
}

FusionWeights FusionWeights::uniform(std::size_t n) {
  if (n == 0) throw DataError("fusion weights are empty");
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Put the rounding remainder on the last weight so the sum is exactly 1.
  double head = 0.0;
  for (std::size_t a = 0; a + 1 < n; ++a) head += w[a];
  w.back() = 1.0 - head;
  return FusionWeights(std::move(w));
}

DistanceMatrix euclidean_distances(const Eigen::MatrixXd& y, Execution exec) {
  if (!y.allFinite()) throw DataError("euclidean_distances: non-finite input");
  const Eigen::Index n = y.rows();
  const Eigen::Index q = y.cols();
  // Row-major copy so each pair reads two contiguous rows.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = y;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Execution::parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* yi = rows.data() + i * q;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double* yj = rows.data() + j * q;
      double s = 0.0;
      for (Eigen::Index k = 0; k < q; ++k) {
        const double diff = yi[k] - yj[k];
        s += diff * diff;
      }
      d(i, j) = std::sqrt(s);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  }
  return validate_distance_matrix(std::move(d));
}

DistanceMatrix discrete_distances(std::span<const int> labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] < 0) throw DataError("negative label");
    for (Eigen::Index j = 0; j < n; ++j) {
      d(i, j) = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)] ? 0.0 : 1.0;
    }
  }
  return validate_distance_matrix(std::move(d));
}

DistanceMatrix graph_distances(std::span<const Graph> graphs) {
  if (graphs.empty()) throw DataError("graph_distances: no graphs");
  const std::size_t nv = graphs.front().n_vertices;
  std::vector<double> e(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (graphs[i].n_vertices != nv) {
      throw DataError("graph " + std::to_string(i) + " vertex set differs from graph 0");
    }
    e[i] = static_cast<double>(graphs[i].edge_count());
  }
  const auto n = static_cast<Eigen::Index>(graphs.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      d(i, j) = std::abs(e[static_cast<std::size_t>(i)] - e[static_cast<std::size_t>(j)]);
    }
  }
  return validate_distance_matrix(std::move(d));
}

namespace {

Eigen::MatrixXd inverse_cholesky(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw DataError("matrix is not positive definite");
  const Eigen::Index n = a.rows();
  return llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::VectorXd whitened_eigenvalues(const Eigen::MatrixXd& linv, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd m = linv * b * linv.transpose();
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double log_distance(const Eigen::VectorXd& lambda, std::size_t& clipped) {
  double s = 0.0;
  for (Eigen::Index a = 0; a < lambda.size(); ++a) {
    double l = lambda(a);
    if (l < kSpdEigenvalueFloor) {
      l = kSpdEigenvalueFloor;
      ++clipped;
    }
    const double lg = std::log(l);
    s += lg * lg;
  }
  return std::sqrt(s);
}

void require_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DataError("SPD matrices must be square with a common dimension");
  }
}

}  // namespace

Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_pair(a, b);
  return whitened_eigenvalues(inverse_cholesky(a), b);
}

double spd_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    SpdDistanceDiagnostics* diag) {
  require_pair(a, b);
  if (!is_spd(a) || !is_spd(b)) throw DataError("spd_distance: input is not SPD");
  std::size_t clipped = 0;
  const double d = log_distance(generalized_eigenvalues(a, b), clipped);
  if (diag) diag->clipped_eigenvalues += clipped;
  return d;
}

DistanceMatrix spd_distances(std::span<const Eigen::MatrixXd> matrices, Execution exec,
                             SpdDistanceDiagnostics* diag) {
  const auto n = static_cast<Eigen::Index>(matrices.size());
  if (n == 0) throw DataError("spd_distances: no matrices");
  for (Eigen::Index i = 0; i < n; ++i) {
    require_pair(matrices[0], matrices[static_cast<std::size_t>(i)]);
    if (!is_spd(matrices[static_cast<std::size_t>(i)])) {
      throw DataError("spd_distances: matrix " + std::to_string(i) + " is not SPD");
    }
  }
  std::vector<Eigen::MatrixXd> linv(matrices.size());
  for (std::size_t i = 0; i < matrices.size(); ++i) linv[i] = inverse_cholesky(matrices[i]);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  std::size_t clipped = 0;
#pragma omp parallel for schedule(dynamic, 2) reduction(+ : clipped) if (exec == Execution::parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = log_distance(
          whitened_eigenvalues(linv[static_cast<std::size_t>(i)], matrices[static_cast<std::size_t>(j)]),
          clipped);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  }
  if (diag) diag->clipped_eigenvalues += clipped;
  return validate_distance_matrix(std::move(d));
}

DistanceMatrix fuse_distances(std::span<const DistanceMatrix> matrices, const FusionWeights& w) {
  if (matrices.empty()) throw DataError("fuse_distances: no matrices");
  if (matrices.size() != w.size()) throw DataError("fuse_distances: weight count mismatch");
  const std::size_t n = matrices.front().size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < matrices.size(); ++a) {
    if (matrices[a].size() != n) throw DataError("fuse_distances: subject count mismatch");
    d += w[a] * matrices[a].values();
  }
  return validate_distance_matrix(std::move(d));
}

DistanceMatrix compute_distances(const ResponseSet& responses, MetricSpec spec, Execution exec) {
  validate_responses(responses);
  switch (spec.kind) {
    case MetricKind::euclidean:
      if (const auto* v = std::get_if<VectorResponses>(&responses)) return euclidean_distances(v->values, exec);
      break;
    case MetricKind::discrete:
      if (const auto* l = std::get_if<LabelResponses>(&responses)) return discrete_distances(l->labels);
      break;
    case MetricKind::graph_edge:
      if (const auto* g = std::get_if<GraphResponses>(&responses)) return graph_distances(g->graphs);
      break;
    case MetricKind::spd_geodesic:
      if (const auto* s = std::get_if<SpdResponses>(&responses)) return spd_distances(s->matrices, exec);
      break;
  }
  throw DataError("metric does not match the response representation");
}

}  // namespace rfdm
