#include "rfdm/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rfdm/error.hpp"

namespace rfdm {

namespace {

Eigen::MatrixXd knn_sparsify(const Eigen::MatrixXd& w, std::size_t k) {
  const Eigen::Index n = w.rows();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    idx.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) idx.push_back(j);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return w(i, a) > w(i, b); });
    for (std::size_t t = 0; t < k && t < idx.size(); ++t) {
      keep(i, idx[t]) = true;
      keep(idx[t], i) = true;
    }
    keep(i, i) = true;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (keep(i, j)) out(i, j) = w(i, j);
    }
  }
  return out;
}

void require_connected(const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int n_comp = 0;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<Eigen::Index> queue{s};
    comp[static_cast<std::size_t>(s)] = n_comp;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const Eigen::Index u = queue[h];
      for (Eigen::Index v = 0; v < n; ++v) {
        if (v != u && w(u, v) > 0.0 && comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = n_comp;
          queue.push_back(v);
        }
      }
    }
    ++n_comp;
  }
  if (n_comp == 1) return;
  std::ostringstream os;
  os << "similarity graph has " << n_comp << " components:";
  for (int c = 0; c < n_comp; ++c) {
    os << " {";
    std::size_t shown = 0, size = 0;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      if (comp[i] != c) continue;
      if (shown < 8) {
        os << (shown ? "," : "") << i;
        ++shown;
      }
      ++size;
    }
    if (size > shown) os << ",... (" << size << " subjects)";
    os << "}";
  }
  throw SpectrumError(SpectrumFault::disconnected_graph, os.str());
}

// Flip so the largest-magnitude entry (first on ties) is positive.
double sign_of_largest(const Eigen::VectorXd& v) {
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
  }
  return v(arg) < 0.0 ? -1.0 : 1.0;
}

}  // namespace

Embedding laplacian_eigenmap(const Eigen::MatrixXd& similarity, const EigenmapOptions& options) {
  const Eigen::Index n = similarity.rows();
  const auto m = static_cast<Eigen::Index>(options.dims);
  if (similarity.cols() != n) throw SpectrumError(SpectrumFault::invalid_similarity, "matrix is not square");
  if (m < 1) throw SpectrumError(SpectrumFault::invalid_similarity, "dims must be at least 1");
  if (n < m + 2) {
    throw SpectrumError(SpectrumFault::invalid_similarity,
                        "need at least dims + 2 subjects, got " + std::to_string(n));
  }
  if (!similarity.allFinite()) throw SpectrumError(SpectrumFault::invalid_similarity, "non-finite entry");
  if (similarity.minCoeff() < 0.0) throw SpectrumError(SpectrumFault::invalid_similarity, "negative entry");
  const double scale = std::max(1.0, similarity.maxCoeff());
  if ((similarity - similarity.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw SpectrumError(SpectrumFault::invalid_similarity, "matrix is not symmetric");
  }

  Eigen::MatrixXd w = 0.5 * (similarity + similarity.transpose());
  if (options.knn > 0 && options.knn + 1 < static_cast<std::size_t>(n)) w = knn_sparsify(w, options.knn);

  const Eigen::VectorXd degree = w.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(degree(i) > 0.0)) {
      throw SpectrumError(SpectrumFault::zero_degree, "row " + std::to_string(i) + " has zero degree");
    }
  }
  require_connected(w);

  Eigen::MatrixXd lap;
  Eigen::VectorXd inv_sqrt;
  if (options.kind == LaplacianKind::symmetric_normalized) {
    inv_sqrt = degree.cwiseSqrt().cwiseInverse();
    lap = -(inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal());
    lap.diagonal().array() += 1.0;
  } else {
    lap = -w;
    lap.diagonal() += degree;
  }
  lap = 0.5 * (lap + lap.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  if (es.info() != Eigen::Success) throw NumericalError("Laplacian eigen-decomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double gap = std::abs(ev(m + 1) - ev(m));
  if (gap <= 1e-9 * std::max(1.0, std::abs(ev(m)))) {
    std::ostringstream os;
    os << "eigenvalues " << m << " and " << m + 1 << " coincide (" << ev(m) << ", " << ev(m + 1) << ")";
    throw SpectrumError(SpectrumFault::degenerate_spectrum, os.str());
  }

  Embedding e;
  e.eigenvalues = ev.segment(1, m);
  e.spectral_vectors.resize(n, m);
  e.coordinates.resize(n, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    Eigen::VectorXd u = es.eigenvectors().col(c + 1);
    Eigen::VectorXd v = options.kind == LaplacianKind::symmetric_normalized
                            ? Eigen::VectorXd(inv_sqrt.cwiseProduct(u))
                            : u;
    v.normalize();
    const double sgn = sign_of_largest(v);
    e.coordinates.col(c) = sgn * v;
    e.spectral_vectors.col(c) = sgn * u;
  }
  return e;
}

DistanceMatrix embedding_distances(const Embedding& e, Execution exec) {
  return euclidean_distances(e.coordinates, exec);
}

std::vector<std::uint32_t> trte_leaves(const Eigen::MatrixXd& vectors, std::size_t max_depth, Rng rng) {
  const auto n = static_cast<std::size_t>(vectors.rows());
  const Eigen::Index q = vectors.cols();
  std::vector<std::uint32_t> leaf(n, 0);
  std::vector<std::size_t> members(n);
  std::iota(members.begin(), members.end(), std::size_t{0});
  std::uint32_t next_leaf = 0;

  struct Frame {
    std::size_t begin, end, depth;
  };
  std::vector<Frame> stack{{0, n, 0}};
  std::vector<Eigen::Index> usable;
  std::vector<double> lo(static_cast<std::size_t>(q)), hi(static_cast<std::size_t>(q));
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    bool is_leaf = fr.depth >= max_depth || fr.end - fr.begin <= 1;
    if (!is_leaf) {
      usable.clear();
      for (Eigen::Index c = 0; c < q; ++c) {
        double mn = vectors(static_cast<Eigen::Index>(members[fr.begin]), c), mx = mn;
        for (std::size_t k = fr.begin + 1; k < fr.end; ++k) {
          const double v = vectors(static_cast<Eigen::Index>(members[k]), c);
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
        lo[static_cast<std::size_t>(c)] = mn;
        hi[static_cast<std::size_t>(c)] = mx;
        if (mx > mn) usable.push_back(c);
      }
      is_leaf = usable.empty();
    }
    if (is_leaf) {
      for (std::size_t k = fr.begin; k < fr.end; ++k) leaf[members[k]] = next_leaf;
      ++next_leaf;
      continue;
    }
    const Eigen::Index c = usable[rng.below(usable.size())];
    const double mn = lo[static_cast<std::size_t>(c)];
    const double mx = hi[static_cast<std::size_t>(c)];
    double s = rng.uniform(mn, mx);
    if (!(s < mx)) s = mn;
    const auto mid = std::stable_partition(
        members.begin() + static_cast<std::ptrdiff_t>(fr.begin),
        members.begin() + static_cast<std::ptrdiff_t>(fr.end),
        [&](std::size_t i) { return vectors(static_cast<Eigen::Index>(i), c) <= s; });
    const auto split = static_cast<std::size_t>(mid - members.begin());
    // Right pushed first so the left subtree is numbered first.
    stack.push_back({split, fr.end, fr.depth + 1});
    stack.push_back({fr.begin, split, fr.depth + 1});
  }
  return leaf;
}

Eigen::MatrixXd trte_proximity(const Eigen::MatrixXd& vectors, const TrteParams& params, Execution exec) {
  if (vectors.cols() < 1 || vectors.rows() < 1) throw DataError("trte: empty input");
  if (!vectors.allFinite()) throw DataError("trte: non-finite input");
  if (params.n_trees == 0) throw DataError("trte: n_trees must be positive");
  const Eigen::Index n = vectors.rows();
  std::vector<std::vector<std::uint32_t>> leaves(params.n_trees);
  const auto n_trees = static_cast<std::ptrdiff_t>(params.n_trees);
  const Rng master(params.seed);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::parallel)
  for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
    leaves[static_cast<std::size_t>(t)] =
        trte_leaves(vectors, params.max_depth, master.substream(static_cast<std::uint64_t>(t)));
  }
  Eigen::MatrixXi same = Eigen::MatrixXi::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Execution::parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& lf : leaves) {
      const std::uint32_t li = lf[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < n; ++j) {
        if (lf[static_cast<std::size_t>(j)] == li) ++same(j, i);
      }
    }
  }
  return same.cast<double>() / static_cast<double>(params.n_trees);
}

Embedding trte_embed(const Eigen::MatrixXd& vectors, const TrteParams& params, Execution exec) {
  EigenmapOptions opt;
  opt.dims = params.dims;
  return laplacian_eigenmap(trte_proximity(vectors, params, exec), opt);
}

Eigen::MatrixXd fuse_proximities(std::span<const Eigen::MatrixXd> matrices, const FusionWeights& w) {
  if (matrices.empty()) throw DataError("fuse_proximities: no matrices");
  if (matrices.size() != w.size()) throw DataError("fuse_proximities: weight count mismatch");
  const Eigen::Index n = matrices.front().rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < matrices.size(); ++a) {
    if (matrices[a].rows() != n || matrices[a].cols() != n) {
      throw DataError("fuse_proximities: dimension mismatch");
    }
    out += w[a] * matrices[a];
  }
  return out;
}

SupervisedDistance supervised_distance(std::span<const int> labels, const Eigen::MatrixXd& vectors,
                                       ForestParams params, std::size_t dims, Execution exec) {
  if (labels.size() != static_cast<std::size_t>(vectors.rows())) {
    throw DataError("supervised_distance: labels and vectors are not aligned");
  }
  params.task = TaskKind::classification;
  const DistanceMatrix d = discrete_distances(labels);
  const FeatureMatrix x = FeatureMatrix::from_matrix(vectors);
  const Forest forest = grow_forest(x, d, params, exec);
  ProximityMatrix prox = proximity(forest, exec);
  EigenmapOptions opt;
  opt.dims = dims;
  Embedding emb = laplacian_eigenmap(prox.values, opt);
  DistanceMatrix dist = embedding_distances(emb, exec);
  return SupervisedDistance{std::move(dist), std::move(emb), std::move(prox)};
}

}  // namespace rfdm
