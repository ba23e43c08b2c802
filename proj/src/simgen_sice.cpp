#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "rfdm/error.hpp"
#include "rfdm/simgen.hpp"

namespace rfdm::sim {

namespace {

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double log_det(const Eigen::MatrixXd& m, bool& ok) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  ok = llt.info() == Eigen::Success;
  if (!ok) return 0.0;
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Lasso on column j: min_b 1/2 b'W11 b - b's12 + rho |b|_1, warm-started
// from `beta`. W11 is W with row and column j removed, addressed in place.
void column_lasso(const Eigen::MatrixXd& w, const Eigen::MatrixXd& s, Eigen::Index j, double rho,
                  Eigen::VectorXd& beta) {
  const Eigen::Index p = w.rows();
  for (int pass = 0; pass < 10000; ++pass) {
    double max_change = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (k == j) continue;
      double r = s(k, j);
      for (Eigen::Index m = 0; m < p; ++m) {
        if (m != j && m != k) r -= w(k, m) * beta(m);
      }
      const double updated = soft(r, rho) / w(k, k);
      max_change = std::max(max_change, std::abs(updated - beta(k)));
      beta(k) = updated;
    }
    if (max_change < 1e-14) break;
  }
}

}  // namespace

GlassoResult graphical_lasso(const Eigen::MatrixXd& s, double rho, double tol, std::size_t max_iter) {
  if (!(rho >= 0.0)) throw DataError("graphical lasso penalty must be nonnegative");
  if (!is_spd(s)) throw DataError("graphical lasso input is not SPD");
  const Eigen::Index p = s.rows();

  Eigen::MatrixXd w = s;
  w.diagonal().array() += rho;
  Eigen::MatrixXd betas = Eigen::MatrixXd::Zero(p, p);  // column j: beta of column j
  GlassoResult res;
  double gap = std::numeric_limits<double>::infinity();

  for (std::size_t it = 1; it <= max_iter; ++it) {
    for (Eigen::Index j = 0; j < p; ++j) {
      Eigen::VectorXd beta = betas.col(j);
      column_lasso(w, s, j, rho, beta);
      betas.col(j) = beta;
      for (Eigen::Index k = 0; k < p; ++k) {
        if (k == j) continue;
        double v = 0.0;
        for (Eigen::Index m = 0; m < p; ++m) {
          if (m != j) v += w(k, m) * beta(m);
        }
        w(k, j) = v;
        w(j, k) = v;
      }
    }

    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      double wb = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        if (k != j) wb += w(k, j) * betas(k, j);
      }
      const double tjj = 1.0 / (w(j, j) - wb);
      theta(j, j) = tjj;
      for (Eigen::Index k = 0; k < p; ++k) {
        if (k != j) theta(k, j) = -betas(k, j) * tjj;
      }
    }
    theta = 0.5 * (theta + theta.transpose()).eval();

    bool ok_t = false, ok_w = false;
    const double ld_theta = log_det(theta, ok_t);
    const double ld_w = log_det(w, ok_w);
    if (ok_t && ok_w) {
      gap = -ld_theta - ld_w + (s.cwiseProduct(theta)).sum() + rho * theta.cwiseAbs().sum() -
            static_cast<double>(p);
      gap = std::abs(gap);
    }
    res.iterations = it;
    // The gap is evaluated with the working W, so it can be small before W
    // and Theta^-1 agree; require both.
    const double mismatch = (theta * w - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
    if (ok_t && gap <= tol && mismatch <= kGlassoInverseTolerance) {
      res.precision = std::move(theta);
      res.covariance = std::move(w);
      res.duality_gap = gap;
      return res;
    }
  }
  throw ConvergenceError("graphical lasso", gap, max_iter);
}

Graph precision_graph(const Eigen::MatrixXd& precision) {
  Graph g;
  g.n_vertices = static_cast<std::size_t>(precision.rows());
  for (Eigen::Index k = 0; k < precision.rows(); ++k) {
    for (Eigen::Index l = k + 1; l < precision.cols(); ++l) {
      if (std::abs(precision(k, l)) > kSiceEdgeThreshold) {
        g.edges.push_back({static_cast<std::size_t>(k), static_cast<std::size_t>(l), 1.0});
      }
    }
  }
  return g;
}

Graph sice_graph(const Eigen::MatrixXd& sigma, double rho, double tol, std::size_t max_iter) {
  return precision_graph(graphical_lasso(sigma, rho, tol, max_iter).precision);
}

}  // namespace rfdm::sim
