#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rfdm/error.hpp"
#include "rfdm/simgen.hpp"

namespace rfdm::sim {

ModelKind parse_model(const std::string& s) {
  if (s == "P0") return ModelKind::P0;
  if (s == "P1") return ModelKind::P1;
  if (s == "P2") return ModelKind::P2;
  if (s == "P3") return ModelKind::P3;
  if (s == "P4") return ModelKind::P4;
  throw DataError("unknown genetic model '" + s + "' (expected P0..P4)");
}

std::string to_string(ModelKind m) {
  return "P" + std::to_string(static_cast<int>(m));
}

std::vector<std::size_t> EffectTerms::snps() const {
  std::vector<std::size_t> out(singles);
  for (const auto& [a, b] : pairs) {
    out.push_back(a);
    out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EffectTerms model_terms(ModelKind kind, std::span<const std::size_t> s) {
  static constexpr std::size_t need[] = {7, 16, 9, 9, 16};
  if (s.size() < need[static_cast<int>(kind)]) {
    throw DataError(to_string(kind) + " needs " + std::to_string(need[static_cast<int>(kind)]) + " SNPs");
  }
  EffectTerms t;
  switch (kind) {
    case ModelKind::P0:
      t.singles.assign(s.begin(), s.begin() + 7);
      break;
    case ModelKind::P1:
      for (std::size_t k = 0; k < 8; ++k) t.pairs.emplace_back(s[2 * k], s[2 * k + 1]);
      break;
    case ModelKind::P2:
      for (std::size_t k = 1; k <= 8; ++k) t.pairs.emplace_back(s[0], s[k]);
      break;
    case ModelKind::P3:
    case ModelKind::P4:
      for (std::size_t k = 0; k < 8; ++k) t.pairs.emplace_back(s[k], s[k + 1]);
      if (kind == ModelKind::P4) t.singles.assign(s.begin() + 9, s.begin() + 16);
      break;
  }
  return t;
}

double effect_load(const GenotypeMatrix& g, std::size_t i, const EffectTerms& t) {
  double w = 0.0;
  for (const auto& [a, b] : t.pairs) w += static_cast<double>(g(i, a)) * static_cast<double>(g(i, b));
  for (std::size_t c : t.singles) w += static_cast<double>(g(i, c));
  return w;
}

namespace {

void require_terms_fit(const GenotypeMatrix& g, const EffectTerms& t) {
  for (std::size_t s : t.snps()) {
    if (s >= g.n_snps()) throw DataError("effect term SNP index out of range");
  }
}

}  // namespace

ShrinkageEstimate shrink_covariance(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  if (n < 2) throw DataError("shrink_covariance needs at least 2 samples");
  if (!x.allFinite()) throw DataError("shrink_covariance: non-finite sample");
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd s = xc.transpose() * xc / (nd - 1.0);

  // Var(s_ij) = n / (n-1)^3 * sum_k (w_kij - wbar_ij)^2, w_kij = xc_ki xc_kj.
  const Eigen::MatrixXd x2 = xc.cwiseProduct(xc);
  const Eigen::MatrixXd sum_w2 = x2.transpose() * x2;
  const Eigen::MatrixXd wbar = s * ((nd - 1.0) / nd);
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index i = 0; i < q; ++i) {
      if (i == j) continue;
      const double ss = std::max(0.0, sum_w2(i, j) - nd * wbar(i, j) * wbar(i, j));
      num += nd / ((nd - 1.0) * (nd - 1.0) * (nd - 1.0)) * ss;
      den += s(i, j) * s(i, j);
    }
  }
  double lambda = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 1.0;

  Eigen::VectorXd target = s.diagonal();
  for (Eigen::Index i = 0; i < q; ++i) {
    if (!(target(i) > 0.0)) target(i) = 1.0;
  }
  auto combine = [&](double lam) {
    Eigen::MatrixXd r = (1.0 - lam) * s;
    r.diagonal() += lam * target;
    return r;
  };
  Eigen::MatrixXd r = combine(lambda);
  // Rounding can leave a near-singular S-dominated estimate indefinite.
  while (lambda < 1.0 && Eigen::LLT<Eigen::MatrixXd>(r).info() != Eigen::Success) {
    lambda = std::min(1.0, std::max(2.0 * lambda, 0.01));
    r = combine(lambda);
  }
  return {std::move(r), lambda};
}

BaseVectorModel build_base_vector_model(const PhenotypeConfig& c, Rng rng) {
  if (c.n_roi < 1 || c.n_reference < 2) throw DataError("phenotype config needs n_roi >= 1, n_reference >= 2");
  if (!(c.roi_correlation > -1.0 && c.roi_correlation < 1.0)) throw DataError("roi_correlation must be in (-1, 1)");
  const auto q = static_cast<Eigen::Index>(c.n_roi);
  const auto n = static_cast<Eigen::Index>(c.n_reference);
  const double rho = c.roi_correlation;
  const double innov = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd ref(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    double z = rng.normal();
    ref(i, 0) = z;
    for (Eigen::Index k = 1; k < q; ++k) {
      z = rho * z + innov * rng.normal();
      ref(i, k) = z;
    }
  }
  ref = (ref * c.base_sd).array() + c.base_mean;

  BaseVectorModel m;
  m.mean = ref.colwise().mean().transpose();
  ShrinkageEstimate est = shrink_covariance(ref);
  m.covariance = std::move(est.covariance);
  m.shrinkage = est.lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(m.covariance);
  if (llt.info() != Eigen::Success) throw NumericalError("base covariance is not positive definite");
  m.cholesky = llt.matrixL();
  return m;
}

Eigen::MatrixXd simulate_base_vectors(std::size_t n_subjects, const BaseVectorModel& model,
                                      std::span<const std::size_t> disease_roi, double zeta, Rng rng) {
  const Eigen::Index q = model.mean.size();
  const auto n = static_cast<Eigen::Index>(n_subjects);
  Eigen::MatrixXd z(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < q; ++k) z(i, k) = rng.normal();
  }
  Eigen::MatrixXd y = z * model.cholesky.transpose();
  y.rowwise() += model.mean.transpose();
  for (std::size_t r : disease_roi) {
    if (r >= static_cast<std::size_t>(q)) throw DataError("disease ROI index out of range");
    y.col(static_cast<Eigen::Index>(r)).array() -= zeta;
  }
  return y;
}

Eigen::MatrixXd apply_vector_effect(const Eigen::MatrixXd& y, const GenotypeMatrix& g,
                                    const EffectTerms& terms, double delta,
                                    std::span<const std::size_t> roi_set) {
  if (static_cast<std::size_t>(y.rows()) != g.n_subjects()) throw DataError("vectors and genotypes disagree on N");
  require_terms_fit(g, terms);
  for (std::size_t r : roi_set) {
    if (r >= static_cast<std::size_t>(y.cols())) throw DataError("ROI index out of range");
  }
  Eigen::MatrixXd out = y;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double w = delta * effect_load(g, static_cast<std::size_t>(i), terms);
    if (w == 0.0) continue;
    for (std::size_t r : roi_set) out(i, static_cast<Eigen::Index>(r)) += w;
  }
  return out;
}

Eigen::MatrixXd reference_covariance(const BaseVectorModel& model, const PhenotypeConfig& c, Rng rng) {
  if (c.cov_dim < 1 || c.cov_dim > static_cast<std::size_t>(model.mean.size())) {
    throw DataError("cov_dim must be in [1, n_roi]");
  }
  const Eigen::MatrixXd y = simulate_base_vectors(c.n_reference, model, {}, 0.0, rng);
  return shrink_covariance(y.leftCols(static_cast<Eigen::Index>(c.cov_dim))).covariance;
}

std::vector<Eigen::MatrixXd> simulate_base_covariances(std::size_t n_subjects,
                                                       const Eigen::MatrixXd& reference,
                                                       double noise_sd, Rng rng) {
  if (!is_spd(reference)) throw DataError("reference covariance is not SPD");
  const Eigen::Index d = reference.rows();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(n_subjects);
  for (std::size_t i = 0; i < n_subjects; ++i) {
    Rng r = rng.substream(i);
    Eigen::MatrixXd sigma = reference;
    if (noise_sd != 0.0) {
      for (Eigen::Index b = 0; b < d; ++b) {
        for (Eigen::Index a = 0; a < d; ++a) sigma(a, b) += noise_sd * r.normal();
      }
      sigma = 0.5 * (sigma + sigma.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
      if (es.eigenvalues()(0) < kCovarianceEigenFloor) {
        const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(kCovarianceEigenFloor);
        sigma = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
        sigma = 0.5 * (sigma + sigma.transpose()).eval();
      }
    }
    out.push_back(std::move(sigma));
  }
  return out;
}

std::vector<Eigen::MatrixXd> apply_covariance_effect(std::span<const Eigen::MatrixXd> sigmas,
                                                     const GenotypeMatrix& g, const EffectTerms& terms,
                                                     double gamma) {
  if (sigmas.size() != g.n_subjects()) throw DataError("covariances and genotypes disagree on N");
  require_terms_fit(g, terms);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    out.push_back(sigmas[i] * std::exp(-gamma * effect_load(g, i, terms)));
  }
  return out;
}

}  // namespace rfdm::sim
