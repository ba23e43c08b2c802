#include "rfdm/genotype.hpp"

#include <unordered_set>

#include "rfdm/error.hpp"

namespace rfdm {

namespace {

std::vector<std::string> generated_ids(const char* prefix, std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i + 1));
  return ids;
}

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw DataError(std::string("duplicate ") + what + " id '" + id + "'");
  }
}

}  // namespace

GenotypeMatrix::GenotypeMatrix(std::size_t n_subjects, std::size_t n_snps,
                               std::vector<std::uint8_t> values, std::vector<std::string> snp_ids,
                               std::vector<std::string> subject_ids)
    : n_subjects_(n_subjects),
      n_snps_(n_snps),
      values_(std::move(values)),
      snp_ids_(std::move(snp_ids)),
      subject_ids_(std::move(subject_ids)) {
  if (n_subjects_ < 2) throw DataError("genotype matrix needs at least 2 subjects");
  if (n_snps_ < 1) throw DataError("genotype matrix needs at least 1 SNP");
  if (values_.size() != n_subjects_ * n_snps_) throw DataError("genotype value count mismatch");
  if (snp_ids_.empty()) snp_ids_ = generated_ids("snp", n_snps_);
  if (subject_ids_.empty()) subject_ids_ = generated_ids("s", n_subjects_);
  if (snp_ids_.size() != n_snps_) throw DataError("snp id count mismatch");
  if (subject_ids_.size() != n_subjects_) throw DataError("subject id count mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k] > 2) {
      throw DataError("genotype value " + std::to_string(values_[k]) + " at subject " +
                      std::to_string(k % n_subjects_) + ", snp " + std::to_string(k / n_subjects_) +
                      " is not in {0,1,2}");
    }
  }
  require_unique(snp_ids_, "snp");
  require_unique(subject_ids_, "subject");
}

GenotypeMatrix GenotypeMatrix::select_subjects(std::span<const std::size_t> rows) const {
  std::vector<std::uint8_t> v(rows.size() * n_snps_);
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= n_subjects_) throw DataError("subject index out of range");
    ids.push_back(subject_ids_[r]);
  }
  for (std::size_t c = 0; c < n_snps_; ++c) {
    for (std::size_t k = 0; k < rows.size(); ++k) v[c * rows.size() + k] = (*this)(rows[k], c);
  }
  return GenotypeMatrix(rows.size(), n_snps_, std::move(v), snp_ids_, std::move(ids));
}

FeatureMatrix::FeatureMatrix(std::size_t n_rows, std::size_t n_cols,
                             std::vector<double> column_major, std::vector<std::string> names)
    : n_rows_(n_rows), n_cols_(n_cols), data_(std::move(column_major)), names_(std::move(names)) {
  if (data_.size() != n_rows_ * n_cols_) throw DataError("feature value count mismatch");
  if (names_.empty()) names_ = generated_ids("f", n_cols_);
  if (names_.size() != n_cols_) throw DataError("feature name count mismatch");
}

FeatureMatrix FeatureMatrix::from_genotypes(const GenotypeMatrix& g) {
  std::vector<double> v(g.values().begin(), g.values().end());
  return FeatureMatrix(g.n_subjects(), g.n_snps(), std::move(v), g.snp_ids());
}

FeatureMatrix FeatureMatrix::from_matrix(const Eigen::MatrixXd& m, std::vector<std::string> names) {
  std::vector<double> v(m.data(), m.data() + m.size());
  return FeatureMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                       std::move(v), std::move(names));
}

}  // namespace rfdm
