#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rfdm {

/// N subjects x p SNPs of minor-allele counts in {0, 1, 2}, stored
/// column-major so that one SNP is a contiguous span.
class GenotypeMatrix {
 public:
  GenotypeMatrix() = default;

  /// Throws DataError on any invariant violation. Empty id vectors are
  /// replaced by generated ids ("snp1".., "s1"..).
  GenotypeMatrix(std::size_t n_subjects, std::size_t n_snps, std::vector<std::uint8_t> values,
                 std::vector<std::string> snp_ids = {}, std::vector<std::string> subject_ids = {});

  std::size_t n_subjects() const noexcept { return n_subjects_; }
  std::size_t n_snps() const noexcept { return n_snps_; }

  std::uint8_t operator()(std::size_t subject, std::size_t snp) const noexcept {
    return values_[snp * n_subjects_ + subject];
  }
  std::span<const std::uint8_t> column(std::size_t snp) const noexcept {
    return {values_.data() + snp * n_subjects_, n_subjects_};
  }
  const std::vector<std::uint8_t>& values() const noexcept { return values_; }

  const std::vector<std::string>& snp_ids() const noexcept { return snp_ids_; }
  const std::vector<std::string>& subject_ids() const noexcept { return subject_ids_; }

  GenotypeMatrix select_subjects(std::span<const std::size_t> rows) const;

  friend bool operator==(const GenotypeMatrix&, const GenotypeMatrix&) = default;

 private:
  std::size_t n_subjects_ = 0;
  std::size_t n_snps_ = 0;
  std::vector<std::uint8_t> values_;
  std::vector<std::string> snp_ids_;
  std::vector<std::string> subject_ids_;
};

/// Column-major real feature matrix consumed by the forest. Genotypes and
/// real-valued covariates (for the supervised manifold run) both map here.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<double> column_major,
                std::vector<std::string> names = {});

  static FeatureMatrix from_genotypes(const GenotypeMatrix& g);
  /// Rows are subjects, columns are features.
  static FeatureMatrix from_matrix(const Eigen::MatrixXd& m, std::vector<std::string> names = {});

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[col * n_rows_ + row];
  }
  std::span<const double> column(std::size_t col) const noexcept {
    return {data_.data() + col * n_rows_, n_rows_};
  }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<double> data_;
  std::vector<std::string> names_;
};

}  // namespace rfdm
