#pragma once

#include <optional>
#include <vector>

#include "rfdm/distance_matrix.hpp"
#include "rfdm/genotype.hpp"
#include "rfdm/response.hpp"

namespace rfdm {

/// Genotypes paired with the response distance matrix, plus the optional
/// raw responses and case-control labels of the augmented set.
struct Dataset {
  GenotypeMatrix genotypes;
  DistanceMatrix distances;
  std::optional<ResponseSet> responses;
  std::optional<std::vector<int>> labels;

  /// Throws DataError when the subject counts disagree.
  void validate() const;
};

Dataset make_dataset(GenotypeMatrix g, DistanceMatrix d, std::optional<ResponseSet> responses = {},
                     std::optional<std::vector<int>> labels = {});

}  // namespace rfdm
