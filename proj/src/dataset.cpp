#include "rfdm/dataset.hpp"

#include <string>

#include "rfdm/error.hpp"

namespace rfdm {

void Dataset::validate() const {
  const std::size_t n = genotypes.n_subjects();
  if (distances.size() != n) {
    throw DataError("distance matrix has " + std::to_string(distances.size()) +
                    " subjects, genotypes have " + std::to_string(n));
  }
  if (responses) {
    validate_responses(*responses);
    if (response_count(*responses) != n) throw DataError("response count does not match genotypes");
  }
  if (labels && labels->size() != n) throw DataError("label count does not match genotypes");
}

Dataset make_dataset(GenotypeMatrix g, DistanceMatrix d, std::optional<ResponseSet> responses,
                     std::optional<std::vector<int>> labels) {
  Dataset ds{std::move(g), std::move(d), std::move(responses), std::move(labels)};
  ds.validate();
  return ds;
}

}  // namespace rfdm
