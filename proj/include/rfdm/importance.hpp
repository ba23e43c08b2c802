#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "rfdm/execution.hpp"
#include "rfdm/forest.hpp"

namespace rfdm {

/// Per-feature Gini information score.
struct ImportanceReport {
  std::vector<double> score;             // G_alpha
  std::vector<std::uint64_t> candidacy;  // g_alpha: nodes where alpha was examined
  std::vector<std::uint64_t> selections; // nodes split on alpha

  std::size_t size() const noexcept { return score.size(); }
};

/// G_alpha = (1/g_alpha) * sum of gains of nodes split on alpha.
ImportanceReport gini_importance(const Forest& forest);

enum class InteractionVariant { squared, absolute };

/// Dense upper-triangular store of the Gini pairwise interaction measure.
///
/// For a pair (a, b) with a < b, `given_lower` holds G_{b|a}: b-splits found
/// in the subtrees under a-splits; `given_upper` holds G_{a|b}.
class PairInteractionReport {
 public:
  explicit PairInteractionReport(std::size_t n_features = 0);

  std::size_t n_features() const noexcept { return p_; }
  std::size_t n_pairs() const noexcept { return given_lower_.size(); }

  /// Position of (a, b), a != b, in lexicographic order of (min, max).
  std::size_t index(std::size_t a, std::size_t b) const noexcept;
  std::pair<std::size_t, std::size_t> pair_at(std::size_t k) const noexcept;

  /// G_{inner|outer}: contributions of `inner` splits beneath `outer` splits.
  double conditional(std::size_t inner, std::size_t outer) const noexcept;
  /// G_ab = G_{a|b} + G_{b|a}.
  double combined(std::size_t a, std::size_t b) const noexcept;
  double combined_at(std::size_t k) const noexcept { return given_lower_[k] + given_upper_[k]; }

  void add(std::size_t inner, std::size_t outer, double value) noexcept;

  friend bool operator==(const PairInteractionReport&, const PairInteractionReport&) = default;

 private:
  std::size_t p_;
  std::vector<double> given_lower_;
  std::vector<double> given_upper_;
};

/// Accumulates, for every node split on a feature with at least one
/// non-terminal child, the left/right imbalance of size-weighted descendant
/// gains per other feature. Uses only the stored topology and gains.
PairInteractionReport pairwise_interaction(const Forest& forest,
                                           InteractionVariant variant = InteractionVariant::squared,
                                           Execution exec = Execution::parallel);

struct RankedFeature {
  std::size_t feature;
  double score;
};

struct RankedPair {
  std::size_t a;
  std::size_t b;
  double score;
};

/// Descending by score; equal scores keep ascending index order.
std::vector<RankedFeature> rank(const ImportanceReport& report);
std::vector<RankedPair> rank(const PairInteractionReport& report);

}  // namespace rfdm
