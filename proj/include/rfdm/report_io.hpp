#pragma once

// Text artifacts of rankings, ROC curves and embeddings.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rfdm/importance.hpp"
#include "rfdm/manifold.hpp"
#include "rfdm/roc.hpp"

namespace rfdm::io {

/// TSV `rank score id g_alpha`, rank starting at 1.
void save_snp_ranking(const std::vector<RankedFeature>& ranking, const std::vector<std::uint64_t>& candidacy,
                      const std::vector<std::string>& names, const std::filesystem::path& path);

/// TSV `rank score id_a id_b g_alpha_a g_alpha_b`.
void save_pair_ranking(const std::vector<RankedPair>& ranking, const std::vector<std::uint64_t>& candidacy,
                       const std::vector<std::string>& names, const std::filesystem::path& path);

/// Either ranking TSV. For SNP rankings `id_b` is empty.
struct RankingTable {
  bool pairs = false;
  std::vector<std::string> id_a;
  std::vector<std::string> id_b;
  std::vector<double> score;
};
RankingTable load_ranking(const std::filesystem::path& path);

/// CSV with an `fpr,tpr` header. The AUC is recomputed on load.
void save_roc(const RocCurve& curve, const std::filesystem::path& path);
RocCurve load_roc(const std::filesystem::path& path);

/// `# eigenvalues,<l1>,...` comment, `subject_id,dim1,...` header, one row per subject.
void save_embedding(const Embedding& e, const std::vector<std::string>& subject_ids,
                    const std::filesystem::path& path);

}  // namespace rfdm::io
