#pragma once

#include <cstddef>
#include <span>
#include <unordered_set>
#include <vector>

#include "bli/embedding_store.hpp"
#include "bli/matrix.hpp"

namespace bli::retrieval {

struct Neighbor {
  std::size_t index;
  double score;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Result order: score descending, then index ascending.
inline bool ranks_before(const Neighbor& a, const Neighbor& b) {
  return a.score > b.score || (a.score == b.score && a.index < b.index);
}

using ExcludeSet = std::unordered_set<std::size_t>;

enum class Execution {
  Serial,    // reference scan, one query at a time
  Parallel,  // blocked OpenMP kernel
};

/// Exact top-k by cosine similarity. Returns min(k, size - |exclude|)
/// neighbors; the query need not be unit length.
std::vector<Neighbor> top_k_cosine(const EmbeddingStore& store, std::span<const float> query,
                                   std::size_t k, const ExcludeSet& exclude = {},
                                   Execution exec = Execution::Parallel);

/// Batched form: one result list per query row.
std::vector<std::vector<Neighbor>> top_k_cosine_batch(const EmbeddingStore& store,
                                                      MatrixView queries, std::size_t k,
                                                      const ExcludeSet& exclude = {},
                                                      Execution exec = Execution::Parallel);

/// Cosine of `query` against every row of `store`.
std::vector<double> cosine_all(const EmbeddingStore& store, std::span<const float> query);

/// For each query row, the mean cosine to its k nearest rows of `base`.
/// This is the CSLS neighbourhood density term.
std::vector<double> mean_top_k_similarity(const EmbeddingStore& base, MatrixView queries,
                                          std::size_t k);

inline constexpr std::size_t kDefaultCslsK = 10;

/// CSLS over a fixed target vocabulary. The target-side density r_S(y) is
/// computed once against the mapped source space; each query then costs one
/// cosine scan of the targets.
class CslsIndex {
 public:
  CslsIndex(const EmbeddingStore& targets, const EmbeddingStore& mapped_sources,
            std::size_t k = kDefaultCslsK);

  std::size_t k() const { return k_; }
  /// r_S(y) for every target row.
  std::span<const double> target_density() const { return target_density_; }

  /// 2 cos(x, y) - r_T(x) - r_S(y) for every target y.
  std::vector<double> scores(std::span<const float> mapped_query) const;
  std::vector<Neighbor> top_k(std::span<const float> mapped_query, std::size_t k,
                              const ExcludeSet& exclude = {}) const;

 private:
  const EmbeddingStore* targets_;
  std::size_t k_;
  std::vector<double> target_density_;
};

/// One-shot CSLS scores of a single mapped source vector over `store_tgt`.
std::vector<double> csls_scores(std::span<const float> mapped_src, const EmbeddingStore& store_tgt,
                                const EmbeddingStore& store_src, std::size_t k_csls = kDefaultCslsK);

/// Indices of the k best entries of `scores` with the standard tie-break.
std::vector<Neighbor> top_k_of(std::span<const double> scores, std::size_t k,
                               const ExcludeSet& exclude = {});

}  // namespace bli::retrieval
