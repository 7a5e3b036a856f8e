#include <algorithm>
#include <functional>

#include "bli/errors.hpp"
#include "bli/retrieval.hpp"

namespace bli::retrieval {

namespace {

double mean_of_top(std::vector<double> values, std::size_t k) {
  k = std::min(k, values.size());
  if (k == 0) return 0.0;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end(),
                   std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += values[i];
  return sum / static_cast<double>(k);
}

}  // namespace

CslsIndex::CslsIndex(const EmbeddingStore& targets, const EmbeddingStore& mapped_sources,
                     std::size_t k)
    : targets_(&targets), k_(k) {
  if (k == 0) throw std::invalid_argument("CSLS k must be >= 1");
  if (targets.dim() != mapped_sources.dim())
    throw DimMismatch("target dim " + std::to_string(targets.dim()) + " != source dim " +
                      std::to_string(mapped_sources.dim()));
  target_density_ = mean_top_k_similarity(mapped_sources, targets.matrix(), k);
}

std::vector<double> CslsIndex::scores(std::span<const float> mapped_query) const {
  auto cos = cosine_all(*targets_, mapped_query);
  const double query_density = mean_of_top(cos, k_);
  for (std::size_t y = 0; y < cos.size(); ++y)
    cos[y] = 2.0 * cos[y] - query_density - target_density_[y];
  return cos;
}

std::vector<Neighbor> CslsIndex::top_k(std::span<const float> mapped_query, std::size_t k,
                                       const ExcludeSet& exclude) const {
  return top_k_of(scores(mapped_query), k, exclude);
}

std::vector<double> csls_scores(std::span<const float> mapped_src, const EmbeddingStore& store_tgt,
                                const EmbeddingStore& store_src, std::size_t k_csls) {
  if (mapped_src.size() != store_tgt.dim())
    throw DimMismatch("query dim " + std::to_string(mapped_src.size()) + " != target dim " +
                      std::to_string(store_tgt.dim()));
  return CslsIndex(store_tgt, store_src, k_csls).scores(mapped_src);
}

}  // namespace bli::retrieval
