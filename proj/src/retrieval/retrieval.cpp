#include <cmath>

#include "bli/errors.hpp"
#include "bli/retrieval.hpp"
#include "kernels.hpp"

namespace bli::retrieval {

namespace {

double inverse_norm(std::span<const float> v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  return sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
}

// Non-normalized stores get explicit per-row scales; unit stores skip them.
std::vector<double> row_scales(const EmbeddingStore& store) {
  std::vector<double> scales;
  if (store.normalized()) return scales;
  scales.resize(store.size());
  for (std::size_t i = 0; i < store.size(); ++i)
    scales[i] = inverse_norm(store.row(i));
  return scales;
}

void check_dim(const EmbeddingStore& store, std::size_t dim) {
  if (dim != store.dim())
    throw DimMismatch("query dim " + std::to_string(dim) + " != store dim " +
                      std::to_string(store.dim()));
}

}  // namespace

std::vector<std::vector<Neighbor>> top_k_cosine_batch(const EmbeddingStore& store,
                                                      MatrixView queries, std::size_t k,
                                                      const ExcludeSet& exclude, Execution exec) {
  check_dim(store, queries.cols);
  if (k == 0) throw std::invalid_argument("top_k_cosine: k must be >= 1");

  std::vector<std::uint8_t> mask;
  if (!exclude.empty()) {
    mask.assign(store.size(), 0);
    for (std::size_t i : exclude)
      if (i < store.size()) mask[i] = 1;
  }
  std::vector<double> query_scale(queries.rows);
  for (std::size_t q = 0; q < queries.rows; ++q) query_scale[q] = inverse_norm(queries.row(q));
  const auto scales = row_scales(store);

  kernels::SearchProblem problem{store.matrix(), scales, queries, query_scale, mask, k};
  return exec == Execution::Serial ? kernels::search_serial(problem)
                                   : kernels::search_parallel(problem);
}

std::vector<Neighbor> top_k_cosine(const EmbeddingStore& store, std::span<const float> query,
                                   std::size_t k, const ExcludeSet& exclude, Execution exec) {
  MatrixView one{query.data(), 1, query.size()};
  return std::move(top_k_cosine_batch(store, one, k, exclude, exec).front());
}

std::vector<double> cosine_all(const EmbeddingStore& store, std::span<const float> query) {
  check_dim(store, query.size());
  std::vector<double> out(store.size());
  const auto scales = row_scales(store);
  kernels::score_all(store.matrix(), scales, query, inverse_norm(query), out);
  return out;
}

std::vector<double> mean_top_k_similarity(const EmbeddingStore& base, MatrixView queries,
                                          std::size_t k) {
  const std::size_t kk = std::min(k, base.size());
  std::vector<double> out(queries.rows, 0.0);
  if (kk == 0) return out;
  auto tops = top_k_cosine_batch(base, queries, kk);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    double sum = 0.0;
    for (const auto& n : tops[q]) sum += n.score;
    out[q] = sum / static_cast<double>(tops[q].size());
  }
  return out;
}

std::vector<Neighbor> top_k_of(std::span<const double> scores, std::size_t k,
                               const ExcludeSet& exclude) {
  kernels::TopK top(k);
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (!exclude.count(i)) top.push(i, scores[i]);
  return top.sorted();
}

}  // namespace bli::retrieval
