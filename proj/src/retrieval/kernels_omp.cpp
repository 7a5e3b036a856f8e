#include <omp.h>

#include <array>

#include "kernels.hpp"

namespace bli::retrieval::kernels {

namespace {

constexpr std::size_t kGroup = 4;        // queries sharing one pass over a row
constexpr std::size_t kQueryTile = 16;   // queries per task
constexpr std::size_t kRowBlock = 512;   // rows kept hot in L2 per tile

// Four dot products against the same row. Every (query, row) score in the
// parallel path goes through this function, so results do not depend on how
// work is split across threads.
inline void dot4(const float* __restrict row, const float* __restrict q0, const float* __restrict q1,
                 const float* __restrict q2, const float* __restrict q3, std::size_t dim,
                 double out[kGroup]) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
#pragma omp simd reduction(+ : a0, a1, a2, a3)
  for (std::size_t i = 0; i < dim; ++i) {
    const double r = row[i];
    a0 += r * q0[i];
    a1 += r * q1[i];
    a2 += r * q2[i];
    a3 += r * q3[i];
  }
  out[0] = a0;
  out[1] = a1;
  out[2] = a2;
  out[3] = a3;
}

// Scans rows [row_begin, row_end) for queries [q_begin, q_end), feeding tops
// (indexed from q_begin). `zeros` backs padded query slots.
void scan(const SearchProblem& p, std::size_t q_begin, std::size_t q_end, std::size_t row_begin,
          std::size_t row_end, std::span<const float> zeros, std::vector<TopK>& tops) {
  const std::size_t dim = p.base.cols;
  const bool has_mask = !p.excluded.empty();
  const bool has_scale = !p.row_scale.empty();
  for (std::size_t rb = row_begin; rb < row_end; rb += kRowBlock) {
    const std::size_t rb_end = std::min(rb + kRowBlock, row_end);
    for (std::size_t g = q_begin; g < q_end; g += kGroup) {
      std::array<const float*, kGroup> qs{};
      const std::size_t live = std::min(kGroup, q_end - g);
      for (std::size_t j = 0; j < kGroup; ++j)
        qs[j] = j < live ? p.queries.data + (g + j) * dim : zeros.data();
      double s[kGroup];
      for (std::size_t r = rb; r < rb_end; ++r) {
        if (has_mask && p.excluded[r]) continue;
        dot4(p.base.data + r * dim, qs[0], qs[1], qs[2], qs[3], dim, s);
        for (std::size_t j = 0; j < live; ++j) {
          double v = s[j] * p.query_scale[g + j];
          if (has_scale) v *= p.row_scale[r];
          tops[g + j - q_begin].push(r, v);
        }
      }
    }
  }
}

}  // namespace

std::vector<std::vector<Neighbor>> search_parallel(const SearchProblem& p) {
  const std::size_t nq = p.queries.rows;
  const std::size_t nrows = p.base.rows;
  std::vector<std::vector<Neighbor>> results(nq);
  if (nq == 0) return results;
  const std::vector<float> zeros(p.base.cols, 0.0f);
  const std::size_t n_tiles = (nq + kQueryTile - 1) / kQueryTile;
  const auto threads = static_cast<std::size_t>(omp_get_max_threads());

  if (n_tiles >= threads || nrows < kRowBlock * 2) {
    // Enough query tiles to keep every thread busy: one tile per task.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t t = 0; t < n_tiles; ++t) {
      const std::size_t q_begin = t * kQueryTile;
      const std::size_t q_end = std::min(q_begin + kQueryTile, nq);
      std::vector<TopK> tops(q_end - q_begin, TopK(p.k));
      scan(p, q_begin, q_end, 0, nrows, zeros, tops);
      for (std::size_t q = q_begin; q < q_end; ++q) results[q] = tops[q - q_begin].sorted();
    }
    return results;
  }

  // Few queries: split the rows instead and merge partial tops in chunk
  // order. The merge is order-independent because the ranking is total.
  const std::size_t n_chunks = std::min(threads * 4, (nrows + kRowBlock - 1) / kRowBlock);
  const std::size_t chunk = (nrows + n_chunks - 1) / n_chunks;
  std::vector<std::vector<TopK>> partial(n_chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t r_begin = c * chunk;
    const std::size_t r_end = std::min(r_begin + chunk, nrows);
    partial[c].assign(nq, TopK(p.k));
    if (r_begin < r_end) scan(p, 0, nq, r_begin, r_end, zeros, partial[c]);
  }
  for (std::size_t q = 0; q < nq; ++q) {
    TopK merged(p.k);
    for (std::size_t c = 0; c < n_chunks; ++c) merged.merge(partial[c][q]);
    results[q] = merged.sorted();
  }
  return results;
}

void score_all(MatrixView base, std::span<const double> row_scale, std::span<const float> query,
               double query_scale, std::span<double> out) {
  const std::size_t dim = base.cols;
  const std::vector<float> zeros(dim, 0.0f);
  const auto nrows = static_cast<std::ptrdiff_t>(base.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < nrows; ++r) {
    double s[kGroup];
    dot4(base.data + r * dim, query.data(), zeros.data(), zeros.data(), zeros.data(), dim, s);
    double v = s[0] * query_scale;
    if (!row_scale.empty()) v *= row_scale[r];
    out[r] = v;
  }
}

}  // namespace bli::retrieval::kernels
