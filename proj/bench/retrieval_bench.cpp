// Serial reference scan vs the blocked OpenMP kernel.
//
//   ./retrieval_bench --benchmark_filter=TopK

#include <benchmark/benchmark.h>

#include <random>

#include "bli/retrieval.hpp"

using namespace bli;

namespace {

EmbeddingStore make_store(std::size_t rows, std::size_t dim) {
  std::mt19937_64 rng(rows * 31 + dim);
  std::normal_distribution<float> d;
  std::vector<float> v(rows * dim);
  for (auto& x : v) x = d(rng);
  std::vector<std::string> tokens(rows);
  for (std::size_t i = 0; i < rows; ++i) tokens[i] = "w" + std::to_string(i);
  return EmbeddingStore::from_rows(std::move(tokens), DenseMatrix(rows, dim, std::move(v)), true);
}

DenseMatrix make_queries(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(n + 7);
  std::normal_distribution<float> d;
  std::vector<float> v(n * dim);
  for (auto& x : v) x = d(rng);
  return DenseMatrix(n, dim, std::move(v));
}

void run(benchmark::State& state, retrieval::Execution exec) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto nq = static_cast<std::size_t>(state.range(1));
  static std::size_t cached_rows = 0;
  static EmbeddingStore store;
  if (cached_rows != rows) {
    store = make_store(rows, 300);
    cached_rows = rows;
  }
  const auto queries = make_queries(nq, 300);
  for (auto _ : state) {
    auto r = retrieval::top_k_cosine_batch(store, queries.view(), 10, {}, exec);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows * nq));
}

void BM_TopKSerial(benchmark::State& s) { run(s, retrieval::Execution::Serial); }
void BM_TopKParallel(benchmark::State& s) { run(s, retrieval::Execution::Parallel); }

}  // namespace

BENCHMARK(BM_TopKSerial)->Args({20000, 1})->Args({20000, 64})->Args({200000, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TopKParallel)->Args({20000, 1})->Args({20000, 64})->Args({200000, 64})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
