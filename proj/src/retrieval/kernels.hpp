#pragma once

// Internal kernel layer shared by the serial reference scan and the OpenMP
// implementation.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "bli/matrix.hpp"
#include "bli/retrieval.hpp"

namespace bli::retrieval::kernels {

/// Bounded selection of the k best neighbors. front() of the heap is the
/// current worst survivor.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k); }

  void push(std::size_t index, double score) {
    if (k_ == 0) return;
    Neighbor n{index, score};
    if (heap_.size() < k_) {
      heap_.push_back(n);
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    } else if (ranks_before(n, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
      heap_.back() = n;
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    }
  }

  void merge(const TopK& other) {
    for (const auto& n : other.heap_) push(n.index, n.score);
  }

  std::vector<Neighbor> sorted() const {
    std::vector<Neighbor> out = heap_;
    std::sort(out.begin(), out.end(), ranks_before);
    return out;
  }

 private:
  std::size_t k_;
  std::vector<Neighbor> heap_;
};

/// Problem description common to both implementations. `row_scale` is empty
/// for unit-length bases; `query_scale` holds 1/|q| per query; `excluded` is
/// either empty or a 0/1 mask over base rows.
struct SearchProblem {
  MatrixView base;
  std::span<const double> row_scale;
  MatrixView queries;
  std::span<const double> query_scale;
  std::span<const std::uint8_t> excluded;
  std::size_t k;
};

std::vector<std::vector<Neighbor>> search_serial(const SearchProblem& p);
std::vector<std::vector<Neighbor>> search_parallel(const SearchProblem& p);

/// Scores of one query against every base row (parallel over rows).
void score_all(MatrixView base, std::span<const double> row_scale, std::span<const float> query,
               double query_scale, std::span<double> out);

}  // namespace bli::retrieval::kernels
