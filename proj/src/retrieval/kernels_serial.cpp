#include "kernels.hpp"

namespace bli::retrieval::kernels {

// Reference scan: one query at a time, plain sequential dot products in
// double. Kept deliberately simple; the parallel kernel is checked against it.
std::vector<std::vector<Neighbor>> search_serial(const SearchProblem& p) {
  const std::size_t dim = p.base.cols;
  std::vector<std::vector<Neighbor>> results(p.queries.rows);
  for (std::size_t q = 0; q < p.queries.rows; ++q) {
    const float* qv = p.queries.data + q * dim;
    TopK top(p.k);
    for (std::size_t r = 0; r < p.base.rows; ++r) {
      if (!p.excluded.empty() && p.excluded[r]) continue;
      const float* rv = p.base.data + r * dim;
      double acc = 0.0;
      for (std::size_t i = 0; i < dim; ++i) acc += static_cast<double>(qv[i]) * rv[i];
      double s = acc * p.query_scale[q];
      if (!p.row_scale.empty()) s *= p.row_scale[r];
      top.push(r, s);
    }
    results[q] = top.sorted();
  }
  return results;
}

}  // namespace bli::retrieval::kernels
