#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace bli {

/// Non-owning view of a dense row-major float matrix.
struct MatrixView {
  const float* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const float> row(std::size_t i) const {
    assert(i < rows);
    return {data + i * cols, cols};
  }
};

/// Owning dense row-major float matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : values_(rows * cols, 0.0f), rows_(rows), cols_(cols) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<float> values)
      : values_(std::move(values)), rows_(rows), cols_(cols) {
    assert(values_.size() == rows * cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  float* data() { return values_.data(); }
  const float* data() const { return values_.data(); }
  const std::vector<float>& values() const { return values_; }

  std::span<float> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  std::span<const float> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }

  MatrixView view() const { return {values_.data(), rows_, cols_}; }

 private:
  std::vector<float> values_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

}  // namespace bli
