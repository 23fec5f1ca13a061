#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ppm {

// Read-only view over a row-major matrix.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const { return {data + i * cols, cols}; }
};

// Owned row-major matrix buffer.
struct Matrix {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : values(r * c, 0.0), rows(r), cols(c) {}

  double* row(std::size_t i) { return values.data() + i * cols; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  MatrixView view() const { return {values.data(), rows, cols}; }
};

}  // namespace ppm
