#pragma once

#include <cstddef>
#include <vector>

#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"
#include "dwarfs/datagen/matrix.hpp"
#include "dwarfs/kernels/digest.hpp"

namespace dwarfs::kernels {

template <class T>
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;  // row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  T operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  bool operator==(const DenseMatrix&) const = default;
};

/// C = A * B. Rows of C are split across workers; every C(i, j) accumulates
/// A(i, k) * B(k, j) for k = 0, 1, ... starting from zero, so the result is
/// bit-identical for any worker count.
template <class T>
DenseMatrix<T> gemm(const DenseMatrix<T>& a, const DenseMatrix<T>& b, std::size_t threads) {
  if (a.cols != b.rows)
    throw InvalidArgument("gemm: inner dimensions differ (" + std::to_string(a.cols) + " vs " +
                          std::to_string(b.rows) + ")");
  DenseMatrix<T> c(a.rows, b.cols);
  parallel_for(threads, a.rows, [&](Range r, std::size_t) {
    for (std::size_t i = r.begin; i < r.end; ++i) {
      T* out = c.data.data() + i * c.cols;
      for (std::size_t k = 0; k < a.cols; ++k) {
        const T aik = a(i, k);
        const T* brow = b.data.data() + k * b.cols;
        for (std::size_t j = 0; j < b.cols; ++j) out[j] += aik * brow[j];
      }
    }
  });
  return c;
}

DenseMatrix<double> to_dense_matrix(const datagen::MatrixData& m);

/// Matrix dwarf over generated square matrices (coordinate inputs are densified).
DenseMatrix<double> matmul(const datagen::MatrixData& a, const datagen::MatrixData& b,
                           std::size_t threads);

/// Fully connected layer: (batch x features) * (features x units).
DenseMatrix<float> fully_connected(const DenseMatrix<float>& x, const DenseMatrix<float>& w,
                                   std::size_t threads);

Digest128 digest(const DenseMatrix<double>& m);
Digest128 digest(const DenseMatrix<float>& m);

}  // namespace dwarfs::kernels
