#include "dwarfs/kernels/dense.hpp"

#include "digest_util.hpp"

namespace dwarfs::kernels {

DenseMatrix<double> to_dense_matrix(const datagen::MatrixData& m) {
  DenseMatrix<double> out;
  out.rows = out.cols = m.n;
  out.data = m.storage == datagen::MatrixStorage::dense ? m.dense : m.to_dense().dense;
  return out;
}

DenseMatrix<double> matmul(const datagen::MatrixData& a, const datagen::MatrixData& b, std::size_t threads) {
  if (a.n != b.n)
    throw InvalidArgument("matmul: dimension mismatch (" + std::to_string(a.n) + " vs " +
                          std::to_string(b.n) + ")");
  return gemm(to_dense_matrix(a), to_dense_matrix(b), threads);
}

DenseMatrix<float> fully_connected(const DenseMatrix<float>& x, const DenseMatrix<float>& w,
                                   std::size_t threads) {
  if (x.cols != w.rows)
    throw InvalidArgument("fully_connected: " + std::to_string(x.cols) + " features but weights expect " +
                          std::to_string(w.rows));
  return gemm(x, w, threads);
}

Digest128 digest(const DenseMatrix<double>& m) {
  return detail::digest_array<double>({m.rows, m.cols}, m.data);
}

Digest128 digest(const DenseMatrix<float>& m) {
  return detail::digest_array<float>({m.rows, m.cols}, m.data);
}

}  // namespace dwarfs::kernels
