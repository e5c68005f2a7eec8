#include "dwarfs/kernels/fft.hpp"

#include <bit>
#include <numbers>

#include "digest_util.hpp"
#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"

namespace dwarfs::kernels {

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0 || !std::has_single_bit(n))
    throw InvalidArgument("fft: size " + std::to_string(n) + " is not a power of two");
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  const int bits = std::countr_zero(n);
  reversed_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    reversed_[i] = r;
  }
}

void FftPlan::transform(std::span<Complex> data, bool inverse) const {
  if (data.size() != n_) throw InvalidArgument("fft: buffer size does not match plan");
  for (std::size_t i = 0; i < n_; ++i)
    if (i < reversed_[i]) std::swap(data[i], data[reversed_[i]]);
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex w = twiddles_[k * stride];
        if (inverse) w = std::conj(w);
        const Complex t = w * data[start + k + half];
        data[start + k + half] = data[start + k] - t;
        data[start + k] += t;
      }
    }
  }
}

namespace {

void transpose(ComplexMatrix& m, std::size_t threads) {
  const std::size_t n = m.n;
  parallel_for(threads, n, [&](Range r, std::size_t) {
    for (std::size_t i = r.begin; i < r.end; ++i)
      for (std::size_t j = i + 1; j < n; ++j) std::swap(m.data[i * n + j], m.data[j * n + i]);
  });
}

void transform_rows(ComplexMatrix& m, const FftPlan& plan, bool inverse, std::size_t threads) {
  parallel_for(threads, m.n, [&](Range r, std::size_t) {
    for (std::size_t i = r.begin; i < r.end; ++i)
      plan.transform(std::span(m.data.data() + i * m.n, m.n), inverse);
  });
}

}  // namespace

void fft2d_inplace(ComplexMatrix& m, bool inverse, std::size_t threads) {
  if (m.data.size() != m.n * m.n) throw InvalidArgument("fft2d: buffer is not n x n");
  const FftPlan plan(m.n);
  transform_rows(m, plan, inverse, threads);
  transpose(m, threads);
  transform_rows(m, plan, inverse, threads);
  transpose(m, threads);
  if (inverse) {
    const double scale = 1.0 / (static_cast<double>(m.n) * static_cast<double>(m.n));
    parallel_for(threads, m.data.size(), [&](Range r, std::size_t) {
      for (std::size_t i = r.begin; i < r.end; ++i) m.data[i] *= scale;
    });
  }
}

ComplexMatrix fft2d(const datagen::MatrixData& m, bool inverse, std::size_t threads) {
  if (m.n == 0 || !std::has_single_bit(m.n))
    throw InvalidArgument("fft2d: n = " + std::to_string(m.n) + " is not a power of two");
  const datagen::MatrixData dense = m.storage == datagen::MatrixStorage::dense ? datagen::MatrixData{} : m.to_dense();
  const auto& values = m.storage == datagen::MatrixStorage::dense ? m.dense : dense.dense;
  ComplexMatrix out{m.n, std::vector<Complex>(values.begin(), values.end())};
  fft2d_inplace(out, inverse, threads);
  return out;
}

Digest128 digest(const ComplexMatrix& m) {
  return detail::digest_array<Complex>({m.n, m.n}, m.data);
}

}  // namespace dwarfs::kernels
