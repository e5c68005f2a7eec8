#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dwarfs/datagen/matrix.hpp"
#include "dwarfs/kernels/digest.hpp"

namespace dwarfs::kernels {

using Complex = std::complex<double>;

/// Precomputed twiddles and bit-reversal permutation for one power-of-two size.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  std::size_t size() const { return n_; }
  /// In-place iterative radix-2 Cooley-Tukey. No normalization.
  void transform(std::span<Complex> data, bool inverse) const;

 private:
  std::size_t n_;
  std::vector<Complex> twiddles_;  // exp(-2 pi i k / n), k < n/2
  std::vector<std::size_t> reversed_;
};

struct ComplexMatrix {
  std::size_t n = 0;
  std::vector<Complex> data;  // row-major n x n
};

/// 2-D DFT by rows then columns. The inverse scales by 1/n^2.
void fft2d_inplace(ComplexMatrix& m, bool inverse, std::size_t threads);

/// Transform dwarf over a real matrix; throws InvalidArgument unless n is a
/// power of two.
ComplexMatrix fft2d(const datagen::MatrixData& m, bool inverse, std::size_t threads);

Digest128 digest(const ComplexMatrix& m);

}  // namespace dwarfs::kernels
