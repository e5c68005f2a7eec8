#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>

#include "dwarfs/datagen/tensor.hpp"
#include "dwarfs/kernels/digest.hpp"

// AI dwarfs over NHWC f32 tensors.
namespace dwarfs::kernels {

using datagen::Tensor;

/// Stride-1, unpadded convolution. `filter` has shape (kh, kw, c_in, c_out);
/// out(b, i, j, o) sums x(b, i+u, j+v, c) * filter(u, v, c, o) over u, v, c in
/// that nesting order.
Tensor conv2d(const Tensor& x, const Tensor& filter, std::size_t threads);

enum class PoolMode { max, avg };

/// Non-overlapping pooling; height and width must be divisible by the window.
Tensor pool(const Tensor& x, std::size_t window_h, std::size_t window_w, PoolMode mode,
            std::size_t threads);

enum class Activation { relu, sigmoid, tanh };

template <class T>
T activate(T v, Activation fn) {
  switch (fn) {
    case Activation::relu:
      return v > T(0) ? v : T(0);
    case Activation::sigmoid:
      return T(1) / (T(1) + std::exp(-v));
    case Activation::tanh:
      return std::tanh(v);
  }
  return v;
}

Tensor activation(const Tensor& x, Activation fn, std::size_t threads);

/// Element-wise product of equally shaped tensors.
Tensor multiply(const Tensor& x, const Tensor& y, std::size_t threads);

/// Digest over shape and raw little-endian f32 values.
Digest128 digest(const Tensor& t);

}  // namespace dwarfs::kernels
