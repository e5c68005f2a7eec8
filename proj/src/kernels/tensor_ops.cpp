#include "dwarfs/kernels/tensor_ops.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "digest_util.hpp"
#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"

namespace dwarfs::kernels {

Tensor conv2d(const Tensor& x, const Tensor& filter, std::size_t threads) {
  const auto [kh, kw, cin, cout] = filter.shape;
  if (cin != x.channels())
    throw InvalidArgument("conv2d: filter expects " + std::to_string(cin) + " input channels, tensor has " +
                          std::to_string(x.channels()));
  if (kh > x.height() || kw > x.width() || kh == 0 || kw == 0)
    throw InvalidArgument("conv2d: kernel larger than input");
  const std::size_t oh = x.height() - kh + 1;
  const std::size_t ow = x.width() - kw + 1;
  Tensor out({x.batch(), oh, ow, cout});

  parallel_for(threads, x.batch() * oh, [&](Range r, std::size_t) {
    for (std::size_t row = r.begin; row < r.end; ++row) {
      const std::size_t b = row / oh, i = row % oh;
      for (std::size_t j = 0; j < ow; ++j) {
        float* acc = &out.at(b, i, j, 0);
        for (std::size_t u = 0; u < kh; ++u)
          for (std::size_t v = 0; v < kw; ++v) {
            const float* px = x.values.data() + x.index(b, i + u, j + v, 0);
            for (std::size_t c = 0; c < cin; ++c) {
              const float xv = px[c];
              const float* w = filter.values.data() + filter.index(u, v, c, 0);
              for (std::size_t o = 0; o < cout; ++o) acc[o] += xv * w[o];
            }
          }
      }
    }
  });
  return out;
}

Tensor pool(const Tensor& x, std::size_t window_h, std::size_t window_w, PoolMode mode, std::size_t threads) {
  if (window_h == 0 || window_w == 0) throw InvalidArgument("pool: window must be at least 1x1");
  if (x.height() % window_h != 0 || x.width() % window_w != 0)
    throw InvalidArgument("pool: " + std::to_string(x.height()) + "x" + std::to_string(x.width()) +
                          " not divisible by window " + std::to_string(window_h) + "x" + std::to_string(window_w));
  const std::size_t oh = x.height() / window_h, ow = x.width() / window_w, ch = x.channels();
  Tensor out({x.batch(), oh, ow, ch});
  const float count = static_cast<float>(window_h * window_w);

  parallel_for(threads, x.batch() * oh, [&](Range r, std::size_t) {
    for (std::size_t row = r.begin; row < r.end; ++row) {
      const std::size_t b = row / oh, i = row % oh;
      for (std::size_t j = 0; j < ow; ++j) {
        float* dst = &out.at(b, i, j, 0);
        std::fill_n(dst, ch, mode == PoolMode::max ? -std::numeric_limits<float>::infinity() : 0.0f);
        for (std::size_t u = 0; u < window_h; ++u)
          for (std::size_t v = 0; v < window_w; ++v) {
            const float* src = x.values.data() + x.index(b, i * window_h + u, j * window_w + v, 0);
            if (mode == PoolMode::max)
              for (std::size_t c = 0; c < ch; ++c) dst[c] = std::max(dst[c], src[c]);
            else
              for (std::size_t c = 0; c < ch; ++c) dst[c] += src[c];
          }
        if (mode == PoolMode::avg)
          for (std::size_t c = 0; c < ch; ++c) dst[c] /= count;
      }
    }
  });
  return out;
}

Tensor activation(const Tensor& x, Activation fn, std::size_t threads) {
  Tensor out(x.shape);
  parallel_for(threads, x.size(), [&](Range r, std::size_t) {
    for (std::size_t i = r.begin; i < r.end; ++i) out.values[i] = activate(x.values[i], fn);
  });
  return out;
}

Tensor multiply(const Tensor& x, const Tensor& y, std::size_t threads) {
  if (x.shape != y.shape) throw InvalidArgument("multiply: shape mismatch");
  Tensor out(x.shape);
  parallel_for(threads, x.size(), [&](Range r, std::size_t) {
    for (std::size_t i = r.begin; i < r.end; ++i) out.values[i] = x.values[i] * y.values[i];
  });
  return out;
}

Digest128 digest(const Tensor& t) {
  return detail::digest_array<float>({t.shape[0], t.shape[1], t.shape[2], t.shape[3]}, t.values);
}

}  // namespace dwarfs::kernels
