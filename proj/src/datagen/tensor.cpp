#include "dwarfs/datagen/tensor.hpp"

#include <fstream>
#include <limits>
#include <new>

#include "dwarfs/common/binio.hpp"
#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"
#include "dwarfs/common/rng.hpp"

namespace dwarfs::datagen {

namespace {

std::size_t element_count(const std::array<std::size_t, 4>& dims) {
  std::size_t total = 1;
  for (auto d : dims) {
    if (d != 0 && total > std::numeric_limits<std::size_t>::max() / d)
      throw ResourceError("tensor: element count overflows");
    total *= d;
  }
  return total;
}

}  // namespace

Tensor::Tensor(std::array<std::size_t, 4> dims, float fill) : shape(dims) {
  const std::size_t count = element_count(dims);
  try {
    values.assign(count, fill);
  } catch (const std::bad_alloc&) {
    throw ResourceError("tensor: cannot allocate " + std::to_string(count) + " elements");
  } catch (const std::length_error&) {
    throw ResourceError("tensor: cannot allocate " + std::to_string(count) + " elements");
  }
}

TensorBatch gen_tensor_batch(std::size_t batch, std::size_t height, std::size_t width,
                             std::size_t channels, std::uint64_t seed, std::size_t threads) {
  if (batch < 1 || height < 1 || width < 1 || channels < 1)
    throw InvalidArgument("gen_tensor_batch: all dimensions must be at least 1");
  Tensor t({batch, height, width, channels});
  const CounterRng rng = CounterRng(seed).split("tensor.values");
  parallel_for(threads, t.size(), [&](Range r, std::size_t) {
    for (std::size_t i = r.begin; i < r.end; ++i) {
      // 24 high bits give an exact float in [0, 1).
      t.values[i] = static_cast<float>(rng.bits(i) >> 40) * 0x1.0p-24f;
    }
  });
  return t;
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_tensor: cannot open " + path.string());
  binio::write_magic(out, kTensorMagic, kTensorVersion);
  for (auto d : t.shape) binio::write_le<std::uint64_t>(out, d);
  for (float v : t.values) binio::write_le<float>(out, v);
  out.flush();
  if (!out) throw IoError("write_tensor: write failed for " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_tensor: cannot read " + path.string());
  binio::expect_magic(in, kTensorMagic, kTensorVersion);
  std::array<std::size_t, 4> dims{};
  for (auto& d : dims) d = binio::read_le<std::uint64_t>(in);
  Tensor t(dims);
  for (auto& v : t.values) v = binio::read_le<float>(in);
  return t;
}

}  // namespace dwarfs::datagen
