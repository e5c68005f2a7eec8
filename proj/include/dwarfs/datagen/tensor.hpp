#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace dwarfs::datagen {

/// Dense 4-axis f32 array, row-major. Input batches use (batch, height,
/// width, channels); convolution filters use (kh, kw, c_in, c_out).
struct Tensor {
  std::array<std::size_t, 4> shape{};
  std::vector<float> values;

  Tensor() = default;
  explicit Tensor(std::array<std::size_t, 4> dims, float fill = 0.0f);

  std::size_t size() const { return values.size(); }
  std::size_t batch() const { return shape[0]; }
  std::size_t height() const { return shape[1]; }
  std::size_t width() const { return shape[2]; }
  std::size_t channels() const { return shape[3]; }

  std::size_t index(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return ((a * shape[1] + b) * shape[2] + c) * shape[3] + d;
  }
  float& at(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return values[index(a, b, c, d)];
  }
  float at(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return values[index(a, b, c, d)];
  }

  bool operator==(const Tensor&) const = default;
};

using TensorBatch = Tensor;

/// Values uniform in [0, 1). Throws ResourceError if the array cannot be
/// allocated.
TensorBatch gen_tensor_batch(std::size_t batch, std::size_t height, std::size_t width,
                             std::size_t channels, std::uint64_t seed, std::size_t threads = 1);

inline constexpr char kTensorMagic[5] = "DDTN";
inline constexpr std::uint8_t kTensorVersion = 1;

void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace dwarfs::datagen
