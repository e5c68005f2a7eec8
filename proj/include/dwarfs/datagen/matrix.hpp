#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace dwarfs::datagen {

enum class Distribution { uniform, normal };
enum class MatrixStorage : std::uint8_t { dense = 0, coordinate = 1 };

Distribution parse_distribution(std::string_view name);
std::string_view to_string(Distribution d);

struct CoordEntry {
  std::uint64_t row = 0;
  std::uint64_t col = 0;
  double value = 0.0;
  bool operator==(const CoordEntry&) const = default;
};

/// Square n x n matrix, dense row-major or coordinate list.
struct MatrixData {
  std::uint64_t n = 0;
  double sparsity = 0.0;
  Distribution distribution = Distribution::uniform;
  MatrixStorage storage = MatrixStorage::dense;
  std::uint64_t seed = 0;
  std::vector<double> dense;
  std::vector<CoordEntry> entries;

  std::uint64_t zero_count() const;
  MatrixData to_dense() const;
};

/// Each entry is zero with independent probability `sparsity`; nonzeros are
/// drawn from `distribution` (uniform on (0,1] or standard normal).
MatrixData gen_matrix(std::uint64_t n, double sparsity, Distribution distribution,
                      std::uint64_t seed, MatrixStorage storage = MatrixStorage::dense,
                      std::size_t threads = 1);

inline constexpr char kMatrixMagic[5] = "DDMX";
inline constexpr std::uint8_t kMatrixVersion = 1;

void write_matrix(const MatrixData& m, const std::filesystem::path& path);
MatrixData read_matrix(const std::filesystem::path& path);

}  // namespace dwarfs::datagen
