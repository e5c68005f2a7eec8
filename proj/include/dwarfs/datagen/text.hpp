#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dwarfs::datagen {

/// Synthetic line-oriented corpus whose word frequencies follow a Zipf law.
struct TextCorpus {
  std::filesystem::path path;
  std::uint64_t size_bytes = 0;
  std::uint64_t vocab_size = 100000;
  double zipf_s = 1.0;
  std::uint64_t seed = 0;
};

/// The word of a given frequency rank (0 = most frequent). Distinct ranks map
/// to distinct lowercase words: a, b, ..., z, aa, ab, ...
std::string vocab_word(std::uint64_t rank);

/// Inverse-CDF sampler over ranks [0, n) with P(rank r) proportional to
/// (r + 1)^-s. Holds one double per rank.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double s);

  /// Maps u in [0, 1) to a rank.
  std::uint64_t operator()(double u) const;
  double probability(std::uint64_t rank) const;
  std::uint64_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

/// Writes exactly `size_bytes` bytes of text to `path`, streaming through a
/// fixed buffer. The file always ends in a newline.
TextCorpus gen_text(std::uint64_t size_bytes, std::uint64_t vocab_size, double zipf_s,
                    std::uint64_t seed, const std::filesystem::path& path);

}  // namespace dwarfs::datagen
