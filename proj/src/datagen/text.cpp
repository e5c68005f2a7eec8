#include "dwarfs/datagen/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dwarfs/common/error.hpp"
#include "dwarfs/common/rng.hpp"

namespace dwarfs::datagen {

std::string vocab_word(std::uint64_t rank) {
  // Bijective base-26.
  std::string word;
  std::uint64_t x = rank + 1;
  while (x > 0) {
    --x;
    word.push_back(static_cast<char>('a' + x % 26));
    x /= 26;
  }
  std::reverse(word.begin(), word.end());
  return word;
}

ZipfSampler::ZipfSampler(std::uint64_t n, double s) {
  if (n == 0) throw InvalidArgument("zipf: vocabulary must be non-empty");
  if (!(s > 0.0)) throw InvalidArgument("zipf: exponent must be positive");
  cdf_.resize(n);
  double total = 0.0;
  for (std::uint64_t r = 0; r < n; ++r) {
    total += std::pow(static_cast<double>(r + 1), -s);
    cdf_[r] = total;
  }
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::uint64_t ZipfSampler::operator()(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(it - cdf_.begin()), cdf_.size() - 1);
}

double ZipfSampler::probability(std::uint64_t rank) const {
  return rank == 0 ? cdf_[0] : cdf_[rank] - cdf_[rank - 1];
}

namespace {

constexpr std::size_t kBufferBytes = 1 << 20;
constexpr std::uint64_t kMinWordsPerLine = 8;
constexpr std::uint64_t kWordsPerLineSpread = 8;

}  // namespace

TextCorpus gen_text(std::uint64_t size_bytes, std::uint64_t vocab_size, double zipf_s,
                    std::uint64_t seed, const std::filesystem::path& path) {
  if (size_bytes == 0) throw InvalidArgument("gen_text: size_bytes must be at least 1");
  if (vocab_size == 0) throw InvalidArgument("gen_text: vocab_size must be at least 1");
  if (!(zipf_s > 0.0)) throw InvalidArgument("gen_text: zipf_s must be positive");

  const ZipfSampler sampler(vocab_size, zipf_s);
  std::vector<std::string> words(vocab_size);
  for (std::uint64_t r = 0; r < vocab_size; ++r) words[r] = vocab_word(r);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("gen_text: cannot open " + path.string() + " for writing");

  const CounterRng root(seed);
  const CounterRng line_rng = root.split("text.line");
  const CounterRng word_rng = root.split("text.word");

  std::string buffer;
  buffer.reserve(kBufferBytes + 64);
  // One byte is held back for the final newline.
  const std::uint64_t budget = size_bytes - 1;
  std::uint64_t written = 0;
  std::uint64_t token = 0;

  auto flush = [&] {
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    written += buffer.size();
    buffer.clear();
  };

  for (std::uint64_t line = 0;; ++line) {
    const std::uint64_t n_words = kMinWordsPerLine + line_rng.below(line, kWordsPerLineSpread);
    bool full = false;
    for (std::uint64_t j = 0; j < n_words; ++j, ++token) {
      const std::string& w = words[sampler(word_rng.uniform(token))];
      if (written + buffer.size() + w.size() + 1 > budget) {
        full = true;
        break;
      }
      buffer += w;
      buffer.push_back(j + 1 == n_words ? '\n' : ' ');
    }
    if (full) break;
    if (buffer.size() >= kBufferBytes) flush();
  }
  const std::uint64_t pad = size_bytes - written - buffer.size();
  buffer.append(pad - 1, ' ');
  buffer.push_back('\n');
  flush();
  out.flush();
  if (!out) throw IoError("gen_text: write failed for " + path.string());

  return TextCorpus{path, size_bytes, vocab_size, zipf_s, seed};
}

}  // namespace dwarfs::datagen
