#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dwarfs/kernels/result.hpp"

// Text dwarfs: sort, wordcount, grep and sample. A line is the bytes up to a
// '\n'; a final line without a terminator still counts, and a trailing '\n'
// does not open an empty line.
namespace dwarfs::kernels {

/// Reads a text file in blocks of whole lines, holding at most about
/// `block_bytes` plus one line in memory. Every returned block ends in '\n'.
class LineBlockReader {
 public:
  LineBlockReader(const std::filesystem::path& path, std::size_t block_bytes);
  std::optional<std::string> next();

 private:
  std::ifstream in_;
  std::size_t block_bytes_;
  std::string carry_;
  bool eof_ = false;
};

/// Views of each line in a block that ends in '\n' (terminators excluded).
std::vector<std::string_view> split_lines(std::string_view block);

inline constexpr std::size_t kDefaultBlockBytes = std::size_t{64} << 20;

// --- Sort ---

/// Bytewise ascending sort of lines: per-worker std::sort, then pairwise merges.
void sort_lines(std::vector<std::string_view>& lines, std::size_t threads);

struct SortOptions {
  std::size_t threads = 1;
  /// Upper bound on in-memory run size; larger inputs spill sorted runs to
  /// disk and k-way merge them.
  std::uint64_t memory_budget_bytes = std::uint64_t{256} << 20;
  std::filesystem::path output;
  /// Spill directory; defaults to the output's directory.
  std::filesystem::path temp_dir;
};

/// Sort dwarf (external merge sort). Summary: lines, runs.
KernelResult sort(const std::filesystem::path& corpus, const SortOptions& options);

// --- Wordcount ---

struct WordCounts {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t tokens = 0;
};

/// Counts ASCII-whitespace separated words.
WordCounts count_words(std::string_view text, std::size_t threads);
void merge_counts(WordCounts& into, WordCounts&& from);
Digest128 digest_counts(const WordCounts& counts);

/// Statistics dwarf. Summary: tokens, distinct.
KernelResult wordcount(const std::filesystem::path& corpus, std::size_t threads,
                       WordCounts* counts_out = nullptr,
                       std::size_t block_bytes = kDefaultBlockBytes);

// --- Grep ---

/// Indices (within `lines`) of lines containing `pattern` as a substring.
std::vector<std::size_t> grep_lines(const std::vector<std::string_view>& lines,
                                    std::string_view pattern, std::size_t threads);

/// Set dwarf, fixed-string matching. Matching lines are digested in input
/// order and, if `output` is non-empty, written there. Summary: matches, lines.
KernelResult grep(const std::filesystem::path& corpus, std::string_view pattern,
                  std::size_t threads, const std::filesystem::path& output = {},
                  std::size_t block_bytes = kDefaultBlockBytes);

// --- Sample ---

/// Whether the line with global index `index` is kept. Decided by a hash of
/// (seed, index) alone.
bool sample_keeps(std::uint64_t seed, std::uint64_t index, double rate);

/// Sampling dwarf. Summary: kept, lines.
KernelResult sample(const std::filesystem::path& corpus, double rate, std::uint64_t seed,
                    std::size_t threads, const std::filesystem::path& output = {},
                    std::size_t block_bytes = kDefaultBlockBytes);

}  // namespace dwarfs::kernels
