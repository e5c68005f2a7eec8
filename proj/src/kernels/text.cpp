#include "dwarfs/kernels/text.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <queue>

#include <unistd.h>

#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"
#include "dwarfs/common/rng.hpp"
#include "dwarfs/kernels/md5.hpp"

namespace dwarfs::kernels {

LineBlockReader::LineBlockReader(const std::filesystem::path& path, std::size_t block_bytes)
    : in_(path, std::ios::binary), block_bytes_(std::max<std::size_t>(block_bytes, 1)) {
  if (!in_) throw IoError("cannot read " + path.string());
}

std::optional<std::string> LineBlockReader::next() {
  std::string block = std::move(carry_);
  carry_.clear();
  while (!eof_) {
    const std::size_t old = block.size();
    block.resize(old + block_bytes_);
    in_.read(block.data() + old, static_cast<std::streamsize>(block_bytes_));
    block.resize(old + static_cast<std::size_t>(in_.gcount()));
    if (in_.bad()) throw IoError("read failed");
    if (in_.eof()) eof_ = true;
    const auto last = block.rfind('\n');
    if (last != std::string::npos) {
      if (last + 1 < block.size()) carry_ = block.substr(last + 1);
      block.resize(last + 1);
      return block;
    }
  }
  if (block.empty()) return std::nullopt;
  if (block.back() != '\n') block.push_back('\n');
  return block;
}

std::vector<std::string_view> split_lines(std::string_view block) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < block.size()) {
    auto nl = block.find('\n', start);
    if (nl == std::string_view::npos) nl = block.size();
    lines.push_back(block.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

namespace {

/// Optional file sink that also digests everything written.
class DigestingSink {
 public:
  explicit DigestingSink(const std::filesystem::path& path) {
    if (!path.empty()) {
      out_.open(path, std::ios::binary | std::ios::trunc);
      if (!out_) throw IoError("cannot write " + path.string());
    }
  }
  void line(std::string_view s) {
    md5_.update(s);
    md5_.update("\n");
    if (out_.is_open()) {
      out_.write(s.data(), static_cast<std::streamsize>(s.size()));
      out_.put('\n');
    }
  }
  Digest128 finish() {
    if (out_.is_open()) {
      out_.flush();
      if (!out_) throw IoError("write failed");
      out_.close();
    }
    return md5_.finish();
  }

 private:
  std::ofstream out_;
  Md5 md5_;
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

}  // namespace

// --- Sort ---

void sort_lines(std::vector<std::string_view>& lines, std::size_t threads) {
  threads = std::max<std::size_t>(1, std::min(threads, lines.size()));
  std::vector<Range> runs(threads);
  for (std::size_t w = 0; w < threads; ++w) runs[w] = partition(lines.size(), threads, w);
  parallel_for(threads, threads, [&](Range r, std::size_t) {
    for (std::size_t w = r.begin; w < r.end; ++w)
      std::sort(lines.begin() + runs[w].begin, lines.begin() + runs[w].end);
  });
  while (runs.size() > 1) {
    std::vector<Range> merged((runs.size() + 1) / 2);
    parallel_for(threads, merged.size(), [&](Range r, std::size_t) {
      for (std::size_t p = r.begin; p < r.end; ++p) {
        if (2 * p + 1 >= runs.size()) {
          merged[p] = runs[2 * p];
          continue;
        }
        const Range a = runs[2 * p], b = runs[2 * p + 1];
        std::inplace_merge(lines.begin() + a.begin, lines.begin() + a.end, lines.begin() + b.end);
        merged[p] = {a.begin, b.end};
      }
    });
    runs = std::move(merged);
  }
}

KernelResult sort(const std::filesystem::path& corpus, const SortOptions& options) {
  Stopwatch clock;
  const std::uint64_t budget = std::max<std::uint64_t>(options.memory_budget_bytes, 4096);
  // A run block and the read-ahead block are held at once, plus line views.
  LineBlockReader reader(corpus, static_cast<std::size_t>(budget / 4));
  const std::filesystem::path spill_dir =
      !options.temp_dir.empty() ? options.temp_dir
      : !options.output.empty() ? options.output.parent_path()
                                : std::filesystem::temp_directory_path();

  DigestingSink sink(options.output);
  std::vector<std::filesystem::path> runs;
  std::uint64_t total_lines = 0;
  static std::atomic<std::uint64_t> spill_serial{0};

  auto block = reader.next();
  while (block) {
    auto following = reader.next();
    auto lines = split_lines(*block);
    total_lines += lines.size();
    sort_lines(lines, options.threads);
    if (runs.empty() && !following) {
      for (auto l : lines) sink.line(l);
    } else {
      auto run_path = spill_dir / ("sort-run-" + std::to_string(::getpid()) + "-" +
                                   std::to_string(spill_serial++) + ".txt");
      std::ofstream run(run_path, std::ios::binary | std::ios::trunc);
      if (!run) throw IoError("sort: cannot write spill file " + run_path.string());
      for (auto l : lines) {
        run.write(l.data(), static_cast<std::streamsize>(l.size()));
        run.put('\n');
      }
      run.close();
      if (!run) throw IoError("sort: spill write failed");
      runs.push_back(std::move(run_path));
    }
    block = std::move(following);
  }

  if (!runs.empty()) {
    struct Head {
      std::string line;
      std::size_t run;
    };
    auto greater = [](const Head& a, const Head& b) {
      return a.line != b.line ? a.line > b.line : a.run > b.run;
    };
    std::priority_queue<Head, std::vector<Head>, decltype(greater)> heap(greater);
    std::vector<std::ifstream> inputs;
    inputs.reserve(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
      inputs.emplace_back(runs[r], std::ios::binary);
      std::string line;
      if (std::getline(inputs[r], line)) heap.push({std::move(line), r});
    }
    while (!heap.empty()) {
      Head h = heap.top();
      heap.pop();
      sink.line(h.line);
      if (std::getline(inputs[h.run], h.line)) heap.push(std::move(h));
    }
    inputs.clear();
    for (const auto& r : runs) std::filesystem::remove(r);
  }

  const Digest128 d = sink.finish();
  return KernelResult{DwarfKind::sort, clock.seconds(), d,
                      {{"lines", double(total_lines)}, {"runs", double(std::max<std::size_t>(runs.size(), 1))}}};
}

// --- Wordcount ---

WordCounts count_words(std::string_view text, std::size_t threads) {
  threads = std::max<std::size_t>(1, threads);
  // Chunk boundaries are pushed forward to the next whitespace byte so no
  // word straddles two workers.
  std::vector<std::size_t> cuts(threads + 1, text.size());
  cuts[0] = 0;
  for (std::size_t w = 1; w < threads; ++w) {
    std::size_t c = std::max(cuts[w - 1], partition(text.size(), threads, w).begin);
    while (c < text.size() && !is_space(text[c])) ++c;
    cuts[w] = c;
  }
  std::vector<std::unordered_map<std::string_view, std::uint64_t>> local(threads);
  std::vector<std::uint64_t> tokens(threads, 0);
  parallel_for(threads, threads, [&](Range r, std::size_t) {
    for (std::size_t w = r.begin; w < r.end; ++w) {
      std::size_t i = cuts[w];
      const std::size_t end = cuts[w + 1];
      while (i < end) {
        while (i < end && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < end && !is_space(text[i])) ++i;
        if (i > start) {
          ++local[w][text.substr(start, i - start)];
          ++tokens[w];
        }
      }
    }
  });
  WordCounts out;
  for (std::size_t w = 0; w < threads; ++w) {
    out.tokens += tokens[w];
    for (const auto& [word, n] : local[w]) out.counts[std::string(word)] += n;
  }
  return out;
}

void merge_counts(WordCounts& into, WordCounts&& from) {
  into.tokens += from.tokens;
  if (into.counts.empty()) {
    into.counts = std::move(from.counts);
    return;
  }
  for (auto& [word, n] : from.counts) into.counts[word] += n;
}

Digest128 digest_counts(const WordCounts& counts) {
  std::map<std::string_view, std::uint64_t> ordered;
  for (const auto& [w, n] : counts.counts) ordered.emplace(w, n);
  Md5 md5;
  for (const auto& [w, n] : ordered) {
    md5.update(w);
    md5.update("\t");
    md5.update(std::to_string(n));
    md5.update("\n");
  }
  return md5.finish();
}

KernelResult wordcount(const std::filesystem::path& corpus, std::size_t threads, WordCounts* counts_out,
                       std::size_t block_bytes) {
  Stopwatch clock;
  LineBlockReader reader(corpus, block_bytes);
  WordCounts total;
  while (auto block = reader.next()) merge_counts(total, count_words(*block, threads));
  const Digest128 d = digest_counts(total);
  KernelResult result{DwarfKind::wordcount, clock.seconds(), d,
                      {{"tokens", double(total.tokens)}, {"distinct", double(total.counts.size())}}};
  if (counts_out) *counts_out = std::move(total);
  return result;
}

// --- Grep ---

std::vector<std::size_t> grep_lines(const std::vector<std::string_view>& lines,
                                    std::string_view pattern, std::size_t threads) {
  if (pattern.empty()) throw InvalidArgument("grep: pattern must be non-empty");
  std::vector<std::vector<std::size_t>> local(std::max<std::size_t>(1, threads));
  parallel_for(threads, lines.size(), [&](Range r, std::size_t w) {
    for (std::size_t i = r.begin; i < r.end; ++i)
      if (lines[i].find(pattern) != std::string_view::npos) local[w].push_back(i);
  });
  std::vector<std::size_t> out;
  for (auto& l : local) out.insert(out.end(), l.begin(), l.end());
  return out;
}

KernelResult grep(const std::filesystem::path& corpus, std::string_view pattern, std::size_t threads,
                  const std::filesystem::path& output, std::size_t block_bytes) {
  if (pattern.empty()) throw InvalidArgument("grep: pattern must be non-empty");
  Stopwatch clock;
  LineBlockReader reader(corpus, block_bytes);
  DigestingSink sink(output);
  std::uint64_t matches = 0, total = 0;
  while (auto block = reader.next()) {
    const auto lines = split_lines(*block);
    total += lines.size();
    for (auto i : grep_lines(lines, pattern, threads)) {
      sink.line(lines[i]);
      ++matches;
    }
  }
  const Digest128 d = sink.finish();
  return KernelResult{DwarfKind::grep, clock.seconds(), d,
                      {{"matches", double(matches)}, {"lines", double(total)}}};
}

// --- Sample ---

bool sample_keeps(std::uint64_t seed, std::uint64_t index, double rate) {
  return CounterRng(seed).split("sample.keep").uniform(index) < rate;
}

KernelResult sample(const std::filesystem::path& corpus, double rate, std::uint64_t seed,
                    std::size_t threads, const std::filesystem::path& output, std::size_t block_bytes) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument("sample: rate must be in [0, 1]");
  Stopwatch clock;
  LineBlockReader reader(corpus, block_bytes);
  DigestingSink sink(output);
  std::uint64_t base = 0, kept = 0;
  while (auto block = reader.next()) {
    const auto lines = split_lines(*block);
    std::vector<std::vector<std::size_t>> local(std::max<std::size_t>(1, threads));
    parallel_for(threads, lines.size(), [&](Range r, std::size_t w) {
      for (std::size_t i = r.begin; i < r.end; ++i)
        if (sample_keeps(seed, base + i, rate)) local[w].push_back(i);
    });
    for (const auto& l : local)
      for (auto i : l) {
        sink.line(lines[i]);
        ++kept;
      }
    base += lines.size();
  }
  const Digest128 d = sink.finish();
  return KernelResult{DwarfKind::sample, clock.seconds(), d,
                      {{"kept", double(kept)}, {"lines", double(base)}}};
}

}  // namespace dwarfs::kernels
