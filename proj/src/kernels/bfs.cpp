#include "dwarfs/kernels/bfs.hpp"

#include <atomic>

#include "digest_util.hpp"
#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"

namespace dwarfs::kernels {

BfsOutput bfs(const datagen::GraphDataset& g, std::uint64_t root, std::size_t threads) {
  const std::uint64_t n = g.vertex_count();
  if (root >= n)
    throw InvalidArgument("bfs: root " + std::to_string(root) + " out of range for " + std::to_string(n) +
                          " vertices");
  threads = std::max<std::size_t>(1, threads);

  BfsOutput out;
  out.levels.assign(n, -1);
  out.levels[root] = 0;
  std::vector<std::uint32_t> frontier{static_cast<std::uint32_t>(root)};
  std::vector<std::vector<std::uint32_t>> next(threads);
  std::uint64_t visited = 1;

  for (std::int32_t level = 0; !frontier.empty(); ++level) {
    out.depth = level;
    for (auto& local : next) local.clear();
    parallel_for(threads, frontier.size(), [&](Range r, std::size_t w) {
      auto& local = next[w];
      for (std::size_t i = r.begin; i < r.end; ++i) {
        for (std::uint32_t v : g.neighbors(frontier[i])) {
          std::atomic_ref<std::int32_t> slot(out.levels[v]);
          if (slot.load(std::memory_order_relaxed) != -1) continue;
          std::int32_t expected = -1;
          if (slot.compare_exchange_strong(expected, level + 1, std::memory_order_relaxed))
            local.push_back(v);
        }
      }
    });
    frontier.clear();
    for (auto& local : next) frontier.insert(frontier.end(), local.begin(), local.end());
    visited += frontier.size();
  }
  out.visited = visited;
  return out;
}

Digest128 digest(const BfsOutput& out) {
  return detail::digest_array<std::int32_t>({out.levels.size()}, out.levels);
}

}  // namespace dwarfs::kernels
