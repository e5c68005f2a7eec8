#pragma once

#include <cstdint>
#include <vector>

#include "dwarfs/datagen/graph.hpp"
#include "dwarfs/kernels/digest.hpp"

namespace dwarfs::kernels {

struct BfsOutput {
  std::vector<std::int32_t> levels;  // -1 for unreached
  std::uint64_t visited = 0;
  std::int32_t depth = 0;  // deepest level reached
};

/// Graph dwarf: level-synchronous traversal. Each level's frontier is split
/// across workers; a vertex is claimed by whichever worker first swaps its
/// level from -1, so levels are independent of scheduling.
BfsOutput bfs(const datagen::GraphDataset& g, std::uint64_t root, std::size_t threads);

Digest128 digest(const BfsOutput& out);

}  // namespace dwarfs::kernels
