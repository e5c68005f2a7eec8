#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace dwarfs::datagen {

/// Undirected graph in compressed-sparse-row form; every edge is stored in
/// both endpoint rows.
struct GraphDataset {
  std::uint32_t log2_vertices = 0;
  std::uint64_t edge_factor = 0;
  std::uint64_t seed = 0;
  /// Endpoint pairs drawn before self-loop removal and deduplication.
  std::uint64_t generated_edges = 0;
  std::vector<std::uint64_t> row_offsets;
  std::vector<std::uint32_t> column_indices;

  std::uint64_t vertex_count() const { return row_offsets.empty() ? 0 : row_offsets.size() - 1; }
  std::span<const std::uint32_t> neighbors(std::uint64_t v) const {
    return {column_indices.data() + row_offsets[v], column_indices.data() + row_offsets[v + 1]};
  }
};

/// Uniform random endpoint pairs with a budget of edge_factor * 2^log2_vertices
/// edges; self-loops removed, duplicates merged, rows sorted.
GraphDataset gen_graph(std::uint32_t log2_vertices, std::uint64_t edge_factor, std::uint64_t seed,
                       std::size_t threads = 1);

/// Symmetric CSR from an explicit undirected edge list.
GraphDataset graph_from_edges(std::uint64_t vertex_count,
                              std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

inline constexpr char kGraphMagic[5] = "DDGR";
inline constexpr std::uint8_t kGraphVersion = 1;

void write_graph(const GraphDataset& g, const std::filesystem::path& path);
GraphDataset read_graph(const std::filesystem::path& path);

}  // namespace dwarfs::datagen
