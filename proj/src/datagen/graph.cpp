#include "dwarfs/datagen/graph.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>

#include "dwarfs/common/binio.hpp"
#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"
#include "dwarfs/common/rng.hpp"

namespace dwarfs::datagen {

namespace {

// Sorts and deduplicates every row in place, then compacts the column array.
void canonicalize_rows(GraphDataset& g, std::size_t threads) {
  const std::uint64_t n = g.vertex_count();
  std::vector<std::uint64_t> unique_degree(n);
  parallel_for(threads, n, [&](Range r, std::size_t) {
    for (std::uint64_t v = r.begin; v < r.end; ++v) {
      auto first = g.column_indices.begin() + static_cast<std::ptrdiff_t>(g.row_offsets[v]);
      auto last = g.column_indices.begin() + static_cast<std::ptrdiff_t>(g.row_offsets[v + 1]);
      std::sort(first, last);
      unique_degree[v] = static_cast<std::uint64_t>(std::unique(first, last) - first);
    }
  });
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (std::uint64_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + unique_degree[v];
  std::vector<std::uint32_t> columns(offsets[n]);
  parallel_for(threads, n, [&](Range r, std::size_t) {
    for (std::uint64_t v = r.begin; v < r.end; ++v)
      std::copy_n(g.column_indices.begin() + static_cast<std::ptrdiff_t>(g.row_offsets[v]),
                  unique_degree[v], columns.begin() + static_cast<std::ptrdiff_t>(offsets[v]));
  });
  g.row_offsets = std::move(offsets);
  g.column_indices = std::move(columns);
}

}  // namespace

GraphDataset gen_graph(std::uint32_t log2_vertices, std::uint64_t edge_factor, std::uint64_t seed,
                       std::size_t threads) {
  if (log2_vertices < 1 || log2_vertices > 30)
    throw InvalidArgument("gen_graph: log2_vertices must be in [1, 30]");
  if (edge_factor < 1) throw InvalidArgument("gen_graph: edge_factor must be at least 1");

  const std::uint64_t n = std::uint64_t{1} << log2_vertices;
  const std::uint64_t m = edge_factor * n;
  const int shift = 64 - static_cast<int>(log2_vertices);
  const CounterRng rng = CounterRng(seed).split("graph.edges");
  auto endpoints = [&](std::uint64_t e) {
    return std::pair<std::uint32_t, std::uint32_t>(static_cast<std::uint32_t>(rng.bits(2 * e) >> shift),
                                                   static_cast<std::uint32_t>(rng.bits(2 * e + 1) >> shift));
  };

  GraphDataset g;
  g.log2_vertices = log2_vertices;
  g.edge_factor = edge_factor;
  g.seed = seed;
  g.generated_edges = m;

  // Pass 1: degrees. Pass 2: scatter. Edges are regenerated from the counter
  // stream rather than stored.
  std::vector<std::uint64_t> degree(n, 0);
  parallel_for(threads, m, [&](Range r, std::size_t) {
    for (std::uint64_t e = r.begin; e < r.end; ++e) {
      const auto [u, v] = endpoints(e);
      if (u == v) continue;
      std::atomic_ref<std::uint64_t>(degree[u]).fetch_add(1, std::memory_order_relaxed);
      std::atomic_ref<std::uint64_t>(degree[v]).fetch_add(1, std::memory_order_relaxed);
    }
  });
  g.row_offsets.assign(n + 1, 0);
  for (std::uint64_t v = 0; v < n; ++v) g.row_offsets[v + 1] = g.row_offsets[v] + degree[v];
  g.column_indices.resize(g.row_offsets[n]);

  std::vector<std::uint64_t> cursor(g.row_offsets.begin(), g.row_offsets.end() - 1);
  parallel_for(threads, m, [&](Range r, std::size_t) {
    for (std::uint64_t e = r.begin; e < r.end; ++e) {
      const auto [u, v] = endpoints(e);
      if (u == v) continue;
      g.column_indices[std::atomic_ref<std::uint64_t>(cursor[u]).fetch_add(1, std::memory_order_relaxed)] = v;
      g.column_indices[std::atomic_ref<std::uint64_t>(cursor[v]).fetch_add(1, std::memory_order_relaxed)] = u;
    }
  });
  canonicalize_rows(g, threads);
  return g;
}

GraphDataset graph_from_edges(std::uint64_t vertex_count,
                              std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  GraphDataset g;
  g.generated_edges = edges.size();
  g.row_offsets.assign(vertex_count + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= vertex_count || v >= vertex_count)
      throw InvalidArgument("graph_from_edges: endpoint out of range");
    if (u == v) continue;
    ++g.row_offsets[u + 1];
    ++g.row_offsets[v + 1];
  }
  for (std::uint64_t v = 0; v < vertex_count; ++v) g.row_offsets[v + 1] += g.row_offsets[v];
  g.column_indices.resize(g.row_offsets[vertex_count]);
  std::vector<std::uint64_t> cursor(g.row_offsets.begin(), g.row_offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    g.column_indices[cursor[u]++] = v;
    g.column_indices[cursor[v]++] = u;
  }
  canonicalize_rows(g, 1);
  return g;
}

void write_graph(const GraphDataset& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_graph: cannot open " + path.string());
  binio::write_magic(out, kGraphMagic, kGraphVersion);
  binio::write_le<std::uint64_t>(out, g.vertex_count());
  for (auto off : g.row_offsets) binio::write_le<std::uint64_t>(out, off);
  binio::write_le<std::uint64_t>(out, g.column_indices.size());
  for (auto c : g.column_indices) binio::write_le<std::uint32_t>(out, c);
  out.flush();
  if (!out) throw IoError("write_graph: write failed for " + path.string());
}

GraphDataset read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_graph: cannot read " + path.string());
  binio::expect_magic(in, kGraphMagic, kGraphVersion);
  GraphDataset g;
  const auto n = binio::read_le<std::uint64_t>(in);
  g.row_offsets.resize(n + 1);
  for (auto& off : g.row_offsets) off = binio::read_le<std::uint64_t>(in);
  const auto m = binio::read_le<std::uint64_t>(in);
  if (g.row_offsets.back() != m) throw FormatError("read_graph: final offset does not match edge count");
  g.column_indices.resize(m);
  for (auto& c : g.column_indices) {
    c = binio::read_le<std::uint32_t>(in);
    if (c >= n) throw FormatError("read_graph: column index out of range");
  }
  for (std::uint64_t v = 0; v < n; ++v)
    if (g.row_offsets[v] > g.row_offsets[v + 1]) throw FormatError("read_graph: offsets decrease");
  if (n > 0 && (n & (n - 1)) == 0) g.log2_vertices = static_cast<std::uint32_t>(std::countr_zero(n));
  g.generated_edges = m / 2;
  return g;
}

}  // namespace dwarfs::datagen
