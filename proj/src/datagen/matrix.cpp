#include "dwarfs/datagen/matrix.hpp"

#include <fstream>
#include <string>

#include "dwarfs/common/binio.hpp"
#include "dwarfs/common/error.hpp"
#include "dwarfs/common/parallel.hpp"
#include "dwarfs/common/rng.hpp"

namespace dwarfs::datagen {

Distribution parse_distribution(std::string_view name) {
  if (name == "uniform") return Distribution::uniform;
  if (name == "normal") return Distribution::normal;
  throw InvalidArgument("unknown distribution '" + std::string(name) + "'");
}

std::string_view to_string(Distribution d) {
  return d == Distribution::uniform ? "uniform" : "normal";
}

std::uint64_t MatrixData::zero_count() const {
  if (storage == MatrixStorage::dense) {
    std::uint64_t zeros = 0;
    for (double v : dense) zeros += (v == 0.0);
    return zeros;
  }
  std::uint64_t nonzeros = 0;
  for (const auto& e : entries) nonzeros += (e.value != 0.0);
  return n * n - nonzeros;
}

MatrixData MatrixData::to_dense() const {
  if (storage == MatrixStorage::dense) return *this;
  MatrixData d = *this;
  d.storage = MatrixStorage::dense;
  d.entries.clear();
  d.dense.assign(n * n, 0.0);
  for (const auto& e : entries) d.dense[e.row * n + e.col] = e.value;
  return d;
}

MatrixData gen_matrix(std::uint64_t n, double sparsity, Distribution distribution,
                      std::uint64_t seed, MatrixStorage storage, std::size_t threads) {
  if (n < 1) throw InvalidArgument("gen_matrix: n must be at least 1");
  if (!(sparsity >= 0.0 && sparsity <= 1.0))
    throw InvalidArgument("gen_matrix: sparsity must be in [0, 1]");

  const CounterRng root(seed);
  const CounterRng mask = root.split("matrix.mask");
  const CounterRng values = root.split("matrix.values");
  auto entry = [&](std::uint64_t k) -> double {
    if (mask.uniform(k) < sparsity) return 0.0;
    return distribution == Distribution::uniform ? values.uniform_nonzero(k) : values.normal(k);
  };

  MatrixData m;
  m.n = n;
  m.sparsity = sparsity;
  m.distribution = distribution;
  m.storage = storage;
  m.seed = seed;
  if (storage == MatrixStorage::dense) {
    m.dense.resize(n * n);
    parallel_for(threads, n, [&](Range r, std::size_t) {
      for (std::uint64_t i = r.begin; i < r.end; ++i)
        for (std::uint64_t j = 0; j < n; ++j) m.dense[i * n + j] = entry(i * n + j);
    });
  } else {
    std::vector<std::vector<CoordEntry>> parts(std::max<std::size_t>(1, threads));
    parallel_for(threads, n, [&](Range r, std::size_t w) {
      for (std::uint64_t i = r.begin; i < r.end; ++i)
        for (std::uint64_t j = 0; j < n; ++j)
          if (double v = entry(i * n + j); v != 0.0) parts[w].push_back({i, j, v});
    });
    for (auto& p : parts) m.entries.insert(m.entries.end(), p.begin(), p.end());
  }
  return m;
}

void write_matrix(const MatrixData& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_matrix: cannot open " + path.string());
  binio::write_magic(out, kMatrixMagic, kMatrixVersion);
  binio::write_le<std::uint64_t>(out, m.n);
  binio::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(m.storage));
  if (m.storage == MatrixStorage::dense) {
    for (double v : m.dense) binio::write_le<double>(out, v);
  } else {
    binio::write_le<std::uint64_t>(out, m.entries.size());
    for (const auto& e : m.entries) {
      binio::write_le<std::uint64_t>(out, e.row);
      binio::write_le<std::uint64_t>(out, e.col);
      binio::write_le<double>(out, e.value);
    }
  }
  out.flush();
  if (!out) throw IoError("write_matrix: write failed for " + path.string());
}

MatrixData read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_matrix: cannot read " + path.string());
  binio::expect_magic(in, kMatrixMagic, kMatrixVersion);
  MatrixData m;
  m.n = binio::read_le<std::uint64_t>(in);
  const auto tag = binio::read_le<std::uint8_t>(in);
  if (tag > 1) throw FormatError("read_matrix: unknown storage tag " + std::to_string(tag));
  m.storage = static_cast<MatrixStorage>(tag);
  if (m.storage == MatrixStorage::dense) {
    m.dense.resize(m.n * m.n);
    for (auto& v : m.dense) v = binio::read_le<double>(in);
  } else {
    m.entries.resize(binio::read_le<std::uint64_t>(in));
    for (auto& e : m.entries) {
      e.row = binio::read_le<std::uint64_t>(in);
      e.col = binio::read_le<std::uint64_t>(in);
      e.value = binio::read_le<double>(in);
      if (e.row >= m.n || e.col >= m.n) throw FormatError("read_matrix: coordinate out of range");
    }
  }
  const auto zeros = static_cast<double>(m.zero_count());
  m.sparsity = m.n ? zeros / static_cast<double>(m.n * m.n) : 0.0;
  return m;
}

}  // namespace dwarfs::datagen
