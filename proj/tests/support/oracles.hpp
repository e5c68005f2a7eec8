#pragma once

// Independent reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace dwarfs::oracle {

/// Splits on '\n' with the library's line convention.
inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// O(n^4) 2-D DFT with exactly reduced twiddle angles.
inline std::vector<std::complex<double>> naive_dft2d(const std::vector<std::complex<double>>& x,
                                                     std::size_t n) {
  std::vector<std::complex<double>> out(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      std::complex<double> sum = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t p = 0; p < n; ++p) {
          const std::size_t phase = (k * m + l * p) % n;
          const double angle = -2.0 * std::numbers::pi * double(phase) / double(n);
          sum += x[m * n + p] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
      out[k * n + l] = sum;
    }
  return out;
}

/// Queue-based sequential BFS over an adjacency list.
inline std::vector<std::int32_t> sequential_bfs(const std::vector<std::vector<std::uint32_t>>& adj,
                                                std::size_t root) {
  std::vector<std::int32_t> level(adj.size(), -1);
  std::deque<std::size_t> q{root};
  level[root] = 0;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (auto v : adj[u])
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push_back(v);
      }
  }
  return level;
}

/// Triple loop, k innermost.
template <class T>
std::vector<T> triple_loop(const std::vector<T>& a, const std::vector<T>& b, std::size_t rows,
                           std::size_t inner, std::size_t cols) {
  std::vector<T> c(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      T sum = 0;
      for (std::size_t k = 0; k < inner; ++k) sum += a[i * inner + k] * b[k * cols + j];
      c[i * cols + j] = sum;
    }
  return c;
}

/// Direct 7-loop convolution (NHWC input, (kh,kw,cin,cout) filter).
inline std::vector<float> direct_conv(const std::vector<float>& x, std::size_t B, std::size_t H, std::size_t W,
                                      std::size_t C, const std::vector<float>& f, std::size_t KH,
                                      std::size_t KW, std::size_t O) {
  const std::size_t OH = H - KH + 1, OW = W - KW + 1;
  std::vector<float> out(B * OH * OW * O);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < OH; ++i)
      for (std::size_t j = 0; j < OW; ++j)
        for (std::size_t o = 0; o < O; ++o) {
          float sum = 0.0f;
          for (std::size_t u = 0; u < KH; ++u)
            for (std::size_t v = 0; v < KW; ++v)
              for (std::size_t c = 0; c < C; ++c)
                sum += x[((b * H + i + u) * W + j + v) * C + c] * f[((u * KW + v) * C + c) * O + o];
          out[((b * OH + i) * OW + j) * O + o] = sum;
        }
  return out;
}

/// Direct pooling loop; avg sums the window row by row then divides.
inline std::vector<float> direct_pool(const std::vector<float>& x, std::size_t B, std::size_t H, std::size_t W,
                                      std::size_t C, std::size_t PH, std::size_t PW, bool max) {
  const std::size_t OH = H / PH, OW = W / PW;
  std::vector<float> out(B * OH * OW * C);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < OH; ++i)
      for (std::size_t j = 0; j < OW; ++j)
        for (std::size_t c = 0; c < C; ++c) {
          float acc = max ? -std::numeric_limits<float>::infinity() : 0.0f;
          for (std::size_t u = 0; u < PH; ++u)
            for (std::size_t v = 0; v < PW; ++v) {
              const float val = x[((b * H + i * PH + u) * W + j * PW + v) * C + c];
              acc = max ? std::max(acc, val) : acc + val;
            }
          out[((b * OH + i) * OW + j) * C + c] = max ? acc : acc / float(PH * PW);
        }
  return out;
}

/// One agglomerative merge: clusters a < b (scipy-style ids), distance, size.
struct OracleMerge {
  std::size_t a, b;
  double distance;
  std::size_t size;
};

/// Brute-force average linkage: every step recomputes every inter-cluster
/// distance as the mean of all cross pairs. Ties go to the pair with the
/// lowest (min leaf, other min leaf).
inline std::vector<OracleMerge> brute_force_average_linkage(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t d = 0; d < pts[i].size(); ++d) s += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
    return std::sqrt(s);
  };
  struct Cluster {
    std::size_t id;
    std::vector<std::size_t> leaves;
  };
  std::vector<Cluster> live;
  for (std::size_t i = 0; i < n; ++i) live.push_back({i, {i}});
  std::vector<OracleMerge> merges;
  std::size_t next_id = n;
  while (live.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    std::pair<std::size_t, std::size_t> best_key{SIZE_MAX, SIZE_MAX};
    for (std::size_t i = 0; i < live.size(); ++i)
      for (std::size_t j = i + 1; j < live.size(); ++j) {
        double s = 0;
        for (auto p : live[i].leaves)
          for (auto q : live[j].leaves) s += dist(p, q);
        s /= double(live[i].leaves.size() * live[j].leaves.size());
        const std::size_t li = *std::min_element(live[i].leaves.begin(), live[i].leaves.end());
        const std::size_t lj = *std::min_element(live[j].leaves.begin(), live[j].leaves.end());
        const std::pair<std::size_t, std::size_t> key{std::min(li, lj), std::max(li, lj)};
        if (s < best || (s == best && key < best_key)) {
          best = s;
          bi = i;
          bj = j;
          best_key = key;
        }
      }
    Cluster merged{next_id++, live[bi].leaves};
    merged.leaves.insert(merged.leaves.end(), live[bj].leaves.begin(), live[bj].leaves.end());
    merges.push_back({std::min(live[bi].id, live[bj].id), std::max(live[bi].id, live[bj].id), best,
                      merged.leaves.size()});
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(bj));
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(bi));
    live.push_back(std::move(merged));
  }
  return merges;
}

}  // namespace dwarfs::oracle
