#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dwarfs {

/// Half-open index range assigned to one worker.
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Contiguous static partition of [0, n) into `parts` ranges.
inline Range partition(std::size_t n, std::size_t parts, std::size_t index) {
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  const std::size_t begin = index * base + std::min(index, extra);
  return {begin, begin + base + (index < extra ? 1 : 0)};
}

/// Runs fn(range, worker) on `threads` fresh workers over a static partition
/// of [0, n). The calling thread runs worker 0. The first exception thrown by
/// any worker is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t threads, std::size_t n, Fn&& fn) {
  threads = std::max<std::size_t>(1, threads);
  if (threads == 1 || n <= 1) {
    fn(Range{0, n}, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads - 1);
    for (std::size_t w = 1; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          fn(partition(n, threads, w), w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    try {
      fn(partition(n, threads, 0), std::size_t{0});
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dwarfs
