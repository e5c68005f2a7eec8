#pragma once

#include <chrono>
#include <map>
#include <string>
#include <utility>

#include "dwarfs/kernels/digest.hpp"
#include "dwarfs/kernels/kind.hpp"

namespace dwarfs::kernels {

struct KernelResult {
  DwarfKind kind = DwarfKind::sort;
  double wall_time = 0.0;  // seconds
  Digest128 output_digest;
  std::map<std::string, double> output_summary;

  bool operator==(const KernelResult&) const = default;
};

/// Monotonic stopwatch in seconds.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace dwarfs::kernels
