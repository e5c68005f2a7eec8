#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dwarfs/kernels/kind.hpp"

namespace dwarfs::kernels {

/// Kernel-specific knobs. Only the fields relevant to a kind are read.
struct KernelParams {
  std::string pattern = "the";       // grep
  double rate = 0.1;                 // sample
  std::uint64_t seed = 0;            // sample, generated weights
  std::uint64_t root = 0;            // bfs
  bool inverse = false;              // fft
  std::size_t window_h = 2;          // pooling
  std::size_t window_w = 2;
  std::size_t filter_h = 3;          // conv2d filter (kh, kw, c_out)
  std::size_t filter_w = 3;
  std::size_t filter_out = 16;
  std::size_t units = 64;            // fully_connected
  std::string other;                 // matmul / multiply second operand (dataset name)

  bool operator==(const KernelParams&) const = default;
};

/// One benchmark execution unit.
struct DwarfSpec {
  DwarfKind kind = DwarfKind::sort;
  std::string input;  // dataset name; empty inside a pipeline means "previous stage"
  std::size_t threads = 1;
  KernelParams params;

  bool operator==(const DwarfSpec&) const = default;
};

/// Throws InvalidArgument if `spec` cannot run on data of `family`.
void check_compatible(const DwarfSpec& spec, Family family);

}  // namespace dwarfs::kernels
