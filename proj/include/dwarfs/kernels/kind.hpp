#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace dwarfs::kernels {

enum class DwarfKind {
  sort,
  wordcount,
  grep,
  md5,
  matmul,
  sample,
  bfs,
  fft,
  conv2d,
  maxpool,
  avgpool,
  relu,
  sigmoid,
  tanh,
  fully_connected,
  multiply,
};

inline constexpr std::array<DwarfKind, 16> kAllKinds = {
    DwarfKind::sort,    DwarfKind::wordcount, DwarfKind::grep,    DwarfKind::md5,
    DwarfKind::matmul,  DwarfKind::sample,    DwarfKind::bfs,     DwarfKind::fft,
    DwarfKind::conv2d,  DwarfKind::maxpool,   DwarfKind::avgpool, DwarfKind::relu,
    DwarfKind::sigmoid, DwarfKind::tanh,      DwarfKind::fully_connected, DwarfKind::multiply,
};

/// Dataset families flowing between dwarfs.
enum class Family {
  text,
  sequence,
  graph,
  matrix,
  tensor,
  // Terminal outputs that no dwarf consumes.
  word_counts,
  digest,
  levels,
  spectrum,
};

std::string_view to_string(DwarfKind kind);
std::optional<DwarfKind> parse_kind(std::string_view name);
std::string_view to_string(Family family);
std::optional<Family> parse_family(std::string_view name);

/// Taxonomy label (Matrix, Sampling, Logic, Transform, Set, Graph, Sort,
/// Statistics). Metadata only: sigmoid and tanh carry "Matrix" even though
/// they run elementwise.
std::string_view dwarf_class(DwarfKind kind);

Family input_family(DwarfKind kind);
Family output_family(DwarfKind kind);

}  // namespace dwarfs::kernels
