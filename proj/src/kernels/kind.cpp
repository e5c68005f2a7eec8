#include "dwarfs/kernels/kind.hpp"

#include <string>

#include "dwarfs/common/error.hpp"
#include "dwarfs/kernels/digest.hpp"
#include "dwarfs/kernels/spec.hpp"

namespace dwarfs::kernels {

namespace {

struct KindInfo {
  DwarfKind kind;
  std::string_view name;
  std::string_view dwarf_class;
  Family in;
  Family out;
};

constexpr KindInfo kKinds[] = {
    {DwarfKind::sort, "sort", "Sort", Family::text, Family::text},
    {DwarfKind::wordcount, "wordcount", "Statistics", Family::text, Family::word_counts},
    {DwarfKind::grep, "grep", "Set", Family::text, Family::text},
    {DwarfKind::md5, "md5", "Logic", Family::sequence, Family::digest},
    {DwarfKind::matmul, "matmul", "Matrix", Family::matrix, Family::matrix},
    {DwarfKind::sample, "sample", "Sampling", Family::text, Family::text},
    {DwarfKind::bfs, "bfs", "Graph", Family::graph, Family::levels},
    {DwarfKind::fft, "fft", "Transform", Family::matrix, Family::spectrum},
    {DwarfKind::conv2d, "conv2d", "Transform", Family::tensor, Family::tensor},
    {DwarfKind::maxpool, "maxpool", "Sampling", Family::tensor, Family::tensor},
    {DwarfKind::avgpool, "avgpool", "Sampling", Family::tensor, Family::tensor},
    {DwarfKind::relu, "relu", "Logic", Family::tensor, Family::tensor},
    {DwarfKind::sigmoid, "sigmoid", "Matrix", Family::tensor, Family::tensor},
    {DwarfKind::tanh, "tanh", "Matrix", Family::tensor, Family::tensor},
    {DwarfKind::fully_connected, "fully_connected", "Matrix", Family::tensor, Family::tensor},
    {DwarfKind::multiply, "multiply", "Matrix", Family::tensor, Family::tensor},
};

const KindInfo& info(DwarfKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k;
  throw InvalidArgument("unknown dwarf kind");
}

constexpr std::pair<Family, std::string_view> kFamilies[] = {
    {Family::text, "text"},         {Family::sequence, "sequence"}, {Family::graph, "graph"},
    {Family::matrix, "matrix"},     {Family::tensor, "tensor"},     {Family::word_counts, "word_counts"},
    {Family::digest, "digest"},     {Family::levels, "levels"},     {Family::spectrum, "spectrum"},
};

}  // namespace

std::string_view to_string(DwarfKind kind) { return info(kind).name; }

std::optional<DwarfKind> parse_kind(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  return std::nullopt;
}

std::string_view to_string(Family family) {
  for (const auto& [f, name] : kFamilies)
    if (f == family) return name;
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (const auto& [f, n] : kFamilies)
    if (n == name) return f;
  return std::nullopt;
}

std::string_view dwarf_class(DwarfKind kind) { return info(kind).dwarf_class; }
Family input_family(DwarfKind kind) { return info(kind).in; }
Family output_family(DwarfKind kind) { return info(kind).out; }

void check_compatible(const DwarfSpec& spec, Family family) {
  const Family want = input_family(spec.kind);
  if (family != want)
    throw InvalidArgument(std::string(to_string(spec.kind)) + " requires " +
                          std::string(to_string(want)) + " input, got " + std::string(to_string(family)));
  if (spec.threads < 1) throw InvalidArgument("threads must be at least 1");
  if (spec.kind == DwarfKind::grep && spec.params.pattern.empty())
    throw InvalidArgument("grep pattern must be non-empty");
  if (spec.kind == DwarfKind::sample && !(spec.params.rate >= 0.0 && spec.params.rate <= 1.0))
    throw InvalidArgument("sample rate must be in [0, 1]");
  if ((spec.kind == DwarfKind::maxpool || spec.kind == DwarfKind::avgpool) &&
      (spec.params.window_h < 1 || spec.params.window_w < 1))
    throw InvalidArgument("pooling window must be at least 1x1");
}

std::string Digest128::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(32);
  for (auto b : bytes) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xf]);
  }
  return s;
}

Digest128 Digest128::from_hex(std::string_view hex) {
  if (hex.size() != 32) throw FormatError("digest: expected 32 hex digits");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw FormatError("digest: invalid hex digit");
  };
  Digest128 d;
  for (std::size_t i = 0; i < 16; ++i)
    d.bytes[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return d;
}

}  // namespace dwarfs::kernels
