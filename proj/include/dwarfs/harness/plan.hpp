#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dwarfs/common/error.hpp"
#include "dwarfs/datagen/matrix.hpp"
#include "dwarfs/kernels/spec.hpp"

namespace dwarfs::harness {

/// A run plan is malformed or references something that does not exist.
/// Messages are qualified with the plan path and the JSON location.
class PlanError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct TextStanza {
  std::uint64_t size_bytes = 0;
  std::uint64_t vocab_size = 100000;
  double zipf_s = 1.0;
  bool operator==(const TextStanza&) const = default;
};

struct SequenceStanza {
  std::string from;  // name of a text dataset
  bool operator==(const SequenceStanza&) const = default;
};

struct GraphStanza {
  std::uint32_t log2_vertices = 0;
  std::uint64_t edge_factor = 16;
  bool operator==(const GraphStanza&) const = default;
};

struct MatrixStanza {
  std::uint64_t n = 0;
  double sparsity = 0.0;
  datagen::Distribution distribution = datagen::Distribution::uniform;
  datagen::MatrixStorage storage = datagen::MatrixStorage::dense;
  bool operator==(const MatrixStanza&) const = default;
};

struct TensorStanza {
  std::size_t batch = 1;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  bool operator==(const TensorStanza&) const = default;
};

/// monostate: a pre-existing file, never generated.
using Stanza = std::variant<std::monostate, TextStanza, SequenceStanza, GraphStanza, MatrixStanza,
                            TensorStanza>;

struct DatasetSpec {
  std::string name;
  kernels::Family family = kernels::Family::text;
  std::uint64_t seed = 0;
  Stanza stanza;
  std::filesystem::path path;

  bool generated() const { return !std::holds_alternative<std::monostate>(stanza); }
};

/// A single dwarf is a one-stage entry with `pipeline == false`.
struct EntrySpec {
  std::string id;
  bool pipeline = false;
  std::vector<kernels::DwarfSpec> stages;
  std::map<std::string, std::string> labels;
};

struct RunPlan {
  std::string name;
  std::uint64_t seed = 0;
  double cadence_seconds = 1.0;
  std::filesystem::path formula_map;
  std::filesystem::path output_dir;
  std::size_t repetitions = 3;
  std::uint64_t sort_memory_budget_bytes = std::uint64_t{256} << 20;
  bool counters = true;
  std::vector<DatasetSpec> datasets;
  std::vector<EntrySpec> entries;
  std::filesystem::path source;

  const DatasetSpec& dataset(const std::string& name) const;
  const EntrySpec& entry(const std::string& id) const;
};

struct PlanOverrides {
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> cadence_seconds;
  std::optional<std::filesystem::path> formula_map;
  std::optional<std::filesystem::path> output_dir;
  bool no_counters = false;
};

/// `formula_map` and dataset `path` values are resolved against the plan's
/// directory; `output_dir` against the working directory. Overrides apply
/// before validation; a seed override re-derives every seed the plan does not
/// pin explicitly.
RunPlan load_plan(const std::filesystem::path& path, const PlanOverrides& overrides = {});
RunPlan parse_plan(std::string_view json_text, const std::filesystem::path& source,
                   const PlanOverrides& overrides = {});

}  // namespace dwarfs::harness
