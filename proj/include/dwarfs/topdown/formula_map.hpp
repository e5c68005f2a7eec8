#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dwarfs/topdown/expr.hpp"

namespace dwarfs::topdown {

inline constexpr std::array<std::string_view, 4> kLevel1Names{
    "retiring", "bad_speculation", "frontend_bound", "backend_bound"};
inline constexpr std::array<std::string_view, 4> kLevel2Names{
    "frontend_latency", "frontend_bandwidth", "backend_memory", "backend_core"};
/// Level-2 categories whose value comes from an expression; the other member
/// of each pair is the complement within its level-1 parent.
inline constexpr std::array<std::string_view, 2> kLevel2Evaluated{"frontend_latency",
                                                                  "backend_memory"};

struct Level3Group {
  std::string_view parent;
  std::vector<std::string_view> children;
};
const std::vector<Level3Group>& level3_groups();
std::vector<std::string_view> level3_names();

/// Names usable in any expression besides the declared events.
inline constexpr std::array<std::string_view, 4> kBuiltinVariables{
    "cycles", "instructions", "slots", "slots_per_cycle"};

/// How to program one event on the live counter interface.
struct EventEncoding {
  std::uint32_t type = 4;  // PERF_TYPE_RAW
  std::uint64_t config = 0;
};

/// Category expressions for one CPU family. Level-2 and level-3 expressions
/// yield fractions of pipeline slots and may reference events, builtins,
/// level-1 names, and (level 3 only) level-2 names.
struct FormulaMap {
  std::string version;
  std::string cpu_family;
  std::uint32_t slots_per_cycle = 4;
  std::vector<std::string> required_events;
  std::map<std::string, EventEncoding> encodings;
  std::map<std::string, Expression> categories;

  /// Checks category coverage and that expressions reference only declared
  /// names. Throws FormatError.
  void validate() const;
};

FormulaMap parse_formula_map(std::string_view json_text);
FormulaMap load_formula_map(const std::filesystem::path& path);

}  // namespace dwarfs::topdown
