#pragma once

#include <map>
#include <optional>
#include <string>

#include "dwarfs/topdown/counters.hpp"
#include "dwarfs/topdown/formula_map.hpp"

namespace dwarfs::topdown {

struct Level1 {
  double retiring = 0.0;
  double bad_speculation = 0.0;
  double frontend_bound = 0.0;
  double backend_bound = 0.0;

  double get(std::string_view name) const;
  bool operator==(const Level1&) const = default;
};

struct IpcMlp {
  double ipc = 0.0;
  std::optional<double> mlp;  // absent when no cycle had an outstanding L1D miss
  bool operator==(const IpcMlp&) const = default;
};

/// Level-1 values sum to 1. Each level-2 pair sums to its level-1 parent and
/// each level-3 group to its level-2 parent, except that a group whose raw
/// values are all zero stays zero.
struct TopDownBreakdown {
  Level1 level1;
  std::map<std::string, double> level2;
  std::map<std::string, double> level3;
  double ipc = 0.0;
  std::optional<double> mlp;

  bool operator==(const TopDownBreakdown&) const = default;
};

/// Requires uops_issued, uops_retired_slots, idq_not_delivered,
/// recovery_cycles and cycles > 0.
Level1 level1(const CounterSnapshot& c);

IpcMlp ipc_mlp(const CounterSnapshot& c);

TopDownBreakdown level2_level3(const CounterSnapshot& c, const FormulaMap& f);

}  // namespace dwarfs::topdown
