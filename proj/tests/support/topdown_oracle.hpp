#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>

#include "dwarfs/common/rng.hpp"
#include "dwarfs/topdown/counters.hpp"
#include "dwarfs/topdown/formula_map.hpp"
#include "support/expr_oracle.hpp"

namespace dwarfs::testing {

struct OracleTree {
  std::map<std::string, double> values;
  double ipc = 0;
  std::optional<double> mlp;
};

/// Re-derives the whole tree from expression strings using the shunting-yard
/// evaluator. Level 1 follows the fraction-first formulation.
inline OracleTree oracle_breakdown(const topdown::CounterSnapshot& c,
                                   const std::map<std::string, std::string>& exprs) {
  OracleTree t;
  auto& v = t.values;
  const double spc = c.slots_per_cycle;
  const double slots = spc * double(c.cycles);
  auto ev = [&](const std::string& n) { return double(c.events.at(n)); };
  double fe = ev("idq_not_delivered") / slots;
  double bs = (ev("uops_issued") - ev("uops_retired_slots") + spc * ev("recovery_cycles")) / slots;
  double re = ev("uops_retired_slots") / slots;
  double be = 1.0 - (fe + bs + re);
  fe = std::clamp(fe, 0.0, 1.0);
  bs = std::clamp(bs, 0.0, 1.0);
  re = std::clamp(re, 0.0, 1.0);
  be = std::clamp(be, 0.0, 1.0);
  const double s = fe + bs + re + be;
  v["frontend_bound"] = fe / s;
  v["bad_speculation"] = bs / s;
  v["retiring"] = re / s;
  v["backend_bound"] = be / s;

  auto var = [&](const std::string& n) -> double {
    if (n == "cycles") return double(c.cycles);
    if (n == "instructions") return double(c.instructions);
    if (n == "slots") return slots;
    if (n == "slots_per_cycle") return spc;
    if (auto it = v.find(n); it != v.end()) return it->second;
    return ev(n);
  };
  auto eval = [&](const std::string& cat) { return oracle_eval(exprs.at(cat), var); };

  double lat = std::min(std::max(eval("frontend_latency"), 0.0), v["frontend_bound"]);
  v["frontend_latency"] = lat;
  v["frontend_bandwidth"] = v["frontend_bound"] - lat;
  double mem = std::min(std::max(eval("backend_memory"), 0.0), v["backend_bound"]);
  v["backend_memory"] = mem;
  v["backend_core"] = v["backend_bound"] - mem;

  for (const auto& g : topdown::level3_groups()) {
    std::map<std::string, double> raw;
    double sum = 0;
    for (auto ch : g.children) sum += raw[std::string(ch)] = std::max(0.0, eval(std::string(ch)));
    for (auto& [name, r] : raw) v[name] = sum > 0 ? r * v[std::string(g.parent)] / sum : 0.0;
  }
  t.ipc = double(c.instructions) / double(c.cycles);
  if (ev("l1d_pending_cycles") > 0) t.mlp = ev("l1d_pending_misses") / ev("l1d_pending_cycles");
  return t;
}

/// Random counters for `events`. Most draws are physically plausible; every
/// seventh one has out-of-range values as produced by multiplexed scaling.
inline topdown::CounterSnapshot random_counters(std::uint64_t seed, std::uint64_t i,
                                                const std::vector<std::string>& events) {
  CounterRng rng(seed, i);
  topdown::CounterSnapshot c;
  c.slots_per_cycle = 4;
  c.cycles = 1 + rng.below(0, 1'000'000'000);
  c.instructions = rng.below(1, 4 * c.cycles + 1);
  const bool wild = i % 7 == 0;
  std::uint64_t k = 2;
  for (const auto& e : events) {
    const std::uint64_t cap = wild ? 8 * c.cycles : c.cycles;
    std::uint64_t v = rng.below(k++, cap + 1);
    if (rng.below(k++, 10) == 0) v = 0;
    c.events[e] = v;
  }
  if (!wild) {
    const std::uint64_t slots = 4 * c.cycles;
    c.events["uops_retired_slots"] = rng.below(k++, slots / 2 + 1);
    c.events["uops_issued"] = c.events["uops_retired_slots"] + rng.below(k++, slots / 8 + 1);
    c.events["idq_not_delivered"] = rng.below(k++, slots / 4 + 1);
    c.events["recovery_cycles"] = rng.below(k++, c.cycles / 32 + 1);
  }
  return c;
}

}  // namespace dwarfs::testing
