#include "dwarfs/topdown/breakdown.hpp"

#include <algorithm>

#include "dwarfs/common/error.hpp"

namespace dwarfs::topdown {

double Level1::get(std::string_view name) const {
  if (name == "retiring") return retiring;
  if (name == "bad_speculation") return bad_speculation;
  if (name == "frontend_bound") return frontend_bound;
  if (name == "backend_bound") return backend_bound;
  throw InvalidArgument("unknown level-1 category " + std::string(name));
}

Level1 level1(const CounterSnapshot& c) {
  if (c.cycles == 0) throw InvalidArgument("top-down: cycles must be positive");
  const double spc = c.slots_per_cycle;
  const double slots = spc * static_cast<double>(c.cycles);
  const double issued = static_cast<double>(c.at("uops_issued"));
  const double retired = static_cast<double>(c.at("uops_retired_slots"));
  const double not_delivered = static_cast<double>(c.at("idq_not_delivered"));
  const double recovery = static_cast<double>(c.at("recovery_cycles"));

  // Slot counts; multiplexed scaling can drive any of them out of [0, slots].
  double fe = not_delivered;
  double bs = issued - retired + spc * recovery;
  double re = retired;
  double be = slots - (fe + bs + re);
  auto clamp = [&](double v) { return std::clamp(v, 0.0, slots); };
  fe = clamp(fe);
  bs = clamp(bs);
  re = clamp(re);
  be = clamp(be);
  const double sum = fe + bs + re + be;
  Level1 l;
  if (sum == 0.0) {
    l.backend_bound = 1.0;
    return l;
  }
  l.frontend_bound = fe / sum;
  l.bad_speculation = bs / sum;
  l.retiring = re / sum;
  l.backend_bound = be / sum;
  return l;
}

IpcMlp ipc_mlp(const CounterSnapshot& c) {
  if (c.cycles == 0) throw InvalidArgument("top-down: cycles must be positive");
  IpcMlp r;
  r.ipc = static_cast<double>(c.instructions) / static_cast<double>(c.cycles);
  const auto pending = c.at("l1d_pending_misses");
  const auto pending_cycles = c.at("l1d_pending_cycles");
  if (pending_cycles > 0)
    r.mlp = static_cast<double>(pending) / static_cast<double>(pending_cycles);
  return r;
}

TopDownBreakdown level2_level3(const CounterSnapshot& c, const FormulaMap& f) {
  TopDownBreakdown b;
  b.level1 = level1(c);
  const auto im = ipc_mlp(c);
  b.ipc = im.ipc;
  b.mlp = im.mlp;

  auto eval = [&](const std::string& category) {
    const auto& expr = f.categories.at(category);
    return expr.evaluate([&](const std::string& name) -> double {
      if (name == "slots")
        return static_cast<double>(c.slots_per_cycle) * static_cast<double>(c.cycles);
      if (name == "slots_per_cycle") return c.slots_per_cycle;
      if (std::find(kLevel1Names.begin(), kLevel1Names.end(), name) != kLevel1Names.end())
        return b.level1.get(name);
      if (auto it = b.level2.find(name); it != b.level2.end()) return it->second;
      if (!c.has(name))
        throw CounterUnavailable(name, "category " + category + " needs missing event " + name);
      return static_cast<double>(c.at(name));
    });
  };

  const double lat = std::clamp(eval("frontend_latency"), 0.0, b.level1.frontend_bound);
  b.level2["frontend_latency"] = lat;
  b.level2["frontend_bandwidth"] = b.level1.frontend_bound - lat;
  const double mem = std::clamp(eval("backend_memory"), 0.0, b.level1.backend_bound);
  b.level2["backend_memory"] = mem;
  b.level2["backend_core"] = b.level1.backend_bound - mem;

  for (const auto& g : level3_groups()) {
    const double parent = b.level2.at(std::string(g.parent));
    std::vector<double> raw;
    double sum = 0.0;
    for (auto child : g.children) {
      raw.push_back(std::max(0.0, eval(std::string(child))));
      sum += raw.back();
    }
    for (std::size_t i = 0; i < g.children.size(); ++i)
      b.level3[std::string(g.children[i])] = sum > 0.0 ? raw[i] / sum * parent : 0.0;
  }
  return b;
}

}  // namespace dwarfs::topdown
