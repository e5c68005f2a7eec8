#include "dwarfs/topdown/formula_map.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dwarfs/common/error.hpp"

namespace dwarfs::topdown {

const std::vector<Level3Group>& level3_groups() {
  static const std::vector<Level3Group> groups{
      {"frontend_latency",
       {"icache_miss", "itlb_miss", "branch_resteers", "dsb_switches", "lcp", "ms_switches"}},
      {"frontend_bandwidth", {"mite", "dsb", "lsd"}},
      {"backend_memory", {"l1_bound", "l2_bound", "l3_bound", "external_memory_bound"}},
      {"backend_core", {"divider", "ports_utilization"}},
  };
  return groups;
}

std::vector<std::string_view> level3_names() {
  std::vector<std::string_view> out;
  for (const auto& g : level3_groups()) out.insert(out.end(), g.children.begin(), g.children.end());
  return out;
}

namespace {

bool is_level3(const std::string& name) {
  auto names = level3_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& a, const std::string& s) {
  return std::find(a.begin(), a.end(), s) != a.end();
}

}  // namespace

void FormulaMap::validate() const {
  if (slots_per_cycle == 0) throw FormatError("formula map: slots_per_cycle must be positive");
  std::set<std::string> declared(required_events.begin(), required_events.end());
  for (auto name : kLevel2Evaluated)
    if (!categories.count(std::string(name)))
      throw FormatError("formula map lacks category " + std::string(name));
  for (auto name : level3_names())
    if (!categories.count(std::string(name)))
      throw FormatError("formula map lacks category " + std::string(name));
  for (const auto& [cat, expr] : categories) {
    const bool l3 = is_level3(cat);
    if (!l3 && !contains(kLevel2Evaluated, cat))
      throw FormatError("formula map: unknown category " + cat);
    for (const auto& v : expr.variables()) {
      if (declared.count(v) || contains(kBuiltinVariables, v) || contains(kLevel1Names, v))
        continue;
      if (l3 && contains(kLevel2Names, v)) continue;
      throw FormatError("formula map: category " + cat + " references undeclared name " + v);
    }
  }
  for (const auto& [event, enc] : encodings)
    if (!declared.count(event))
      throw FormatError("formula map: encoding for undeclared event " + event);
}

FormulaMap parse_formula_map(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("formula map: ") + e.what());
  }
  FormulaMap f;
  try {
    f.version = j.at("version").get<std::string>();
    f.cpu_family = j.value("cpu_family", std::string());
    f.slots_per_cycle = j.value("slots_per_cycle", 4u);
    f.required_events = j.at("required_events").get<std::vector<std::string>>();
    if (j.contains("events")) {
      for (const auto& [name, e] : j.at("events").items()) {
        EventEncoding enc;
        enc.type = e.value("type", 4u);
        const auto& cfg = e.at("config");
        enc.config = cfg.is_string() ? std::stoull(cfg.get<std::string>(), nullptr, 0)
                                     : cfg.get<std::uint64_t>();
        f.encodings.emplace(name, enc);
      }
    }
    for (const auto& [name, e] : j.at("categories").items())
      f.categories.emplace(name, Expression::parse(e.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("formula map: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw FormatError("formula map: bad event config");
  }
  f.validate();
  return f;
}

FormulaMap load_formula_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read formula map " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_formula_map(ss.str());
}

}  // namespace dwarfs::topdown
