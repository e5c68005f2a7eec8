#include "dwarfs/topdown/counters.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dwarfs/common/error.hpp"

namespace dwarfs::topdown {

bool CounterSnapshot::has(const std::string& name) const {
  return name == "cycles" || name == "instructions" || events.count(name) != 0;
}

std::uint64_t CounterSnapshot::at(const std::string& name) const {
  if (name == "cycles") return cycles;
  if (name == "instructions") return instructions;
  auto it = events.find(name);
  if (it == events.end()) throw CounterUnavailable(name, "missing counter event '" + name + "'");
  return it->second;
}

CounterSnapshot parse_counter_fixture(std::string_view text) {
  CounterSnapshot c;
  bool have_cycles = false, have_instructions = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string name, value, extra;
    if (!(ls >> name)) continue;
    if (!(ls >> value) || (ls >> extra))
      throw FormatError("counter fixture line " + std::to_string(lineno) +
                        ": expected 'name value'");
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size())
      throw FormatError("counter fixture line " + std::to_string(lineno) + ": bad count '" +
                        value + "'");
    if (name == "cycles") {
      c.cycles = v;
      have_cycles = true;
    } else if (name == "instructions") {
      c.instructions = v;
      have_instructions = true;
    } else if (name == "slots_per_cycle") {
      if (v == 0) throw FormatError("counter fixture: slots_per_cycle must be positive");
      c.slots_per_cycle = static_cast<std::uint32_t>(v);
    } else if (!c.events.emplace(name, v).second) {
      throw FormatError("counter fixture line " + std::to_string(lineno) + ": duplicate " + name);
    }
  }
  if (!have_cycles) throw CounterUnavailable("cycles", "counter fixture lacks cycles");
  if (!have_instructions)
    throw CounterUnavailable("instructions", "counter fixture lacks instructions");
  return c;
}

CounterSnapshot read_counter_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read counter fixture " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_counter_fixture(ss.str());
}

std::string format_counter_fixture(const CounterSnapshot& c) {
  std::ostringstream os;
  os << "cycles " << c.cycles << '\n'
     << "instructions " << c.instructions << '\n'
     << "slots_per_cycle " << c.slots_per_cycle << '\n';
  for (const auto& [name, v] : c.events) os << name << ' ' << v << '\n';
  return os.str();
}

}  // namespace dwarfs::topdown
