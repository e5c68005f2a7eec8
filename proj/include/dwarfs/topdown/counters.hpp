#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace dwarfs::topdown {

struct CounterSnapshot {
  std::map<std::string, std::uint64_t> events;
  std::uint64_t cycles = 0;
  std::uint64_t instructions = 0;
  std::uint32_t slots_per_cycle = 4;
  /// enabled/running time ratio applied to each multiplexed event; 1 when
  /// the event ran the whole time or the values were replayed.
  std::map<std::string, double> scale;

  /// Throws CounterUnavailable naming `name` when absent. `cycles` and
  /// `instructions` resolve to the dedicated fields.
  std::uint64_t at(const std::string& name) const;
  bool has(const std::string& name) const;

  bool operator==(const CounterSnapshot&) const = default;
};

/// Fixture text: `name value` per line, `#` comments. The names cycles,
/// instructions and slots_per_cycle fill the header fields; every other name
/// is an event. cycles and instructions are required.
CounterSnapshot parse_counter_fixture(std::string_view text);
CounterSnapshot read_counter_fixture(const std::filesystem::path& path);
std::string format_counter_fixture(const CounterSnapshot& c);

}  // namespace dwarfs::topdown
