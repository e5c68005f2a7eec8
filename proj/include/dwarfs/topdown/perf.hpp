#pragma once

#include <string>
#include <sys/types.h>
#include <vector>

#include "dwarfs/topdown/counters.hpp"
#include "dwarfs/topdown/formula_map.hpp"

namespace dwarfs::topdown {

/// Counting-mode hardware events attached to one process and every thread or
/// child it creates afterwards. Events are opened individually (inherited
/// counters cannot be read as a group), start disabled, and are scaled by
/// time_enabled / time_running when the kernel multiplexes them.
class PerfSession {
 public:
  /// Throws CounterUnavailable naming the first event the kernel refuses.
  PerfSession(pid_t pid, const FormulaMap& map);
  ~PerfSession();
  PerfSession(const PerfSession&) = delete;
  PerfSession& operator=(const PerfSession&) = delete;

  void enable();
  void disable();
  /// Throws CounterUnavailable for an event that never got scheduled.
  CounterSnapshot read() const;

 private:
  struct Fd {
    std::string name;
    int fd = -1;
  };
  std::vector<Fd> fds_;
  std::uint32_t slots_per_cycle_;
};

}  // namespace dwarfs::topdown
