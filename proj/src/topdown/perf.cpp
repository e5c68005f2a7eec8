#include "dwarfs/topdown/perf.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <linux/perf_event.h>
#include <sys/ioctl.h>
#include <sys/syscall.h>
#include <tuple>
#include <unistd.h>

#include "dwarfs/common/error.hpp"

namespace dwarfs::topdown {
namespace {

int open_event(pid_t pid, std::uint32_t type, std::uint64_t config) {
  perf_event_attr attr;
  std::memset(&attr, 0, sizeof attr);
  attr.size = sizeof attr;
  attr.type = type;
  attr.config = config;
  attr.disabled = 1;
  attr.inherit = 1;
  attr.exclude_kernel = 1;
  attr.exclude_hv = 1;
  attr.read_format = PERF_FORMAT_TOTAL_TIME_ENABLED | PERF_FORMAT_TOTAL_TIME_RUNNING;
  return static_cast<int>(syscall(SYS_perf_event_open, &attr, pid, -1, -1, 0));
}

}  // namespace

PerfSession::PerfSession(pid_t pid, const FormulaMap& map)
    : slots_per_cycle_(map.slots_per_cycle) {
  auto add = [&](const std::string& name, std::uint32_t type, std::uint64_t config) {
    const int fd = open_event(pid, type, config);
    if (fd < 0) {
      const int err = errno;
      for (auto& f : fds_) ::close(f.fd);
      fds_.clear();
      throw CounterUnavailable(name, "perf_event_open(" + name + "): " + std::strerror(err));
    }
    fds_.push_back({name, fd});
  };
  add("cycles", PERF_TYPE_HARDWARE, PERF_COUNT_HW_CPU_CYCLES);
  add("instructions", PERF_TYPE_HARDWARE, PERF_COUNT_HW_INSTRUCTIONS);
  for (const auto& event : map.required_events) {
    auto it = map.encodings.find(event);
    if (it == map.encodings.end()) {
      for (auto& f : fds_) ::close(f.fd);
      fds_.clear();
      throw CounterUnavailable(event, "formula map has no encoding for " + event);
    }
    add(event, it->second.type, it->second.config);
  }
}

PerfSession::~PerfSession() {
  for (auto& f : fds_) ::close(f.fd);
}

void PerfSession::enable() {
  for (auto& f : fds_) ioctl(f.fd, PERF_EVENT_IOC_ENABLE, 0);
}

void PerfSession::disable() {
  for (auto& f : fds_) ioctl(f.fd, PERF_EVENT_IOC_DISABLE, 0);
}

CounterSnapshot PerfSession::read() const {
  CounterSnapshot c;
  c.slots_per_cycle = slots_per_cycle_;
  for (const auto& f : fds_) {
    std::uint64_t buf[3] = {0, 0, 0};
    if (::read(f.fd, buf, sizeof buf) != static_cast<ssize_t>(sizeof buf))
      throw CounterUnavailable(f.name, "short read from perf counter " + f.name);
    const auto [value, enabled, running] = std::tuple(buf[0], buf[1], buf[2]);
    if (running == 0)
      throw CounterUnavailable(f.name, "perf counter " + f.name + " was never scheduled");
    double scale = 1.0;
    std::uint64_t v = value;
    if (running < enabled) {
      scale = static_cast<double>(enabled) / static_cast<double>(running);
      v = static_cast<std::uint64_t>(std::llround(static_cast<double>(value) * scale));
    }
    c.scale[f.name] = scale;
    if (f.name == "cycles") c.cycles = v;
    else if (f.name == "instructions") c.instructions = v;
    else c.events[f.name] = v;
  }
  return c;
}

}  // namespace dwarfs::topdown
