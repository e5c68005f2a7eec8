#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace dwarfs::sysmetrics {

inline constexpr double kSectorBytes = 512.0;

struct CpuTicks {
  std::uint64_t user = 0;
  std::uint64_t nice = 0;
  std::uint64_t system = 0;
  std::uint64_t idle = 0;
  std::uint64_t iowait = 0;
  std::uint64_t irq = 0;
  std::uint64_t softirq = 0;
  std::uint64_t steal = 0;

  std::uint64_t total() const {
    return user + nice + system + idle + iowait + irq + softirq + steal;
  }
  bool operator==(const CpuTicks&) const = default;
};

/// Cumulative counters at one instant. `timestamp` is monotonic seconds.
struct SystemSnapshot {
  double timestamp = 0.0;
  CpuTicks cpu_ticks;
  std::uint64_t disk_sectors_read = 0;
  std::uint64_t disk_sectors_written = 0;
  std::uint64_t net_bytes_rx = 0;
  std::uint64_t net_bytes_tx = 0;
  std::uint64_t majflt = 0;

  bool operator==(const SystemSnapshot&) const = default;
};

/// Fractions for cpu_utilization and iowait, bytes/second for bandwidths.
struct SystemRates {
  double cpu_utilization = 0.0;
  double iowait = 0.0;
  double disk_read_bw = 0.0;
  double disk_write_bw = 0.0;
  double net_rx_bw = 0.0;
  double net_tx_bw = 0.0;
  double majflt_rate = 0.0;

  bool operator==(const SystemRates&) const = default;
};

class CounterProvider {
 public:
  virtual ~CounterProvider() = default;
  /// Throws CounterUnavailable naming the group ("cpu", "disk", "net",
  /// "majflt", "timestamp") that cannot be read.
  virtual SystemSnapshot snapshot() = 0;
};

/// Reads the live proc interface. Disk sectors are summed over whole block
/// devices, network bytes over every interface except loopback, and major
/// faults over `pid` plus its reaped children.
class ProcProvider : public CounterProvider {
 public:
  explicit ProcProvider(pid_t pid = 0, std::filesystem::path proc_root = "/proc",
                        std::filesystem::path sys_root = "/sys");
  SystemSnapshot snapshot() override;
  void set_pid(pid_t pid) { pid_ = pid; }

 private:
  pid_t pid_;
  std::filesystem::path proc_root_;
  std::filesystem::path sys_root_;
};

/// Replays recorded snapshots in order; throws once exhausted.
class FixtureProvider : public CounterProvider {
 public:
  explicit FixtureProvider(std::vector<SystemSnapshot> series);
  static FixtureProvider from_file(const std::filesystem::path& path);
  SystemSnapshot snapshot() override;
  std::size_t remaining() const { return series_.size() - next_; }

 private:
  std::vector<SystemSnapshot> series_;
  std::size_t next_ = 0;
};

/// Fixture text: blocks separated by blank lines, one `field value` pair per
/// line, `#` starts a comment. Fields: timestamp, cpu_ticks.<state>,
/// disk_sectors_read, disk_sectors_written, net_bytes_rx, net_bytes_tx, majflt.
/// cpu_ticks.{nice,irq,softirq,steal} default to 0; every other field is
/// required.
std::vector<SystemSnapshot> parse_fixture(std::string_view text);
std::string format_fixture(const std::vector<SystemSnapshot>& series);

inline SystemSnapshot snapshot(CounterProvider& source) { return source.snapshot(); }

/// Requires cur.timestamp > prev.timestamp and no counter decreasing.
SystemRates derive_rates(const SystemSnapshot& prev, const SystemSnapshot& cur);

/// derive_rates over each adjacent pair.
std::vector<SystemRates> interval_rates(const std::vector<SystemSnapshot>& series);

}  // namespace dwarfs::sysmetrics
