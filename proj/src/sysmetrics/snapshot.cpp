#include "dwarfs/sysmetrics/snapshot.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "dwarfs/common/error.hpp"

namespace dwarfs::sysmetrics {
namespace {

double monotonic_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::optional<std::string> slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

std::uint64_t to_u64(std::string_view s, const std::string& group) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw CounterUnavailable(group, "malformed " + group + " counter '" + std::string(s) + "'");
  return v;
}

CpuTicks read_cpu(const std::filesystem::path& root) {
  auto text = slurp(root / "stat");
  if (!text) throw CounterUnavailable("cpu", "cannot read " + (root / "stat").string());
  std::istringstream in(*text);
  std::string label;
  in >> label;
  if (label != "cpu") throw CounterUnavailable("cpu", "no aggregate cpu line in stat");
  CpuTicks t;
  for (auto* f : {&t.user, &t.nice, &t.system, &t.idle, &t.iowait, &t.irq, &t.softirq,
                  &t.steal}) {
    if (!(in >> *f)) {
      if (f == &t.user || f == &t.system || f == &t.idle || f == &t.iowait)
        throw CounterUnavailable("cpu", "short cpu line in stat");
      break;
    }
  }
  return t;
}

void read_disk(const std::filesystem::path& root, const std::filesystem::path& sys,
               SystemSnapshot& s) {
  auto text = slurp(root / "diskstats");
  if (!text) throw CounterUnavailable("disk", "cannot read " + (root / "diskstats").string());
  std::error_code ec;
  const bool have_sys = std::filesystem::is_directory(sys / "block", ec);
  std::istringstream in(*text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::uint64_t major = 0, minor = 0, rd = 0, rd_merged = 0, rd_sectors = 0, rd_ms = 0,
                  wr = 0, wr_merged = 0, wr_sectors = 0;
    std::string name;
    if (!(ls >> major >> minor >> name >> rd >> rd_merged >> rd_sectors >> rd_ms >> wr >>
          wr_merged >> wr_sectors))
      continue;
    // Partitions are excluded so their sectors are not counted twice.
    if (have_sys && !std::filesystem::exists(sys / "block" / name, ec)) continue;
    s.disk_sectors_read += rd_sectors;
    s.disk_sectors_written += wr_sectors;
  }
}

void read_net(const std::filesystem::path& root, SystemSnapshot& s) {
  auto text = slurp(root / "net" / "dev");
  if (!text) throw CounterUnavailable("net", "cannot read " + (root / "net" / "dev").string());
  std::istringstream in(*text);
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string name = line.substr(0, colon);
    name.erase(0, name.find_first_not_of(' '));
    if (name == "lo") continue;
    std::istringstream ls(line.substr(colon + 1));
    std::uint64_t v[9];
    for (auto& x : v)
      if (!(ls >> x)) throw CounterUnavailable("net", "short line in net/dev for " + name);
    s.net_bytes_rx += v[0];
    s.net_bytes_tx += v[8];
  }
}

std::uint64_t read_majflt(const std::filesystem::path& root, pid_t pid) {
  auto path = root / (pid == 0 ? std::string("self") : std::to_string(pid)) / "stat";
  auto text = slurp(path);
  if (!text) throw CounterUnavailable("majflt", "cannot read " + path.string());
  auto close = text->rfind(')');
  if (close == std::string::npos) throw CounterUnavailable("majflt", "malformed " + path.string());
  std::istringstream in(text->substr(close + 1));
  std::string field;
  std::uint64_t majflt = 0, cmajflt = 0;
  for (int i = 0; i <= 10; ++i) {
    if (!(in >> field)) throw CounterUnavailable("majflt", "short " + path.string());
    if (i == 9) majflt = to_u64(field, "majflt");
    if (i == 10) cmajflt = to_u64(field, "majflt");
  }
  return majflt + cmajflt;
}

const char* group_of(std::string_view field) {
  if (field == "timestamp") return "timestamp";
  if (field.starts_with("cpu_ticks.")) return "cpu";
  if (field.starts_with("disk_")) return "disk";
  if (field.starts_with("net_")) return "net";
  if (field == "majflt") return "majflt";
  return nullptr;
}

SystemSnapshot build_block(const std::map<std::string, std::string>& kv, std::size_t block) {
  SystemSnapshot s;
  auto need = [&](const std::string& name) -> const std::string& {
    auto it = kv.find(name);
    if (it == kv.end())
      throw CounterUnavailable(group_of(name), "fixture block " + std::to_string(block) +
                                                   " lacks " + group_of(name) + " field " + name);
    return it->second;
  };
  auto u64 = [&](const std::string& name) { return to_u64(need(name), group_of(name)); };
  auto opt = [&](const std::string& name) {
    return kv.count(name) ? to_u64(kv.at(name), "cpu") : std::uint64_t{0};
  };
  {
    const auto& ts = need("timestamp");
    std::size_t used = 0;
    try {
      s.timestamp = std::stod(ts, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != ts.size()) throw FormatError("fixture: bad timestamp '" + ts + "'");
  }
  s.cpu_ticks.user = u64("cpu_ticks.user");
  s.cpu_ticks.nice = opt("cpu_ticks.nice");
  s.cpu_ticks.system = u64("cpu_ticks.system");
  s.cpu_ticks.idle = u64("cpu_ticks.idle");
  s.cpu_ticks.iowait = u64("cpu_ticks.iowait");
  s.cpu_ticks.irq = opt("cpu_ticks.irq");
  s.cpu_ticks.softirq = opt("cpu_ticks.softirq");
  s.cpu_ticks.steal = opt("cpu_ticks.steal");
  s.disk_sectors_read = u64("disk_sectors_read");
  s.disk_sectors_written = u64("disk_sectors_written");
  s.net_bytes_rx = u64("net_bytes_rx");
  s.net_bytes_tx = u64("net_bytes_tx");
  s.majflt = u64("majflt");
  return s;
}

std::uint64_t delta(std::uint64_t prev, std::uint64_t cur, const char* name) {
  if (cur < prev) throw InvalidArgument(std::string("counter decreased: ") + name);
  return cur - prev;
}

}  // namespace

ProcProvider::ProcProvider(pid_t pid, std::filesystem::path proc_root,
                           std::filesystem::path sys_root)
    : pid_(pid), proc_root_(std::move(proc_root)), sys_root_(std::move(sys_root)) {}

SystemSnapshot ProcProvider::snapshot() {
  SystemSnapshot s;
  s.timestamp = monotonic_seconds();
  s.cpu_ticks = read_cpu(proc_root_);
  read_disk(proc_root_, sys_root_, s);
  read_net(proc_root_, s);
  s.majflt = read_majflt(proc_root_, pid_);
  return s;
}

FixtureProvider::FixtureProvider(std::vector<SystemSnapshot> series)
    : series_(std::move(series)) {}

FixtureProvider FixtureProvider::from_file(const std::filesystem::path& path) {
  auto text = slurp(path);
  if (!text) throw IoError("cannot read fixture " + path.string());
  return FixtureProvider(parse_fixture(*text));
}

SystemSnapshot FixtureProvider::snapshot() {
  if (next_ >= series_.size())
    throw CounterUnavailable("fixture", "fixture exhausted after " +
                                            std::to_string(series_.size()) + " snapshots");
  return series_[next_++];
}

std::vector<SystemSnapshot> parse_fixture(std::string_view text) {
  std::vector<SystemSnapshot> out;
  std::map<std::string, std::string> kv;
  auto flush = [&] {
    if (!kv.empty()) out.push_back(build_block(kv, out.size()));
    kv.clear();
  };
  std::size_t pos = 0, lineno = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::istringstream ls{std::string(line)};
    std::string key, value, extra;
    if (!(ls >> key)) {
      flush();
      continue;
    }
    if (!(ls >> value) || (ls >> extra))
      throw FormatError("fixture line " + std::to_string(lineno) + ": expected 'field value'");
    if (!group_of(key))
      throw FormatError("fixture line " + std::to_string(lineno) + ": unknown field " + key);
    if (!kv.emplace(key, value).second)
      throw FormatError("fixture line " + std::to_string(lineno) + ": duplicate field " + key);
  }
  flush();
  return out;
}

std::string format_fixture(const std::vector<SystemSnapshot>& series) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (i) os << '\n';
    os << "timestamp " << s.timestamp << '\n'
       << "cpu_ticks.user " << s.cpu_ticks.user << '\n'
       << "cpu_ticks.nice " << s.cpu_ticks.nice << '\n'
       << "cpu_ticks.system " << s.cpu_ticks.system << '\n'
       << "cpu_ticks.idle " << s.cpu_ticks.idle << '\n'
       << "cpu_ticks.iowait " << s.cpu_ticks.iowait << '\n'
       << "cpu_ticks.irq " << s.cpu_ticks.irq << '\n'
       << "cpu_ticks.softirq " << s.cpu_ticks.softirq << '\n'
       << "cpu_ticks.steal " << s.cpu_ticks.steal << '\n'
       << "disk_sectors_read " << s.disk_sectors_read << '\n'
       << "disk_sectors_written " << s.disk_sectors_written << '\n'
       << "net_bytes_rx " << s.net_bytes_rx << '\n'
       << "net_bytes_tx " << s.net_bytes_tx << '\n'
       << "majflt " << s.majflt << '\n';
  }
  return os.str();
}

SystemRates derive_rates(const SystemSnapshot& prev, const SystemSnapshot& cur) {
  const double dt = cur.timestamp - prev.timestamp;
  if (!(dt > 0.0)) throw InvalidArgument("derive_rates: timestamps not increasing");
  const auto& a = prev.cpu_ticks;
  const auto& b = cur.cpu_ticks;
  delta(a.user, b.user, "cpu_ticks.user");
  delta(a.nice, b.nice, "cpu_ticks.nice");
  delta(a.system, b.system, "cpu_ticks.system");
  const auto d_idle = delta(a.idle, b.idle, "cpu_ticks.idle");
  const auto d_iowait = delta(a.iowait, b.iowait, "cpu_ticks.iowait");
  delta(a.irq, b.irq, "cpu_ticks.irq");
  delta(a.softirq, b.softirq, "cpu_ticks.softirq");
  delta(a.steal, b.steal, "cpu_ticks.steal");
  const auto d_total = b.total() - a.total();

  SystemRates r;
  if (d_total > 0) {
    r.cpu_utilization = 1.0 - static_cast<double>(d_idle + d_iowait) / static_cast<double>(d_total);
    r.iowait = static_cast<double>(d_iowait) / static_cast<double>(d_total);
  }
  r.disk_read_bw =
      static_cast<double>(delta(prev.disk_sectors_read, cur.disk_sectors_read, "disk_sectors_read")) *
      kSectorBytes / dt;
  r.disk_write_bw = static_cast<double>(delta(prev.disk_sectors_written, cur.disk_sectors_written,
                                              "disk_sectors_written")) *
                    kSectorBytes / dt;
  r.net_rx_bw =
      static_cast<double>(delta(prev.net_bytes_rx, cur.net_bytes_rx, "net_bytes_rx")) / dt;
  r.net_tx_bw =
      static_cast<double>(delta(prev.net_bytes_tx, cur.net_bytes_tx, "net_bytes_tx")) / dt;
  r.majflt_rate = static_cast<double>(delta(prev.majflt, cur.majflt, "majflt")) / dt;
  return r;
}

std::vector<SystemRates> interval_rates(const std::vector<SystemSnapshot>& series) {
  std::vector<SystemRates> out;
  for (std::size_t i = 1; i < series.size(); ++i) out.push_back(derive_rates(series[i - 1], series[i]));
  return out;
}

}  // namespace dwarfs::sysmetrics
