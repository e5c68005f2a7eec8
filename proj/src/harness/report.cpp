#include "dwarfs/harness/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <sys/utsname.h>
#include <thread>

#include <json.hpp>

#include "dwarfs/common/error.hpp"

#ifndef DWARFS_OPT_TAG
#define DWARFS_OPT_TAG "unknown"
#endif

namespace dwarfs::harness {

using nlohmann::json;

std::string Fingerprint::str() const {
  std::ostringstream os;
  os << "cpu=" << cpu_model << ";cores=" << cores << ";memory_bytes=" << memory_bytes
     << ";kernel=" << kernel << ";compiler=" << compiler << ";opt=" << opt_tag;
  return os.str();
}

Fingerprint environment_fingerprint() {
  Fingerprint f;
  f.cpu_model = "unknown";
  {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("model name", 0) == 0) {
        auto colon = line.find(':');
        if (colon != std::string::npos) {
          f.cpu_model = line.substr(colon + 1);
          f.cpu_model.erase(0, f.cpu_model.find_first_not_of(' '));
        }
        break;
      }
    }
  }
  f.cores = std::thread::hardware_concurrency();
  {
    std::ifstream in("/proc/meminfo");
    std::string key;
    std::uint64_t kb = 0;
    while (in >> key >> kb) {
      if (key == "MemTotal:") {
        f.memory_bytes = kb * 1024;
        break;
      }
      in.ignore(1 << 10, '\n');
    }
  }
  utsname u{};
  if (uname(&u) == 0) f.kernel = std::string(u.sysname) + " " + u.release;
#if defined(__clang__)
  f.compiler = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  f.compiler = std::string("gcc ") + __VERSION__;
#else
  f.compiler = "unknown";
#endif
  f.opt_tag = DWARFS_OPT_TAG;
  return f;
}

bool EntryReport::degraded() const {
  return std::any_of(reps.begin(), reps.end(), [](const RepResult& r) { return r.degraded; });
}

bool RunReport::degraded() const {
  return std::any_of(entries.begin(), entries.end(), [](const EntryReport& e) { return e.degraded(); });
}

bool RunReport::failed() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const EntryReport& e) { return e.error.has_value(); });
}

analysis::MetricVector metric_vector(const RepResult& rep) {
  analysis::MetricVector v;
  v.degraded = rep.degraded;
  const auto& r = rep.rates;
  v.set("cpu_utilization", r.cpu_utilization);
  v.set("iowait", r.iowait);
  v.set("disk_read_bw", r.disk_read_bw);
  v.set("disk_write_bw", r.disk_write_bw);
  v.set("net_rx_bw", r.net_rx_bw);
  v.set("net_tx_bw", r.net_tx_bw);
  v.set("majflt_rate", r.majflt_rate);
  if (rep.topdown) {
    const auto& t = *rep.topdown;
    for (auto n : topdown::kLevel1Names) v.set(std::string(n), t.level1.get(n));
    for (const auto& [n, x] : t.level2) v.set(n, x);
    for (const auto& [n, x] : t.level3) v.set(n, x);
    v.set("ipc", t.ipc);
    v.set("mlp", t.mlp);
  }
  v.set("wall_time", rep.kernel.wall_time);
  return v;
}

analysis::MetricVector median_vector(const std::vector<RepResult>& reps) {
  analysis::MetricVector out;
  if (reps.empty()) return out;
  std::vector<analysis::MetricVector> vs;
  for (const auto& r : reps) vs.push_back(metric_vector(r));
  out.degraded = std::any_of(vs.begin(), vs.end(), [](const auto& v) { return v.degraded; });
  for (std::size_t m = 0; m < out.values.size(); ++m) {
    std::vector<double> xs;
    for (const auto& v : vs)
      if (v.values[m]) xs.push_back(*v.values[m]);
    if (xs.size() != vs.size()) continue;
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    out.values[m] = n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
  }
  return out;
}

namespace {

json rates_json(const sysmetrics::SystemRates& r) {
  return {{"cpu_utilization", r.cpu_utilization}, {"iowait", r.iowait},
          {"disk_read_bw", r.disk_read_bw},       {"disk_write_bw", r.disk_write_bw},
          {"net_rx_bw", r.net_rx_bw},             {"net_tx_bw", r.net_tx_bw},
          {"majflt_rate", r.majflt_rate}};
}

sysmetrics::SystemRates rates_from(const json& j) {
  sysmetrics::SystemRates r;
  r.cpu_utilization = j.at("cpu_utilization").get<double>();
  r.iowait = j.at("iowait").get<double>();
  r.disk_read_bw = j.at("disk_read_bw").get<double>();
  r.disk_write_bw = j.at("disk_write_bw").get<double>();
  r.net_rx_bw = j.at("net_rx_bw").get<double>();
  r.net_tx_bw = j.at("net_tx_bw").get<double>();
  r.majflt_rate = j.at("majflt_rate").get<double>();
  return r;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(); }
std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json kernel_json(const kernels::KernelResult& k) {
  return {{"kind", std::string(kernels::to_string(k.kind))},
          {"wall_time", k.wall_time},
          {"output_digest", k.output_digest.hex()},
          {"output_summary", k.output_summary}};
}

kernels::DwarfKind kind_from(const json& j) {
  auto k = kernels::parse_kind(j.get<std::string>());
  if (!k) throw FormatError("report: unknown dwarf kind " + j.get<std::string>());
  return *k;
}

kernels::KernelResult kernel_from(const json& j) {
  kernels::KernelResult k;
  k.kind = kind_from(j.at("kind"));
  k.wall_time = j.at("wall_time").get<double>();
  k.output_digest = kernels::Digest128::from_hex(j.at("output_digest").get<std::string>());
  k.output_summary = j.at("output_summary").get<std::map<std::string, double>>();
  return k;
}

json counters_json(const topdown::CounterSnapshot& c) {
  return {{"cycles", c.cycles},
          {"instructions", c.instructions},
          {"slots_per_cycle", c.slots_per_cycle},
          {"events", c.events},
          {"scale", c.scale}};
}

topdown::CounterSnapshot counters_from(const json& j) {
  topdown::CounterSnapshot c;
  c.cycles = j.at("cycles").get<std::uint64_t>();
  c.instructions = j.at("instructions").get<std::uint64_t>();
  c.slots_per_cycle = j.at("slots_per_cycle").get<std::uint32_t>();
  c.events = j.at("events").get<std::map<std::string, std::uint64_t>>();
  c.scale = j.at("scale").get<std::map<std::string, double>>();
  return c;
}

json topdown_json(const topdown::TopDownBreakdown& t) {
  json l1;
  for (auto n : topdown::kLevel1Names) l1[std::string(n)] = t.level1.get(n);
  return {{"level1", l1},          {"level2", t.level2}, {"level3", t.level3},
          {"ipc", t.ipc},          {"mlp", optional_json(t.mlp)}};
}

topdown::TopDownBreakdown topdown_from(const json& j) {
  topdown::TopDownBreakdown t;
  const auto& l1 = j.at("level1");
  t.level1.retiring = l1.at("retiring").get<double>();
  t.level1.bad_speculation = l1.at("bad_speculation").get<double>();
  t.level1.frontend_bound = l1.at("frontend_bound").get<double>();
  t.level1.backend_bound = l1.at("backend_bound").get<double>();
  t.level2 = j.at("level2").get<std::map<std::string, double>>();
  t.level3 = j.at("level3").get<std::map<std::string, double>>();
  t.ipc = j.at("ipc").get<double>();
  t.mlp = optional_from(j.at("mlp"));
  return t;
}

json metric_json(const analysis::MetricVector& v) {
  json values;
  const auto& names = analysis::metric_names();
  for (std::size_t i = 0; i < names.size(); ++i) values[names[i]] = optional_json(v.values[i]);
  return {{"degraded", v.degraded}, {"values", values}};
}

json rep_json(const RepResult& r) {
  json j{{"kernel", kernel_json(r.kernel)},
         {"rates", rates_json(r.rates)},
         {"degraded", r.degraded},
         {"degraded_reason", r.degraded_reason},
         {"counters", r.counters ? counters_json(*r.counters) : json()},
         {"topdown", r.topdown ? topdown_json(*r.topdown) : json()}};
  j["intervals"] = json::array();
  for (const auto& i : r.intervals) j["intervals"].push_back(rates_json(i));
  if (!r.stages.empty()) {
    j["stages"] = json::array();
    for (const auto& s : r.stages)
      j["stages"].push_back({{"kind", std::string(kernels::to_string(s.kind))},
                             {"wall_time", s.wall_time},
                             {"percent", s.percent},
                             {"output_digest", s.output_digest.hex()}});
    j["overhead_seconds"] = r.overhead_seconds;
    j["overhead_percent"] = r.overhead_percent;
  }
  return j;
}

RepResult rep_from(const json& j) {
  RepResult r;
  r.kernel = kernel_from(j.at("kernel"));
  r.rates = rates_from(j.at("rates"));
  r.degraded = j.at("degraded").get<bool>();
  r.degraded_reason = j.at("degraded_reason").get<std::string>();
  if (!j.at("counters").is_null()) r.counters = counters_from(j.at("counters"));
  if (!j.at("topdown").is_null()) r.topdown = topdown_from(j.at("topdown"));
  for (const auto& i : j.at("intervals")) r.intervals.push_back(rates_from(i));
  if (j.contains("stages")) {
    for (const auto& s : j.at("stages"))
      r.stages.push_back({kind_from(s.at("kind")), s.at("wall_time").get<double>(),
                          s.at("percent").get<double>(),
                          kernels::Digest128::from_hex(s.at("output_digest").get<std::string>())});
    r.overhead_seconds = j.at("overhead_seconds").get<double>();
    r.overhead_percent = j.at("overhead_percent").get<double>();
  }
  return r;
}

}  // namespace

std::string to_json(const RunReport& r) {
  json j;
  j["plan"] = r.plan;
  j["schema"] = r.schema;
  j["variance_convention"] = "population";
  j["fingerprint"] = {{"cpu_model", r.fingerprint.cpu_model}, {"cores", r.fingerprint.cores},
                      {"memory_bytes", r.fingerprint.memory_bytes}, {"kernel", r.fingerprint.kernel},
                      {"compiler", r.fingerprint.compiler}, {"opt_tag", r.fingerprint.opt_tag}};
  j["degraded"] = r.degraded();
  j["entries"] = json::array();
  for (const auto& e : r.entries) {
    json je{{"id", e.id},
            {"pipeline", e.pipeline},
            {"stage_kinds", e.stage_kinds},
            {"labels", e.labels},
            {"error", e.error ? json(*e.error) : json()},
            {"median", metric_json(e.median)}};
    je["reps"] = json::array();
    for (const auto& rep : e.reps) je["reps"].push_back(rep_json(rep));
    j["entries"].push_back(std::move(je));
  }
  return j.dump(2);
}

RunReport parse_report(std::string_view text) {
  try {
    const auto j = json::parse(text);
    RunReport r;
    r.plan = j.at("plan").get<std::string>();
    r.schema = j.at("schema").get<std::string>();
    const auto& f = j.at("fingerprint");
    r.fingerprint = {f.at("cpu_model").get<std::string>(), f.at("cores").get<unsigned>(),
                     f.at("memory_bytes").get<std::uint64_t>(), f.at("kernel").get<std::string>(),
                     f.at("compiler").get<std::string>(), f.at("opt_tag").get<std::string>()};
    for (const auto& je : j.at("entries")) {
      EntryReport e;
      e.id = je.at("id").get<std::string>();
      e.pipeline = je.at("pipeline").get<bool>();
      e.stage_kinds = je.at("stage_kinds").get<std::vector<std::string>>();
      e.labels = je.at("labels").get<std::map<std::string, std::string>>();
      if (!je.at("error").is_null()) e.error = je.at("error").get<std::string>();
      for (const auto& rep : je.at("reps")) e.reps.push_back(rep_from(rep));
      const auto& m = je.at("median");
      e.median.degraded = m.at("degraded").get<bool>();
      for (const auto& [name, v] : m.at("values").items()) {
        if (!analysis::metric_index(name)) throw FormatError("report: unknown metric " + name);
        e.median.set(name, optional_from(v));
      }
      e.median.run_id = e.id;
      e.median.labels = e.labels;
      e.median.schema = r.schema;
      e.median.fingerprint = r.fingerprint.str();
      r.entries.push_back(std::move(e));
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

std::vector<analysis::MetricVector> metric_rows(const RunReport& r) {
  std::vector<analysis::MetricVector> rows;
  for (const auto& e : r.entries) {
    if (e.reps.empty()) continue;
    auto v = e.median;
    v.run_id = e.id;
    v.labels = e.labels;
    v.schema = r.schema;
    v.fingerprint = r.fingerprint.str();
    rows.push_back(std::move(v));
  }
  return rows;
}

void emit_report(const RunReport& r, ReportFormat format, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report " + path.string());
  if (format == ReportFormat::structured) {
    out << to_json(r) << '\n';
  } else {
    analysis::write_metric_table(out, metric_rows(r));
  }
  out.close();
  if (!out) throw IoError("failed writing report " + path.string());
}

RunReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read report " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_report(ss.str());
}

}  // namespace dwarfs::harness
