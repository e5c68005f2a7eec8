#include "dwarfs/harness/execute.hpp"

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "dwarfs/harness/workload.hpp"
#include "dwarfs/sysmetrics/sampler.hpp"
#include "dwarfs/topdown/perf.hpp"

namespace dwarfs::harness {

using nlohmann::json;

namespace {

// Frames between harness and worker: one tag byte, u64 length, payload.
constexpr char kReady = 'R', kGo = 'G', kDone = 'D', kFailed = 'E', kExit = 'X';

bool write_all(int fd, const void* buf, std::size_t n) {
  const char* p = static_cast<const char*>(buf);
  while (n) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) return false;
    p += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

bool read_all(int fd, void* buf, std::size_t n) {
  char* p = static_cast<char*>(buf);
  while (n) {
    const ssize_t r = ::read(fd, p, n);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    p += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

bool send_frame(int fd, char tag, const std::string& payload = {}) {
  const std::uint64_t len = payload.size();
  return write_all(fd, &tag, 1) && write_all(fd, &len, sizeof len) &&
         write_all(fd, payload.data(), payload.size());
}

std::optional<std::pair<char, std::string>> recv_frame(int fd) {
  char tag = 0;
  std::uint64_t len = 0;
  if (!read_all(fd, &tag, 1) || !read_all(fd, &len, sizeof len)) return std::nullopt;
  std::string payload(len, '\0');
  if (!read_all(fd, payload.data(), len)) return std::nullopt;
  return std::pair{tag, std::move(payload)};
}

json result_json(const WorkloadResult& r) {
  json stages = json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"kind", std::string(kernels::to_string(s.kind))},
                      {"wall_time", s.wall_time},
                      {"percent", s.percent},
                      {"digest", s.output_digest.hex()}});
  return {{"kind", std::string(kernels::to_string(r.kernel.kind))},
          {"wall_time", r.kernel.wall_time},
          {"digest", r.kernel.output_digest.hex()},
          {"summary", r.kernel.output_summary},
          {"stages", stages},
          {"overhead_seconds", r.overhead_seconds},
          {"overhead_percent", r.overhead_percent},
          {"error", r.error ? json(*r.error) : json()}};
}

WorkloadResult result_from(const json& j) {
  WorkloadResult r;
  r.kernel.kind = *kernels::parse_kind(j.at("kind").get<std::string>());
  r.kernel.wall_time = j.at("wall_time").get<double>();
  r.kernel.output_digest = kernels::Digest128::from_hex(j.at("digest").get<std::string>());
  r.kernel.output_summary = j.at("summary").get<std::map<std::string, double>>();
  for (const auto& s : j.at("stages"))
    r.stages.push_back({*kernels::parse_kind(s.at("kind").get<std::string>()),
                        s.at("wall_time").get<double>(), s.at("percent").get<double>(),
                        kernels::Digest128::from_hex(s.at("digest").get<std::string>())});
  r.overhead_seconds = j.at("overhead_seconds").get<double>();
  r.overhead_percent = j.at("overhead_percent").get<double>();
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

[[noreturn]] void worker_main(const RunPlan& plan, const EntrySpec& entry,
                              const std::filesystem::path& scratch, int in_fd, int out_fd) {
  int status = 0;
  try {
    Workload w(plan, entry, scratch);
    try {
      w.prepare();
    } catch (const std::exception& e) {
      send_frame(out_fd, kFailed, std::string("preparing inputs: ") + e.what());
      ::_exit(2);
    }
    if (!send_frame(out_fd, kReady)) ::_exit(2);
    auto go = recv_frame(in_fd);
    if (!go || go->first != kGo) ::_exit(2);
    auto result = w.run();
    if (result.error) status = 2;
    if (!send_frame(out_fd, kDone, result_json(result).dump())) ::_exit(2);
    recv_frame(in_fd);  // kExit, or EOF if the harness went away
  } catch (const std::exception& e) {
    send_frame(out_fd, kFailed, e.what());
    status = 2;
  } catch (...) {
    status = 2;
  }
  ::_exit(status);
}

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "worker exited with status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return std::string("worker killed by signal ") + strsignal(WTERMSIG(status));
  return "worker ended abnormally";
}

struct RepOutcome {
  std::optional<RepResult> rep;
  std::optional<std::string> error;
};

RepOutcome run_rep(const RunPlan& plan, const EntrySpec& entry, const topdown::FormulaMap* map,
                   const std::filesystem::path& scratch) {
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));
  if (pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw IoError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) throw ResourceError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    worker_main(plan, entry, scratch, to_child[0], from_child[1]);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  const int out = to_child[1], in = from_child[0];
  auto finish = [&]() {
    ::close(out);
    ::close(in);
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    return status;
  };

  RepOutcome outcome;
  auto first = recv_frame(in);
  if (!first || first->first != kReady) {
    const int status = finish();
    outcome.error = first && first->first == kFailed ? first->second : describe_status(status);
    return outcome;
  }

  RepResult rep;
  std::unique_ptr<topdown::PerfSession> perf;
  if (!plan.counters) {
    rep.degraded_reason = "hardware counters disabled";
  } else if (!map) {
    rep.degraded_reason = "no formula map configured";
  } else {
    try {
      perf = std::make_unique<topdown::PerfSession>(pid, *map);
    } catch (const CounterUnavailable& e) {
      rep.degraded_reason = e.what();
    }
  }

  sysmetrics::ProcProvider provider(pid);
  sysmetrics::Sampler sampler(provider, plan.cadence_seconds);
  sampler.start();
  if (perf) perf->enable();
  if (!send_frame(out, kGo)) {
    sampler.stop();
    outcome.error = describe_status(finish());
    return outcome;
  }
  auto done = recv_frame(in);
  if (perf) perf->disable();
  sampler.stop();
  std::optional<topdown::CounterSnapshot> counters;
  if (perf) {
    try {
      counters = perf->read();
    } catch (const CounterUnavailable& e) {
      rep.degraded_reason = e.what();
    }
  }
  send_frame(out, kExit);
  const int status = finish();

  if (!done || done->first != kDone) {
    outcome.error = done && done->first == kFailed ? done->second : describe_status(status);
    return outcome;
  }
  auto result = result_from(json::parse(done->second));
  rep.kernel = result.kernel;
  rep.stages = result.stages;
  rep.overhead_seconds = result.overhead_seconds;
  rep.overhead_percent = result.overhead_percent;

  try {
    sampler.rethrow_if_failed();
    const auto series = sampler.series();
    rep.rates = sysmetrics::derive_rates(series.front(), series.back());
    rep.intervals = sysmetrics::interval_rates(series);
  } catch (const Error& e) {
    outcome.error = std::string("system metrics: ") + e.what();
    return outcome;
  }

  if (counters) {
    try {
      rep.topdown = topdown::level2_level3(*counters, *map);
      rep.counters = std::move(counters);
    } catch (const Error& e) {
      rep.degraded_reason = std::string("top-down derivation: ") + e.what();
    }
  }
  rep.degraded = !rep.topdown.has_value();
  if (!rep.degraded) rep.degraded_reason.clear();
  outcome.rep = std::move(rep);
  if (result.error) outcome.error = *result.error;
  return outcome;
}

}  // namespace

EntryReport run_entry(const RunPlan& plan, const EntrySpec& entry, const topdown::FormulaMap* map,
                      const Fingerprint& fingerprint, const ExecuteOptions& options) {
  EntryReport e;
  e.id = entry.id;
  e.pipeline = entry.pipeline;
  for (const auto& s : entry.stages) e.stage_kinds.emplace_back(kernels::to_string(s.kind));
  e.labels = entry.labels;
  const auto scratch = plan.output_dir / "scratch" / entry.id;
  for (std::size_t r = 0; r < plan.repetitions; ++r) {
    RepOutcome o;
    try {
      o = run_rep(plan, entry, map, scratch);
    } catch (const Error& err) {
      o.error = err.what();
    }
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);
    if (o.rep) {
      // A failed pipeline stage keeps the completed stages of that repetition.
      if (!o.error || entry.pipeline) e.reps.push_back(std::move(*o.rep));
    }
    if (o.error) {
      e.error = "repetition " + std::to_string(r) + ": " + *o.error;
      break;
    }
    if (options.log) {
      const auto& rep = e.reps.back();
      options.log(entry.id + " rep " + std::to_string(r) + ": " +
                  std::to_string(rep.kernel.wall_time) + " s" + (rep.degraded ? " (degraded)" : ""));
    }
  }
  if (e.error && options.log) options.log(entry.id + " failed: " + *e.error);
  e.median = median_vector(e.reps);
  e.median.run_id = e.id;
  e.median.labels = e.labels;
  e.median.schema = analysis::kMetricSchema;
  e.median.fingerprint = fingerprint.str();
  return e;
}

RunReport execute(const RunPlan& plan, const ExecuteOptions& options) {
  std::optional<topdown::FormulaMap> map;
  if (plan.counters && !plan.formula_map.empty()) {
    try {
      map = topdown::load_formula_map(plan.formula_map);
    } catch (const Error& e) {
      throw PlanError(plan.source.string() + ": formula_map: " + e.what());
    }
  }
  std::size_t threads = 1;
  for (const auto& e : plan.entries)
    for (const auto& s : e.stages) threads = std::max(threads, s.threads);
  generate_datasets(plan, threads, options.log, true);

  RunReport report;
  report.plan = plan.name;
  report.fingerprint = environment_fingerprint();
  for (const auto& entry : plan.entries)
    report.entries.push_back(run_entry(plan, entry, map ? &*map : nullptr, report.fingerprint, options));
  return report;
}

RunReport run_pipeline(const RunPlan& plan, const std::string& id, const ExecuteOptions& options) {
  RunPlan one = plan;
  one.entries = {plan.entry(id)};
  return execute(one, options);
}

int exit_code(const RunReport& r) {
  if (r.failed()) return 2;
  if (r.degraded()) return 3;
  return 0;
}

}  // namespace dwarfs::harness
