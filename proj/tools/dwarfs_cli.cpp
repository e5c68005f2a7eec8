#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dwarfs/analysis/analysis.hpp"
#include "dwarfs/harness/execute.hpp"
#include "dwarfs/topdown/breakdown.hpp"

namespace {

using namespace dwarfs;
using nlohmann::json;

constexpr int kOk = 0, kPlanError = 1, kRuntimeError = 2;

struct Common {
  std::string plan;
  std::string out;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> cadence;
  std::string formula_map;
  bool no_counters = false;

  harness::PlanOverrides overrides() const {
    harness::PlanOverrides o;
    o.threads = threads;
    o.seed = seed;
    o.cadence_seconds = cadence;
    if (!formula_map.empty()) o.formula_map = std::filesystem::absolute(formula_map);
    if (!out.empty()) o.output_dir = out;
    o.no_counters = no_counters;
    return o;
  }
};

void add_plan_flags(CLI::App* cmd, Common& c, bool execution) {
  cmd->add_option("--plan", c.plan, "Run plan (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory (default out/<plan name>)");
  cmd->add_option("--threads", c.threads, "Override every stage's thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Override the plan seed");
  if (!execution) return;
  cmd->add_option("--cadence", c.cadence, "Sampling cadence in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--formula-map", c.formula_map, "Top-down formula map (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--no-counters", c.no_counters, "Collect system metrics only");
}

void log_line(const std::string& s) { std::cerr << s << '\n'; }

std::size_t max_threads(const harness::RunPlan& plan) {
  std::size_t t = 1;
  for (const auto& e : plan.entries)
    for (const auto& s : e.stages) t = std::max(t, s.threads);
  return t;
}

int finish_run(const harness::RunPlan& plan, const harness::RunReport& report) {
  std::filesystem::create_directories(plan.output_dir);
  const auto json_path = plan.output_dir / "report.json";
  const auto csv_path = plan.output_dir / "report.csv";
  harness::emit_report(report, harness::ReportFormat::structured, json_path);
  harness::emit_report(report, harness::ReportFormat::tabular, csv_path);
  for (const auto& e : report.entries) {
    std::cout << e.id << '\t';
    if (e.error) std::cout << "FAILED\t" << *e.error;
    else std::cout << (e.degraded() ? "degraded" : "ok");
    if (auto w = e.median.get("wall_time")) std::cout << '\t' << *w << " s";
    std::cout << '\n';
    if (e.pipeline && !e.reps.empty()) {
      const auto& rep = e.reps.front();
      for (const auto& s : rep.stages)
        std::cout << "  " << kernels::to_string(s.kind) << '\t' << s.percent << " %\n";
      std::cout << "  overhead\t" << rep.overhead_percent << " %\n";
    }
  }
  std::cout << "report: " << json_path.string() << '\n' << "table: " << csv_path.string() << '\n';
  return harness::exit_code(report);
}

json breakdown_json(const topdown::TopDownBreakdown& t) {
  json l1;
  for (auto n : topdown::kLevel1Names) l1[std::string(n)] = t.level1.get(n);
  return {{"level1", l1},
          {"level2", t.level2},
          {"level3", t.level3},
          {"ipc", t.ipc},
          {"mlp", t.mlp ? json(*t.mlp) : json()}};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!(out << text << '\n')) throw IoError("cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data dwarf benchmark harness"};
  app.require_subcommand(1);

  Common gen_opts, run_opts, pipe_opts;
  auto* gen = app.add_subcommand("gen", "Generate the datasets of a plan");
  add_plan_flags(gen, gen_opts, false);
  bool gen_all = false;
  gen->add_flag("--all", gen_all, "Also generate datasets no entry references");

  auto* run = app.add_subcommand("run", "Execute every entry of a plan");
  add_plan_flags(run, run_opts, true);

  auto* pipe = app.add_subcommand("pipeline", "Execute one entry of a plan");
  add_plan_flags(pipe, pipe_opts, true);
  std::string entry_id;
  pipe->add_option("entry", entry_id, "Entry id (default: the plan's only pipeline)");

  auto* td = app.add_subcommand("topdown", "Top-down breakdown from a counter fixture");
  std::string fixture, td_map, td_out;
  td->add_option("fixture", fixture, "Counter fixture")->required()->check(CLI::ExistingFile);
  td->add_option("--formula-map", td_map, "Top-down formula map (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  td->add_option("--out", td_out, "Output file (default stdout)");

  auto* an = app.add_subcommand("analyze", "PCA, clustering and axis comparison over report tables");
  std::vector<std::string> tables;
  std::string axis, an_out;
  double variance = 0.85;
  an->add_option("tables", tables, "Tabular reports (CSV)")->required()->check(CLI::ExistingFile);
  an->add_option("--axis", axis, "Compare runs along size, type, pattern or stack");
  an->add_option("--variance", variance, "Explained variance retained by PCA")
      ->check(CLI::Range(0.0, 1.0));
  an->add_option("--out", an_out, "Output file (default stdout)");

  app.add_subcommand("version", "Print the version and environment fingerprint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kPlanError;
  }

  try {
    if (*gen) {
      auto plan = harness::load_plan(gen_opts.plan, gen_opts.overrides());
      harness::generate_datasets(plan, max_threads(plan), log_line, !gen_all);
      for (const auto& d : plan.datasets) std::cout << d.name << '\t' << d.path.string() << '\n';
      return kOk;
    }
    if (*run) {
      auto plan = harness::load_plan(run_opts.plan, run_opts.overrides());
      return finish_run(plan, harness::execute(plan, {log_line}));
    }
    if (*pipe) {
      auto plan = harness::load_plan(pipe_opts.plan, pipe_opts.overrides());
      if (entry_id.empty()) {
        std::vector<std::string> ids;
        for (const auto& e : plan.entries)
          if (e.pipeline) ids.push_back(e.id);
        if (ids.size() != 1)
          throw harness::PlanError(pipe_opts.plan + ": name the entry to run (" +
                                   std::to_string(ids.size()) + " pipelines in plan)");
        entry_id = ids.front();
      }
      try {
        plan.entry(entry_id);
      } catch (const Error& e) {
        throw harness::PlanError(pipe_opts.plan + ": " + e.what());
      }
      return finish_run(plan, harness::run_pipeline(plan, entry_id, {log_line}));
    }
    if (*td) {
      const auto counters = topdown::read_counter_fixture(fixture);
      const auto map = topdown::load_formula_map(td_map);
      write_output(td_out, breakdown_json(topdown::level2_level3(counters, map)).dump(2));
      return kOk;
    }
    if (*an) {
      std::vector<analysis::MetricVector> rows;
      for (const auto& t : tables) {
        std::ifstream in(t);
        if (!in) throw IoError("cannot read " + t);
        auto part = analysis::read_metric_table(in);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      json out = json::parse(analysis::analyze_report(rows, {variance}));
      if (!axis.empty()) {
        out["axis"] = json::array();
        for (const auto& c : analysis::compare_axis_groups(rows, analysis::parse_axis(axis)))
          out["axis"].push_back(json::parse(analysis::axis_report(c)));
      }
      write_output(an_out, out.dump(2));
      return kOk;
    }
    const auto f = harness::environment_fingerprint();
    std::cout << "dwarfs " << DWARFS_VERSION << '\n'
              << "schema " << analysis::kMetricSchema << '\n'
              << "fingerprint " << f.str() << '\n';
    return kOk;
  } catch (const harness::PlanError& e) {
    std::cerr << "plan error: " << e.what() << '\n';
    return kPlanError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
