// One PASS/FAIL line per primary acceptance criterion. Exit status is the
// number of failed criteria.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dwarfs/analysis/analysis.hpp"
#include "dwarfs/common/rng.hpp"
#include "dwarfs/datagen/graph.hpp"
#include "dwarfs/datagen/matrix.hpp"
#include "dwarfs/datagen/tensor.hpp"
#include "dwarfs/datagen/text.hpp"
#include "dwarfs/harness/execute.hpp"
#include "dwarfs/harness/workload.hpp"
#include "dwarfs/kernels/bfs.hpp"
#include "dwarfs/kernels/dense.hpp"
#include "dwarfs/kernels/fft.hpp"
#include "dwarfs/kernels/md5.hpp"
#include "dwarfs/kernels/tensor_ops.hpp"
#include "dwarfs/topdown/breakdown.hpp"
#include "dwarfs/topdown/perf.hpp"
#include "support/compare.hpp"
#include "support/md5_vectors.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "support/topdown_oracle.hpp"

using namespace dwarfs;
using dwarfs::testing::max_relative_error;
using dwarfs::testing::TempDir;
using nlohmann::json;

namespace {

const std::filesystem::path kConfig = DWARFS_CONFIG_DIR;

/// Collects the first few failures of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    if (failures_.size() < 5) failures_.push_back(what);
    ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream os;
    os << checks_ << " checks";
    if (failed_) {
      os << ", " << failed_ << " failed:";
      for (const auto& f : failures_) os << " [" << f << "]";
    }
    return os.str();
  }

 private:
  std::size_t checks_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
};

std::string str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// --- Kernel oracles --------------------------------------------------------

void kernel_oracles(Check& c) {
  for (std::size_t n : {4, 8, 16, 32}) {
    const auto m = datagen::gen_matrix(n, 0.1, datagen::Distribution::normal, 100 + n);
    std::vector<kernels::Complex> x(m.dense.begin(), m.dense.end());
    const double err = max_relative_error(kernels::fft2d(m, false, 2).data, oracle::naive_dft2d(x, n));
    c.expect(err <= 1e-9, "fft n=" + std::to_string(n) + " rel err " + str(err));
  }

  for (const auto& [input, hex] : dwarfs::testing::kRfc1321Vectors)
    c.expect(kernels::Md5::of(input).hex() == hex, "md5(\"" + input + "\")");

  CounterRng rng(2024, stream_id("acceptance/kernels"));
  std::uint64_t k = 0;
  for (int i = 0; i < 50; ++i) {
    const auto log2 = static_cast<std::uint32_t>(1 + rng.below(k++, 12));
    const auto edge_factor = 1 + rng.below(k++, 16);
    const auto seed = rng.below(k++, 1u << 30);
    const auto g = datagen::gen_graph(log2, edge_factor, seed);
    std::vector<std::vector<std::uint32_t>> adj(g.vertex_count());
    for (std::uint64_t u = 0; u < g.vertex_count(); ++u)
      adj[u].assign(g.neighbors(u).begin(), g.neighbors(u).end());
    const auto root = rng.below(k++, g.vertex_count());
    const auto threads = 1 + rng.below(k++, 4);
    c.expect(kernels::bfs(g, root, threads).levels == oracle::sequential_bfs(adj, root),
             "bfs graph " + std::to_string(i) + " 2^" + std::to_string(log2));
  }

  auto dim = [&](std::uint64_t lo, std::uint64_t hi) { return static_cast<std::size_t>(lo + rng.below(k++, hi - lo + 1)); };
  for (int i = 0; i < 20; ++i) {
    const auto B = dim(1, 3), kh = dim(1, 4), kw = dim(1, 4), H = kh + dim(0, 8), W = kw + dim(0, 8),
               C = dim(1, 5), O = dim(1, 5);
    const auto x = datagen::gen_tensor_batch(B, H, W, C, k++);
    const auto f = datagen::gen_tensor_batch(kh, kw, C, O, k++);
    const double err = max_relative_error(kernels::conv2d(x, f, dim(1, 4)).values,
                                          oracle::direct_conv(x.values, B, H, W, C, f.values, kh, kw, O));
    c.expect(err <= 1e-6, "conv2d shape " + std::to_string(i) + " rel err " + str(err));
  }
  for (int i = 0; i < 20; ++i) {
    const auto B = dim(1, 3), wh = dim(1, 3), ww = dim(1, 3), H = wh * dim(1, 6), W = ww * dim(1, 6), C = dim(1, 5);
    const auto x = datagen::gen_tensor_batch(B, H, W, C, k++);
    const auto t = dim(1, 4);
    c.expect(kernels::pool(x, wh, ww, kernels::PoolMode::max, t).values ==
                 oracle::direct_pool(x.values, B, H, W, C, wh, ww, true),
             "maxpool shape " + std::to_string(i));
    const double err = max_relative_error(kernels::pool(x, wh, ww, kernels::PoolMode::avg, t).values,
                                          oracle::direct_pool(x.values, B, H, W, C, wh, ww, false));
    c.expect(err <= 1e-12, "avgpool shape " + std::to_string(i) + " rel err " + str(err));
  }
  for (int i = 0; i < 20; ++i) {
    const auto B = dim(1, 3), H = dim(1, 9), W = dim(1, 9), C = dim(1, 5);
    auto x = datagen::gen_tensor_batch(B, H, W, C, k++);
    for (auto& v : x.values) v = (v - 0.5f) * 16.0f;
    for (auto fn : {kernels::Activation::relu, kernels::Activation::sigmoid, kernels::Activation::tanh}) {
      const auto out = kernels::activation(x, fn, dim(1, 4));
      bool same = out.shape == x.shape;
      for (std::size_t j = 0; same && j < x.size(); ++j) same = out.values[j] == kernels::activate(x.values[j], fn);
      c.expect(same, "activation shape " + std::to_string(i));
    }
    for (float v : x.values) {
      const double d = v;
      c.expect(std::abs(kernels::activate(d, kernels::Activation::sigmoid) +
                        kernels::activate(-d, kernels::Activation::sigmoid) - 1.0) <= 1e-12,
               "sigmoid identity at " + str(d));
      c.expect(std::abs(kernels::activate(-d, kernels::Activation::tanh) +
                        kernels::activate(d, kernels::Activation::tanh)) <= 1e-12,
               "tanh odd at " + str(d));
    }
  }
  for (int i = 0; i < 20; ++i) {
    const auto n = dim(1, 48);
    const auto a = datagen::gen_matrix(n, 0.3, datagen::Distribution::normal, k++);
    const auto b = datagen::gen_matrix(n, 0.0, datagen::Distribution::uniform, k++,
                                       i % 2 ? datagen::MatrixStorage::coordinate : datagen::MatrixStorage::dense);
    c.expect(kernels::matmul(a, b, dim(1, 4)).data == oracle::triple_loop(a.dense, b.to_dense().dense, n, n, n),
             "matmul n=" + std::to_string(n));
  }
  for (int i = 0; i < 20; ++i) {
    const auto B = dim(1, 3), H = dim(1, 9), W = dim(1, 9), C = dim(1, 5);
    const auto x = datagen::gen_tensor_batch(B, H, W, C, k++);
    const auto y = datagen::gen_tensor_batch(B, H, W, C, k++);
    const auto out = kernels::multiply(x, y, dim(1, 4));
    bool same = true;
    for (std::size_t j = 0; j < x.size(); ++j) same = same && out.values[j] == x.values[j] * y.values[j];
    c.expect(same, "multiply shape " + std::to_string(i));
  }
}

// --- Thread invariance -----------------------------------------------------

json all_kinds_plan() {
  return {{"name", "threads"},
          {"seed", 77},
          {"sort_memory_budget_bytes", 65536},
          {"datasets",
           {{"t", {{"text", {{"size_bytes", 400000}, {"vocab_size", 2000}}}}},
            {"s", {{"sequence", {{"from", "t"}}}}},
            {"g", {{"graph", {{"log2_vertices", 11}, {"edge_factor", 8}}}}},
            {"m", {{"matrix", {{"n", 64}, {"sparsity", 0.2}, {"distribution", "normal"}}}}},
            {"x", {{"tensor", {{"batch", 3}, {"height", 16}, {"width", 16}, {"channels", 6}}}}},
            {"y", {{"tensor", {{"batch", 3}, {"height", 16}, {"width", 16}, {"channels", 6}}}}}}},
          {"entries",
           {{{"kind", "sort"}, {"input", "t"}},
            {{"kind", "wordcount"}, {"input", "t"}},
            {{"kind", "grep"}, {"input", "t"}, {"params", {{"pattern", "ba"}}}},
            {{"kind", "md5"}, {"input", "s"}},
            {{"kind", "matmul"}, {"input", "m"}},
            {{"kind", "sample"}, {"input", "t"}, {"params", {{"rate", 0.3}}}},
            {{"kind", "bfs"}, {"input", "g"}, {"params", {{"root", 3}}}},
            {{"kind", "fft"}, {"input", "m"}},
            {{"kind", "conv2d"}, {"input", "x"}, {"params", {{"filter_out", 5}}}},
            {{"kind", "maxpool"}, {"input", "x"}},
            {{"kind", "avgpool"}, {"input", "x"}},
            {{"kind", "relu"}, {"input", "x"}},
            {{"kind", "sigmoid"}, {"input", "x"}},
            {{"kind", "tanh"}, {"input", "x"}},
            {{"kind", "fully_connected"}, {"input", "x"}, {"params", {{"units", 7}}}},
            {{"kind", "multiply"}, {"input", "x"}, {"params", {{"other", "y"}}}}}}};
}

void thread_invariance(Check& c) {
  TempDir dir;
  std::map<std::string, kernels::Digest128> first;
  std::set<std::string> kinds;
  for (std::size_t t : {1, 2, 4, 8}) {
    harness::PlanOverrides o;
    o.threads = t;
    o.output_dir = dir.path() / "out";
    const auto plan = harness::parse_plan(all_kinds_plan().dump(), dir / "plan.json", o);
    harness::generate_datasets(plan, 2);
    for (const auto& e : plan.entries) {
      harness::Workload w(plan, e, dir / ("scratch-" + std::to_string(t)));
      w.prepare();
      const auto r = w.run();
      if (r.error) {
        c.expect(false, e.id + " threads " + std::to_string(t) + ": " + *r.error);
        continue;
      }
      kinds.insert(std::string(kernels::to_string(r.kernel.kind)));
      auto [it, fresh] = first.try_emplace(e.id, r.kernel.output_digest);
      if (!fresh) c.expect(it->second == r.kernel.output_digest, e.id + " digest differs at threads " + std::to_string(t));
    }
  }
  c.expect(kinds.size() == kernels::kAllKinds.size(), "ran " + std::to_string(kinds.size()) + " kinds");
}

// --- Top-down algebra ------------------------------------------------------

void topdown_algebra(Check& c) {
  topdown::CounterSnapshot w;
  w.cycles = 100;
  w.instructions = 300;
  w.events = {{"idq_not_delivered", 100}, {"uops_issued", 200}, {"uops_retired_slots", 180}, {"recovery_cycles", 5}};
  const auto l = topdown::level1(w);
  c.expect(l.frontend_bound == 0.25 && l.bad_speculation == 0.10 && l.retiring == 0.45 && l.backend_bound == 0.20,
           "worked example gave " + str(l.frontend_bound) + "/" + str(l.bad_speculation) + "/" + str(l.retiring) +
               "/" + str(l.backend_bound));

  const auto map = topdown::load_formula_map(kConfig / "formula_map_haswell.json");
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto counters = dwarfs::testing::random_counters(9001, i, map.required_events);
    const auto b = topdown::level2_level3(counters, map);
    const auto& v = b.level1;
    const std::string id = "fixture " + std::to_string(i);
    for (auto n : topdown::kLevel1Names) c.expect(v.get(n) >= 0.0 && v.get(n) <= 1.0, id + " " + std::string(n));
    c.expect(std::abs(v.retiring + v.bad_speculation + v.frontend_bound + v.backend_bound - 1.0) <= 1e-9, id + " level-1 sum");
    c.expect(std::abs(b.level2.at("frontend_latency") + b.level2.at("frontend_bandwidth") - v.frontend_bound) <= 1e-9,
             id + " frontend split");
    c.expect(std::abs(b.level2.at("backend_memory") + b.level2.at("backend_core") - v.backend_bound) <= 1e-9,
             id + " backend split");
  }
}

// --- Analysis oracles ------------------------------------------------------

void analysis_oracles(Check& c) {
  CounterRng rng(4711, stream_id("acceptance/analysis"));
  std::uint64_t k = 0;
  for (int set = 0; set < 100; ++set) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(k++, 11));
    const auto d = static_cast<Eigen::Index>(1 + rng.below(k++, 5));
    Eigen::MatrixXd m(n, d);
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) pts[static_cast<std::size_t>(i)].push_back(m(i, j) = rng.normal(k++));
    const auto t = analysis::hcluster(m);
    const auto o = oracle::brute_force_average_linkage(pts);
    bool same = t.merges.size() == o.size();
    for (std::size_t i = 0; same && i < o.size(); ++i)
      same = t.merges[i].a == o[i].a && t.merges[i].b == o[i].b && t.merges[i].size == o[i].size &&
             std::abs(t.merges[i].distance - o[i].distance) <= 1e-9;
    c.expect(same, "merge sequence of set " + std::to_string(set));
  }

  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd raw(8, 5);
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 5; ++j) raw(i, j) = rng.normal(k++) * double(j + 1);
    const auto s = analysis::standardize(raw, {"a", "b", "c", "d", "e"});
    const auto p = analysis::pca(s.values, 1.0);
    const double err = (p.projected * p.components.transpose() - s.values).cwiseAbs().maxCoeff();
    c.expect(p.retained == 5 && err <= 1e-9, "pca reconstruction error " + str(err));
  }

  Eigen::MatrixXd three(3, 1);
  three << 0, 1, 10;
  const auto t = analysis::hcluster(three);
  c.expect(t.merges.size() == 2 && t.merges[0].distance == 1.0 && t.merges[1].distance == 9.5,
           "{0,1,10} merges");
}

// --- Generator statistics --------------------------------------------------

void generator_statistics(Check& c) {
  const double sparsities[] = {0.1, 0.5, 0.9};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double s = sparsities[seed % 3];
    const auto m = datagen::gen_matrix(1000, s, datagen::Distribution::uniform, seed);
    const double frac = double(m.zero_count()) / 1e6;
    c.expect(std::abs(frac - s) <= 0.01, "zero fraction " + str(frac) + " for sparsity " + str(s));
  }

  CounterRng rng(31337, stream_id("acceptance/graph"));
  std::uint64_t k = 0;
  for (int i = 0; i < 20; ++i) {
    const auto log2 = static_cast<std::uint32_t>(1 + rng.below(k++, 12));
    const auto edge_factor = 1 + rng.below(k++, 16);
    const auto seed = k++;
    const auto threads = 1 + rng.below(k++, 4);
    const auto g = datagen::gen_graph(log2, edge_factor, seed, threads);
    const auto n = g.vertex_count();
    bool ok = g.row_offsets.size() == n + 1 && g.row_offsets.front() == 0 &&
              g.row_offsets.back() == g.column_indices.size();
    std::set<std::pair<std::uint64_t, std::uint64_t>> edges;
    for (std::uint64_t u = 0; ok && u < n; ++u) {
      ok = g.row_offsets[u] <= g.row_offsets[u + 1];
      for (auto v : g.neighbors(u)) ok = ok && v < n && v != u && edges.emplace(u, v).second;
    }
    for (const auto& [u, v] : edges) ok = ok && edges.count({v, u});
    c.expect(ok, "graph set " + std::to_string(i) + " CSR or symmetry");
  }

  TempDir dir;
  for (double s : {0.8, 1.0, 1.5}) {
    const auto path = dir / "zipf.txt";
    datagen::gen_text(1'000'000, 1000, s, 5, path);
    std::ifstream in(path);
    std::map<std::string, std::uint64_t> counts;
    for (std::string w; in >> w;) ++counts[w];
    std::vector<std::uint64_t> freq;
    for (const auto& [w, n] : counts) freq.push_back(n);
    std::sort(freq.rbegin(), freq.rend());
    const double ratio = freq.size() >= 2 ? double(freq[0]) / double(freq[1]) : 0.0;
    const double want = std::pow(2.0, s);
    c.expect(std::abs(ratio - want) <= 0.1 * want, "zipf s=" + str(s) + " ratio " + str(ratio));
  }
}

// --- End-to-end smoke ------------------------------------------------------

bool counters_available() {
  try {
    const auto map = topdown::load_formula_map(kConfig / "formula_map_haswell.json");
    topdown::PerfSession probe(getpid(), map);
    return true;
  } catch (const CounterUnavailable&) {
    return false;
  }
}

void smoke(Check& c, std::string& note) {
  TempDir dir;
  harness::PlanOverrides o;
  o.output_dir = dir.path();
  const auto plan = harness::load_plan(kConfig / "plans" / "paper-small-scaled.json", o);
  const auto report = harness::execute(plan);
  const bool capable = counters_available();
  note = capable ? "counter-capable host" : "counter-incapable host, expecting degraded";

  std::set<kernels::DwarfKind> kinds;
  c.expect(report.entries.size() == 16, std::to_string(report.entries.size()) + " entries");
  for (const auto& e : report.entries) {
    c.expect(!e.error, e.id + ": " + e.error.value_or(""));
    c.expect(e.reps.size() == plan.repetitions, e.id + " repetitions");
    c.expect(e.degraded() == !capable, e.id + (e.degraded() ? " degraded" : " not degraded"));
    for (const auto& r : e.reps) {
      kinds.insert(r.kernel.kind);
      c.expect(r.kernel.wall_time > 0, e.id + " wall time");
      c.expect(!r.intervals.empty() || r.kernel.wall_time < plan.cadence_seconds, e.id + " interval series");
      c.expect(r.topdown.has_value() == capable, e.id + " top-down presence");
    }
    c.expect(e.median.get("wall_time").has_value() && e.median.get("cpu_utilization").has_value(),
             e.id + " median metrics");
  }
  c.expect(kinds.size() == 16, "distinct kinds " + std::to_string(kinds.size()));
  c.expect(report.degraded() == !capable, "report degraded flag");
  c.expect(harness::exit_code(report) == (capable ? 0 : 3), "exit code");

  harness::emit_report(report, harness::ReportFormat::structured, dir / "report.json");
  harness::emit_report(report, harness::ReportFormat::tabular, dir / "report.csv");
  c.expect(harness::read_report(dir / "report.json") == report, "structured report round trip");
  std::ifstream csv(dir / "report.csv");
  c.expect(analysis::read_metric_table(csv).size() == 16, "tabular rows");
}

// --- Size-axis trend -------------------------------------------------------

void size_axis(Check& c) {
  TempDir dir;
  harness::PlanOverrides o;
  o.output_dir = dir.path();
  const auto plan = harness::load_plan(kConfig / "plans" / "size-axis.json", o);
  const auto report = harness::execute(plan);
  std::map<std::string, std::vector<double>> walls;
  for (const auto& e : report.entries) {
    c.expect(!e.error, e.id + ": " + e.error.value_or(""));
    walls[e.labels.at("kind")].push_back(e.median.get("wall_time").value_or(0.0));
  }
  for (const auto& kind : {"sort", "wordcount"}) {
    const auto& w = walls[kind];
    c.expect(w.size() == 3, std::string(kind) + " sizes");
    for (std::size_t i = 1; i < w.size(); ++i)
      c.expect(w[i] > w[i - 1], std::string(kind) + " wall " + str(w[i - 1]) + " -> " + str(w[i]));
  }
  const auto groups = analysis::compare_axis_groups(harness::metric_rows(report), analysis::Axis::size);
  c.expect(groups.size() == 2, "axis groups " + std::to_string(groups.size()));
  const auto wall = *analysis::metric_index("wall_time");
  for (const auto& g : groups)
    for (std::size_t r = 1; r < g.rows.size(); ++r) {
      const auto& ratio = g.rows[r].ratios.at(wall);
      c.expect(ratio && *ratio > 1.0, g.rows[r].run_id + " wall ratio " + (ratio ? str(*ratio) : "absent"));
    }
}

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(Check&, std::string&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"kernel-oracles", 120, [](Check& c, std::string&) { kernel_oracles(c); }},
      {"thread-invariance", 300, [](Check& c, std::string&) { thread_invariance(c); }},
      {"topdown-algebra", 10, [](Check& c, std::string&) { topdown_algebra(c); }},
      {"analysis-oracles", 30, [](Check& c, std::string&) { analysis_oracles(c); }},
      {"generator-statistics", 600, [](Check& c, std::string&) { generator_statistics(c); }},
      {"end-to-end-smoke", 600, smoke},
      {"size-axis-trend", 600, [](Check& c, std::string&) { size_axis(c); }},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    std::string note;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(c, note);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < cr.budget_seconds, "runtime " + str(secs) + " s over budget " + str(cr.budget_seconds) + " s");
    failed += !c.ok();
    std::cout << (c.ok() ? "PASS " : "FAIL ") << cr.name << " (" << c.summary() << ", "
              << std::to_string(secs) << " s" << (note.empty() ? "" : ", " + note) << ")" << std::endl;
  }
  return failed;
}
