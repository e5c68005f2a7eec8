#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>

#include <json.hpp>

#include "support/temp_dir.hpp"

using dwarfs::testing::read_file;
using dwarfs::testing::TempDir;
using dwarfs::testing::write_file;

namespace {

const std::string kCli = DWARFS_CLI;
const std::string kConfig = DWARFS_CONFIG_DIR;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  Outcome o;
  FILE* p = popen((kCli + " " + args + " 2>&1").c_str(), "r");
  if (!p) return o;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) o.out.append(buf, n);
  const int status = pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string tiny_plan(const TempDir& dir, const std::string& entries) {
  const auto path = dir / "plan.json";
  write_file(path, R"({"name": "tiny", "repetitions": 1, "cadence_seconds": 0.05,
    "datasets": {"x": {"tensor": {"height": 8, "width": 8, "channels": 2}},
                 "t": {"text": {"size_bytes": 5000}}},
    "entries": )" + entries + "}");
  return path.string();
}

}  // namespace

TEST(Cli, Version) {
  auto o = run("version");
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("dwarfs-metrics/1"), std::string::npos);
  EXPECT_NE(o.out.find("opt="), std::string::npos);
}

TEST(Cli, PlanErrorsExitOne) {
  TempDir dir;
  auto plan = tiny_plan(dir, R"([{"kind": "quicksort", "input": "t"}])");
  auto o = run("run --plan " + plan + " --out " + (dir / "out").string());
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("entries[0].kind"), std::string::npos) << o.out;
  EXPECT_EQ(run("run").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
}

TEST(Cli, RunWithoutCountersIsDegraded) {
  TempDir dir;
  auto plan = tiny_plan(dir, R"([{"kind": "relu", "input": "x"}, {"kind": "grep", "input": "t"}])");
  auto o = run("run --plan " + plan + " --out " + (dir / "out").string() + " --no-counters --threads 2 --seed 9");
  EXPECT_EQ(o.code, 3) << o.out;
  auto report = nlohmann::json::parse(read_file(dir / "out/report.json"));
  EXPECT_EQ(report.at("entries").size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "out/report.csv"));
}

TEST(Cli, RuntimeFailureExitsTwo) {
  TempDir dir;
  auto plan = tiny_plan(dir, R"([{"id": "p", "pipeline": [{"kind": "relu", "input": "x"}, {"kind": "maxpool", "params": {"window": 3}}]}])");
  auto o = run("pipeline --plan " + plan + " --out " + (dir / "out").string() + " --no-counters");
  EXPECT_EQ(o.code, 2) << o.out;
  EXPECT_NE(o.out.find("FAILED"), std::string::npos);
}

TEST(Cli, GenWritesDatasets) {
  TempDir dir;
  auto plan = tiny_plan(dir, R"([{"kind": "relu", "input": "x"}])");
  EXPECT_EQ(run("gen --all --plan " + plan + " --out " + (dir / "out").string()).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out/data/x.tensor"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out/data/t.txt"));
}

TEST(Cli, TopdownFromFixture) {
  TempDir dir;
  auto o = run("topdown " + std::string(DWARFS_FIXTURE_DIR) + "/topdown_haswell.txt --formula-map " + kConfig +
               "/formula_map_haswell.json --out " + (dir / "td.json").string());
  EXPECT_EQ(o.code, 0) << o.out;
  auto j = nlohmann::json::parse(read_file(dir / "td.json"));
  double sum = 0;
  for (const auto& [k, v] : j.at("level1").items()) sum += v.get<double>();
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_EQ(run("topdown /nonexistent --formula-map " + kConfig + "/formula_map_haswell.json").code, 1);
}

TEST(Cli, AnalyzeSizeAxis) {
  TempDir dir;
  auto plan = tiny_plan(dir, "[]");
  write_file(dir / "plan.json", R"({"name": "axis", "repetitions": 1, "cadence_seconds": 0.05,
    "datasets": {"a": {"text": {"size_bytes": 20000}}, "b": {"text": {"size_bytes": 400000}}},
    "entries": [{"id": "wa", "kind": "wordcount", "input": "a"}, {"id": "wb", "kind": "wordcount", "input": "b"},
                {"id": "sa", "kind": "sort", "input": "a"}, {"id": "sb", "kind": "sort", "input": "b"}]})");
  ASSERT_EQ(run("run --no-counters --plan " + plan + " --out " + (dir / "out").string()).code, 3);
  auto o = run("analyze " + (dir / "out/report.csv").string() + " --axis size --out " + (dir / "a.json").string());
  ASSERT_EQ(o.code, 0) << o.out;
  auto j = nlohmann::json::parse(read_file(dir / "a.json"));
  EXPECT_EQ(j.at("axis").size(), 2u);
  EXPECT_EQ(j.at("linkage").at("merges").size(), 3u);
  EXPECT_TRUE(j.at("degraded").get<bool>());
}
