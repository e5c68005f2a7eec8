#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dwarfs/analysis/metrics.hpp"
#include "dwarfs/kernels/result.hpp"
#include "dwarfs/sysmetrics/snapshot.hpp"
#include "dwarfs/topdown/breakdown.hpp"

namespace dwarfs::harness {

struct Fingerprint {
  std::string cpu_model;
  unsigned cores = 0;
  std::uint64_t memory_bytes = 0;
  std::string kernel;
  std::string compiler;
  std::string opt_tag;

  /// One-line form stored in every table row.
  std::string str() const;
  bool operator==(const Fingerprint&) const = default;
};

Fingerprint environment_fingerprint();

struct StageResult {
  kernels::DwarfKind kind = kernels::DwarfKind::sort;
  double wall_time = 0.0;
  double percent = 0.0;  // of the pipeline's total wall time
  kernels::Digest128 output_digest;
  bool operator==(const StageResult&) const = default;
};

struct RepResult {
  kernels::KernelResult kernel;
  sysmetrics::SystemRates rates;                  // whole-run, first to last snapshot
  std::vector<sysmetrics::SystemRates> intervals;  // one per sampling interval
  std::optional<topdown::CounterSnapshot> counters;
  std::optional<topdown::TopDownBreakdown> topdown;
  bool degraded = false;
  std::string degraded_reason;
  /// Pipelines only; stage percentages plus overhead_percent total 100.
  std::vector<StageResult> stages;
  double overhead_seconds = 0.0;
  double overhead_percent = 0.0;

  bool operator==(const RepResult&) const = default;
};

struct EntryReport {
  std::string id;
  bool pipeline = false;
  std::vector<std::string> stage_kinds;
  std::map<std::string, std::string> labels;
  std::vector<RepResult> reps;
  /// Per-metric median over reps; a metric absent from any rep is absent.
  analysis::MetricVector median;
  std::optional<std::string> error;

  bool degraded() const;
  bool operator==(const EntryReport&) const = default;
};

struct RunReport {
  std::string plan;
  std::string schema = analysis::kMetricSchema;
  Fingerprint fingerprint;
  std::vector<EntryReport> entries;

  bool degraded() const;
  bool failed() const;
  bool operator==(const RunReport&) const = default;
};

analysis::MetricVector metric_vector(const RepResult& rep);
analysis::MetricVector median_vector(const std::vector<RepResult>& reps);

std::string to_json(const RunReport& r);
RunReport parse_report(std::string_view json_text);

/// One row per entry holding the median MetricVector.
std::vector<analysis::MetricVector> metric_rows(const RunReport& r);

enum class ReportFormat { structured, tabular };

/// Writes JSON (structured) or CSV (tabular) to `path`. Throws IoError if the
/// file cannot be written.
void emit_report(const RunReport& r, ReportFormat format, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

}  // namespace dwarfs::harness
