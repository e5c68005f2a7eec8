#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dwarfs::analysis {

inline constexpr const char* kMetricSchema = "dwarfs-metrics/1";

/// Metric order shared by every vector of one schema: system rates, level-1,
/// level-2, level-3 fractions, ipc, mlp, wall_time.
const std::vector<std::string>& metric_names();
std::optional<std::size_t> metric_index(const std::string& name);

/// Label columns, in table order.
inline const std::vector<std::string> kLabelNames{"kind", "stack", "size", "type", "pattern"};

struct MetricVector {
  std::string run_id;
  std::map<std::string, std::string> labels;
  /// metric_names().size() entries; nullopt marks a metric the run lacks.
  std::vector<std::optional<double>> values;
  bool degraded = false;
  std::string schema = kMetricSchema;
  std::string fingerprint;

  MetricVector() : values(metric_names().size()) {}
  std::optional<double> get(const std::string& metric) const;
  void set(const std::string& metric, std::optional<double> v);
  std::string label(const std::string& name) const;

  bool operator==(const MetricVector&) const = default;
};

/// CSV: run_id, labels, degraded, schema, fingerprint, then one column per
/// metric. Missing values are written as NA. Values use round-trip precision.
void write_metric_table(std::ostream& out, const std::vector<MetricVector>& rows);
std::vector<MetricVector> read_metric_table(std::istream& in);
std::vector<std::string> metric_table_header();

}  // namespace dwarfs::analysis
