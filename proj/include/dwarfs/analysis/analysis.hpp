#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dwarfs/analysis/metrics.hpp"

namespace dwarfs::analysis {

/// Rows ready for standardization. Columns any run lacks are excluded and
/// listed, never imputed.
struct MetricMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> columns;
  std::vector<std::string> excluded_missing;
  Eigen::MatrixXd values;
};

/// Refuses rows with differing schema or mixed degraded flags.
MetricMatrix assemble(const std::vector<MetricVector>& rows);

struct Standardized {
  std::vector<std::string> columns;
  std::vector<std::string> dropped_constant;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // population (1/n) convention
  Eigen::MatrixXd values;
};

/// Requires at least 2 rows. Zero-variance columns are dropped.
Standardized standardize(const Eigen::MatrixXd& m, const std::vector<std::string>& columns);

struct PcaResult {
  /// Every eigenvalue of the population covariance matrix, descending.
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd explained_ratio;
  /// Eigenvectors as columns in eigenvalue order. Each column's entry of
  /// largest magnitude is positive.
  Eigen::MatrixXd components;
  /// Smallest k whose cumulative explained ratio reaches the target.
  Eigen::Index retained = 0;
  /// Centered input times the first `retained` components.
  Eigen::MatrixXd projected;
};

PcaResult pca(const Eigen::MatrixXd& m, double variance_target = 0.85);

struct Merge {
  std::size_t a = 0;  // a < b; ids >= n denote the cluster formed at merge id - n
  std::size_t b = 0;
  double distance = 0.0;
  std::size_t size = 0;

  bool operator==(const Merge&) const = default;
};

struct LinkageTree {
  std::vector<Merge> merges;
  std::vector<std::string> leaf_labels;
};

/// Average linkage over Euclidean distances between rows. Among equally
/// distant cluster pairs the one with the lowest (min leaf, min leaf) wins.
LinkageTree hcluster(const Eigen::MatrixXd& points, std::vector<std::string> labels = {});

enum class Axis { size, pattern, type };
Axis parse_axis(const std::string& s);
std::string to_string(Axis a);

struct AxisRow {
  std::string run_id;
  std::string axis_value;
  /// value / baseline per metric; 1 when both are 0; absent when either is
  /// missing or only the baseline is 0.
  std::vector<std::optional<double>> ratios;
};

struct AxisComparison {
  Axis axis = Axis::size;
  std::string baseline;
  std::vector<std::string> metrics;
  std::vector<AxisRow> rows;
};

/// The first row is the baseline. Every label other than the axis must agree.
AxisComparison compare_axis(const std::vector<MetricVector>& runs, Axis axis);

/// Partitions `runs` by every label except the axis, keeping first-seen order
/// of groups and rows, and compares each group.
std::vector<AxisComparison> compare_axis_groups(const std::vector<MetricVector>& runs, Axis axis);

struct AnalysisOptions {
  double variance_target = 0.85;
};

/// assemble -> standardize -> pca -> hcluster on the projected coordinates,
/// serialized as JSON.
std::string analyze_report(const std::vector<MetricVector>& rows, const AnalysisOptions& opt);
std::string axis_report(const AxisComparison& c);

}  // namespace dwarfs::analysis
