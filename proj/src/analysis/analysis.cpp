#include "dwarfs/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "dwarfs/common/error.hpp"

namespace dwarfs::analysis {

MetricMatrix assemble(const std::vector<MetricVector>& rows) {
  if (rows.empty()) throw InvalidArgument("analysis: no rows");
  for (const auto& r : rows) {
    if (r.schema != rows.front().schema)
      throw InvalidArgument("analysis: rows mix metric schemas " + rows.front().schema + " and " +
                            r.schema);
    if (r.degraded != rows.front().degraded)
      throw InvalidArgument("analysis: rows mix degraded and full runs (" + r.run_id + ")");
  }
  MetricMatrix m;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < metric_names().size(); ++c) {
    const bool complete =
        std::all_of(rows.begin(), rows.end(), [&](const MetricVector& r) { return r.values[c]; });
    if (complete) {
      keep.push_back(c);
      m.columns.push_back(metric_names()[c]);
    } else {
      m.excluded_missing.push_back(metric_names()[c]);
    }
  }
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.row_ids.push_back(rows[i].run_id);
    for (std::size_t j = 0; j < keep.size(); ++j)
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *rows[i].values[keep[j]];
  }
  return m;
}

Standardized standardize(const Eigen::MatrixXd& m, const std::vector<std::string>& columns) {
  if (m.rows() < 2) throw InvalidArgument("standardize: need at least 2 rows");
  if (static_cast<std::size_t>(m.cols()) != columns.size())
    throw InvalidArgument("standardize: column names do not match matrix");
  const double n = static_cast<double>(m.rows());
  Standardized s;
  std::vector<Eigen::Index> keep;
  std::vector<double> means, sds;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double mean = m.col(j).sum() / n;
    const double var = (m.col(j).array() - mean).square().sum() / n;
    // Relative threshold: rounding in the mean leaves a tiny residual variance
    // on columns that are constant in exact arithmetic.
    const double scale = std::max(1.0, m.col(j).cwiseAbs().maxCoeff());
    if (!(var > scale * scale * 1e-24)) {
      s.dropped_constant.push_back(columns[static_cast<std::size_t>(j)]);
      continue;
    }
    keep.push_back(j);
    means.push_back(mean);
    sds.push_back(std::sqrt(var));
    s.columns.push_back(columns[static_cast<std::size_t>(j)]);
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  s.mean.resize(k);
  s.stddev.resize(k);
  s.values.resize(m.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    s.mean(j) = means[static_cast<std::size_t>(j)];
    s.stddev(j) = sds[static_cast<std::size_t>(j)];
    s.values.col(j) = (m.col(keep[static_cast<std::size_t>(j)]).array() - s.mean(j)) / s.stddev(j);
  }
  return s;
}

PcaResult pca(const Eigen::MatrixXd& m, double variance_target) {
  if (m.rows() < 2 || m.cols() < 1) throw InvalidArgument("pca: need at least 2 rows and 1 column");
  if (!(variance_target > 0.0 && variance_target <= 1.0))
    throw InvalidArgument("pca: variance_target must be in (0, 1]");
  const Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(m.rows());
  const double trace = cov.trace();
  if (!(trace > 0.0)) throw InvalidArgument("pca: degenerate matrix with zero variance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("pca: eigendecomposition failed");
  const auto d = cov.cols();
  PcaResult r;
  r.eigenvalues.resize(d);
  r.components.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    // The solver returns ascending order.
    r.eigenvalues(i) = std::max(0.0, solver.eigenvalues()(d - 1 - i));
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - i);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    r.components.col(i) = v;
  }
  r.explained_ratio = r.eigenvalues / r.eigenvalues.sum();
  double cum = 0.0;
  r.retained = d;
  for (Eigen::Index i = 0; i < d; ++i) {
    cum += r.explained_ratio(i);
    if (cum >= variance_target - 1e-12) {
      r.retained = i + 1;
      break;
    }
  }
  r.projected = centered * r.components.leftCols(r.retained);
  return r;
}

LinkageTree hcluster(const Eigen::MatrixXd& points, std::vector<std::string> labels) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 2) throw InvalidArgument("hcluster: need at least 2 points");
  if (!labels.empty() && labels.size() != n)
    throw InvalidArgument("hcluster: label count does not match points");

  // sum(i, j) holds the total of leaf-to-leaf distances between clusters i and
  // j, so the average is sum / (size_i * size_j).
  std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      sum[i][j] = sum[j][i] =
          (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j))).norm();

  std::vector<std::size_t> id(n), size(n, 1), min_leaf(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) id[i] = min_leaf[i] = i;

  LinkageTree t;
  t.leaf_labels = std::move(labels);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    std::pair<std::size_t, std::size_t> best_key{n, n};
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double d = sum[i][j] / static_cast<double>(size[i] * size[j]);
        const std::pair key{std::min(min_leaf[i], min_leaf[j]), std::max(min_leaf[i], min_leaf[j])};
        if (d < best || (d == best && key < best_key)) {
          best = d;
          bi = i;
          bj = j;
          best_key = key;
        }
      }
    }
    t.merges.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]), best,
                        size[bi] + size[bj]});
    // Slot bi becomes the merged cluster; bj is retired.
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      sum[bi][k] = sum[k][bi] = sum[bi][k] + sum[bj][k];
    }
    size[bi] += size[bj];
    min_leaf[bi] = std::min(min_leaf[bi], min_leaf[bj]);
    id[bi] = n + step;
    alive[bj] = false;
  }
  return t;
}

Axis parse_axis(const std::string& s) {
  if (s == "size") return Axis::size;
  if (s == "pattern") return Axis::pattern;
  if (s == "type") return Axis::type;
  throw InvalidArgument("unknown axis '" + s + "' (expected size, pattern or type)");
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::size: return "size";
    case Axis::pattern: return "pattern";
    case Axis::type: return "type";
  }
  return "?";
}

AxisComparison compare_axis(const std::vector<MetricVector>& runs, Axis axis) {
  if (runs.empty()) throw InvalidArgument("compare_axis: no runs");
  const std::string axis_label = to_string(axis);
  const auto& base = runs.front();
  for (const auto& r : runs) {
    if (r.schema != base.schema)
      throw InvalidArgument("compare_axis: rows mix metric schemas");
    if (r.degraded != base.degraded)
      throw InvalidArgument("compare_axis: rows mix degraded and full runs (" + r.run_id + ")");
    for (const auto& l : kLabelNames) {
      if (l == axis_label) continue;
      if (r.label(l) != base.label(l))
        throw InvalidArgument("compare_axis: run " + r.run_id + " differs from " + base.run_id +
                              " in label '" + l + "' (" + r.label(l) + " vs " + base.label(l) +
                              "), outside axis " + axis_label);
    }
  }
  AxisComparison c;
  c.axis = axis;
  c.baseline = base.run_id;
  c.metrics = metric_names();
  for (const auto& r : runs) {
    AxisRow row;
    row.run_id = r.run_id;
    row.axis_value = r.label(axis_label);
    for (std::size_t m = 0; m < r.values.size(); ++m) {
      const auto& v = r.values[m];
      const auto& b = base.values[m];
      if (!v || !b) row.ratios.emplace_back();
      else if (*b == 0.0) row.ratios.push_back(*v == 0.0 ? std::optional(1.0) : std::nullopt);
      else row.ratios.push_back(*v / *b);
    }
    c.rows.push_back(std::move(row));
  }
  return c;
}

std::vector<AxisComparison> compare_axis_groups(const std::vector<MetricVector>& runs, Axis axis) {
  const std::string axis_label = to_string(axis);
  std::vector<std::vector<MetricVector>> groups;
  std::map<std::vector<std::string>, std::size_t> index;
  for (const auto& r : runs) {
    std::vector<std::string> key;
    for (const auto& l : kLabelNames)
      if (l != axis_label) key.push_back(r.label(l));
    auto [it, fresh] = index.try_emplace(key, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(r);
  }
  std::vector<AxisComparison> out;
  for (const auto& g : groups) out.push_back(compare_axis(g, axis));
  return out;
}

namespace {

nlohmann::json to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return out;
}

}  // namespace

std::string analyze_report(const std::vector<MetricVector>& rows, const AnalysisOptions& opt) {
  auto mm = assemble(rows);
  auto st = standardize(mm.values, mm.columns);
  if (st.columns.empty()) throw InvalidArgument("analysis: every metric column is constant");
  auto p = pca(st.values, opt.variance_target);
  auto tree = hcluster(p.projected, mm.row_ids);

  nlohmann::json j;
  j["schema"] = rows.front().schema;
  j["degraded"] = rows.front().degraded;
  j["variance_convention"] = "population";
  j["variance_target"] = opt.variance_target;
  j["runs"] = mm.row_ids;
  j["columns"] = st.columns;
  j["excluded_missing"] = mm.excluded_missing;
  j["dropped_constant"] = st.dropped_constant;
  j["eigenvalues"] = to_json(p.eigenvalues);
  j["explained_ratio"] = to_json(p.explained_ratio);
  j["retained_components"] = p.retained;
  j["loadings"] = to_json(Eigen::MatrixXd(p.components.leftCols(p.retained)));
  j["projected"] = to_json(p.projected);
  auto merges = nlohmann::json::array();
  for (const auto& m : tree.merges)
    merges.push_back({{"a", m.a}, {"b", m.b}, {"distance", m.distance}, {"size", m.size}});
  j["linkage"] = {{"method", "average"}, {"metric", "euclidean"}, {"leaves", tree.leaf_labels},
                  {"merges", merges}};
  return j.dump(2);
}

std::string axis_report(const AxisComparison& c) {
  nlohmann::json j;
  j["axis"] = to_string(c.axis);
  j["baseline"] = c.baseline;
  j["metrics"] = c.metrics;
  auto rows = nlohmann::json::array();
  for (const auto& r : c.rows) {
    auto ratios = nlohmann::json::array();
    for (const auto& v : r.ratios) ratios.push_back(v ? nlohmann::json(*v) : nlohmann::json());
    rows.push_back({{"run_id", r.run_id}, {"value", r.axis_value}, {"ratios", ratios}});
  }
  j["rows"] = rows;
  return j.dump(2);
}

}  // namespace dwarfs::analysis
