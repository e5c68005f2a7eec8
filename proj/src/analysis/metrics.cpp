#include "dwarfs/analysis/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "dwarfs/common/error.hpp"
#include "dwarfs/topdown/formula_map.hpp"

namespace dwarfs::analysis {

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"cpu_utilization", "iowait",    "disk_read_bw", "disk_write_bw",
                               "net_rx_bw",       "net_tx_bw", "majflt_rate"};
    for (auto s : topdown::kLevel1Names) n.emplace_back(s);
    for (auto s : topdown::kLevel2Names) n.emplace_back(s);
    for (auto s : topdown::level3_names()) n.emplace_back(s);
    n.insert(n.end(), {"ipc", "mlp", "wall_time"});
    return n;
  }();
  return names;
}

std::optional<std::size_t> metric_index(const std::string& name) {
  const auto& n = metric_names();
  auto it = std::find(n.begin(), n.end(), name);
  if (it == n.end()) return std::nullopt;
  return static_cast<std::size_t>(it - n.begin());
}

std::optional<double> MetricVector::get(const std::string& metric) const {
  auto i = metric_index(metric);
  if (!i) throw InvalidArgument("unknown metric " + metric);
  return values.at(*i);
}

void MetricVector::set(const std::string& metric, std::optional<double> v) {
  auto i = metric_index(metric);
  if (!i) throw InvalidArgument("unknown metric " + metric);
  values.at(*i) = v;
}

std::string MetricVector::label(const std::string& name) const {
  auto it = labels.find(name);
  return it == labels.end() ? std::string() : it->second;
}

std::vector<std::string> metric_table_header() {
  std::vector<std::string> h{"run_id"};
  h.insert(h.end(), kLabelNames.begin(), kLabelNames.end());
  h.insert(h.end(), {"degraded", "schema", "fingerprint"});
  h.insert(h.end(), metric_names().begin(), metric_names().end());
  return h;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

/// One CSV record; false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  for (;;) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw FormatError("metric table: unterminated quote");
      break;
    }
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          cur += static_cast<char>(in.get());
        } else {
          quoted = false;
        }
      } else {
        cur += static_cast<char>(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += static_cast<char>(c);
    }
  }
  fields.push_back(std::move(cur));
  return true;
}

}  // namespace

void write_metric_table(std::ostream& out, const std::vector<MetricVector>& rows) {
  const auto header = metric_table_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    if (r.values.size() != metric_names().size())
      throw InvalidArgument("metric vector " + r.run_id + " has wrong length");
    out << quote(r.run_id);
    for (const auto& l : kLabelNames) out << ',' << quote(r.label(l));
    out << ',' << (r.degraded ? "true" : "false") << ',' << quote(r.schema) << ','
        << quote(r.fingerprint);
    for (const auto& v : r.values) out << ',' << (v ? format_double(*v) : "NA");
    out << '\n';
  }
  if (!out) throw IoError("metric table: write failed");
}

std::vector<MetricVector> read_metric_table(std::istream& in) {
  std::vector<std::string> fields;
  if (!read_record(in, fields)) throw FormatError("metric table: empty input");
  if (fields != metric_table_header()) {
    // A table written under another schema has a different metric list.
    throw FormatError("metric table: header does not match schema " + std::string(kMetricSchema));
  }
  const std::size_t nlabels = kLabelNames.size();
  std::vector<MetricVector> rows;
  std::size_t line = 1;
  while (read_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != metric_table_header().size())
      throw FormatError("metric table line " + std::to_string(line) + ": expected " +
                        std::to_string(metric_table_header().size()) + " fields, got " +
                        std::to_string(fields.size()));
    MetricVector r;
    r.run_id = fields[0];
    for (std::size_t i = 0; i < nlabels; ++i)
      if (!fields[1 + i].empty()) r.labels[kLabelNames[i]] = fields[1 + i];
    const auto& deg = fields[1 + nlabels];
    if (deg != "true" && deg != "false")
      throw FormatError("metric table line " + std::to_string(line) + ": bad degraded flag");
    r.degraded = deg == "true";
    r.schema = fields[2 + nlabels];
    r.fingerprint = fields[3 + nlabels];
    for (std::size_t m = 0; m < r.values.size(); ++m) {
      const auto& f = fields[4 + nlabels + m];
      if (f == "NA") continue;
      double v = 0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size())
        throw FormatError("metric table line " + std::to_string(line) + ": bad value '" + f +
                          "' for " + metric_names()[m]);
      r.values[m] = v;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dwarfs::analysis
