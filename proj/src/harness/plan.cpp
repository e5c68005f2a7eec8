#include "dwarfs/harness/plan.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dwarfs/common/rng.hpp"

namespace dwarfs::harness {

using nlohmann::json;

const DatasetSpec& RunPlan::dataset(const std::string& name) const {
  for (const auto& d : datasets)
    if (d.name == name) return d;
  throw PlanError(source.string() + ": unknown dataset '" + name + "'");
}

const EntrySpec& RunPlan::entry(const std::string& id) const {
  for (const auto& e : entries)
    if (e.id == id) return e;
  throw PlanError(source.string() + ": no entry with id '" + id + "'");
}

namespace {

class Ctx {
 public:
  Ctx(std::string file, std::string where) : file_(std::move(file)), where_(std::move(where)) {}
  Ctx at(const std::string& key) const { return {file_, where_.empty() ? key : where_ + "." + key}; }
  Ctx at(std::size_t i) const { return {file_, where_ + "[" + std::to_string(i) + "]"}; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw PlanError(file_ + (where_.empty() ? "" : ": " + where_) + ": " + msg);
  }

  void only(const json& j, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail("expected an object");
    for (const auto& [k, v] : j.items())
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) ==
          allowed.end())
        at(k).fail("unknown key");
  }

  template <class T>
  T get(const json& j, const char* key, T fallback) const {
    if (!j.contains(key)) return fallback;
    return as<T>(j.at(key), key);
  }
  template <class T>
  T need(const json& j, const char* key) const {
    if (!j.contains(key)) fail(std::string("missing required key '") + key + "'");
    return as<T>(j.at(key), key);
  }

 private:
  template <class T>
  T as(const json& v, const char* key) const {
    try {
      if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t> ||
                    std::is_same_v<T, std::uint32_t>) {
        if (!v.is_number_unsigned()) at(key).fail("expected a non-negative integer");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) at(key).fail("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) at(key).fail("expected a string");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) at(key).fail("expected true or false");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      at(key).fail(e.what());
    }
  }

  std::string file_;
  std::string where_;
};

std::string human_bytes(std::uint64_t b) {
  const char* units[] = {"B", "KB", "MB", "GB", "TB"};
  int u = 0;
  while (u < 4 && b >= 1000 && b % 1000 == 0) {
    b /= 1000;
    ++u;
  }
  return std::to_string(b) + units[u];
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

/// Default size and pattern labels describing a generated dataset.
std::pair<std::string, std::string> describe(const DatasetSpec& d) {
  return std::visit(
      [&](const auto& s) -> std::pair<std::string, std::string> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, TextStanza>) {
          return {human_bytes(s.size_bytes), "zipf" + format_number(s.zipf_s)};
        } else if constexpr (std::is_same_v<S, GraphStanza>) {
          return {"2^" + std::to_string(s.log2_vertices),
                  "uniform-ef" + std::to_string(s.edge_factor)};
        } else if constexpr (std::is_same_v<S, MatrixStanza>) {
          return {std::to_string(s.n),
                  "sparsity" + format_number(s.sparsity) + "-" +
                      std::string(datagen::to_string(s.distribution))};
        } else if constexpr (std::is_same_v<S, TensorStanza>) {
          return {std::to_string(s.batch) + "x" + std::to_string(s.height) + "x" +
                      std::to_string(s.width) + "x" + std::to_string(s.channels),
                  "uniform"};
        } else {
          return {"", ""};
        }
      },
      d.stanza);
}

const char* extension(kernels::Family f) {
  switch (f) {
    case kernels::Family::text: return ".txt";
    case kernels::Family::sequence: return ".seq";
    case kernels::Family::graph: return ".graph";
    case kernels::Family::matrix: return ".matrix";
    case kernels::Family::tensor: return ".tensor";
    default: return ".bin";
  }
}

DatasetSpec parse_dataset(const Ctx& c, const std::string& name, const json& j,
                          const RunPlan& plan, const std::filesystem::path& base) {
  c.only(j, {"text", "sequence", "graph", "matrix", "tensor", "path", "family", "seed"});
  DatasetSpec d;
  d.name = name;
  d.seed = c.get<std::uint64_t>(j, "seed", derive_seed(plan.seed, stream_id("dataset/" + name)));
  int kinds = 0;
  using kernels::Family;
  if (j.contains("text")) {
    ++kinds;
    auto cc = c.at("text");
    const auto& s = j.at("text");
    cc.only(s, {"size_bytes", "vocab_size", "zipf_s"});
    TextStanza t;
    t.size_bytes = cc.need<std::uint64_t>(s, "size_bytes");
    t.vocab_size = cc.get<std::uint64_t>(s, "vocab_size", t.vocab_size);
    t.zipf_s = cc.get<double>(s, "zipf_s", t.zipf_s);
    if (t.size_bytes < 1) cc.at("size_bytes").fail("must be at least 1");
    if (t.vocab_size < 1) cc.at("vocab_size").fail("must be at least 1");
    if (!(t.zipf_s > 0)) cc.at("zipf_s").fail("must be positive");
    d.stanza = t;
    d.family = Family::text;
  }
  if (j.contains("sequence")) {
    ++kinds;
    auto cc = c.at("sequence");
    cc.only(j.at("sequence"), {"from"});
    d.stanza = SequenceStanza{cc.need<std::string>(j.at("sequence"), "from")};
    d.family = Family::sequence;
  }
  if (j.contains("graph")) {
    ++kinds;
    auto cc = c.at("graph");
    const auto& s = j.at("graph");
    cc.only(s, {"log2_vertices", "edge_factor"});
    GraphStanza g;
    g.log2_vertices = cc.need<std::uint32_t>(s, "log2_vertices");
    g.edge_factor = cc.get<std::uint64_t>(s, "edge_factor", g.edge_factor);
    if (g.log2_vertices < 1 || g.log2_vertices > 32) cc.at("log2_vertices").fail("must be in [1, 32]");
    if (g.edge_factor < 1) cc.at("edge_factor").fail("must be at least 1");
    d.stanza = g;
    d.family = Family::graph;
  }
  if (j.contains("matrix")) {
    ++kinds;
    auto cc = c.at("matrix");
    const auto& s = j.at("matrix");
    cc.only(s, {"n", "sparsity", "distribution", "storage"});
    MatrixStanza m;
    m.n = cc.need<std::uint64_t>(s, "n");
    m.sparsity = cc.get<double>(s, "sparsity", 0.0);
    if (m.n < 1) cc.at("n").fail("must be at least 1");
    if (!(m.sparsity >= 0.0 && m.sparsity < 1.0)) cc.at("sparsity").fail("must be in [0, 1)");
    try {
      m.distribution = datagen::parse_distribution(cc.get<std::string>(s, "distribution", "uniform"));
    } catch (const Error& e) {
      cc.at("distribution").fail(e.what());
    }
    const auto storage = cc.get<std::string>(s, "storage", "dense");
    if (storage == "dense") m.storage = datagen::MatrixStorage::dense;
    else if (storage == "coordinate") m.storage = datagen::MatrixStorage::coordinate;
    else cc.at("storage").fail("expected dense or coordinate");
    d.stanza = m;
    d.family = Family::matrix;
  }
  if (j.contains("tensor")) {
    ++kinds;
    auto cc = c.at("tensor");
    const auto& s = j.at("tensor");
    cc.only(s, {"batch", "height", "width", "channels"});
    TensorStanza t;
    t.batch = cc.get<std::size_t>(s, "batch", 1);
    t.height = cc.need<std::size_t>(s, "height");
    t.width = cc.need<std::size_t>(s, "width");
    t.channels = cc.need<std::size_t>(s, "channels");
    if (!t.batch || !t.height || !t.width || !t.channels) cc.fail("every dimension must be positive");
    d.stanza = t;
    d.family = Family::tensor;
  }
  if (kinds > 1) c.fail("a dataset has at most one generation stanza");
  if (j.contains("path")) {
    std::filesystem::path p = c.get<std::string>(j, "path", "");
    d.path = p.is_absolute() ? p : base / p;
  }
  if (kinds == 0) {
    if (!j.contains("path")) c.fail("needs a generation stanza or an existing path");
    auto fam = kernels::parse_family(c.need<std::string>(j, "family"));
    if (!fam || static_cast<int>(*fam) > static_cast<int>(Family::tensor))
      c.at("family").fail("expected text, sequence, graph, matrix or tensor");
    d.family = *fam;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(d.path, ec))
      c.at("path").fail("missing dataset file " + d.path.string());
  } else if (d.path.empty()) {
    d.path = plan.output_dir / "data" / (name + extension(d.family));
  }
  return d;
}

kernels::KernelParams parse_params(const Ctx& c, const json& j, std::uint64_t default_seed) {
  kernels::KernelParams p;
  p.seed = default_seed;
  if (j.is_null()) return p;
  c.only(j, {"pattern", "rate", "seed", "root", "inverse", "window", "window_h", "window_w",
             "filter_h", "filter_w", "filter_out", "units", "other"});
  p.pattern = c.get<std::string>(j, "pattern", p.pattern);
  p.rate = c.get<double>(j, "rate", p.rate);
  p.seed = c.get<std::uint64_t>(j, "seed", p.seed);
  p.root = c.get<std::uint64_t>(j, "root", p.root);
  p.inverse = c.get<bool>(j, "inverse", p.inverse);
  const auto window = c.get<std::size_t>(j, "window", p.window_h);
  p.window_h = c.get<std::size_t>(j, "window_h", window);
  p.window_w = c.get<std::size_t>(j, "window_w", j.contains("window") ? window : p.window_w);
  p.filter_h = c.get<std::size_t>(j, "filter_h", p.filter_h);
  p.filter_w = c.get<std::size_t>(j, "filter_w", p.filter_w);
  p.filter_out = c.get<std::size_t>(j, "filter_out", p.filter_out);
  p.units = c.get<std::size_t>(j, "units", p.units);
  p.other = c.get<std::string>(j, "other", p.other);
  if (!p.filter_h || !p.filter_w || !p.filter_out) c.fail("filter dimensions must be positive");
  if (!p.units) c.at("units").fail("must be positive");
  return p;
}

kernels::DwarfSpec parse_stage(const Ctx& c, const json& j, std::size_t default_threads,
                               std::uint64_t default_seed, bool allow_kind_only) {
  if (allow_kind_only) c.only(j, {"kind", "input", "threads", "params"});
  kernels::DwarfSpec s;
  const auto kind_name = c.need<std::string>(j, "kind");
  auto kind = kernels::parse_kind(kind_name);
  if (!kind) c.at("kind").fail("unknown dwarf kind '" + kind_name + "'");
  s.kind = *kind;
  s.input = c.get<std::string>(j, "input", "");
  s.threads = c.get<std::size_t>(j, "threads", default_threads);
  s.params = parse_params(c.at("params"), j.contains("params") ? j.at("params") : json(), default_seed);
  return s;
}

}  // namespace

RunPlan parse_plan(std::string_view json_text, const std::filesystem::path& source,
                   const PlanOverrides& o) {
  const Ctx root(source.string(), "");
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    root.fail(std::string("not valid JSON: ") + e.what());
  }
  root.only(j, {"name", "seed", "cadence_seconds", "formula_map", "output_dir", "repetitions",
                "sort_memory_budget_bytes", "datasets", "entries", "description"});
  const auto base = source.has_parent_path() ? source.parent_path() : std::filesystem::path(".");

  RunPlan plan;
  plan.source = source;
  plan.name = root.need<std::string>(j, "name");
  plan.seed = o.seed ? *o.seed : root.get<std::uint64_t>(j, "seed", 0);
  plan.cadence_seconds = o.cadence_seconds ? *o.cadence_seconds
                                           : root.get<double>(j, "cadence_seconds", 1.0);
  if (!(plan.cadence_seconds > 0)) root.at("cadence_seconds").fail("must be positive");
  if (o.formula_map) {
    plan.formula_map = *o.formula_map;
  } else if (j.contains("formula_map")) {
    std::filesystem::path f = root.need<std::string>(j, "formula_map");
    plan.formula_map = f.is_absolute() ? f : base / f;
  }
  plan.output_dir = o.output_dir ? *o.output_dir
                                 : std::filesystem::path(root.get<std::string>(
                                       j, "output_dir", "out/" + plan.name));
  plan.repetitions = root.get<std::size_t>(j, "repetitions", 3);
  if (plan.repetitions < 1) root.at("repetitions").fail("must be at least 1");
  plan.sort_memory_budget_bytes =
      root.get<std::uint64_t>(j, "sort_memory_budget_bytes", plan.sort_memory_budget_bytes);
  if (plan.sort_memory_budget_bytes < 4096) root.at("sort_memory_budget_bytes").fail("must be at least 4096");
  plan.counters = !o.no_counters;

  if (j.contains("datasets")) {
    const auto& ds = j.at("datasets");
    if (!ds.is_object()) root.at("datasets").fail("expected an object keyed by dataset name");
    for (const auto& [name, d] : ds.items())
      plan.datasets.push_back(parse_dataset(root.at("datasets").at(name), name, d, plan, base));
  }
  for (const auto& d : plan.datasets) {
    if (auto* s = std::get_if<SequenceStanza>(&d.stanza)) {
      auto it = std::find_if(plan.datasets.begin(), plan.datasets.end(),
                             [&](const DatasetSpec& x) { return x.name == s->from; });
      const auto c = root.at("datasets").at(d.name).at("sequence").at("from");
      if (it == plan.datasets.end()) c.fail("unknown dataset '" + s->from + "'");
      if (it->family != kernels::Family::text) c.fail("'" + s->from + "' is not a text dataset");
    }
  }

  if (!j.contains("entries") || !j.at("entries").is_array())
    root.at("entries").fail("expected an array");
  std::set<std::string> ids;
  const auto& entries = j.at("entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto c = root.at("entries").at(i);
    const auto& e = entries[i];
    c.only(e, {"id", "kind", "input", "threads", "params", "pipeline", "labels"});
    EntrySpec entry;
    entry.pipeline = e.contains("pipeline");
    if (entry.pipeline == e.contains("kind")) c.fail("an entry has exactly one of 'kind' or 'pipeline'");
    entry.id = c.get<std::string>(
        e, "id", entry.pipeline ? "pipeline" + std::to_string(i) : e.at("kind").get<std::string>());
    if (!ids.insert(entry.id).second) c.at("id").fail("duplicate entry id '" + entry.id + "'");
    const auto threads = o.threads ? *o.threads : c.get<std::size_t>(e, "threads", 1);
    auto seed_for = [&](std::size_t stage) {
      return derive_seed(plan.seed, stream_id("entry/" + entry.id + "/" + std::to_string(stage)));
    };
    if (entry.pipeline) {
      if (e.contains("input") || e.contains("params"))
        c.fail("pipeline entries carry input and params on their stages");
      const auto& st = e.at("pipeline");
      if (!st.is_array() || st.empty()) c.at("pipeline").fail("expected a non-empty array of stages");
      for (std::size_t k = 0; k < st.size(); ++k)
        entry.stages.push_back(parse_stage(c.at("pipeline").at(k), st[k], threads, seed_for(k), true));
    } else {
      entry.stages.push_back(parse_stage(c, e, threads, seed_for(0), false));
    }
    if (o.threads)
      for (auto& s : entry.stages) s.threads = *o.threads;

    // Resolve inputs and check that each stage accepts what flows into it.
    std::optional<kernels::Family> flowing;
    const DatasetSpec* first = nullptr;
    for (std::size_t k = 0; k < entry.stages.size(); ++k) {
      auto& s = entry.stages[k];
      const auto sc = entry.pipeline ? c.at("pipeline").at(k) : c;
      kernels::Family in;
      if (!s.input.empty()) {
        auto it = std::find_if(plan.datasets.begin(), plan.datasets.end(),
                               [&](const DatasetSpec& x) { return x.name == s.input; });
        if (it == plan.datasets.end()) sc.at("input").fail("missing dataset '" + s.input + "'");
        in = it->family;
        if (!first) first = &*it;
      } else if (flowing) {
        in = *flowing;
      } else {
        sc.fail("the first stage needs an input dataset");
      }
      if (s.threads < 1) sc.at("threads").fail("must be at least 1");
      try {
        kernels::check_compatible(s, in);
      } catch (const InvalidArgument& err) {
        sc.fail(std::string("incompatible stage: ") + err.what());
      }
      if (!s.params.other.empty()) {
        auto it = std::find_if(plan.datasets.begin(), plan.datasets.end(),
                               [&](const DatasetSpec& x) { return x.name == s.params.other; });
        if (it == plan.datasets.end())
          sc.at("params").at("other").fail("missing dataset '" + s.params.other + "'");
        if (it->family != in)
          sc.at("params").at("other").fail("'" + s.params.other + "' is not a " +
                                           std::string(kernels::to_string(in)) + " dataset");
      }
      flowing = kernels::output_family(s.kind);
    }

    if (e.contains("labels")) {
      const auto& l = e.at("labels");
      if (!l.is_object()) c.at("labels").fail("expected an object of strings");
      for (const auto& [k, v] : l.items()) {
        if (!v.is_string()) c.at("labels").at(k).fail("expected a string");
        entry.labels[k] = v.get<std::string>();
      }
    }
    auto [size, pattern] = describe(*first);
    entry.labels.try_emplace("kind", entry.pipeline ? "pipeline"
                                                    : std::string(kernels::to_string(entry.stages[0].kind)));
    entry.labels.try_emplace("stack", "native");
    entry.labels.try_emplace("size", size);
    entry.labels.try_emplace("type", std::string(kernels::to_string(first->family)));
    entry.labels.try_emplace("pattern", pattern);
    plan.entries.push_back(std::move(entry));
  }
  return plan;
}

RunPlan load_plan(const std::filesystem::path& path, const PlanOverrides& o) {
  std::ifstream in(path);
  if (!in) throw PlanError(path.string() + ": cannot read plan");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str(), path, o);
}

}  // namespace dwarfs::harness
