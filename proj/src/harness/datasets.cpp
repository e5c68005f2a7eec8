#include "dwarfs/harness/datasets.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dwarfs/datagen/graph.hpp"
#include "dwarfs/datagen/matrix.hpp"
#include "dwarfs/datagen/sequence.hpp"
#include "dwarfs/datagen/tensor.hpp"
#include "dwarfs/datagen/text.hpp"
#include "dwarfs/kernels/result.hpp"

namespace dwarfs::harness {
namespace {

nlohmann::json describe(const RunPlan& plan, const DatasetSpec& d) {
  nlohmann::json j;
  j["family"] = std::string(kernels::to_string(d.family));
  j["seed"] = d.seed;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, TextStanza>) {
          j["text"] = {{"size_bytes", s.size_bytes}, {"vocab_size", s.vocab_size}, {"zipf_s", s.zipf_s}};
        } else if constexpr (std::is_same_v<S, SequenceStanza>) {
          j["sequence"] = {{"from", describe(plan, plan.dataset(s.from))}};
        } else if constexpr (std::is_same_v<S, GraphStanza>) {
          j["graph"] = {{"log2_vertices", s.log2_vertices}, {"edge_factor", s.edge_factor}};
        } else if constexpr (std::is_same_v<S, MatrixStanza>) {
          j["matrix"] = {{"n", s.n},
                         {"sparsity", s.sparsity},
                         {"distribution", std::string(datagen::to_string(s.distribution))},
                         {"storage", s.storage == datagen::MatrixStorage::dense ? "dense" : "coordinate"}};
        } else if constexpr (std::is_same_v<S, TensorStanza>) {
          j["tensor"] = {{"batch", s.batch}, {"height", s.height}, {"width", s.width},
                         {"channels", s.channels}};
        }
      },
      d.stanza);
  return j;
}

std::filesystem::path sidecar(const DatasetSpec& d) {
  auto p = d.path;
  p += ".gen.json";
  return p;
}

bool up_to_date(const RunPlan& plan, const DatasetSpec& d) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(d.path, ec)) return false;
  std::ifstream in(sidecar(d));
  if (!in) return false;
  try {
    return nlohmann::json::parse(in) == describe(plan, d);
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

}  // namespace

bool ensure_dataset(const RunPlan& plan, const DatasetSpec& d, std::size_t threads,
                    const Logger& log) {
  if (!d.generated()) return false;
  bool wrote = false;
  if (auto* s = std::get_if<SequenceStanza>(&d.stanza))
    wrote = ensure_dataset(plan, plan.dataset(s->from), threads, log);
  if (!wrote && up_to_date(plan, d)) return false;

  std::filesystem::create_directories(d.path.parent_path());
  std::filesystem::remove(sidecar(d));
  kernels::Stopwatch clock;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, TextStanza>) {
          datagen::gen_text(s.size_bytes, s.vocab_size, s.zipf_s, d.seed, d.path);
        } else if constexpr (std::is_same_v<S, SequenceStanza>) {
          datagen::gen_sequence(plan.dataset(s.from).path, d.path);
        } else if constexpr (std::is_same_v<S, GraphStanza>) {
          datagen::write_graph(datagen::gen_graph(s.log2_vertices, s.edge_factor, d.seed, threads),
                               d.path);
        } else if constexpr (std::is_same_v<S, MatrixStanza>) {
          datagen::write_matrix(
              datagen::gen_matrix(s.n, s.sparsity, s.distribution, d.seed, s.storage, threads), d.path);
        } else if constexpr (std::is_same_v<S, TensorStanza>) {
          datagen::write_tensor(
              datagen::gen_tensor_batch(s.batch, s.height, s.width, s.channels, d.seed, threads),
              d.path);
        }
      },
      d.stanza);
  std::ofstream(sidecar(d)) << describe(plan, d).dump(2) << '\n';
  if (log) {
    std::ostringstream os;
    os << "generated " << d.name << " -> " << d.path.string() << " in " << clock.seconds() << " s";
    log(os.str());
  }
  return true;
}

void generate_datasets(const RunPlan& plan, std::size_t threads, const Logger& log,
                       bool referenced_only) {
  std::set<std::string> wanted;
  for (const auto& e : plan.entries)
    for (const auto& s : e.stages) {
      if (!s.input.empty()) wanted.insert(s.input);
      if (!s.params.other.empty()) wanted.insert(s.params.other);
    }
  for (const auto& d : plan.datasets)
    if (!referenced_only || wanted.count(d.name)) ensure_dataset(plan, d, threads, log);
}

}  // namespace dwarfs::harness
