#include "dwarfs/harness/workload.hpp"

#include <cmath>

#include "dwarfs/common/rng.hpp"
#include "dwarfs/kernels/bfs.hpp"
#include "dwarfs/kernels/fft.hpp"
#include "dwarfs/kernels/md5.hpp"
#include "dwarfs/kernels/tensor_ops.hpp"
#include "dwarfs/kernels/text.hpp"

namespace dwarfs::harness {

using kernels::DwarfKind;

namespace {

using Shape = std::array<std::size_t, 4>;

[[noreturn]] void wrong_data(DwarfKind k) {
  throw InvalidArgument(std::string(kernels::to_string(k)) + ": stage received the wrong data family");
}

template <class T>
T& expect(StageData& d, DwarfKind k) {
  auto* p = std::get_if<T>(&d);
  if (!p) wrong_data(k);
  return *p;
}

/// Output shape of a tensor stage, or nullopt for non-tensor stages.
std::optional<Shape> next_shape(const kernels::DwarfSpec& s, const Shape& in) {
  switch (s.kind) {
    case DwarfKind::conv2d:
      if (in[1] < s.params.filter_h || in[2] < s.params.filter_w)
        throw InvalidArgument("conv2d: filter larger than input");
      return Shape{in[0], in[1] - s.params.filter_h + 1, in[2] - s.params.filter_w + 1,
                   s.params.filter_out};
    case DwarfKind::maxpool:
    case DwarfKind::avgpool:
      return Shape{in[0], in[1] / s.params.window_h, in[2] / s.params.window_w, in[3]};
    case DwarfKind::fully_connected:
      return Shape{in[0], 1, 1, s.params.units};
    case DwarfKind::relu:
    case DwarfKind::sigmoid:
    case DwarfKind::tanh:
    case DwarfKind::multiply:
      return in;
    default:
      return std::nullopt;
  }
}

datagen::Tensor centered_tensor(Shape shape, std::uint64_t seed) {
  auto t = datagen::gen_tensor_batch(shape[0], shape[1], shape[2], shape[3], seed);
  for (auto& v : t.values) v -= 0.5f;
  return t;
}

}  // namespace

Workload::Workload(const RunPlan& plan, const EntrySpec& entry, std::filesystem::path scratch)
    : plan_(plan), entry_(entry), scratch_(std::move(scratch)) {}

StageData Workload::load(const DatasetSpec& d) const {
  switch (d.family) {
    case kernels::Family::text: return TextFile{d.path};
    case kernels::Family::sequence: return SequencePath{d.path};
    case kernels::Family::graph: return datagen::read_graph(d.path);
    case kernels::Family::matrix: return datagen::read_matrix(d.path);
    case kernels::Family::tensor: return datagen::read_tensor(d.path);
    default: throw InvalidArgument("dataset " + d.name + " has a terminal family");
  }
}

void Workload::prepare() {
  std::filesystem::create_directories(scratch_);
  inputs_.assign(entry_.stages.size(), StageData{});
  aux_.assign(entry_.stages.size(), Aux{});
  std::optional<Shape> shape;
  for (std::size_t k = 0; k < entry_.stages.size(); ++k) {
    const auto& s = entry_.stages[k];
    if (!s.input.empty()) {
      inputs_[k] = load(plan_.dataset(s.input));
      if (auto* t = std::get_if<datagen::Tensor>(&inputs_[k])) shape = t->shape;
      else shape.reset();
    }
    auto& aux = aux_[k];
    switch (s.kind) {
      case DwarfKind::conv2d:
        if (!shape) wrong_data(s.kind);
        aux.tensor = centered_tensor({s.params.filter_h, s.params.filter_w, (*shape)[3],
                                      s.params.filter_out},
                                     s.params.seed);
        break;
      case DwarfKind::fully_connected: {
        if (!shape) wrong_data(s.kind);
        const std::size_t features = (*shape)[1] * (*shape)[2] * (*shape)[3];
        kernels::DenseMatrix<float> w(features, s.params.units);
        const CounterRng rng(s.params.seed, stream_id("fully_connected"));
        const float scale = 1.0f / std::sqrt(static_cast<float>(features));
        for (std::size_t i = 0; i < w.data.size(); ++i)
          w.data[i] = (static_cast<float>(rng.uniform(i)) - 0.5f) * scale;
        aux.weights = std::move(w);
        break;
      }
      case DwarfKind::multiply:
        if (!shape) wrong_data(s.kind);
        if (!s.params.other.empty()) {
          aux.tensor = datagen::read_tensor(plan_.dataset(s.params.other).path);
        } else {
          aux.tensor = centered_tensor(*shape, s.params.seed);
        }
        break;
      case DwarfKind::matmul:
        if (!s.params.other.empty()) aux.matrix = datagen::read_matrix(plan_.dataset(s.params.other).path);
        break;
      default:
        break;
    }
    shape = shape ? next_shape(s, *shape) : std::nullopt;
  }
}

kernels::KernelResult Workload::run_stage(std::size_t k, StageData& data) {
  const auto& s = entry_.stages[k];
  const auto out_path = scratch_ / (entry_.id + "-stage" + std::to_string(k) + ".txt");
  kernels::KernelResult r;
  r.kind = s.kind;
  switch (s.kind) {
    case DwarfKind::sort: {
      kernels::SortOptions o;
      o.threads = s.threads;
      o.memory_budget_bytes = plan_.sort_memory_budget_bytes;
      o.output = out_path;
      o.temp_dir = scratch_;
      r = kernels::sort(expect<TextFile>(data, s.kind).path, o);
      data = TextFile{out_path};
      break;
    }
    case DwarfKind::wordcount:
      r = kernels::wordcount(expect<TextFile>(data, s.kind).path, s.threads);
      data = std::monostate{};
      break;
    case DwarfKind::grep:
      r = kernels::grep(expect<TextFile>(data, s.kind).path, s.params.pattern, s.threads, out_path);
      data = TextFile{out_path};
      break;
    case DwarfKind::sample:
      r = kernels::sample(expect<TextFile>(data, s.kind).path, s.params.rate, s.params.seed, s.threads,
                          out_path);
      data = TextFile{out_path};
      break;
    case DwarfKind::md5:
      r = kernels::md5(expect<SequencePath>(data, s.kind).path, s.threads);
      data = std::monostate{};
      break;
    case DwarfKind::matmul: {
      auto& a = expect<datagen::MatrixData>(data, s.kind);
      auto c = kernels::matmul(a, aux_[k].matrix ? *aux_[k].matrix : a, s.threads);
      r.output_digest = kernels::digest(c);
      r.output_summary["n"] = static_cast<double>(c.rows);
      datagen::MatrixData m;
      m.n = c.rows;
      m.dense = std::move(c.data);
      data = std::move(m);
      break;
    }
    case DwarfKind::bfs: {
      auto out = kernels::bfs(expect<datagen::GraphDataset>(data, s.kind), s.params.root, s.threads);
      r.output_digest = kernels::digest(out);
      r.output_summary["visited"] = static_cast<double>(out.visited);
      r.output_summary["depth"] = static_cast<double>(out.depth);
      data = std::monostate{};
      break;
    }
    case DwarfKind::fft: {
      auto out = kernels::fft2d(expect<datagen::MatrixData>(data, s.kind), s.params.inverse, s.threads);
      r.output_digest = kernels::digest(out);
      r.output_summary["n"] = static_cast<double>(out.n);
      data = std::monostate{};
      break;
    }
    case DwarfKind::conv2d:
      data = kernels::conv2d(expect<datagen::Tensor>(data, s.kind), *aux_[k].tensor, s.threads);
      break;
    case DwarfKind::maxpool:
    case DwarfKind::avgpool:
      data = kernels::pool(expect<datagen::Tensor>(data, s.kind), s.params.window_h, s.params.window_w,
                           s.kind == DwarfKind::maxpool ? kernels::PoolMode::max : kernels::PoolMode::avg,
                           s.threads);
      break;
    case DwarfKind::relu:
    case DwarfKind::sigmoid:
    case DwarfKind::tanh: {
      const auto fn = s.kind == DwarfKind::relu      ? kernels::Activation::relu
                      : s.kind == DwarfKind::sigmoid ? kernels::Activation::sigmoid
                                                     : kernels::Activation::tanh;
      data = kernels::activation(expect<datagen::Tensor>(data, s.kind), fn, s.threads);
      break;
    }
    case DwarfKind::fully_connected: {
      auto& x = expect<datagen::Tensor>(data, s.kind);
      const std::size_t batch = x.shape[0];
      kernels::DenseMatrix<float> flat;
      flat.rows = batch;
      flat.cols = x.shape[1] * x.shape[2] * x.shape[3];
      flat.data = std::move(x.values);
      auto y = kernels::fully_connected(flat, *aux_[k].weights, s.threads);
      datagen::Tensor out;
      out.shape = {batch, 1, 1, y.cols};
      out.values = std::move(y.data);
      data = std::move(out);
      break;
    }
    case DwarfKind::multiply:
      data = kernels::multiply(expect<datagen::Tensor>(data, s.kind), *aux_[k].tensor, s.threads);
      break;
  }
  if (auto* t = std::get_if<datagen::Tensor>(&data)) {
    r.output_digest = kernels::digest(*t);
    r.output_summary["elements"] = static_cast<double>(t->values.size());
  }
  return r;
}

WorkloadResult Workload::run() {
  WorkloadResult out;
  kernels::Stopwatch total;
  StageData data;
  for (std::size_t k = 0; k < entry_.stages.size(); ++k) {
    if (!std::holds_alternative<std::monostate>(inputs_[k])) data = std::move(inputs_[k]);
    try {
      kernels::Stopwatch clock;
      auto r = run_stage(k, data);
      r.wall_time = clock.seconds();
      out.stages.push_back({r.kind, r.wall_time, 0.0, r.output_digest});
      out.kernel = std::move(r);
    } catch (const std::exception& e) {
      out.error = "stage " + std::to_string(k) + " (" +
                  std::string(kernels::to_string(entry_.stages[k].kind)) + "): " + e.what();
      break;
    }
  }
  const double t = total.seconds();
  out.kernel.wall_time = t;
  double sum = 0.0;
  for (auto& s : out.stages) {
    s.percent = t > 0 ? 100.0 * s.wall_time / t : 0.0;
    sum += s.wall_time;
  }
  out.overhead_seconds = std::max(0.0, t - sum);
  out.overhead_percent = t > 0 ? 100.0 * out.overhead_seconds / t : 0.0;
  return out;
}

}  // namespace dwarfs::harness
