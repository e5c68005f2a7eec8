#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dwarfs/datagen/graph.hpp"
#include "dwarfs/datagen/matrix.hpp"
#include "dwarfs/datagen/tensor.hpp"
#include "dwarfs/harness/plan.hpp"
#include "dwarfs/harness/report.hpp"
#include "dwarfs/kernels/dense.hpp"

namespace dwarfs::harness {

struct TextFile {
  std::filesystem::path path;
};
struct SequencePath {
  std::filesystem::path path;
};
/// Data flowing between stages; monostate after a terminal stage.
using StageData = std::variant<std::monostate, TextFile, SequencePath, datagen::GraphDataset,
                               datagen::MatrixData, datagen::Tensor>;

struct WorkloadResult {
  kernels::KernelResult kernel;  // last completed stage; wall_time is the total
  std::vector<StageResult> stages;
  double overhead_seconds = 0.0;
  double overhead_percent = 0.0;
  std::optional<std::string> error;
};

/// One entry's stages. prepare() loads inputs and builds weights so that run()
/// times only kernel work. Text stages exchange data through files in
/// `scratch`; every other family stays in memory.
class Workload {
 public:
  Workload(const RunPlan& plan, const EntrySpec& entry, std::filesystem::path scratch);
  void prepare();
  WorkloadResult run();

 private:
  struct Aux {
    std::optional<datagen::Tensor> tensor;             // conv filter or multiply partner
    std::optional<kernels::DenseMatrix<float>> weights;  // fully_connected
    std::optional<datagen::MatrixData> matrix;         // matmul right operand
  };
  StageData load(const DatasetSpec& d) const;
  kernels::KernelResult run_stage(std::size_t k, StageData& data);

  const RunPlan& plan_;
  const EntrySpec& entry_;
  std::filesystem::path scratch_;
  std::vector<StageData> inputs_;  // explicit stage inputs, by stage
  std::vector<Aux> aux_;
};

}  // namespace dwarfs::harness
