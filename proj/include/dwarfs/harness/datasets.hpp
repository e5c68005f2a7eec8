#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dwarfs/harness/plan.hpp"

namespace dwarfs::harness {

using Logger = std::function<void(const std::string&)>;

/// Generates `d` (and any dataset it derives from) unless its file exists with
/// a matching `<path>.gen.json` sidecar. Returns true if anything was written.
bool ensure_dataset(const RunPlan& plan, const DatasetSpec& d, std::size_t threads,
                    const Logger& log = {});

/// Every dataset referenced by an entry of `plan`, or all of them.
void generate_datasets(const RunPlan& plan, std::size_t threads, const Logger& log = {},
                       bool referenced_only = false);

}  // namespace dwarfs::harness
