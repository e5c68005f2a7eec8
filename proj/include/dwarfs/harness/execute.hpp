#pragma once

#include <optional>

#include "dwarfs/harness/datasets.hpp"
#include "dwarfs/harness/plan.hpp"
#include "dwarfs/harness/report.hpp"
#include "dwarfs/topdown/formula_map.hpp"

namespace dwarfs::harness {

struct ExecuteOptions {
  Logger log;
};

/// Generates missing datasets, then runs every entry in order, one at a time,
/// each repetition in a fresh child process. A failing entry is recorded and
/// the run continues. Throws PlanError if the formula map cannot be loaded.
RunReport execute(const RunPlan& plan, const ExecuteOptions& options = {});

/// Runs the single entry `id` (normally a pipeline) of `plan`.
RunReport run_pipeline(const RunPlan& plan, const std::string& id,
                       const ExecuteOptions& options = {});

/// Runs one entry; `map` is null when counters are off or unconfigured.
EntryReport run_entry(const RunPlan& plan, const EntrySpec& entry, const topdown::FormulaMap* map,
                      const Fingerprint& fingerprint, const ExecuteOptions& options = {});

/// 0 ok, 2 when an entry failed, 3 when every entry completed but some ran
/// without counters.
int exit_code(const RunReport& r);

}  // namespace dwarfs::harness
