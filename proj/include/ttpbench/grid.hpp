#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ttpbench/annotations.hpp"
#include "ttpbench/attack_ingest.hpp"
#include "ttpbench/config.hpp"
#include "ttpbench/evaluation.hpp"
#include "ttpbench/featurize.hpp"

namespace ttpbench {

struct GridInputs {
    LabeledCorpus corpus;  // already filtered by min_support
    std::vector<TechniqueInfo> techniques;
    const AnnotationIndex* annotations = nullptr;
};

struct CellFailure {
    CellKey key;
    std::string reason;
};

struct GridOutcome {
    std::vector<CellResult> results;  // every cell in the store, resumed ones included
    std::vector<CellFailure> failures;
    std::size_t computed = 0;
    std::size_t resumed = 0;
};

struct GridHooks {
    std::function<void(const std::string&)> log;
    /// Called after a featurizer is fitted for a fold (not in full_dataset mode).
    std::function<void(const CellKey& fold_key, const Featurizer& fitted, const std::vector<std::size_t>& test_rows)>
        on_fold_fit;
};

/// Bundle, annotations and min_support-filtered corpus named by a config.
struct LoadedInputs {
    AttackBundle bundle;
    std::unique_ptr<AnnotationIndex> annotations;
    GridInputs inputs;
};

/// Loads annotations only when conllu_path is set.
LoadedInputs load_inputs(const GridConfig& config);

/// Every cell of the grid, sorted.
std::vector<CellKey> grid_cells(const GridConfig& config);

/// Worker count from TTPBENCH_WORKERS, else the hardware concurrency.
unsigned worker_count();

/// Runs every missing cell of the grid and keeps `<out_dir>/results.csv`
/// sorted and complete after each finished job; cells already in that file
/// are skipped. Failed cells go to `<out_dir>/failures.csv`. Throws before
/// doing any work when the configuration cannot run (e.g. annotation-based
/// methods without annotations).
GridOutcome run_grid(const GridInputs& inputs, const GridConfig& config, const GridHooks& hooks = {});

}  // namespace ttpbench
