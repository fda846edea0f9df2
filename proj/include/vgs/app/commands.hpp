#pragma once
// The six pipeline commands. Each takes a fully merged RunConfig, writes its
// outputs plus run_config.json into config.paths.out and returns a process
// exit code. Missing inputs and invalid settings throw with the offending
// path or field named.

#include <iosfwd>

#include "vgs/app/run_config.hpp"

namespace vgs::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitPartial = 2;

/// Per-caption feature files plus index.tsv. Unreadable audio is listed at
/// the end and yields kExitPartial.
int cmd_extract_features(const RunConfig& config, std::ostream& log);
/// epochs.csv, checkpoints/epoch_NNN.ckpt and best.ckpt.
int cmd_train(const RunConfig& config, std::ostream& log);
/// subset_cN.tsv per spec (train records of the subset plus the source's
/// dev and test records) and subsets.csv.
int cmd_make_subsets(const RunConfig& config, std::ostream& log);
/// retrieval.csv for config.eval_split.
int cmd_eval_retrieval(const RunConfig& config, std::ostream& log);
/// sts_subtasks.csv, sts_long.csv (plot-ready) and sts_pairs.csv.
int cmd_eval_sts(const RunConfig& config, std::ostream& log);
/// aic.csv from the sts_pairs.csv files named in config.inputs.
int cmd_compare_aic(const RunConfig& config, std::ostream& log);

/// Dispatches on config.command.
int run_command(const RunConfig& config, std::ostream& log);

}  // namespace vgs::app
