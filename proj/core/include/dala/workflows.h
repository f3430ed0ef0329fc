// Copyright 2026 The DALA Market Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DALA_WORKFLOWS_H_
#define DALA_WORKFLOWS_H_

// File-level workflows behind the command line tool. Every artifact lands in
// <run root>/<run_id>/.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dala/config.h"
#include "dala/trainer.h"

namespace dala {

// $DALA_RUN_ROOT, or "runs" when unset.
std::filesystem::path RunRoot();

// Rejects run ids that would escape the run root.
std::filesystem::path RunDirectory(const std::filesystem::path& root,
                                   const std::string& run_id);

struct TrainArtifacts {
  std::filesystem::path run_dir;
  TrainingResult result;
};

// Writes rounds.jsonl, epochs.csv, summary.csv and checkpoint.json.
TrainArtifacts RunTrainWorkflow(const RunConfig& config, int workers,
                                const std::filesystem::path& run_root);

struct BudgetOverride {
  Tokens episode_budget = 0;
  Tokens hard_cap = 0;
};

// "EPISODE:CAP", e.g. "32:8".
BudgetOverride ParseBudgetOverride(std::string_view text);

struct EvalArtifacts {
  std::filesystem::path eval_dir;
  std::vector<EvalSummary> summaries;  // one per budget condition
};

// Evaluates the checkpoint's frozen policies under the eval config, once per
// budget override (or once under the config's own budget). Writes
// eval/rounds_<episode>_<cap>.jsonl and eval/summary.csv.
EvalArtifacts RunEvalWorkflow(const Checkpoint& checkpoint,
                              const RunConfig& config,
                              const std::vector<BudgetOverride>& overrides,
                              const EvalOptions& options,
                              const std::filesystem::path& run_root);

}  // namespace dala

#endif  // DALA_WORKFLOWS_H_
