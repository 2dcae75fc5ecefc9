// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"

#include "hintflow/config.hpp"
#include "hintflow/metrics.hpp"

namespace hintflow {

/// No-hint evaluation of a policy on held-out arena tasks.
struct EvalSummary {
    MetricsRecord metrics;
    std::map<GroupId, double> lc_acc_by_group;
    std::map<GroupId, double> acc_by_group;
};

struct GroupStepStats {
    std::optional<double> mean_reward;  // absent when no task of the group was drawn
    std::optional<double> u;
    double ema = 0.0;
    double effective_ratio = 0.0;
    bool switched = false;
    std::optional<Step> switch_step;
};

struct RunLogEntry {
    Step step = 0;
    double mean_reward = 0.0;
    std::map<GroupId, GroupStepStats> groups;
    double entropy = 0.0;
    double mean_len = 0.0;
    double repeat = 0.0;
    std::optional<EvalSummary> eval;
};

nlohmann::ordered_json to_json(const EvalSummary& eval);
nlohmann::ordered_json to_json(const RunLogEntry& entry);

struct TrainOptions {
    /// Worker threads for rollouts and gradients; 0 runs everything inline.
    std::size_t threads = 0;
    std::optional<Preset> preset;
};

struct TrainResult {
    std::filesystem::path run_dir;
    PolicyParams policy;
    std::vector<RunLogEntry> log;
    EvalSummary final_eval;
    std::map<GroupId, SwitchState> switch_states;
};

/// Reads HINTFLOW_THREADS; unset or unparsable means 0.
std::size_t threads_from_env();

/// Held-out tasks: languages and tiers cycle so every cell is covered
/// evenly; family and answer are drawn from the evaluation seed stream.
std::vector<Task> make_eval_tasks(const ArenaSpec& spec, std::size_t count, std::uint64_t seed);

/// One sampled rollout per task at hint length 0.
EvalSummary evaluate_policy(const RunConfig& config, const PolicyParams& policy, std::uint64_t task_seed,
                            std::size_t threads = 0);

/// Loads a checkpoint written for `config`'s arena and evaluates it.
/// Throws FormatError on shape mismatch.
EvalSummary evaluate(const std::filesystem::path& checkpoint, const RunConfig& config, std::uint64_t task_seed,
                     std::size_t threads = 0);

/// Runs the hint-guided GRPO loop and writes log.jsonl, checkpoint.bin
/// (+ manifest), config.json and manifest.json into config.out_dir.
/// Throws NumericError after logging a diagnostic entry if an update
/// produces non-finite values.
TrainResult train(const RunConfig& config, const TrainOptions& options = {});

/// Rollouts for one batch of tasks, advantages included.
std::vector<RolloutGroup> collect_rollouts(const RunConfig& config, const PolicyParams& policy,
                                           std::span<const Task> tasks, std::span<const std::size_t> hint_lens,
                                           std::size_t threads);

}  // namespace hintflow
