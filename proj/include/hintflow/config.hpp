// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hintflow/arena.hpp"
#include "hintflow/grpo.hpp"
#include "hintflow/schedules.hpp"
#include "hintflow/switching.hpp"

namespace hintflow {

/// Everything a training run needs. Defaults are the desk-scale setup.
struct RunConfig {
    ArenaSpec arena = default_arena();
    DecaySchedule schedule{DecayKind::cosine, 600, 6.0};
    TrainHyper hyper;
    std::vector<LanguageGroup> groups;
    Step steps = 600;
    std::size_t batch_tasks = 32;
    /// Minibatch updates per rollout batch.
    std::size_t minibatch = 2;
    Step eval_every = 20;
    std::size_t eval_tasks = 240;
    std::string out_dir = "runs/default";

    /// Throws ConfigError naming the first offending key.
    void validate() const;

    GroupId group_of(LanguageIndex lang) const;
    /// Groups that own at least one arena language, in high/mid/low order.
    std::vector<GroupId> active_groups() const;
};

/// en, de high; ja, zh mid; th, sw low.
std::vector<LanguageGroup> default_arena_groups();

RunConfig default_run_config();

enum class Preset { vanilla, fixed_hint, cosine, lang };

inline constexpr Preset kAllPresets[] = {Preset::vanilla, Preset::fixed_hint, Preset::cosine, Preset::lang};

std::string_view to_string(Preset preset);
Preset parse_preset(std::string_view name);

/// Sentinel threshold above 1: the adaptive switch never fires.
inline constexpr double kNeverSwitchTau = 2.0;

/// vanilla: tau = 0 (no hints from step 0); fixed-hint: constant full hint,
/// no switch; cosine: cosine decay, no switch; lang: cosine decay plus
/// adaptive switch at tau = 0.4.
void apply_preset(RunConfig& config, Preset preset);

/// Parses JSON text; missing keys take defaults, unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(std::string_view text);
/// Throws ConfigError("path") for a missing file, ConfigError("json") for
/// malformed syntax, and a key-specific ConfigError for invalid values.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace hintflow
