// Small helpers shared by the arena, optimizer and acceptance tests.
#pragma once

#include <random>

#include "hintflow/arena.hpp"
#include "hintflow/grpo.hpp"

namespace fixtures {

inline hintflow::PolicyParams random_policy(const hintflow::ArenaSpec& spec, std::mt19937_64& gen, double scale = 1.0) {
    hintflow::PolicyParams p(spec.policy_shape());
    std::normal_distribution<double> n(0.0, scale);
    for (double& v : p.values()) v = n(gen);
    return p;
}

// Two languages, K = 4, no drift, tier or competence terms, zero hint gains.
inline hintflow::ArenaSpec flat_arena(std::size_t vocab = 4, std::size_t answers = 4) {
    hintflow::ArenaSpec spec;
    spec.languages = {{"aa", vocab, 0.0}, {"bb", vocab, 0.0}};
    spec.drift_bias = 0.0;
    spec.tier_offsets = {0.0};
    spec.answers = answers;
    spec.families = 1;
    spec.hint_lang_gain = 0.0;
    spec.hint_ans_gain = 0.0;
    spec.format_init = 0.0;
    return spec;
}

// A scored group of G rollouts sampled under `old_policy`.
inline hintflow::RolloutGroup sample_group(const hintflow::ArenaSpec& spec, const hintflow::PolicyParams& old_policy,
                                           const hintflow::Task& task, std::size_t k, std::size_t g,
                                           std::uint64_t seed) {
    hintflow::RolloutGroup group;
    group.task = task;
    group.prompt = hintflow::hinted_prompt(task, k);
    for (std::size_t i = 0; i < g; ++i) {
        hintflow::Rng rng(hintflow::stream_key({seed, task.id, i}));
        group.outcomes.push_back(hintflow::rollout(spec, old_policy, task, k, rng));
        group.breakdowns.push_back(hintflow::score_outcome(group.outcomes.back(), task));
        group.rewards.push_back(group.breakdowns.back().value());
    }
    group.advantages = hintflow::standardize_advantages(group.rewards);
    return group;
}

}  // namespace fixtures
