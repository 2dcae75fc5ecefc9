// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hintflow/arena.hpp"
#include "hintflow/policy.hpp"
#include "hintflow/random.hpp"

namespace hintflow {

struct TrainHyper {
    double clip_eps = 0.2;
    double kl_beta = 0.0;
    double lr = 1.5;
    std::size_t group_size = 8;
    double alpha = 0.5;
    double tau = 0.4;
    std::uint64_t seed = 1;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// G rollouts for one hinted prompt, sampled under a frozen old policy.
struct RolloutGroup {
    Task task;
    HintedPrompt prompt;
    std::vector<Outcome> outcomes;
    std::vector<RewardBreakdown> breakdowns;
    std::vector<double> rewards;
    std::vector<double> advantages;

    std::size_t hint_len() const noexcept { return prompt.hint_len(); }
};

/// (r - mean) / population std; all zeros when std < 1e-12.
/// Throws DomainError for fewer than two rewards.
std::vector<double> standardize_advantages(std::span<const double> rewards);

/// Mean over samples of min(rho * A, clip(rho, 1 - eps, 1 + eps) * A) with
/// rho = exp(new_lp - old_lp). Throws DomainError on length mismatch.
double clipped_surrogate(std::span<const double> old_lp, std::span<const double> new_lp,
                         std::span<const double> adv, double eps);

/// Log-probabilities of the group's outcomes under `policy`.
std::vector<double> group_logprobs(const ArenaSpec& spec, const PolicyParams& policy, const RolloutGroup& group);

/// Adds weight * grad log pi(outcome) to `grad`.
void accumulate_logprob_gradient(const ArenaSpec& spec, const PolicyParams& policy, const Task& task,
                                 std::size_t hint_len, const Outcome& outcome, double weight, PolicyParams& grad);

/// Gradient of the group's clipped surrogate with respect to `policy`.
/// Samples on the clipped branch contribute nothing.
PolicyParams surrogate_gradient(const ArenaSpec& spec, const PolicyParams& policy, const RolloutGroup& group,
                                double eps);

/// Ascent step theta + lr * grad. Throws NumericError for non-finite
/// gradients and DomainError for shape mismatches.
PolicyParams sgd_step(PolicyParams policy, const PolicyParams& grad, double lr);

enum class EntropyScope {
    full,     // every factor, divided by the serialized length
    content,  // content tokens only
};

struct EntropyEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Monte Carlo token-level entropy: the mean over sampled outputs of
/// -log pi(y) / |y|.
EntropyEstimate entropy_estimate(const ArenaSpec& spec, const PolicyParams& policy, std::span<const Task> prompts,
                                 std::size_t hint_len, std::size_t samples_per_prompt, std::uint64_t seed,
                                 EntropyScope scope = EntropyScope::full);

/// Per-output entropy term for an already sampled outcome.
double outcome_entropy_term(const ArenaSpec& spec, const FactorLogProbs& lp, EntropyScope scope);

}  // namespace hintflow
