// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hintflow/policy.hpp"
#include "hintflow/random.hpp"
#include "hintflow/rewards.hpp"
#include "hintflow/schedules.hpp"

namespace hintflow {

struct ArenaLanguage {
    std::string name;
    std::size_t vocab_size = 16;
    /// Added to the correct-answer logit of this reasoning language at init.
    double competence = 0.0;
};

/// Synthetic multilingual reasoning environment.
///
/// Each language owns a disjoint slice of the token space, so the language of
/// a response is known exactly from its content tokens.
struct ArenaSpec {
    std::vector<ArenaLanguage> languages;
    std::size_t pivot = 0;
    /// Logit bonus towards reasoning in the pivot language.
    double drift_bias = 2.0;
    /// Subtracted from the correct-answer logit, one entry per tier.
    std::vector<double> tier_offsets{0.0, 0.5, 1.0, 1.5};
    std::size_t answers = 8;
    std::size_t families = 4;
    std::size_t trace_len = 12;
    std::size_t question_len = 4;
    double hint_lang_gain = 2.5;
    double hint_ans_gain = 4.5;
    double format_init = -3.0;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    std::size_t language_count() const noexcept { return languages.size(); }
    std::size_t tiers() const noexcept { return tier_offsets.size(); }
    TokenId token_offset(LanguageIndex lang) const;
    std::optional<LanguageIndex> find_language(std::string_view name) const;
    const std::string& language_name(LanguageIndex lang) const { return languages.at(lang.value).name; }
    PolicyShape policy_shape() const;
};

/// Six languages, two per resource group, with English as the pivot.
ArenaSpec default_arena();

struct Task {
    std::uint64_t id = 0;
    LanguageIndex language;
    std::size_t tier = 0;
    std::size_t family = 0;
    std::size_t correct_answer = 0;
    std::vector<TokenId> question;
    TeacherTrace teacher;
};

struct Outcome {
    bool well_formed = false;
    LanguageIndex reasoning_language;
    std::vector<TokenId> content_tokens;
    std::size_t answer = 0;
    double logprob_old = 0.0;
};

/// Per-factor log-probabilities of one outcome.
struct FactorLogProbs {
    double format = 0.0;
    double language = 0.0;
    double content = 0.0;
    double answer = 0.0;

    double total() const noexcept { return format + language + content + answer; }
};

/// Initial parameters: zero logits except the correct-answer entries, which
/// start at the reasoning language's competence.
PolicyParams init_policy(const ArenaSpec& spec);

/// Deterministic in (spec, count, seed). Task ids run from `first_id`.
/// Throws DomainError for count == 0.
std::vector<Task> make_tasks(const ArenaSpec& spec, std::size_t count, std::uint64_t seed, std::uint64_t first_id = 0);

HintedPrompt hinted_prompt(const Task& task, std::size_t hint_len);

/// Reasoning-language logits including drift and hint bonuses.
std::vector<double> language_logits(const ArenaSpec& spec, const PolicyParams& policy, const Task& task,
                                    std::size_t hint_len);

/// Answer logits in the correct-relative frame including tier and hint terms.
std::vector<double> answer_logits(const ArenaSpec& spec, const PolicyParams& policy, const Task& task,
                                  std::size_t hint_len, LanguageIndex reasoning);

/// Position of `answer` in the correct-relative frame.
std::size_t relative_answer(const ArenaSpec& spec, const Task& task, std::size_t answer);

/// Samples one response. `hint_len` must not exceed the teacher trace.
Outcome rollout(const ArenaSpec& spec, const PolicyParams& policy, const Task& task, std::size_t hint_len, Rng& rng);

/// Throws DomainError when the outcome could not have been produced for the task.
FactorLogProbs factor_logprobs(const ArenaSpec& spec, const PolicyParams& policy, const Task& task,
                               std::size_t hint_len, const Outcome& outcome);

double sequence_logprob(const ArenaSpec& spec, const PolicyParams& policy, const Task& task, std::size_t hint_len,
                        const Outcome& outcome);

/// Rewards are exact in the arena: the reasoning language is read off the
/// token subspace.
RewardBreakdown score_outcome(const Outcome& outcome, const Task& task);

/// E[R] by enumerating format x reasoning language x answer; content tokens
/// never affect the reward and marginalize out.
double expected_reward(const ArenaSpec& spec, const PolicyParams& policy, const Task& task, std::size_t hint_len);

/// Arena serialization: think-open, m content tokens, think-close, answer.
std::size_t outcome_length(const ArenaSpec& spec);

/// Language of a token under the arena's partition of the token space.
std::optional<LanguageIndex> token_language(const ArenaSpec& spec, TokenId token);

}  // namespace hintflow
