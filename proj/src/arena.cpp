// SPDX-License-Identifier: Apache-2.0

#include "hintflow/arena.hpp"

#include <cmath>

#include "hintflow/errors.hpp"

namespace hintflow {

void ArenaSpec::validate() const {
    if (languages.empty()) throw ConfigError("arena.languages", "at least one language is required");
    for (const auto& l : languages) {
        if (l.name.empty()) throw ConfigError("arena.languages", "language without a name");
        if (l.vocab_size == 0) throw ConfigError("arena.languages." + l.name + ".vocab", "must be >= 1");
        if (!std::isfinite(l.competence))
            throw ConfigError("arena.languages." + l.name + ".competence", "must be finite");
    }
    for (std::size_t i = 0; i < languages.size(); ++i)
        for (std::size_t j = i + 1; j < languages.size(); ++j)
            if (languages[i].name == languages[j].name)
                throw ConfigError("arena.languages", "duplicate language '" + languages[i].name + "'");
    if (pivot >= languages.size()) throw ConfigError("arena.pivot", "not a configured language");
    if (answers < 2) throw ConfigError("arena.answers", "must be >= 2");
    if (families < 1) throw ConfigError("arena.families", "must be >= 1");
    if (trace_len < 1) throw ConfigError("arena.trace_len", "must be >= 1");
    if (tier_offsets.empty()) throw ConfigError("arena.tier_offsets", "at least one tier is required");
    if (!std::isfinite(drift_bias)) throw ConfigError("arena.drift_bias", "must be finite");
    if (!std::isfinite(hint_lang_gain)) throw ConfigError("arena.hint_lang_gain", "must be finite");
    if (!std::isfinite(hint_ans_gain)) throw ConfigError("arena.hint_ans_gain", "must be finite");
    if (!std::isfinite(format_init)) throw ConfigError("arena.format_init", "must be finite");
}

TokenId ArenaSpec::token_offset(LanguageIndex lang) const {
    TokenId offset = 0;
    for (std::uint32_t l = 0; l < lang.value; ++l) offset += static_cast<TokenId>(languages[l].vocab_size);
    return offset;
}

std::optional<LanguageIndex> ArenaSpec::find_language(std::string_view name) const {
    for (std::size_t i = 0; i < languages.size(); ++i)
        if (languages[i].name == name) return LanguageIndex{static_cast<std::uint32_t>(i)};
    return std::nullopt;
}

PolicyShape ArenaSpec::policy_shape() const {
    PolicyShape shape;
    shape.languages = languages.size();
    for (const auto& l : languages) shape.vocab.push_back(l.vocab_size);
    shape.families = families;
    shape.answers = answers;
    return shape;
}

ArenaSpec default_arena() {
    ArenaSpec spec;
    spec.languages = {
        {"en", 16, 2.0}, {"de", 16, 1.5}, {"ja", 16, 0.5}, {"zh", 16, 0.5}, {"th", 16, -1.25}, {"sw", 16, -1.25},
    };
    spec.pivot = 0;
    return spec;
}

PolicyParams init_policy(const ArenaSpec& spec) {
    PolicyParams policy(spec.policy_shape());
    policy.format_logit() = spec.format_init;
    for (std::uint32_t l = 0; l < spec.language_count(); ++l)
        for (std::size_t f = 0; f < spec.families; ++f)
            policy.answer_row(LanguageIndex{l}, f)[0] = spec.languages[l].competence;
    return policy;
}

std::vector<Task> make_tasks(const ArenaSpec& spec, std::size_t count, std::uint64_t seed, std::uint64_t first_id) {
    if (count == 0) throw DomainError("make_tasks needs count >= 1");
    Rng rng(mix64(seed));
    std::vector<Task> tasks;
    tasks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Task task;
        task.id = first_id + i;
        task.language = LanguageIndex{static_cast<std::uint32_t>(rng.below(spec.language_count()))};
        task.tier = rng.below(spec.tiers());
        task.family = rng.below(spec.families);
        task.correct_answer = rng.below(spec.answers);
        const TokenId offset = spec.token_offset(task.language);
        const auto vocab = spec.languages[task.language.value].vocab_size;
        for (std::size_t j = 0; j < spec.question_len; ++j)
            task.question.push_back(offset + static_cast<TokenId>(rng.below(vocab)));
        task.teacher.language = task.language;
        for (std::size_t j = 0; j < spec.trace_len; ++j)
            task.teacher.tokens.push_back(offset + static_cast<TokenId>(rng.below(vocab)));
        tasks.push_back(std::move(task));
    }
    return tasks;
}

HintedPrompt hinted_prompt(const Task& task, std::size_t hint_len) {
    return build_hinted_prompt(task.question, task.language, task.teacher, hint_len);
}

namespace {

double hint_fraction(const Task& task, std::size_t hint_len) {
    if (hint_len > task.teacher.length()) throw DomainError("hint length exceeds teacher trace");
    return static_cast<double>(hint_len) / static_cast<double>(task.teacher.length());
}

}  // namespace

std::vector<double> language_logits(const ArenaSpec& spec, const PolicyParams& policy, const Task& task,
                                    std::size_t hint_len) {
    const auto row = policy.lang_row(task.language);
    std::vector<double> z(row.begin(), row.end());
    z[spec.pivot] += spec.drift_bias;
    z[task.language.value] += spec.hint_lang_gain * hint_fraction(task, hint_len);
    return z;
}

std::vector<double> answer_logits(const ArenaSpec& spec, const PolicyParams& policy, const Task& task,
                                  std::size_t hint_len, LanguageIndex reasoning) {
    const auto row = policy.answer_row(reasoning, task.family);
    std::vector<double> z(row.begin(), row.end());
    z[0] += spec.hint_ans_gain * hint_fraction(task, hint_len) - spec.tier_offsets[task.tier];
    return z;
}

std::size_t relative_answer(const ArenaSpec& spec, const Task& task, std::size_t answer) {
    return (answer + spec.answers - task.correct_answer) % spec.answers;
}

Outcome rollout(const ArenaSpec& spec, const PolicyParams& policy, const Task& task, std::size_t hint_len, Rng& rng) {
    Outcome out;
    const double p_wf = sigmoid(policy.format_logit());
    out.well_formed = rng.bernoulli(p_wf);
    double lp = out.well_formed ? log_sigmoid(policy.format_logit()) : log_sigmoid(-policy.format_logit());

    const auto lz = language_logits(spec, policy, task, hint_len);
    const auto lang = rng.categorical(softmax(lz));
    out.reasoning_language = LanguageIndex{static_cast<std::uint32_t>(lang)};
    lp += log_softmax_at(lz, lang);

    const auto tz = policy.token_row(out.reasoning_language);
    const auto tp = softmax(tz);
    const TokenId offset = spec.token_offset(out.reasoning_language);
    out.content_tokens.reserve(spec.trace_len);
    for (std::size_t j = 0; j < spec.trace_len; ++j) {
        const auto v = rng.categorical(tp);
        out.content_tokens.push_back(offset + static_cast<TokenId>(v));
        lp += std::log(tp[v]);
    }

    const auto az = answer_logits(spec, policy, task, hint_len, out.reasoning_language);
    const auto rel = rng.categorical(softmax(az));
    out.answer = (task.correct_answer + rel) % spec.answers;
    lp += log_softmax_at(az, rel);

    out.logprob_old = lp;
    return out;
}

FactorLogProbs factor_logprobs(const ArenaSpec& spec, const PolicyParams& policy, const Task& task,
                               std::size_t hint_len, const Outcome& outcome) {
    if (outcome.reasoning_language.value >= spec.language_count())
        throw DomainError("outcome reasoning language is not configured");
    if (outcome.answer >= spec.answers) throw DomainError("outcome answer out of range");
    if (outcome.content_tokens.size() != spec.trace_len) throw DomainError("outcome has wrong content length");

    FactorLogProbs lp;
    lp.format = outcome.well_formed ? log_sigmoid(policy.format_logit()) : log_sigmoid(-policy.format_logit());
    lp.language = log_softmax_at(language_logits(spec, policy, task, hint_len), outcome.reasoning_language.value);

    const auto tz = policy.token_row(outcome.reasoning_language);
    const TokenId offset = spec.token_offset(outcome.reasoning_language);
    // log-sum-exp once, then per-token lookups.
    const double log_norm = tz[0] - log_softmax_at(tz, 0);
    for (TokenId t : outcome.content_tokens) {
        if (t < offset || t >= offset + tz.size())
            throw DomainError("content token outside the reasoning language's vocabulary");
        lp.content += tz[t - offset] - log_norm;
    }

    lp.answer = log_softmax_at(answer_logits(spec, policy, task, hint_len, outcome.reasoning_language),
                               relative_answer(spec, task, outcome.answer));
    return lp;
}

double sequence_logprob(const ArenaSpec& spec, const PolicyParams& policy, const Task& task, std::size_t hint_len,
                        const Outcome& outcome) {
    return factor_logprobs(spec, policy, task, hint_len, outcome).total();
}

RewardBreakdown score_outcome(const Outcome& outcome, const Task& task) {
    RewardBreakdown r;
    r.r_format = outcome.well_formed;
    r.r_lc = outcome.reasoning_language == task.language;
    r.r_acc = outcome.answer == task.correct_answer;
    r.r = composite_reward(r.r_lc, r.r_format, r.r_acc);
    return r;
}

double expected_reward(const ArenaSpec& spec, const PolicyParams& policy, const Task& task, std::size_t hint_len) {
    const double p_wf = sigmoid(policy.format_logit());
    const auto p_lang = softmax(language_logits(spec, policy, task, hint_len));

    Outcome probe;
    probe.content_tokens.assign(spec.trace_len, spec.token_offset(task.language));
    double total = 0.0;
    for (int wf = 0; wf < 2; ++wf) {
        const double pf = wf ? p_wf : 1.0 - p_wf;
        probe.well_formed = wf != 0;
        for (std::uint32_t l = 0; l < spec.language_count(); ++l) {
            probe.reasoning_language = LanguageIndex{l};
            const auto p_ans = softmax(answer_logits(spec, policy, task, hint_len, probe.reasoning_language));
            for (std::size_t a = 0; a < spec.answers; ++a) {
                probe.answer = a;
                const double p = pf * p_lang[l] * p_ans[relative_answer(spec, task, a)];
                total += p * score_outcome(probe, task).value();
            }
        }
    }
    return total;
}

std::size_t outcome_length(const ArenaSpec& spec) { return spec.trace_len + 3; }

std::optional<LanguageIndex> token_language(const ArenaSpec& spec, TokenId token) {
    TokenId offset = 0;
    for (std::uint32_t l = 0; l < spec.language_count(); ++l) {
        const auto v = static_cast<TokenId>(spec.languages[l].vocab_size);
        if (token >= offset && token < offset + v) return LanguageIndex{l};
        offset += v;
    }
    return std::nullopt;
}

}  // namespace hintflow
