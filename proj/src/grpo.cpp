// SPDX-License-Identifier: Apache-2.0

#include "hintflow/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hintflow/errors.hpp"

namespace hintflow {

void TrainHyper::validate() const {
    if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw ConfigError("hyper.clip_eps", "must lie in (0, 1)");
    if (kl_beta != 0.0) throw ConfigError("hyper.kl_beta", "only beta = 0 is supported");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("hyper.lr", "must be positive");
    if (group_size < 2) throw ConfigError("hyper.group_size", "must be >= 2");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("hyper.alpha", "must lie in [0, 1)");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("hyper.tau", "must be >= 0");
}

std::vector<double> standardize_advantages(std::span<const double> rewards) {
    if (rewards.size() < 2) throw DomainError("advantage standardization needs at least two rewards");
    const double n = static_cast<double>(rewards.size());
    const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / n);

    std::vector<double> adv(rewards.size(), 0.0);
    if (sd < 1e-12) return adv;
    for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / sd;
    return adv;
}

double clipped_surrogate(std::span<const double> old_lp, std::span<const double> new_lp,
                         std::span<const double> adv, double eps) {
    if (old_lp.size() != new_lp.size() || old_lp.size() != adv.size())
        throw DomainError("clipped surrogate inputs differ in length");
    if (old_lp.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < adv.size(); ++i) {
        const double rho = std::exp(new_lp[i] - old_lp[i]);
        const double clipped = std::clamp(rho, 1.0 - eps, 1.0 + eps);
        sum += std::min(rho * adv[i], clipped * adv[i]);
    }
    return sum / static_cast<double>(adv.size());
}

std::vector<double> group_logprobs(const ArenaSpec& spec, const PolicyParams& policy, const RolloutGroup& group) {
    std::vector<double> lp;
    lp.reserve(group.outcomes.size());
    for (const auto& o : group.outcomes) lp.push_back(sequence_logprob(spec, policy, group.task, group.hint_len(), o));
    return lp;
}

void accumulate_logprob_gradient(const ArenaSpec& spec, const PolicyParams& policy, const Task& task,
                                 std::size_t hint_len, const Outcome& outcome, double weight, PolicyParams& grad) {
    // d/dz log sigmoid(+-z)
    const double p_wf = sigmoid(policy.format_logit());
    grad.format_logit() += weight * ((outcome.well_formed ? 1.0 : 0.0) - p_wf);

    // Categorical factors: one-hot minus softmax of the logits actually used,
    // hint and drift bonuses included.
    const auto p_lang = softmax(language_logits(spec, policy, task, hint_len));
    auto g_lang = grad.lang_row(task.language);
    for (std::size_t j = 0; j < p_lang.size(); ++j)
        g_lang[j] += weight * ((j == outcome.reasoning_language.value ? 1.0 : 0.0) - p_lang[j]);

    const auto p_tok = softmax(policy.token_row(outcome.reasoning_language));
    auto g_tok = grad.token_row(outcome.reasoning_language);
    const TokenId offset = spec.token_offset(outcome.reasoning_language);
    const double m = static_cast<double>(outcome.content_tokens.size());
    for (std::size_t v = 0; v < p_tok.size(); ++v) g_tok[v] -= weight * m * p_tok[v];
    for (TokenId t : outcome.content_tokens) g_tok[t - offset] += weight;

    const auto p_ans = softmax(answer_logits(spec, policy, task, hint_len, outcome.reasoning_language));
    auto g_ans = grad.answer_row(outcome.reasoning_language, task.family);
    const auto rel = relative_answer(spec, task, outcome.answer);
    for (std::size_t j = 0; j < p_ans.size(); ++j) g_ans[j] += weight * ((j == rel ? 1.0 : 0.0) - p_ans[j]);
}

PolicyParams surrogate_gradient(const ArenaSpec& spec, const PolicyParams& policy, const RolloutGroup& group,
                                double eps) {
    PolicyParams grad = policy.zeros_like();
    const auto g = static_cast<double>(group.outcomes.size());
    for (std::size_t i = 0; i < group.outcomes.size(); ++i) {
        const double a = group.advantages[i];
        if (a == 0.0) continue;
        const auto& o = group.outcomes[i];
        const double rho = std::exp(sequence_logprob(spec, policy, group.task, group.hint_len(), o) - o.logprob_old);
        // min() picks the clipped constant once rho leaves the trust region
        // in the direction that would increase the objective.
        const bool clipped = (a > 0.0 && rho > 1.0 + eps) || (a < 0.0 && rho < 1.0 - eps);
        if (clipped) continue;
        accumulate_logprob_gradient(spec, policy, group.task, group.hint_len(), o, rho * a / g, grad);
    }
    return grad;
}

PolicyParams sgd_step(PolicyParams policy, const PolicyParams& grad, double lr) {
    if (policy.shape() != grad.shape()) throw DomainError("gradient shape does not match policy");
    if (!grad.all_finite()) throw NumericError("non-finite gradient entry");
    auto theta = policy.values();
    const auto g = grad.values();
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += lr * g[i];
    return policy;
}

double outcome_entropy_term(const ArenaSpec& spec, const FactorLogProbs& lp, EntropyScope scope) {
    if (scope == EntropyScope::content) return -lp.content / static_cast<double>(spec.trace_len);
    return -lp.total() / static_cast<double>(outcome_length(spec));
}

EntropyEstimate entropy_estimate(const ArenaSpec& spec, const PolicyParams& policy, std::span<const Task> prompts,
                                 std::size_t hint_len, std::size_t samples_per_prompt, std::uint64_t seed,
                                 EntropyScope scope) {
    if (samples_per_prompt == 0) throw DomainError("entropy estimate needs samples_per_prompt >= 1");
    EntropyEstimate est;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& task : prompts) {
        for (std::size_t s = 0; s < samples_per_prompt; ++s) {
            Rng rng(stream_key({seed, kEntropyTag, task.id, s}));
            const auto o = rollout(spec, policy, task, hint_len, rng);
            const double h = outcome_entropy_term(spec, factor_logprobs(spec, policy, task, hint_len, o), scope);
            sum += h;
            sum_sq += h * h;
            ++est.samples;
        }
    }
    if (est.samples == 0) return est;
    const double n = static_cast<double>(est.samples);
    est.mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1)) : 0.0;
    est.std_error = std::sqrt(var / n);
    return est;
}

}  // namespace hintflow
