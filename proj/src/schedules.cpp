// SPDX-License-Identifier: Apache-2.0

#include "hintflow/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hintflow/errors.hpp"

namespace hintflow {

std::string_view to_string(DecayKind kind) {
    switch (kind) {
        case DecayKind::cosine: return "cosine";
        case DecayKind::linear: return "linear";
        case DecayKind::exponential: return "exponential";
        case DecayKind::constant: return "constant";
    }
    return "cosine";
}

DecayKind parse_decay_kind(std::string_view name) {
    if (name == "cosine") return DecayKind::cosine;
    if (name == "linear") return DecayKind::linear;
    if (name == "exponential") return DecayKind::exponential;
    if (name == "constant") return DecayKind::constant;
    throw ConfigError("kind", "unknown decay kind '" + std::string(name) + "'");
}

void DecaySchedule::validate() const {
    if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
    if (kind == DecayKind::exponential && !(rate_lambda > 0.0))
        throw ConfigError("lambda", "exponential decay needs a positive rate");
}

double hint_ratio(const DecaySchedule& schedule, Step t) {
    if (schedule.kind == DecayKind::constant) return 1.0;
    if (t < 0) t = 0;
    if (t > schedule.horizon) return 0.0;

    const double frac = static_cast<double>(t) / static_cast<double>(schedule.horizon);
    double p = 0.0;
    switch (schedule.kind) {
        case DecayKind::cosine: p = 0.5 * (1.0 + std::cos(std::numbers::pi * frac)); break;
        case DecayKind::linear: p = 1.0 - frac; break;
        case DecayKind::exponential: p = std::exp(-schedule.rate_lambda * frac); break;
        case DecayKind::constant: p = 1.0; break;
    }
    return std::clamp(p, 0.0, 1.0);
}

std::size_t hint_prefix_len(double ratio, std::size_t trace_len) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw DomainError("hint ratio outside [0, 1]");
    if (trace_len == 0) throw DomainError("teacher trace is empty");
    const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(trace_len)));
    return std::min(k, trace_len);
}

std::vector<TokenId> HintedPrompt::tokens() const {
    std::vector<TokenId> out;
    out.reserve(question_tokens.size() + hint_tokens.size());
    out.insert(out.end(), question_tokens.begin(), question_tokens.end());
    out.insert(out.end(), hint_tokens.begin(), hint_tokens.end());
    return out;
}

HintedPrompt build_hinted_prompt(std::vector<TokenId> question_tokens, LanguageIndex question_language,
                                 const TeacherTrace& trace, std::size_t k) {
    if (k > trace.length()) throw DomainError("hint length exceeds teacher trace");
    if (trace.language != question_language) throw DomainError("teacher trace language differs from question");
    HintedPrompt prompt;
    prompt.question_tokens = std::move(question_tokens);
    prompt.language = question_language;
    prompt.hint_tokens.assign(trace.tokens.begin(), trace.tokens.begin() + static_cast<std::ptrdiff_t>(k));
    prompt.source_trace_len = trace.length();
    return prompt;
}

}  // namespace hintflow
