// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hintflow {

using TokenId = std::uint32_t;
using Step = std::int64_t;

/// Index of a language in the configured language list.
struct LanguageIndex {
    std::uint32_t value = 0;
    friend constexpr auto operator<=>(LanguageIndex, LanguageIndex) = default;
};

enum class DecayKind { cosine, linear, exponential, constant };

std::string_view to_string(DecayKind kind);
/// Throws ConfigError("kind") on unknown names.
DecayKind parse_decay_kind(std::string_view name);

/// Hint-ratio schedule over training steps.
///
/// `constant` keeps the ratio at 1 for every step and ignores the horizon;
/// it exists for the fixed-hint comparator.
struct DecaySchedule {
    DecayKind kind = DecayKind::cosine;
    Step horizon = 300;
    double rate_lambda = 6.0;

    /// Throws ConfigError when horizon < 1 or an exponential rate is not positive.
    void validate() const;
};

struct TeacherTrace {
    std::vector<TokenId> tokens;
    LanguageIndex language;

    std::size_t length() const noexcept { return tokens.size(); }
};

struct HintedPrompt {
    std::vector<TokenId> question_tokens;
    LanguageIndex language;
    std::vector<TokenId> hint_tokens;
    std::size_t source_trace_len = 0;

    std::size_t hint_len() const noexcept { return hint_tokens.size(); }
    /// k / L, the fraction of the teacher trace revealed.
    double hint_fraction() const noexcept {
        return source_trace_len == 0 ? 0.0
                                     : static_cast<double>(hint_tokens.size()) /
                                           static_cast<double>(source_trace_len);
    }
    /// Question followed by the hint prefix.
    std::vector<TokenId> tokens() const;
};

/// Ratio in [0, 1]; zero for every t past the horizon except for `constant`.
double hint_ratio(const DecaySchedule& schedule, Step t);

/// floor(ratio * trace_len). Throws DomainError when ratio is outside [0, 1]
/// or trace_len is zero.
std::size_t hint_prefix_len(double ratio, std::size_t trace_len);

/// Throws DomainError when k exceeds the trace or the languages differ.
HintedPrompt build_hinted_prompt(std::vector<TokenId> question_tokens, LanguageIndex question_language,
                                 const TeacherTrace& trace, std::size_t k);

}  // namespace hintflow
