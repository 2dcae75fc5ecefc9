// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hintflow/language.hpp"

namespace hintflow {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kBoxedMarker = "\\boxed{";

/// A response split at its thinking tags.
struct ResponseParts {
    std::string raw;
    std::string trace;  // between the tags
    std::string tail;   // after the closing tag; the whole text when malformed
    std::optional<std::string> boxed;
    bool well_formed = false;
};

struct RewardBreakdown {
    bool r_lc = false;
    bool r_format = false;
    bool r_acc = false;
    bool r = false;

    double value() const noexcept { return r ? 1.0 : 0.0; }
};

/// First "<think>", then the first "</think>" after it. Missing tags yield a
/// malformed value rather than an error.
ResponseParts split_response(std::string_view raw);

bool check_format(const ResponseParts& parts);

/// Content of the last balanced \boxed{...}; nullopt when absent or unbalanced.
std::optional<std::string> extract_boxed(std::string_view text);

/// Removes dollar/bracket math spans, boxed expressions, backslash commands
/// and whitespace-delimited runs made only of digits and math symbols.
std::string strip_math(std::string_view text);

std::optional<std::string> detect_language(std::string_view text, const LanguageDetector& detector);

/// Trace must be detected as the question language; the tail must match too,
/// or contain no natural-language letters at all. Throws ConfigError when the
/// detector does not support `question_lang`.
bool check_language_consistency(const ResponseParts& parts, std::string_view question_lang,
                                const LanguageDetector& detector);

/// Normalized string equality, or numeric equality within 1e-9 when both
/// sides parse as decimals, fractions or \frac{a}{b}.
bool verify_answer(std::string_view extracted, std::string_view gold);

/// Exposed for tests and the per-record report.
std::string normalize_answer(std::string_view text);
std::optional<double> parse_numeric_answer(std::string_view normalized);

constexpr bool composite_reward(bool r_lc, bool r_format, bool r_acc) noexcept { return r_lc && r_format && r_acc; }

/// Full breakdown for one free-text response.
RewardBreakdown score_response(std::string_view response, std::string_view question_lang, std::string_view gold,
                               const LanguageDetector& detector);

}  // namespace hintflow
