// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hintflow/arena.hpp"
#include "hintflow/errors.hpp"
#include "hintflow/language.hpp"

namespace hintflow {

enum class Tier { low, medium, high, top };

inline constexpr std::size_t kTierCount = 4;

std::string_view to_string(Tier tier);
/// nullopt for names outside {low, medium, high, top}.
std::optional<Tier> parse_tier(std::string_view name);

struct EvalRecord {
    std::string question;
    std::string question_language;
    std::string response;
    std::string gold;
    std::optional<Tier> tier;
};

/// Per-record reward components as used by the corpus metrics.
struct RecordVerdict {
    bool r_lc = false;
    bool r_format = false;
    bool r_acc = false;
    std::optional<std::string> extracted;
};

struct MetricsRecord {
    double lcr = 0.0;
    double acc = 0.0;
    double lc_acc = 0.0;
    std::optional<double> dw_acc;
    double repeat = 0.0;
    double mean_len = 0.0;
    std::size_t count = 0;
};

/// Single-line JSON, reals with six decimals; dw_acc omitted when absent.
std::string to_json_line(const MetricsRecord& m);

RecordVerdict judge_record(const EvalRecord& record, const LanguageDetector& detector);

// Rates over a corpus. All throw DomainError on an empty corpus.
double lcr(std::span<const EvalRecord> records, const LanguageDetector& detector);
double accuracy(std::span<const EvalRecord> records);
double lc_and_acc(std::span<const EvalRecord> records, const LanguageDetector& detector);

/// (a1 + 2 a2 + 4 a3 + 8 a4) / 15. Throws DomainError for entries outside [0, 1].
double dw_acc(const std::array<double, kTierCount>& tier_accuracies);

/// Weighted n-gram repetition rate over a token sequence:
/// sum f^w [f > 1] / sum max(f, 1)^w over distinct n-grams.
template <typename Token>
double repeat_score_tokens(std::span<const Token> tokens, std::size_t n = 1, double w = 1.0);

/// strip_math, whitespace tokenization, then repeat_score_tokens.
/// Throws DomainError for n == 0 or w <= 0.
double repeat_score(std::string_view text, std::size_t n = 1, double w = 1.0);

std::vector<std::string> whitespace_tokens(std::string_view text);

/// Mean whitespace-token count of the raw responses.
double mean_response_length(std::span<const EvalRecord> records);
/// Mean serialized length of arena outcomes.
double mean_response_length(const ArenaSpec& spec, std::span<const Outcome> outcomes);

/// Every metric over one corpus. DW-ACC is present only when all four tiers are.
MetricsRecord summarize(std::span<const EvalRecord> records, const LanguageDetector& detector);

/// Same, from precomputed verdicts.
MetricsRecord summarize(std::span<const EvalRecord> records, std::span<const RecordVerdict> verdicts);

// ---------------------------------------------------------------------------

template <typename Token>
double repeat_score_tokens(std::span<const Token> tokens, std::size_t n, double w) {
    if (n == 0) throw DomainError("repeat score needs n >= 1");
    if (!(w > 0.0)) throw DomainError("repeat score needs w > 0");
    if (tokens.size() < n) return 0.0;
    std::map<std::vector<Token>, std::size_t> freq;
    for (std::size_t j = 0; j + n <= tokens.size(); ++j)
        ++freq[std::vector<Token>(tokens.begin() + static_cast<std::ptrdiff_t>(j),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(j + n))];
    double num = 0.0, den = 0.0;
    for (const auto& [gram, f] : freq) {
        const double fw = std::pow(static_cast<double>(f), w);
        if (f > 1) num += fw;
        den += std::pow(static_cast<double>(std::max<std::size_t>(f, 1)), w);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace hintflow
