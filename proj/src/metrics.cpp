// SPDX-License-Identifier: Apache-2.0

#include "hintflow/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "hintflow/errors.hpp"
#include "hintflow/rewards.hpp"

namespace hintflow {

std::string_view to_string(Tier tier) {
    switch (tier) {
        case Tier::low: return "low";
        case Tier::medium: return "medium";
        case Tier::high: return "high";
        case Tier::top: return "top";
    }
    return "low";
}

std::optional<Tier> parse_tier(std::string_view name) {
    if (name == "low") return Tier::low;
    if (name == "medium") return Tier::medium;
    if (name == "high") return Tier::high;
    if (name == "top") return Tier::top;
    return std::nullopt;
}

std::string to_json_line(const MetricsRecord& m) {
    char buf[512];
    std::string dw;
    if (m.dw_acc) {
        std::snprintf(buf, sizeof buf, ",\"dw_acc\":%.6f", *m.dw_acc);
        dw = buf;
    }
    std::snprintf(buf, sizeof buf, "{\"lcr\":%.6f,\"acc\":%.6f,\"lc_acc\":%.6f%s,\"repeat\":%.6f,\"mean_len\":%.6f,\"count\":%zu}",
                  m.lcr, m.acc, m.lc_acc, dw.c_str(), m.repeat, m.mean_len, m.count);
    return buf;
}

RecordVerdict judge_record(const EvalRecord& record, const LanguageDetector& detector) {
    const auto parts = split_response(record.response);
    RecordVerdict v;
    v.r_lc = check_language_consistency(parts, record.question_language, detector);
    v.r_format = check_format(parts);
    v.extracted = parts.boxed;
    v.r_acc = parts.boxed.has_value() && verify_answer(*parts.boxed, record.gold);
    return v;
}

namespace {

void require_nonempty(std::size_t n) {
    if (n == 0) throw DomainError("metric over an empty corpus");
}

template <typename Pred>
double fraction(std::span<const EvalRecord> records, Pred pred) {
    require_nonempty(records.size());
    std::size_t hits = 0;
    for (const auto& r : records)
        if (pred(r)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

}  // namespace

double lcr(std::span<const EvalRecord> records, const LanguageDetector& detector) {
    return fraction(records, [&](const EvalRecord& r) {
        return check_language_consistency(split_response(r.response), r.question_language, detector);
    });
}

double accuracy(std::span<const EvalRecord> records) {
    return fraction(records, [](const EvalRecord& r) {
        const auto boxed = split_response(r.response).boxed;
        return boxed.has_value() && verify_answer(*boxed, r.gold);
    });
}

double lc_and_acc(std::span<const EvalRecord> records, const LanguageDetector& detector) {
    return fraction(records, [&](const EvalRecord& r) {
        const auto v = judge_record(r, detector);
        return v.r_lc && v.r_acc;
    });
}

double dw_acc(const std::array<double, kTierCount>& a) {
    for (double x : a)
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("tier accuracy outside [0, 1]");
    return (1.0 * a[0] + 2.0 * a[1] + 4.0 * a[2] + 8.0 * a[3]) / 15.0;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < text.size()) {
        while (i < text.size() && space(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && !space(text[j])) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

double repeat_score(std::string_view text, std::size_t n, double w) {
    if (n == 0) throw DomainError("repeat score needs n >= 1");
    if (!(w > 0.0)) throw DomainError("repeat score needs w > 0");
    const auto tokens = whitespace_tokens(strip_math(text));
    return repeat_score_tokens<std::string>(tokens, n, w);
}

double mean_response_length(std::span<const EvalRecord> records) {
    require_nonempty(records.size());
    double total = 0.0;
    for (const auto& r : records) total += static_cast<double>(whitespace_tokens(r.response).size());
    return total / static_cast<double>(records.size());
}

double mean_response_length(const ArenaSpec& spec, std::span<const Outcome> outcomes) {
    require_nonempty(outcomes.size());
    // Every arena outcome serializes to the same length.
    return static_cast<double>(outcome_length(spec));
}

MetricsRecord summarize(std::span<const EvalRecord> records, const LanguageDetector& detector) {
    std::vector<RecordVerdict> verdicts;
    verdicts.reserve(records.size());
    for (const auto& r : records) verdicts.push_back(judge_record(r, detector));
    return summarize(records, verdicts);
}

MetricsRecord summarize(std::span<const EvalRecord> records, std::span<const RecordVerdict> verdicts) {
    require_nonempty(records.size());
    if (records.size() != verdicts.size()) throw DomainError("verdict count differs from record count");

    MetricsRecord m;
    m.count = records.size();
    std::array<std::size_t, kTierCount> tier_n{}, tier_hits{};
    double repeat_sum = 0.0, len_sum = 0.0;
    std::size_t lc = 0, acc = 0, both = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& v = verdicts[i];
        lc += v.r_lc;
        acc += v.r_acc;
        both += v.r_lc && v.r_acc;
        repeat_sum += repeat_score(records[i].response);
        len_sum += static_cast<double>(whitespace_tokens(records[i].response).size());
        if (records[i].tier) {
            const auto t = static_cast<std::size_t>(*records[i].tier);
            ++tier_n[t];
            tier_hits[t] += v.r_acc;
        }
    }
    const double n = static_cast<double>(m.count);
    m.lcr = static_cast<double>(lc) / n;
    m.acc = static_cast<double>(acc) / n;
    m.lc_acc = static_cast<double>(both) / n;
    m.repeat = repeat_sum / n;
    m.mean_len = len_sum / n;

    bool all_tiers = true;
    std::array<double, kTierCount> tier_acc{};
    for (std::size_t t = 0; t < kTierCount; ++t) {
        if (tier_n[t] == 0) {
            all_tiers = false;
            break;
        }
        tier_acc[t] = static_cast<double>(tier_hits[t]) / static_cast<double>(tier_n[t]);
    }
    if (all_tiers) m.dw_acc = dw_acc(tier_acc);
    return m;
}

}  // namespace hintflow
