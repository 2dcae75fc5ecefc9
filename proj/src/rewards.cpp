// SPDX-License-Identifier: Apache-2.0

#include "hintflow/rewards.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

#include "hintflow/errors.hpp"

namespace hintflow {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = true;
            continue;
        }
        if (pending && !out.empty()) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

// Index one past the brace matching the '{' at `open`, or npos.
std::size_t match_brace(std::string_view s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == '{') {
            ++depth;
        } else if (s[i] == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

std::string remove_delimited(std::string_view s, std::string_view open, std::string_view close) {
    std::string out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto b = s.find(open, pos);
        if (b == std::string_view::npos) break;
        const auto e = s.find(close, b + open.size());
        if (e == std::string_view::npos) break;
        out.append(s.substr(pos, b - pos));
        pos = e + close.size();
    }
    out.append(s.substr(pos));
    return out;
}

std::string remove_boxed(std::string_view s) {
    std::string out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto b = s.find(kBoxedMarker, pos);
        if (b == std::string_view::npos) break;
        out.append(s.substr(pos, b - pos));
        const auto end = match_brace(s, b + kBoxedMarker.size() - 1);
        pos = end == std::string_view::npos ? b + kBoxedMarker.size() : end;
    }
    out.append(s.substr(pos));
    return out;
}

bool is_math_symbol(char32_t c) {
    if (c >= U'0' && c <= U'9') return true;
    switch (c) {
        case U'+': case U'-': case U'*': case U'/': case U'=': case U'<': case U'>': case U'^': case U'_':
        case U'|': case U'~': case U'{': case U'}': case U'[': case U']': case U'(': case U')': case U'%':
        case U'\\': case U'×': case U'÷': case U'·': case U'±': case U'≤': case U'≥': case U'≠': case U'≈':
        case U'∞': case U'√': case U'π': case U'∑': case U'∫': case U'−': case U'⋅': case U'→':
            return true;
        default: return false;
    }
}

bool is_punctuation(char32_t c) {
    switch (c) {
        case U'.': case U',': case U';': case U':': case U'!': case U'?': case U'\'': case U'"':
        case U'。': case U'，': case U'、':
            return true;
        default: return false;
    }
}

// A token made only of math symbols and punctuation, with at least one symbol.
bool is_symbol_run(std::string_view token) {
    bool any_symbol = false;
    for (char32_t c : utf8::decode(token)) {
        if (is_math_symbol(c)) {
            any_symbol = true;
        } else if (!is_punctuation(c)) {
            return false;
        }
    }
    return any_symbol;
}

std::string remove_symbol_runs(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (is_space(s[i])) {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        const auto token = s.substr(i, j - i);
        if (!is_symbol_run(token)) out.append(token);
        i = j;
    }
    return out;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
bool ends_with(std::string_view s, std::string_view p) {
    return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

// One normalization pass; returns true when something was removed.
bool unwrap_once(std::string& s) {
    static constexpr std::pair<std::string_view, std::string_view> kEnclosing[] = {
        {"$$", "$$"}, {"$", "$"}, {"\\(", "\\)"}, {"\\[", "\\]"}};
    for (auto [open, close] : kEnclosing) {
        if (s.size() >= open.size() + close.size() && starts_with(s, open) && ends_with(s, close)) {
            s = trim(std::string_view(s).substr(open.size(), s.size() - open.size() - close.size()));
            return true;
        }
    }
    static constexpr std::string_view kWrappers[] = {"\\text{",   "\\textbf{", "\\textit{", "\\mathrm{",
                                                     "\\mathbf{", "\\boxed{",  "\\mbox{"};
    for (auto w : kWrappers) {
        if (!starts_with(s, w)) continue;
        const auto end = match_brace(s, w.size() - 1);
        if (end == s.size()) {
            s = trim(std::string_view(s).substr(w.size(), s.size() - w.size() - 1));
            return true;
        }
    }
    if (!s.empty() && s.back() == '.') {
        s.pop_back();
        s = trim(s);
        return true;
    }
    return false;
}

std::optional<double> parse_decimal(std::string_view s) {
    static const std::regex kDecimal(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
    const std::string str(s);
    if (!std::regex_match(str, kDecimal)) return std::nullopt;
    double v = 0.0;
    const char* first = str.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, str.data() + str.size(), v);
    if (res.ec != std::errc{} || res.ptr != str.data() + str.size()) return std::nullopt;
    return v;
}

}  // namespace

ResponseParts split_response(std::string_view raw) {
    ResponseParts parts;
    parts.raw = std::string(raw);
    const auto open = raw.find(kThinkOpen);
    const auto close =
        open == std::string_view::npos ? std::string_view::npos : raw.find(kThinkClose, open + kThinkOpen.size());
    if (close == std::string_view::npos) {
        parts.tail = parts.raw;
    } else {
        parts.well_formed = true;
        const auto body = open + kThinkOpen.size();
        parts.trace = std::string(raw.substr(body, close - body));
        parts.tail = std::string(raw.substr(close + kThinkClose.size()));
    }
    parts.boxed = extract_boxed(parts.tail);
    return parts;
}

bool check_format(const ResponseParts& parts) { return parts.well_formed && parts.boxed.has_value(); }

std::optional<std::string> extract_boxed(std::string_view text) {
    const auto at = text.rfind(kBoxedMarker);
    if (at == std::string_view::npos) return std::nullopt;
    const auto open = at + kBoxedMarker.size() - 1;
    const auto end = match_brace(text, open);
    if (end == std::string_view::npos) return std::nullopt;
    return std::string(text.substr(open + 1, end - open - 2));
}

std::string strip_math(std::string_view text) {
    std::string s = remove_delimited(text, "$$", "$$");
    s = remove_delimited(s, "$", "$");
    s = remove_delimited(s, "\\[", "\\]");
    s = remove_delimited(s, "\\(", "\\)");
    s = remove_boxed(s);
    static const std::regex kCommand(R"(\\[A-Za-z]+)");
    s = std::regex_replace(s, kCommand, "");
    return remove_symbol_runs(s);
}

std::optional<std::string> detect_language(std::string_view text, const LanguageDetector& detector) {
    return detector.detect(text);
}

bool check_language_consistency(const ResponseParts& parts, std::string_view question_lang,
                                const LanguageDetector& detector) {
    if (!detector.supports(question_lang))
        throw ConfigError("lang", "question language '" + std::string(question_lang) + "' is not supported");
    if (!parts.well_formed) return false;

    const auto trace_lang = detector.detect(parts.trace);
    if (!trace_lang || *trace_lang != question_lang) return false;

    const auto tail_lang = detector.detect(parts.tail);
    if (tail_lang) return *tail_lang == question_lang;
    return count_letters(strip_math(parts.tail)) == 0;
}

std::string normalize_answer(std::string_view text) {
    std::string s = collapse_whitespace(trim(text));
    while (unwrap_once(s)) {
    }
    return s;
}

std::optional<double> parse_numeric_answer(std::string_view normalized) {
    std::string s;
    for (char c : normalized)
        if (!is_space(c)) s.push_back(c);
    if (s.empty()) return std::nullopt;

    double sign = 1.0;
    std::string_view body = s;
    static constexpr std::string_view kFracs[] = {"\\frac{", "\\dfrac{", "\\tfrac{"};
    if (body.size() > 1 && body[0] == '-' && body[1] == '\\') {
        sign = -1.0;
        body.remove_prefix(1);
    }
    for (auto f : kFracs) {
        if (!starts_with(body, f)) continue;
        const auto num_end = match_brace(body, f.size() - 1);
        if (num_end == std::string_view::npos || num_end >= body.size() || body[num_end] != '{') return std::nullopt;
        const auto den_end = match_brace(body, num_end);
        if (den_end != body.size()) return std::nullopt;
        const auto num = parse_decimal(body.substr(f.size(), num_end - 1 - f.size()));
        const auto den = parse_decimal(body.substr(num_end + 1, den_end - num_end - 2));
        if (!num || !den || *den == 0.0) return std::nullopt;
        return sign * *num / *den;
    }

    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
        const auto num = parse_decimal(body.substr(0, slash));
        const auto den = parse_decimal(body.substr(slash + 1));
        if (!num || !den || *den == 0.0) return std::nullopt;
        return *num / *den;
    }
    return parse_decimal(body);
}

bool verify_answer(std::string_view extracted, std::string_view gold) {
    const auto a = normalize_answer(extracted);
    const auto b = normalize_answer(gold);
    const auto x = parse_numeric_answer(a);
    const auto y = parse_numeric_answer(b);
    if (x && y) return std::fabs(*x - *y) <= 1e-9;
    return a == b;
}

RewardBreakdown score_response(std::string_view response, std::string_view question_lang, std::string_view gold,
                               const LanguageDetector& detector) {
    const auto parts = split_response(response);
    RewardBreakdown out;
    out.r_lc = check_language_consistency(parts, question_lang, detector);
    out.r_format = check_format(parts);
    out.r_acc = parts.boxed.has_value() && verify_answer(*parts.boxed, gold);
    out.r = composite_reward(out.r_lc, out.r_format, out.r_acc);
    return out;
}

}  // namespace hintflow
