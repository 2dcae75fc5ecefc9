// SPDX-License-Identifier: Apache-2.0

#include "hintflow/language.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>
#include <unordered_set>

#include "hintflow/rewards.hpp"

namespace hintflow {

namespace utf8 {

std::vector<char32_t> decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        }
        bool ok = len > 0 && i + len <= text.size();
        for (std::size_t j = 1; ok && j < len; ++j) {
            const auto b = static_cast<unsigned char>(text[i + j]);
            if ((b & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
            out.push_back(U'�');
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace utf8

namespace {

enum class Script { none, latin, hangul, kana, han, thai, cyrillic, arabic, bengali, telugu, devanagari, greek, hebrew };

Script classify(char32_t c) {
    if ((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) return Script::latin;
    if (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7) return Script::latin;
    if (c >= 0x1E00 && c <= 0x1EFF) return Script::latin;
    if ((c >= 0xAC00 && c <= 0xD7AF) || (c >= 0x1100 && c <= 0x11FF) || (c >= 0x3130 && c <= 0x318F))
        return Script::hangul;
    if (c >= 0x3040 && c <= 0x30FF) return Script::kana;
    if ((c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF)) return Script::han;
    if (c >= 0x0E00 && c <= 0x0E7F) return Script::thai;
    if (c >= 0x0400 && c <= 0x04FF) return Script::cyrillic;
    if ((c >= 0x0600 && c <= 0x06FF) || (c >= 0x0750 && c <= 0x077F)) {
        // Arabic-Indic digits and punctuation are not letters.
        if (c >= 0x0660 && c <= 0x0669) return Script::none;
        if (c == 0x060C || c == 0x061B || c == 0x061F) return Script::none;
        return Script::arabic;
    }
    if (c >= 0x0980 && c <= 0x09FF) return Script::bengali;
    if (c >= 0x0C00 && c <= 0x0C7F) return Script::telugu;
    if (c >= 0x0900 && c <= 0x097F) return Script::devanagari;
    if (c >= 0x0370 && c <= 0x03FF) return Script::greek;
    if (c >= 0x0590 && c <= 0x05FF) return Script::hebrew;
    return Script::none;
}

bool is_vietnamese_letter(char32_t c) {
    switch (c) {
        case 0x0103: case 0x0102:  // ă
        case 0x01A1: case 0x01A0:  // ơ
        case 0x01B0: case 0x01AF:  // ư
        case 0x0111: case 0x0110:  // đ
            return true;
        default: return c >= 0x1EA0 && c <= 0x1EF9;
    }
}

struct WordList {
    const char* lang;
    std::unordered_set<std::string_view> words;
};

const std::vector<WordList>& latin_word_lists() {
    static const std::vector<WordList> lists = {
        {"en", {"the", "and", "is", "of", "to", "that", "we", "so", "this", "are", "it", "with", "for", "answer",
                "then", "be", "which", "therefore", "thus", "let", "find"}},
        {"de", {"der", "die", "das", "und", "ist", "nicht", "mit", "wir", "ein", "eine", "zu", "von", "den", "dem",
                "also", "sich", "auf", "für", "antwort"}},
        {"fr", {"le", "la", "les", "et", "est", "des", "une", "nous", "pour", "dans", "du", "donc", "sur",
                "réponse", "cette", "ce", "alors"}},
        {"es", {"el", "los", "las", "y", "es", "una", "por", "para", "con", "del", "entonces", "como", "se",
                "respuesta", "esto", "tenemos"}},
        {"pt", {"o", "os", "as", "é", "uma", "um", "para", "com", "do", "da", "não", "então", "resposta", "isso",
                "temos", "portanto"}},
        {"it", {"il", "lo", "gli", "è", "che", "della", "quindi", "sono", "non", "risposta", "questo", "abbiamo",
                "allora", "dei"}},
        {"vi", {"là", "và", "của", "có", "không", "các", "một", "ta", "được", "cho", "vậy", "này", "đáp", "số"}},
        {"id", {"yang", "dan", "adalah", "ini", "itu", "dengan", "untuk", "dari", "kita", "jadi", "tidak", "akan",
                "pada", "jawaban"}},
        {"sw", {"na", "ya", "kwa", "ni", "wa", "za", "hii", "kama", "katika", "hivyo", "jibu", "tunaweza"}},
    };
    return lists;
}

std::optional<std::string> resolve_latin(const std::vector<char32_t>& cps) {
    std::vector<std::size_t> hits(latin_word_lists().size(), 0);
    std::size_t vi_letters = 0;

    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        const auto& lists = latin_word_lists();
        for (std::size_t i = 0; i < lists.size(); ++i)
            if (lists[i].words.contains(word)) ++hits[i];
        word.clear();
    };
    for (char32_t c : cps) {
        if (classify(c) == Script::latin) {
            if (is_vietnamese_letter(c)) ++vi_letters;
            char32_t lower = c;
            if (c >= U'A' && c <= U'Z') lower = c - U'A' + U'a';
            utf8::append(word, lower);
        } else {
            flush();
        }
    }
    flush();

    const auto& lists = latin_word_lists();
    for (std::size_t i = 0; i < lists.size(); ++i)
        if (std::string_view(lists[i].lang) == "vi") hits[i] += vi_letters;

    const auto best = std::max_element(hits.begin(), hits.end());
    if (*best == 0) return std::nullopt;
    return std::string(lists[static_cast<std::size_t>(best - hits.begin())].lang);
}

}  // namespace

std::size_t count_letters(std::string_view text) {
    std::size_t n = 0;
    for (char32_t c : utf8::decode(text))
        if (classify(c) != Script::none) ++n;
    return n;
}

std::optional<std::string> ScriptHistogramDetector::detect(std::string_view text) const {
    const auto cps = utf8::decode(strip_math(text));

    std::array<std::size_t, 13> counts{};
    std::size_t total = 0;
    for (char32_t c : cps) {
        const auto s = classify(c);
        if (s == Script::none) continue;
        ++counts[static_cast<std::size_t>(s)];
        ++total;
    }
    if (total < min_chars_ || total == 0) return std::nullopt;

    const auto at = [&](Script s) { return counts[static_cast<std::size_t>(s)]; };
    // Kana marks Japanese; Han characters then count towards it.
    const std::size_t ja = at(Script::kana) > 0 ? at(Script::kana) + at(Script::han) : 0;
    const std::size_t zh = at(Script::kana) > 0 ? 0 : at(Script::han);

    // Fixed order keeps tie-breaking deterministic.
    const std::pair<const char*, std::size_t> buckets[] = {
        {"latin", at(Script::latin)}, {"ko", at(Script::hangul)},  {"ja", ja},
        {"zh", zh},                   {"th", at(Script::thai)},    {"ru", at(Script::cyrillic)},
        {"ar", at(Script::arabic)},   {"bn", at(Script::bengali)}, {"te", at(Script::telugu)},
        {"hi", at(Script::devanagari)}, {"el", at(Script::greek)}, {"he", at(Script::hebrew)},
    };
    const auto* best = &buckets[0];
    for (const auto& b : buckets)
        if (b.second > best->second) best = &b;

    if (std::string_view(best->first) == "latin") return resolve_latin(cps);
    return std::string(best->first);
}

const std::vector<std::string>& ScriptHistogramDetector::supported_languages() {
    static const std::vector<std::string> langs = {"en", "de", "fr", "es", "pt", "it", "vi", "id", "sw", "ko",
                                                   "ja", "zh", "th", "ru", "ar", "bn", "te", "hi", "el", "he"};
    return langs;
}

bool ScriptHistogramDetector::supports(std::string_view lang) const {
    const auto& langs = supported_languages();
    return std::find(langs.begin(), langs.end(), lang) != langs.end();
}

const LanguageDetector& default_detector() {
    static const ScriptHistogramDetector detector;
    return detector;
}

}  // namespace hintflow
