// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hintflow {

/// Text -> language code, or nullopt for "unknown".
///
/// Implementations must be deterministic and return nullopt on empty or
/// script-free input. Substitute a stronger identifier by deriving from this.
class LanguageDetector {
public:
    virtual ~LanguageDetector() = default;
    virtual std::optional<std::string> detect(std::string_view text) const = 0;
    /// Languages this detector can return; questions in other languages are
    /// a configuration error.
    virtual bool supports(std::string_view lang) const = 0;
};

/// Unicode-script histogram with small function-word lists to tell the
/// Latin-script languages apart. Math is stripped before counting.
class ScriptHistogramDetector final : public LanguageDetector {
public:
    explicit ScriptHistogramDetector(std::size_t min_chars = 5) : min_chars_(min_chars) {}

    std::optional<std::string> detect(std::string_view text) const override;
    bool supports(std::string_view lang) const override;

    static const std::vector<std::string>& supported_languages();

private:
    std::size_t min_chars_;
};

const LanguageDetector& default_detector();

/// Number of code points that belong to a recognized writing system.
std::size_t count_letters(std::string_view text);

namespace utf8 {

/// Decodes UTF-8 leniently: invalid bytes become U+FFFD.
std::vector<char32_t> decode(std::string_view text);
void append(std::string& out, char32_t cp);

}  // namespace utf8

}  // namespace hintflow
