#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hintflow/errors.hpp"
#include "hintflow/language.hpp"
#include "hintflow/rewards.hpp"

using namespace hintflow;

namespace {
const std::string kKoTrace = "사과가 세 개 있고 두 개를 더 사면 모두 다섯 개가 됩니다";
const std::string kKoTail = "따라서 답은 다음과 같습니다 \\boxed{6}";
const std::string kEnTrace = "We have three apples and we buy two more so the total is five";
const std::string kEnTail = "So the answer is \\boxed{6}";
}  // namespace

TEST_CASE("split at the first open tag and the first close after it") {
    auto p = split_response("<think>abc</think>xyz");
    CHECK(p.well_formed);
    CHECK(p.trace == "abc");
    CHECK(p.tail == "xyz");

    p = split_response("no tags here");
    CHECK_FALSE(p.well_formed);
    CHECK(p.trace.empty());
    CHECK(p.tail == "no tags here");

    p = split_response("<think>a<think>b</think>c");
    CHECK(p.trace == "a<think>b");
    CHECK(p.tail == "c");

    CHECK_FALSE(split_response("</think>x<think>y").well_formed);
    CHECK_FALSE(split_response("<think>never closed").well_formed);
}

TEST_CASE("format needs tags and a boxed answer in the tail") {
    CHECK(check_format(split_response("<think>r</think> final \\boxed{6}")));
    CHECK_FALSE(check_format(split_response("<think>r</think> answer is 6")));
    CHECK_FALSE(check_format(split_response("reasoning \\boxed{6}")));
    CHECK_FALSE(check_format(split_response("<think>\\boxed{6}</think> answer is 6")));
    CHECK_FALSE(check_format(split_response("<think>r</think> \\boxed{6")));
}

TEST_CASE("format ignores what the trace says") {
    for (const char* trace : {"", "x", "\\boxed{", "}}}{", "긴 추론"}) {
        const std::string raw = std::string("<think>") + trace + "</think> \\boxed{1}";
        CHECK(check_format(split_response(raw)));
    }
}

TEST_CASE("boxed extraction") {
    CHECK(extract_boxed("x \\boxed{42} y") == "42");
    CHECK(extract_boxed("\\boxed{\\frac{1}{2}}") == "\\frac{1}{2}");
    CHECK(extract_boxed("a \\boxed{1} b \\boxed{2}") == "2");
    CHECK_FALSE(extract_boxed("no box").has_value());
    CHECK_FALSE(extract_boxed("\\boxed{1").has_value());
    CHECK(extract_boxed("\\boxed{}") == "");

    for (const char* inner : {"42", "\\frac{1}{2}", "{a}{b}", "x^{2}+1"}) {
        const auto first = extract_boxed(std::string("\\boxed{") + inner + "}");
        REQUIRE(first.has_value());
        CHECK(*first == inner);
        CHECK(extract_boxed("\\boxed{" + *first + "}") == first);
    }
}

TEST_CASE("math stripping") {
    CHECK(strip_math("area $x^2$ equals") == "area  equals");
    CHECK(strip_math("\\boxed{6}") == "");
    CHECK(strip_math("so 3×2=6 cases") == "so  cases");
    CHECK(strip_math("display $$a+b$$ and \\(c\\) and \\[d\\] done") == "display  and  and  done");
}

TEST_CASE("script detection") {
    const auto& d = default_detector();
    CHECK(detect_language("안녕하세요 오늘은 날씨가 좋습니다", d) == "ko");
    CHECK_FALSE(detect_language("", d).has_value());
    CHECK_FALSE(detect_language("1 + 2 = 3", d).has_value());
    CHECK(detect_language("ดังนั้นคำตอบคือหก abcd", d) == "th");  // 16 Thai letters, 4 Latin
    CHECK(detect_language("the answer is that we have to add them", d) == "en");
    CHECK(detect_language("Die Antwort ist, dass wir die Zahlen addieren und nicht", d) == "de");
    CHECK(detect_language("Привет как дела у тебя", d) == "ru");
    CHECK(detect_language("これはペンです", d) == "ja");

    const std::string text = "ดังนั้นคำตอบคือหก";
    const auto first = detect_language(text, d);
    for (int i = 0; i < 5; ++i) CHECK(detect_language(text, d) == first);
}

TEST_CASE("language consistency") {
    const auto& d = default_detector();
    auto ko = split_response("<think>" + kKoTrace + "</think>" + kKoTail);
    CHECK(check_language_consistency(ko, "ko", d));

    auto en = split_response("<think>" + kEnTrace + "</think>" + kEnTail);
    CHECK_FALSE(check_language_consistency(en, "ko", d));
    CHECK(check_language_consistency(en, "en", d));

    auto math_tail = split_response("<think>" + kKoTrace + "</think>\\boxed{6}");
    CHECK(check_language_consistency(math_tail, "ko", d));

    auto mixed = split_response("<think>" + kKoTrace + "</think>" + kEnTail);
    CHECK_FALSE(check_language_consistency(mixed, "ko", d));

    CHECK_FALSE(check_language_consistency(split_response(kKoTrace), "ko", d));
    CHECK_THROWS_AS(check_language_consistency(ko, "tlh", d), ConfigError);
}

TEST_CASE("answer verification") {
    CHECK(verify_answer("42", "42"));
    CHECK(verify_answer("0.5", "1/2"));
    CHECK(verify_answer("1/2", "0.5"));
    CHECK_FALSE(verify_answer("6", "9"));
    CHECK(verify_answer("\\frac{1}{2}", "0.5"));
    CHECK(verify_answer(" $42$ ", "42"));
    CHECK(verify_answer("\\text{yes}", "yes"));
    CHECK(verify_answer("x  +  1", "x + 1"));
    CHECK_FALSE(verify_answer("x+1", "x + 2"));
    CHECK(verify_answer("3.0000000000001", "3"));
    CHECK_FALSE(verify_answer("3.001", "3"));
    for (const char* s : {"7", "abc", "\\frac{3}{4}", "-2.5"}) CHECK(verify_answer(s, s));
    CHECK(parse_numeric_answer("-3/4") == doctest::Approx(-0.75));
    CHECK_FALSE(parse_numeric_answer("1/0").has_value());
}

TEST_CASE("composite reward is the conjunction") {
    for (int m = 0; m < 8; ++m) {
        const bool a = m & 1, b = m & 2, c = m & 4;
        CHECK(composite_reward(a, b, c) == std::min({a, b, c}));
    }
    static_assert(composite_reward(true, true, true));
    static_assert(!composite_reward(false, true, true));
    static_assert(!composite_reward(true, true, false));
}

TEST_CASE("scoring whole responses") {
    const auto& d = default_detector();
    auto r = score_response("<think>" + kKoTrace + "</think>" + kKoTail, "ko", "6", d);
    CHECK((r.r_lc && r.r_format && r.r_acc && r.r));

    r = score_response("<think>" + kKoTrace + "</think>" + kKoTail, "ko", "9", d);
    CHECK((r.r_lc && r.r_format && !r.r_acc && !r.r));

    r = score_response("<think>" + kEnTrace + "</think>" + kEnTail, "ko", "6", d);
    CHECK((!r.r_lc && r.r_format && r.r_acc && !r.r));

    r = score_response("answer is 6", "ko", "6", d);
    CHECK((!r.r_format && !r.r_acc && !r.r));
}
