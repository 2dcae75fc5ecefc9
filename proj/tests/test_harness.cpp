#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hintflow/config.hpp"
#include "hintflow/errors.hpp"
#include "hintflow/reporting.hpp"
#include "hintflow/trainer.hpp"
#include "json.hpp"

using namespace hintflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hintflow_harness_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir.parent_path());
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

RunConfig small_config(const std::string& name, Step steps = 6) {
    auto c = default_run_config();
    c.steps = steps;
    c.batch_tasks = 8;
    c.eval_every = 3;
    c.eval_tasks = 48;
    c.out_dir = scratch(name).string();
    return c;
}

std::string error_key(std::string_view text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

const fs::path kFixtures = HINTFLOW_FIXTURES;

}  // namespace

TEST_CASE("config defaults and overrides") {
    const auto c = parse_config_text(R"({"steps": 12})");
    CHECK(c.steps == 12);
    CHECK(c.batch_tasks == 32);
    CHECK(c.hyper.group_size == 8);
    CHECK(c.arena.language_count() == 6);
    CHECK(c.group_of(LanguageIndex{0}) == GroupId::high);
    CHECK(c.group_of(LanguageIndex{5}) == GroupId::low);

    CHECK(parse_config_text(R"({"hyper": {"tau": 1.5}})").hyper.tau == 1.5);
    CHECK(error_key(R"({"hyper": {"clip_eps": 0}})") == "hyper.clip_eps");
    CHECK(error_key(R"({"stepz": 3})") == "stepz");
    CHECK(error_key(R"({"schedule": {"kind": "step"}})") == "schedule.kind");
    CHECK(error_key(R"({"steps": "many"})") == "steps");
    CHECK(error_key(R"({"steps": 3)") == "json");
    CHECK(error_key(R"({"batch_tasks": 7})") == "minibatch");
    CHECK(error_key(R"({"groups": {"high": ["en"], "mid": ["ja"], "low": ["th"]}})") == "groups");

    try {
        load_config("/nonexistent/run.json");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "path");
    }

    const auto round = parse_config(nlohmann::json::parse(to_json(c).dump()));
    CHECK(to_json(round).dump() == to_json(c).dump());
}

TEST_CASE("presets") {
    auto c = default_run_config();
    apply_preset(c, Preset::vanilla);
    CHECK(c.hyper.tau == 0.0);
    apply_preset(c, Preset::fixed_hint);
    CHECK(c.schedule.kind == DecayKind::constant);
    CHECK(c.hyper.tau > 1.0);
    apply_preset(c, Preset::cosine);
    CHECK(c.schedule.kind == DecayKind::cosine);
    CHECK(c.hyper.tau > 1.0);
    apply_preset(c, Preset::lang);
    CHECK(c.hyper.tau == 0.4);
    CHECK(parse_preset("fixed-hint") == Preset::fixed_hint);
    CHECK_THROWS_AS(parse_preset("questa"), ConfigError);
}

TEST_CASE("zero steps writes a manifest and the initial checkpoint") {
    auto c = small_config("zero", 0);
    const auto r = train(c);
    CHECK(fs::exists(r.run_dir / "manifest.json"));
    CHECK(fs::exists(r.run_dir / "checkpoint.bin"));
    CHECK(slurp(r.run_dir / "log.jsonl").empty());
    CHECK(r.policy == init_policy(c.arena));
}

TEST_CASE("run log layout") {
    auto c = small_config("layout");
    apply_preset(c, Preset::lang);
    const auto r = train(c);
    std::istringstream in(slurp(r.run_dir / "log.jsonl"));
    std::string line;
    Step expect = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["step"] == expect);
        for (const char* k : {"mean_reward", "mean_reward_by_group", "u_by_group", "ema_by_group",
                              "effective_ratio_by_group", "switched_by_group", "entropy", "mean_len", "repeat"})
            CHECK(j.contains(k));
        CHECK(j.contains("eval") == (expect % c.eval_every == 0));
        CHECK(j["mean_len"] == 15.0);
        ++expect;
    }
    CHECK(expect == c.steps);

    const auto m = nlohmann::json::parse(slurp(r.run_dir / "manifest.json"));
    CHECK(m["status"] == "completed");
    CHECK(m["steps_completed"] == c.steps);
    CHECK(m.contains("wall_time_s"));
    CHECK(m["config"]["steps"] == c.steps);

    const auto reloaded = load_config(r.run_dir / "config.json");
    CHECK(to_json(reloaded).dump() == to_json(c).dump());
}

TEST_CASE("tau zero never hints") {
    auto c = small_config("vanilla");
    apply_preset(c, Preset::vanilla);
    for (const auto& e : train(c).log)
        for (const auto& [g, s] : e.groups) {
            CHECK(s.effective_ratio == 0.0);
            CHECK(s.switch_step == Step{0});
        }
}

TEST_CASE("tau above one follows the pure schedule") {
    auto c = small_config("cosine");
    apply_preset(c, Preset::cosine);
    c.schedule.horizon = 4;
    for (const auto& e : train(c).log)
        for (const auto& [g, s] : e.groups) {
            CHECK(s.effective_ratio == hint_ratio(c.schedule, e.step));
            CHECK_FALSE(s.switched);
        }
}

TEST_CASE("identical runs give identical logs and thread counts agree") {
    auto a = small_config("det_a", 8);
    auto b = small_config("det_b", 8);
    auto t = small_config("det_t", 8);
    train(a);
    train(b);
    TrainOptions four;
    four.threads = 4;
    const auto rt = train(t, four);
    CHECK(slurp(fs::path(a.out_dir) / "log.jsonl") == slurp(fs::path(b.out_dir) / "log.jsonl"));
    const auto m = nlohmann::json::parse(slurp(fs::path(a.out_dir) / "manifest.json"))["final_eval"];
    CHECK(std::abs(m["lc_acc"].get<double>() - rt.final_eval.metrics.lc_acc) <= 1e-9);
    CHECK(std::abs(m["acc"].get<double>() - rt.final_eval.metrics.acc) <= 1e-9);
}

TEST_CASE("evaluation is hint-free and repeatable") {
    auto c = small_config("eval", 2);
    const auto r = train(c);
    const auto e1 = evaluate(r.run_dir / "checkpoint.bin", c, 77);
    const auto e2 = evaluate(r.run_dir / "checkpoint.bin", c, 77);
    CHECK(to_json_line(e1.metrics) == to_json_line(e2.metrics));
    CHECK(e1.metrics.count == c.eval_tasks);
    CHECK(e1.metrics.dw_acc.has_value());

    auto other = c;
    other.arena.answers = 4;
    CHECK_THROWS_AS(evaluate(r.run_dir / "checkpoint.bin", other, 77), FormatError);

    // An ideal policy scores perfectly without any hint.
    PolicyParams ideal = init_policy(c.arena);
    ideal.format_logit() = 60;
    for (std::uint32_t l = 0; l < c.arena.language_count(); ++l) {
        ideal.lang_row(LanguageIndex{l})[l] = 80;
        for (std::size_t f = 0; f < c.arena.families; ++f) ideal.answer_row(LanguageIndex{l}, f)[0] = 80;
    }
    const auto perfect = evaluate_policy(c, ideal, 5);
    CHECK(perfect.metrics.lcr == 1.0);
    CHECK(perfect.metrics.acc == 1.0);
    CHECK(perfect.metrics.lc_acc == 1.0);
}

TEST_CASE("eval tasks cover every language and tier evenly") {
    const auto spec = default_arena();
    const auto tasks = make_eval_tasks(spec, 240, 1);
    std::map<std::pair<std::uint32_t, std::size_t>, int> cells;
    for (const auto& t : tasks) ++cells[{t.language.value, t.tier}];
    CHECK(cells.size() == 24);
    for (const auto& [k, n] : cells) CHECK(n == 10);
    const auto train_tasks = make_tasks(spec, 32, 1);
    for (const auto& t : tasks)
        for (const auto& u : train_tasks) CHECK(t.id != u.id);
}

TEST_CASE("csv export") {
    auto c = small_config("csv", 5);
    apply_preset(c, Preset::lang);
    const auto r = train(c);
    const auto csv = export_csv(r.run_dir, {"step", "entropy"});
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    CHECK(rows.size() == static_cast<std::size_t>(c.steps) + 1);
    CHECK(rows[0] == "step,entropy");

    const auto grouped = export_csv(r.run_dir, {"u"});
    CHECK(grouped.substr(0, grouped.find('\n')) == "u_high,u_mid,u_low");

    // Values round-trip at 12 significant digits.
    std::istringstream rows2(export_csv(r.run_dir, {"mean_reward"}));
    std::getline(rows2, line);
    for (const auto& e : r.log) {
        std::getline(rows2, line);
        CHECK(std::stod(line) == doctest::Approx(e.mean_reward).epsilon(1e-11));
    }
    CHECK_THROWS_AS(export_csv(r.run_dir, {"bogus"}), ConfigError);
}

TEST_CASE("schedule preview") {
    const auto csv = schedule_csv({DecayKind::cosine, 100}, 10);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,p");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 11);
    CHECK(format_g12(0.975528258147576786) == "0.975528258148");
}

TEST_CASE("corpus evaluation against hand-derived values") {
    const auto r = eval_file(kFixtures / "corpus4.jsonl", {});
    CHECK(r.metrics.count == 4);
    CHECK(r.metrics.lcr == doctest::Approx(0.5));
    CHECK(r.metrics.acc == doctest::Approx(0.75));
    CHECK(r.metrics.lc_acc == doctest::Approx(0.25));
    REQUIRE(r.metrics.dw_acc.has_value());
    CHECK(*r.metrics.dw_acc == doctest::Approx(13.0 / 15.0));
    CHECK(r.metrics.repeat == doctest::Approx(1.0 / 17.0));
    CHECK(r.metrics.mean_len == doctest::Approx(9.75));
    CHECK(to_json_line(r.metrics) ==
          R"({"lcr":0.500000,"acc":0.750000,"lc_acc":0.250000,"dw_acc":0.866667,"repeat":0.058824,"mean_len":9.750000,"count":4})");

    REQUIRE(r.per_record.size() == 4);
    CHECK(r.per_record[3]["r_format"] == 0);
    CHECK(r.per_record[2]["r_lc"] == 0);
    CHECK(r.per_record[2]["r_acc"] == 1);
    CHECK(r.per_record[1]["extracted"] == "9");
    CHECK(r.per_record[0]["gold"] == "5");
}

TEST_CASE("corpus errors") {
    try {
        eval_file(kFixtures / "corpus_bad.jsonl", {});
        FAIL("expected an error");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    const auto lenient = eval_file(kFixtures / "corpus_bad.jsonl", {true});
    CHECK(lenient.skipped == 2);
    CHECK(lenient.metrics.count == 2);
    CHECK_THROWS_AS(eval_file(kFixtures / "empty.jsonl", {}), FormatError);
    CHECK_THROWS(parse_eval_record(R"({"question":"q","lang":"en","response":"r","gold":""})"));
    CHECK_THROWS(parse_eval_record(R"({"question":"q","lang":"en","response":"r","gold":"1","tier":"extreme"})"));
}
