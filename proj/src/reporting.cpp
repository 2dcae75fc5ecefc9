// SPDX-License-Identifier: Apache-2.0

#include "hintflow/reporting.hpp"

#include <cstdio>
#include <fstream>

#include "hintflow/errors.hpp"
#include "hintflow/switching.hpp"

namespace hintflow {

using nlohmann::json;

std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<json> read_run_log(const std::filesystem::path& run_dir) {
    const auto path = run_dir / "log.jsonl";
    std::ifstream in(path);
    if (!in) throw FormatError("no run log at " + path.string());
    std::vector<json> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw FormatError("run log line " + std::to_string(lineno) + " is not valid JSON");
        }
        if (j.contains("error")) continue;
        out.push_back(std::move(j));
    }
    return out;
}

namespace {

std::string cell(const json* v) {
    if (!v || v->is_null()) return "";
    if (v->is_boolean()) return v->get<bool>() ? "1" : "0";
    if (v->is_number_integer() || v->is_number_unsigned()) return std::to_string(v->get<long long>());
    if (v->is_number()) return format_g12(v->get<double>());
    return v->dump();
}

const json* lookup(const json& row, std::initializer_list<std::string_view> path) {
    const json* cur = &row;
    for (auto key : path) {
        if (!cur->is_object()) return nullptr;
        const auto it = cur->find(std::string(key));
        if (it == cur->end()) return nullptr;
        cur = &*it;
    }
    return cur;
}

struct Column {
    std::string header;
    std::vector<std::string> path;
};

}  // namespace

std::string export_csv(const std::filesystem::path& run_dir, const std::vector<std::string>& fields) {
    static const std::map<std::string, std::vector<std::string>> kScalars = {
        {"step", {"step"}},           {"mean_reward", {"mean_reward"}},   {"entropy", {"entropy"}},
        {"mean_len", {"mean_len"}},   {"repeat", {"repeat"}},             {"eval_lcr", {"eval", "lcr"}},
        {"eval_acc", {"eval", "acc"}}, {"eval_lc_acc", {"eval", "lc_acc"}}, {"eval_dw_acc", {"eval", "dw_acc"}},
    };
    // field -> (column prefix, path to the per-group object)
    static const std::map<std::string, std::pair<std::string, std::vector<std::string>>> kGrouped = {
        {"u", {"u", {"u_by_group"}}},
        {"ema", {"ema", {"ema_by_group"}}},
        {"effective_ratio", {"effective_ratio", {"effective_ratio_by_group"}}},
        {"switched", {"switched", {"switched_by_group"}}},
        {"switch_step", {"switch_step", {"switch_step_by_group"}}},
        {"mean_reward_by_group", {"mean_reward", {"mean_reward_by_group"}}},
        {"eval_lc_acc_by_group", {"eval_lc_acc", {"eval", "lc_acc_by_group"}}},
    };

    const auto rows = read_run_log(run_dir);

    // Group columns follow the groups recorded in the log.
    std::vector<std::string> groups;
    if (!rows.empty())
        if (const auto* u = lookup(rows.front(), {"ema_by_group"}); u && u->is_object())
            for (auto id : kAllGroups)
                if (u->contains(std::string(to_string(id)))) groups.emplace_back(to_string(id));

    std::vector<Column> columns;
    for (const auto& f : fields) {
        std::string name = f;
        if (name.size() > 9 && name.ends_with("_by_group") && !kGrouped.contains(name))
            name = name.substr(0, name.size() - 9);
        if (const auto it = kScalars.find(name); it != kScalars.end()) {
            columns.push_back({name, it->second});
        } else if (const auto gt = kGrouped.find(name); gt != kGrouped.end()) {
            for (const auto& g : groups) {
                auto path = gt->second.second;
                path.push_back(g);
                columns.push_back({gt->second.first + "_" + g, path});
            }
        } else {
            throw ConfigError("fields", "unknown field '" + f + "'");
        }
    }

    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c].header;
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const json* v = &row;
            for (const auto& key : columns[c].path) {
                if (!v || !v->is_object() || !v->contains(key)) {
                    v = nullptr;
                    break;
                }
                v = &(*v)[key];
            }
            if (c) out += ',';
            out += cell(v);
        }
        out += '\n';
    }
    return out;
}

std::string schedule_csv(const DecaySchedule& schedule, Step steps) {
    std::string out = "t,p\n";
    for (Step t = 0; t <= steps; ++t) out += std::to_string(t) + "," + format_g12(hint_ratio(schedule, t)) + "\n";
    return out;
}

EvalRecord parse_eval_record(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error&) {
        throw FormatError("not valid JSON");
    }
    if (!j.is_object()) throw FormatError("expected a JSON object");
    auto text = [&](const char* key) {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw FormatError(std::string("missing string field '") + key + "'");
        return it->get<std::string>();
    };
    EvalRecord r;
    r.question = text("question");
    r.question_language = text("lang");
    r.response = text("response");
    r.gold = text("gold");
    if (r.gold.empty()) throw FormatError("empty gold answer");
    if (const auto it = j.find("tier"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw FormatError("tier must be a string");
        r.tier = parse_tier(it->get<std::string>());
        if (!r.tier) throw FormatError("tier must be one of low, medium, high, top");
    }
    return r;
}

CorpusReport eval_file(const std::filesystem::path& corpus, const CorpusOptions& options,
                       const LanguageDetector& detector) {
    std::ifstream in(corpus);
    if (!in) throw FormatError("cannot open corpus " + corpus.string());

    CorpusReport report;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto record = parse_eval_record(line);
            if (!detector.supports(record.question_language))
                throw FormatError("unsupported language '" + record.question_language + "'");
            auto verdict = judge_record(record, detector);

            auto pr = nlohmann::ordered_json::parse(line);
            pr["r_lc"] = verdict.r_lc ? 1 : 0;
            pr["r_format"] = verdict.r_format ? 1 : 0;
            pr["r_acc"] = verdict.r_acc ? 1 : 0;
            pr["extracted"] = verdict.extracted ? nlohmann::ordered_json(*verdict.extracted) : nullptr;
            report.per_record.push_back(std::move(pr));
            report.records.push_back(std::move(record));
            report.verdicts.push_back(std::move(verdict));
        } catch (const FormatError& e) {
            if (!options.skip_bad) throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
            ++report.skipped;
        }
    }
    if (report.records.empty()) throw FormatError("corpus " + corpus.string() + " has no records");
    report.metrics = summarize(report.records, report.verdicts);
    return report;
}

}  // namespace hintflow
