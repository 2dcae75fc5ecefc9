// SPDX-License-Identifier: Apache-2.0

#include "hintflow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hintflow/errors.hpp"

namespace hintflow {

using nlohmann::json;

std::vector<LanguageGroup> default_arena_groups() {
    return {{GroupId::high, {"en", "de"}}, {GroupId::mid, {"ja", "zh"}}, {GroupId::low, {"th", "sw"}}};
}

RunConfig default_run_config() {
    RunConfig c;
    c.groups = default_arena_groups();
    return c;
}

void RunConfig::validate() const {
    arena.validate();
    schedule.validate();
    hyper.validate();
    if (steps < 0) throw ConfigError("steps", "must be >= 0");
    if (batch_tasks < 1) throw ConfigError("batch_tasks", "must be >= 1");
    if (minibatch < 1) throw ConfigError("minibatch", "must be >= 1");
    if (batch_tasks % minibatch != 0) throw ConfigError("minibatch", "must divide batch_tasks");
    if (eval_every < 1) throw ConfigError("eval_every", "must be >= 1");
    if (eval_tasks < 1) throw ConfigError("eval_tasks", "must be >= 1");
    if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");

    validate_partition(groups);
    std::set<GroupId> ids;
    for (const auto& g : groups)
        if (!ids.insert(g.id).second) throw ConfigError("groups", "group listed twice");
    for (const auto& lang : arena.languages) classify_language(lang.name, groups);
    for (const auto& g : groups)
        for (const auto& m : g.members)
            if (!arena.find_language(m))
                throw ConfigError("groups." + std::string(to_string(g.id)), "'" + m + "' is not an arena language");
}

GroupId RunConfig::group_of(LanguageIndex lang) const {
    return classify_language(arena.language_name(lang), groups);
}

std::vector<GroupId> RunConfig::active_groups() const {
    std::vector<GroupId> out;
    for (auto id : kAllGroups)
        for (const auto& g : groups)
            if (g.id == id && !g.members.empty()) out.push_back(id);
    return out;
}

std::string_view to_string(Preset preset) {
    switch (preset) {
        case Preset::vanilla: return "vanilla";
        case Preset::fixed_hint: return "fixed-hint";
        case Preset::cosine: return "cosine";
        case Preset::lang: return "lang";
    }
    return "lang";
}

Preset parse_preset(std::string_view name) {
    for (auto p : kAllPresets)
        if (to_string(p) == name) return p;
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

void apply_preset(RunConfig& config, Preset preset) {
    switch (preset) {
        case Preset::vanilla:
            config.hyper.tau = 0.0;
            break;
        case Preset::fixed_hint:
            config.schedule.kind = DecayKind::constant;
            config.hyper.tau = kNeverSwitchTau;
            break;
        case Preset::cosine:
            config.schedule.kind = DecayKind::cosine;
            config.hyper.tau = kNeverSwitchTau;
            break;
        case Preset::lang:
            config.schedule.kind = DecayKind::cosine;
            config.hyper.tau = 0.4;
            break;
    }
}

namespace {

// Walks one JSON object, handing each known key to a reader and rejecting
// everything else.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) throw ConfigError(prefix_.empty() ? "config" : prefix_, "expected an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path(key), "has the wrong type");
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void reject_unknown() const {
        for (const auto& [k, v] : obj_.items())
            if (!seen_.contains(k)) throw ConfigError(path(k.c_str()), "unknown key");
    }

    std::string path(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

private:
    const json& obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};

void parse_arena(const json& doc, ArenaSpec& arena) {
    ObjectReader r(doc, "arena");
    if (const auto* langs = r.child("languages")) {
        if (!langs->is_array()) throw ConfigError("arena.languages", "expected an array");
        arena.languages.clear();
        for (const auto& item : *langs) {
            ArenaLanguage l;
            ObjectReader lr(item, "arena.languages");
            lr.read("name", l.name);
            lr.read("vocab", l.vocab_size);
            lr.read("competence", l.competence);
            lr.reject_unknown();
            arena.languages.push_back(std::move(l));
        }
    }
    if (const auto* pivot = r.child("pivot")) {
        if (!pivot->is_string()) throw ConfigError("arena.pivot", "expected a language name");
        const auto idx = arena.find_language(pivot->get<std::string>());
        if (!idx) throw ConfigError("arena.pivot", "not a configured language");
        arena.pivot = idx->value;
    }
    r.read("drift_bias", arena.drift_bias);
    r.read("tier_offsets", arena.tier_offsets);
    r.read("answers", arena.answers);
    r.read("families", arena.families);
    r.read("trace_len", arena.trace_len);
    r.read("question_len", arena.question_len);
    r.read("hint_lang_gain", arena.hint_lang_gain);
    r.read("hint_ans_gain", arena.hint_ans_gain);
    r.read("format_init", arena.format_init);
    r.reject_unknown();
}

void parse_schedule(const json& doc, DecaySchedule& s) {
    ObjectReader r(doc, "schedule");
    std::string kind(to_string(s.kind));
    r.read("kind", kind);
    try {
        s.kind = parse_decay_kind(kind);
    } catch (const ConfigError&) {
        throw ConfigError("schedule.kind", "unknown decay kind '" + kind + "'");
    }
    r.read("horizon", s.horizon);
    r.read("lambda", s.rate_lambda);
    r.reject_unknown();
}

void parse_hyper(const json& doc, TrainHyper& h) {
    ObjectReader r(doc, "hyper");
    r.read("clip_eps", h.clip_eps);
    r.read("kl_beta", h.kl_beta);
    r.read("lr", h.lr);
    r.read("group_size", h.group_size);
    r.read("alpha", h.alpha);
    r.read("tau", h.tau);
    r.read("seed", h.seed);
    r.reject_unknown();
}

void parse_groups(const json& doc, std::vector<LanguageGroup>& groups) {
    if (!doc.is_object()) throw ConfigError("groups", "expected an object of group -> languages");
    groups.clear();
    for (const auto& [name, members] : doc.items()) {
        LanguageGroup g;
        try {
            g.id = parse_group_id(name);
        } catch (const ConfigError&) {
            throw ConfigError("groups." + name, "unknown key");
        }
        if (!members.is_array()) throw ConfigError("groups." + name, "expected an array of language names");
        for (const auto& m : members) {
            if (!m.is_string()) throw ConfigError("groups." + name, "expected language names");
            g.members.insert(m.get<std::string>());
        }
        groups.push_back(std::move(g));
    }
}

// Wraps validation so that errors from nested types carry their section.
void validate_prefixed(const RunConfig& c) {
    try {
        c.schedule.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("schedule." + e.key(), std::string(e.what()).substr(e.key().size() + 2));
    }
    c.validate();
}

}  // namespace

RunConfig parse_config(const json& doc) {
    RunConfig c = default_run_config();
    ObjectReader r(doc, "");
    r.read("steps", c.steps);
    r.read("batch_tasks", c.batch_tasks);
    r.read("minibatch", c.minibatch);
    r.read("eval_every", c.eval_every);
    r.read("eval_tasks", c.eval_tasks);
    r.read("out_dir", c.out_dir);
    if (const auto* a = r.child("arena")) parse_arena(*a, c.arena);
    if (const auto* s = r.child("schedule")) parse_schedule(*s, c.schedule);
    if (const auto* h = r.child("hyper")) parse_hyper(*h, c.hyper);
    if (const auto* g = r.child("groups")) parse_groups(*g, c.groups);
    r.reject_unknown();
    validate_prefixed(c);
    return c;
}

RunConfig parse_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("json", std::string("malformed config: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("path", "cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["steps"] = c.steps;
    j["batch_tasks"] = c.batch_tasks;
    j["minibatch"] = c.minibatch;
    j["eval_every"] = c.eval_every;
    j["eval_tasks"] = c.eval_tasks;
    j["out_dir"] = c.out_dir;

    auto& s = j["schedule"];
    s["kind"] = std::string(to_string(c.schedule.kind));
    s["horizon"] = c.schedule.horizon;
    s["lambda"] = c.schedule.rate_lambda;

    auto& h = j["hyper"];
    h["clip_eps"] = c.hyper.clip_eps;
    h["kl_beta"] = c.hyper.kl_beta;
    h["lr"] = c.hyper.lr;
    h["group_size"] = c.hyper.group_size;
    h["alpha"] = c.hyper.alpha;
    h["tau"] = c.hyper.tau;
    h["seed"] = c.hyper.seed;

    auto& a = j["arena"];
    a["languages"] = nlohmann::ordered_json::array();
    for (const auto& l : c.arena.languages)
        a["languages"].push_back({{"name", l.name}, {"vocab", l.vocab_size}, {"competence", l.competence}});
    a["pivot"] = c.arena.languages.at(c.arena.pivot).name;
    a["drift_bias"] = c.arena.drift_bias;
    a["tier_offsets"] = c.arena.tier_offsets;
    a["answers"] = c.arena.answers;
    a["families"] = c.arena.families;
    a["trace_len"] = c.arena.trace_len;
    a["question_len"] = c.arena.question_len;
    a["hint_lang_gain"] = c.arena.hint_lang_gain;
    a["hint_ans_gain"] = c.arena.hint_ans_gain;
    a["format_init"] = c.arena.format_init;

    auto& g = j["groups"];
    for (auto id : kAllGroups)
        for (const auto& grp : c.groups)
            if (grp.id == id) g[std::string(to_string(id))] = std::vector<std::string>(grp.members.begin(), grp.members.end());
    return j;
}

}  // namespace hintflow
