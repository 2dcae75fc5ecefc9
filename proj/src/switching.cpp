// SPDX-License-Identifier: Apache-2.0

#include "hintflow/switching.hpp"

#include <algorithm>

#include "hintflow/errors.hpp"

namespace hintflow {

std::string_view to_string(GroupId id) {
    switch (id) {
        case GroupId::high: return "high";
        case GroupId::mid: return "mid";
        case GroupId::low: return "low";
    }
    return "high";
}

GroupId parse_group_id(std::string_view name) {
    if (name == "high") return GroupId::high;
    if (name == "mid") return GroupId::mid;
    if (name == "low") return GroupId::low;
    throw ConfigError("groups", "unknown resource group '" + std::string(name) + "'");
}

std::vector<LanguageGroup> default_resource_groups() {
    return {
        {GroupId::high, {"en", "de", "fr", "es", "pt", "it"}},
        {GroupId::mid, {"ja", "zh", "ru", "ko", "vi"}},
        {GroupId::low, {"ar", "bn", "th", "sw", "te", "id"}},
    };
}

void validate_partition(std::span<const LanguageGroup> groups) {
    std::set<std::string> seen;
    for (const auto& g : groups)
        for (const auto& lang : g.members)
            if (!seen.insert(lang).second)
                throw ConfigError("groups", "language '" + lang + "' appears in more than one group");
}

GroupId classify_language(std::string_view lang, std::span<const LanguageGroup> groups) {
    for (const auto& g : groups)
        if (g.members.contains(std::string(lang))) return g.id;
    throw ConfigError("groups", "language '" + std::string(lang) + "' is not assigned to a resource group");
}

double effective_update_rate(std::span<const std::vector<double>> instance_advantages) {
    if (instance_advantages.empty()) throw DomainError("effective update rate of an empty group batch");
    std::size_t hits = 0;
    for (const auto& adv : instance_advantages) {
        if (adv.empty()) throw DomainError("instance with no rollouts");
        if (std::any_of(adv.begin(), adv.end(), [](double a) { return a > 0.0; })) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(instance_advantages.size());
}

SwitchState ema_update(SwitchState state, double u, double alpha) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("update rate outside [0, 1]");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("EMA alpha outside [0, 1)");
    state.ema = std::clamp(alpha * state.ema + (1.0 - alpha) * u, 0.0, 1.0);
    state.last_raw = u;
    return state;
}

SwitchState check_switch(SwitchState state, Step t, double tau) {
    if (!state.switched() && state.ema >= tau) state.switch_step = t;
    return state;
}

double effective_ratio(const DecaySchedule& schedule, Step t, const SwitchState& state) {
    return state.switched() ? 0.0 : hint_ratio(schedule, t);
}

}  // namespace hintflow
