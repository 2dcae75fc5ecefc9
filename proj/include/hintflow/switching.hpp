// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hintflow/schedules.hpp"

namespace hintflow {

enum class GroupId { high, mid, low };

inline constexpr GroupId kAllGroups[] = {GroupId::high, GroupId::mid, GroupId::low};

std::string_view to_string(GroupId id);
GroupId parse_group_id(std::string_view name);

struct LanguageGroup {
    GroupId id = GroupId::high;
    std::set<std::string> members;
};

/// Languages grouped by resource availability (English, German, ... high;
/// Japanese, Chinese, ... mid; Arabic, Bengali, ... low), keyed by ISO code.
std::vector<LanguageGroup> default_resource_groups();

/// Throws ConfigError when a language belongs to more than one group.
void validate_partition(std::span<const LanguageGroup> groups);

/// Throws ConfigError for languages outside every group.
GroupId classify_language(std::string_view lang, std::span<const LanguageGroup> groups);

/// Smoothed reachability signal for one resource group.
///
/// `switched` and `switch_step` change together and only in `check_switch`;
/// once set they stay set.
struct SwitchState {
    double ema = 0.0;
    double last_raw = 0.0;
    std::optional<Step> switch_step;

    bool switched() const noexcept { return switch_step.has_value(); }
};

/// Fraction of instances whose advantage list has a strictly positive entry.
/// Throws DomainError for an empty batch or an empty inner list.
double effective_update_rate(std::span<const std::vector<double>> instance_advantages);

SwitchState ema_update(SwitchState state, double u, double alpha);

SwitchState check_switch(SwitchState state, Step t, double tau);

/// Hint ratio after the adaptive switch: zero once the group has switched.
double effective_ratio(const DecaySchedule& schedule, Step t, const SwitchState& state);

}  // namespace hintflow
