// SPDX-License-Identifier: Apache-2.0

#include "hintflow/trainer.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "hintflow/checkpoint.hpp"
#include "hintflow/errors.hpp"

namespace hintflow {

using ordered_json = nlohmann::ordered_json;

namespace {

// Static partition of [0, n) over worker threads. Each index writes only its
// own slot, so results do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min(threads, n);
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json group_map(const std::map<GroupId, GroupStepStats>& groups, auto field) {
    ordered_json j = ordered_json::object();
    for (const auto& [id, stats] : groups) j[std::string(to_string(id))] = field(stats);
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
}

}  // namespace

ordered_json to_json(const EvalSummary& eval) {
    ordered_json j;
    j["lcr"] = eval.metrics.lcr;
    j["acc"] = eval.metrics.acc;
    j["lc_acc"] = eval.metrics.lc_acc;
    j["dw_acc"] = optional_number(eval.metrics.dw_acc);
    j["repeat"] = eval.metrics.repeat;
    j["mean_len"] = eval.metrics.mean_len;
    j["count"] = eval.metrics.count;
    auto& by = j["lc_acc_by_group"] = ordered_json::object();
    for (const auto& [id, v] : eval.lc_acc_by_group) by[std::string(to_string(id))] = v;
    auto& acc = j["acc_by_group"] = ordered_json::object();
    for (const auto& [id, v] : eval.acc_by_group) acc[std::string(to_string(id))] = v;
    return j;
}

ordered_json to_json(const RunLogEntry& e) {
    ordered_json j;
    j["step"] = e.step;
    j["mean_reward"] = e.mean_reward;
    j["mean_reward_by_group"] = group_map(e.groups, [](const auto& s) { return optional_number(s.mean_reward); });
    j["u_by_group"] = group_map(e.groups, [](const auto& s) { return optional_number(s.u); });
    j["ema_by_group"] = group_map(e.groups, [](const auto& s) { return ordered_json(s.ema); });
    j["effective_ratio_by_group"] = group_map(e.groups, [](const auto& s) { return ordered_json(s.effective_ratio); });
    j["switched_by_group"] = group_map(e.groups, [](const auto& s) { return ordered_json(s.switched); });
    j["switch_step_by_group"] = group_map(e.groups, [](const auto& s) {
        return s.switch_step ? ordered_json(*s.switch_step) : ordered_json(nullptr);
    });
    j["entropy"] = e.entropy;
    j["mean_len"] = e.mean_len;
    j["repeat"] = e.repeat;
    if (e.eval) j["eval"] = to_json(*e.eval);
    return j;
}

std::size_t threads_from_env() {
    const char* v = std::getenv("HINTFLOW_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const auto n = std::strtoul(v, &end, 10);
    return (end && *end == '\0') ? static_cast<std::size_t>(n) : 0;
}

std::vector<Task> make_eval_tasks(const ArenaSpec& spec, std::size_t count, std::uint64_t seed) {
    auto tasks = make_tasks(spec, count, stream_key({seed, kEvalTasksTag}), std::uint64_t{1} << 48);
    const auto nl = spec.language_count();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        auto& t = tasks[i];
        const LanguageIndex lang{static_cast<std::uint32_t>(i % nl)};
        t.tier = (i / nl) % spec.tiers();
        if (lang != t.language) {
            // Re-home the question and teacher tokens into the new language's subspace.
            const auto old_off = spec.token_offset(t.language);
            const auto new_off = spec.token_offset(lang);
            const auto vocab = static_cast<TokenId>(spec.languages[lang.value].vocab_size);
            for (auto& tok : t.question) tok = new_off + (tok - old_off) % vocab;
            for (auto& tok : t.teacher.tokens) tok = new_off + (tok - old_off) % vocab;
            t.language = lang;
            t.teacher.language = lang;
        }
    }
    return tasks;
}

EvalSummary evaluate_policy(const RunConfig& config, const PolicyParams& policy, std::uint64_t task_seed,
                            std::size_t threads) {
    const auto& spec = config.arena;
    const auto tasks = make_eval_tasks(spec, config.eval_tasks, task_seed);
    std::vector<Outcome> outcomes(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t i) {
        Rng rng(stream_key({task_seed, kEvalTasksTag, kRolloutTag, tasks[i].id}));
        outcomes[i] = rollout(spec, policy, tasks[i], 0, rng);
    });

    EvalSummary out;
    auto& m = out.metrics;
    m.count = tasks.size();
    std::array<std::size_t, kTierCount> tier_n{}, tier_hits{};
    std::map<GroupId, std::size_t> group_n, group_both, group_acc;
    std::size_t lc = 0, acc = 0, both = 0;
    double repeat_sum = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto r = score_outcome(outcomes[i], tasks[i]);
        lc += r.r_lc;
        acc += r.r_acc;
        both += r.r_lc && r.r_acc;
        repeat_sum += repeat_score_tokens<TokenId>(outcomes[i].content_tokens);
        if (spec.tiers() == kTierCount) {
            ++tier_n[tasks[i].tier];
            tier_hits[tasks[i].tier] += r.r_acc;
        }
        const auto g = config.group_of(tasks[i].language);
        ++group_n[g];
        group_both[g] += r.r_lc && r.r_acc;
        group_acc[g] += r.r_acc;
    }
    const double n = static_cast<double>(m.count);
    m.lcr = static_cast<double>(lc) / n;
    m.acc = static_cast<double>(acc) / n;
    m.lc_acc = static_cast<double>(both) / n;
    m.repeat = repeat_sum / n;
    m.mean_len = mean_response_length(spec, outcomes);
    if (spec.tiers() == kTierCount &&
        std::all_of(tier_n.begin(), tier_n.end(), [](std::size_t c) { return c > 0; })) {
        std::array<double, kTierCount> a{};
        for (std::size_t t = 0; t < kTierCount; ++t)
            a[t] = static_cast<double>(tier_hits[t]) / static_cast<double>(tier_n[t]);
        m.dw_acc = dw_acc(a);
    }
    for (const auto& [g, cnt] : group_n) {
        out.lc_acc_by_group[g] = static_cast<double>(group_both[g]) / static_cast<double>(cnt);
        out.acc_by_group[g] = static_cast<double>(group_acc[g]) / static_cast<double>(cnt);
    }
    return out;
}

EvalSummary evaluate(const std::filesystem::path& checkpoint, const RunConfig& config, std::uint64_t task_seed,
                     std::size_t threads) {
    const auto policy = load_checkpoint(checkpoint, config.arena.policy_shape());
    return evaluate_policy(config, policy, task_seed, threads);
}

std::vector<RolloutGroup> collect_rollouts(const RunConfig& config, const PolicyParams& policy,
                                           std::span<const Task> tasks, std::span<const std::size_t> hint_lens,
                                           std::size_t threads) {
    const auto& spec = config.arena;
    const auto seed = config.hyper.seed;
    const auto g = config.hyper.group_size;
    std::vector<RolloutGroup> groups(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t i) {
        auto& grp = groups[i];
        grp.task = tasks[i];
        grp.prompt = hinted_prompt(tasks[i], hint_lens[i]);
        grp.outcomes.reserve(g);
        for (std::size_t r = 0; r < g; ++r) {
            Rng rng(stream_key({seed, kRolloutTag, tasks[i].id, r}));
            grp.outcomes.push_back(rollout(spec, policy, tasks[i], hint_lens[i], rng));
            grp.breakdowns.push_back(score_outcome(grp.outcomes.back(), tasks[i]));
            grp.rewards.push_back(grp.breakdowns.back().value());
        }
        grp.advantages = standardize_advantages(grp.rewards);
    });
    return groups;
}

TrainResult train(const RunConfig& config, const TrainOptions& options) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto& spec = config.arena;
    const auto& hyper = config.hyper;
    const std::uint64_t eval_seed = stream_key({hyper.seed, kEvalTasksTag});

    TrainResult result;
    result.run_dir = config.out_dir;
    std::filesystem::create_directories(result.run_dir);
    const auto log_path = result.run_dir / "log.jsonl";
    std::ofstream log(log_path, std::ios::trunc | std::ios::binary);
    if (!log) throw FormatError("cannot write " + log_path.string());

    const auto active = config.active_groups();
    for (auto g : active) result.switch_states[g] = SwitchState{};

    auto write_manifest = [&](std::string_view status, Step completed) {
        ordered_json man;
        man["status"] = std::string(status);
        man["seed"] = hyper.seed;
        man["preset"] = options.preset ? ordered_json(std::string(to_string(*options.preset))) : ordered_json(nullptr);
        man["steps_completed"] = completed;
        man["threads"] = options.threads;
        man["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        auto& sw = man["switch_steps"] = ordered_json::object();
        for (const auto& [g, s] : result.switch_states)
            sw[std::string(to_string(g))] = s.switch_step ? ordered_json(*s.switch_step) : ordered_json(nullptr);
        if (status == "completed") man["final_eval"] = to_json(result.final_eval);
        man["config"] = to_json(config);
        write_text(result.run_dir / "manifest.json", man.dump(2) + "\n");
    };

    write_text(result.run_dir / "config.json", to_json(config).dump(2) + "\n");
    PolicyParams policy = init_policy(spec);

    for (Step t = 0; t < config.steps; ++t) {
        RunLogEntry entry;
        entry.step = t;
        if (t % config.eval_every == 0) entry.eval = evaluate_policy(config, policy, eval_seed, options.threads);

        // A threshold at or below the current EMA (only possible for tau <= 0
        // before any update) switches the group before this step's rollouts.
        for (auto& [g, s] : result.switch_states) s = check_switch(s, t, hyper.tau);

        const auto tasks = make_tasks(spec, config.batch_tasks, stream_key({hyper.seed, kTrainTasksTag,
                                                                            static_cast<std::uint64_t>(t)}),
                                      static_cast<std::uint64_t>(t) * config.batch_tasks);
        std::map<GroupId, double> ratio_now;
        for (auto g : active) ratio_now[g] = effective_ratio(config.schedule, t, result.switch_states[g]);
        std::vector<std::size_t> hint_lens;
        hint_lens.reserve(tasks.size());
        for (const auto& task : tasks)
            hint_lens.push_back(hint_prefix_len(ratio_now[config.group_of(task.language)], task.teacher.length()));

        const PolicyParams old_policy = policy;
        const auto groups = collect_rollouts(config, old_policy, tasks, hint_lens, options.threads);

        // Reachability per resource group from this batch's advantages; the
        // resulting switch applies from the next step on.
        std::map<GroupId, std::vector<std::vector<double>>> adv_by_group;
        std::map<GroupId, std::pair<double, std::size_t>> reward_by_group;
        double reward_sum = 0.0, entropy_sum = 0.0, repeat_sum = 0.0;
        std::size_t samples = 0;
        for (const auto& grp : groups) {
            const auto g = config.group_of(grp.task.language);
            adv_by_group[g].push_back(grp.advantages);
            for (std::size_t i = 0; i < grp.outcomes.size(); ++i) {
                reward_sum += grp.rewards[i];
                reward_by_group[g].first += grp.rewards[i];
                ++reward_by_group[g].second;
                entropy_sum += -grp.outcomes[i].logprob_old / static_cast<double>(outcome_length(spec));
                repeat_sum += repeat_score_tokens<TokenId>(grp.outcomes[i].content_tokens);
                ++samples;
            }
        }
        for (auto g : active) {
            auto& state = result.switch_states[g];
            GroupStepStats stats;
            stats.effective_ratio = ratio_now[g];
            if (const auto it = adv_by_group.find(g); it != adv_by_group.end()) {
                const double u = effective_update_rate(it->second);
                state = check_switch(ema_update(state, u, hyper.alpha), t, hyper.tau);
                stats.u = u;
                stats.mean_reward = reward_by_group[g].first / static_cast<double>(reward_by_group[g].second);
            }
            stats.ema = state.ema;
            stats.switched = state.switched();
            stats.switch_step = state.switch_step;
            entry.groups[g] = stats;
        }

        // Clipped-surrogate ascent over minibatches that share the frozen
        // old policy of this rollout batch.
        const std::size_t per_mb = groups.size() / config.minibatch;
        try {
            for (std::size_t mb = 0; mb < config.minibatch; ++mb) {
                std::vector<PolicyParams> partial(per_mb);
                parallel_for(per_mb, options.threads, [&](std::size_t i) {
                    partial[i] = surrogate_gradient(spec, policy, groups[mb * per_mb + i], hyper.clip_eps);
                });
                PolicyParams grad = policy.zeros_like();
                auto gv = grad.values();
                for (const auto& p : partial) {
                    const auto pv = p.values();
                    for (std::size_t k = 0; k < gv.size(); ++k) gv[k] += pv[k];
                }
                for (auto& v : gv) v /= static_cast<double>(per_mb);
                policy = sgd_step(std::move(policy), grad, hyper.lr);
                if (!policy.all_finite()) throw NumericError("policy parameters became non-finite");
            }
        } catch (const NumericError& e) {
            ordered_json diag;
            diag["step"] = t;
            diag["error"] = e.what();
            log << diag.dump() << '\n';
            log.flush();
            save_checkpoint(result.run_dir / "checkpoint.bin", old_policy);
            write_manifest("aborted", t);
            throw;
        }

        const double n = static_cast<double>(samples);
        entry.mean_reward = reward_sum / n;
        entry.entropy = entropy_sum / n;
        entry.repeat = repeat_sum / n;
        entry.mean_len = static_cast<double>(outcome_length(spec));
        log << to_json(entry).dump() << '\n';
        result.log.push_back(std::move(entry));
    }
    log.flush();

    result.policy = policy;
    result.final_eval = evaluate_policy(config, policy, eval_seed, options.threads);
    save_checkpoint(result.run_dir / "checkpoint.bin", policy);
    write_manifest("completed", config.steps);
    return result;
}

}  // namespace hintflow
