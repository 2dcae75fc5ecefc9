// SPDX-License-Identifier: Apache-2.0
//
// hintflow command-line front end.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hintflow/checkpoint.hpp"
#include "hintflow/config.hpp"
#include "hintflow/errors.hpp"
#include "hintflow/reporting.hpp"
#include "hintflow/trainer.hpp"

namespace {

std::vector<std::string> split_fields(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace hintflow;

    CLI::App app{"Hint-guided multilingual GRPO in a synthetic arena"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string preset_name;
    std::string out_dir;
    auto* train_cmd = app.add_subcommand("train", "Run a training loop");
    train_cmd->add_option("--config", config_path, "Run config (JSON)")->required();
    train_cmd->add_option("--seed", seed, "Override hyper.seed");
    train_cmd->add_option("--preset", preset_name, "vanilla | fixed-hint | cosine | lang")
        ->check(CLI::IsMember({"vanilla", "fixed-hint", "cosine", "lang"}));
    train_cmd->add_option("--out", out_dir, "Override out_dir");

    std::string checkpoint;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint without hints");
    eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    eval_cmd->add_option("--config", config_path, "Run config (JSON)")->required();
    eval_cmd->add_option("--seed", seed, "Evaluation task seed");

    std::string corpus, per_record;
    bool skip_bad = false;
    auto* file_cmd = app.add_subcommand("eval-file", "Score a JSONL corpus of responses");
    file_cmd->add_option("corpus", corpus, "JSONL corpus")->required();
    file_cmd->add_option("--per-record", per_record, "Write per-record verdicts here");
    file_cmd->add_flag("--skip-bad", skip_bad, "Skip malformed lines instead of failing");

    std::string kind = "cosine";
    Step horizon = 100, steps = 100;
    double lambda = 6.0;
    auto* sched_cmd = app.add_subcommand("schedule-preview", "Print the hint ratio per step as CSV");
    sched_cmd->add_option("--kind", kind)->check(CLI::IsMember({"cosine", "linear", "exponential", "constant"}));
    sched_cmd->add_option("--horizon", horizon)->required();
    sched_cmd->add_option("--lambda", lambda);
    sched_cmd->add_option("--steps", steps)->required()->check(CLI::NonNegativeNumber);

    std::string run_dir, fields;
    auto* csv_cmd = app.add_subcommand("export-csv", "Export run-log fields as CSV");
    csv_cmd->add_option("--run", run_dir, "Run directory")->required();
    csv_cmd->add_option("--fields", fields, "Comma-separated field names")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage mistakes share the config-error exit code; --help stays 0.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*train_cmd) {
            auto config = load_config(config_path);
            TrainOptions options;
            options.threads = threads_from_env();
            if (!preset_name.empty()) {
                options.preset = parse_preset(preset_name);
                apply_preset(config, *options.preset);
            }
            if (seed) config.hyper.seed = *seed;
            if (!out_dir.empty()) config.out_dir = out_dir;
            config.validate();
            const auto result = train(config, options);
            std::cout << to_json_line(result.final_eval.metrics) << '\n';
            std::cerr << "run written to " << result.run_dir.string() << '\n';
        } else if (*eval_cmd) {
            const auto config = load_config(config_path);
            const auto task_seed = seed.value_or(stream_key({config.hyper.seed, kEvalTasksTag}));
            const auto summary = evaluate(checkpoint, config, task_seed, threads_from_env());
            std::cout << to_json_line(summary.metrics) << '\n';
        } else if (*file_cmd) {
            const auto report = eval_file(corpus, CorpusOptions{skip_bad});
            if (!per_record.empty()) {
                std::ofstream out(per_record, std::ios::trunc);
                if (!out) throw FormatError("cannot write " + per_record);
                for (const auto& r : report.per_record) out << r.dump() << '\n';
            }
            if (report.skipped) std::cerr << "skipped " << report.skipped << " malformed line(s)\n";
            std::cout << to_json_line(report.metrics) << '\n';
        } else if (*sched_cmd) {
            DecaySchedule schedule{parse_decay_kind(kind), horizon, lambda};
            schedule.validate();
            std::cout << schedule_csv(schedule, steps);
        } else if (*csv_cmd) {
            std::cout << export_csv(run_dir, split_fields(fields));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
