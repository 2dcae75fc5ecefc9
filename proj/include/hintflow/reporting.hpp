// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hintflow/metrics.hpp"

namespace hintflow {

/// Reads a run log, skipping diagnostic (error) lines.
std::vector<nlohmann::json> read_run_log(const std::filesystem::path& run_dir);

/// One row per logged step. Scalar fields: step, mean_reward, entropy,
/// mean_len, repeat, eval_lcr, eval_acc, eval_lc_acc, eval_dw_acc.
/// Group-keyed fields (u, ema, effective_ratio, switched, switch_step,
/// mean_reward_by_group, eval_lc_acc_by_group) expand to one column per
/// group, e.g. u_high, u_mid, u_low. Numbers use 12 significant digits;
/// absent values are empty cells. Throws ConfigError("fields") on unknown names.
std::string export_csv(const std::filesystem::path& run_dir, const std::vector<std::string>& fields);

/// Schedule preview: header `t,p` then steps + 1 rows.
std::string schedule_csv(const DecaySchedule& schedule, Step steps);

/// Formats with 12 significant digits.
std::string format_g12(double v);

struct CorpusOptions {
    bool skip_bad = false;
};

struct CorpusReport {
    MetricsRecord metrics;
    std::vector<EvalRecord> records;
    std::vector<RecordVerdict> verdicts;
    std::vector<nlohmann::ordered_json> per_record;
    std::size_t skipped = 0;
};

/// Parses one JSONL line with fields question, lang, response, gold and an
/// optional tier. Throws FormatError describing the problem.
EvalRecord parse_eval_record(std::string_view line);

/// Throws FormatError("line N: ...") on a bad line unless skip_bad is set,
/// and when no valid records remain.
CorpusReport eval_file(const std::filesystem::path& corpus, const CorpusOptions& options,
                       const LanguageDetector& detector = default_detector());

}  // namespace hintflow
