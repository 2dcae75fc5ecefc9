// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hintflow/schedules.hpp"

namespace hintflow {

struct PolicyShape {
    std::size_t languages = 0;
    std::vector<std::size_t> vocab;  // content vocabulary size per language
    std::size_t families = 0;
    std::size_t answers = 0;

    friend bool operator==(const PolicyShape&, const PolicyShape&) = default;
};

/// Factored categorical logit tables stored in one flat buffer:
/// [format | lang_logits (input x reasoning) | token_logits (ragged, per
/// reasoning language) | answer_logits (reasoning x family x answer)].
///
/// Answer logits live in a frame relative to the task's correct answer:
/// entry 0 scores the correct answer, entry j scores (correct + j) mod K.
class PolicyParams {
public:
    PolicyParams() = default;
    explicit PolicyParams(PolicyShape shape);

    const PolicyShape& shape() const noexcept { return shape_; }

    double& format_logit() { return values_[0]; }
    double format_logit() const { return values_[0]; }

    std::span<double> lang_row(LanguageIndex input);
    std::span<const double> lang_row(LanguageIndex input) const;
    std::span<double> token_row(LanguageIndex reasoning);
    std::span<const double> token_row(LanguageIndex reasoning) const;
    std::span<double> answer_row(LanguageIndex reasoning, std::size_t family);
    std::span<const double> answer_row(LanguageIndex reasoning, std::size_t family) const;

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Same shape, all zeros.
    PolicyParams zeros_like() const { return PolicyParams(shape_); }

    bool all_finite() const;

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

private:
    PolicyShape shape_;
    std::vector<double> values_;
    std::size_t lang_offset_ = 1;
    std::vector<std::size_t> token_offsets_;
    std::size_t answer_offset_ = 0;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);
/// log softmax(logits)[index].
double log_softmax_at(std::span<const double> logits, std::size_t index);
double sigmoid(double x);
/// log sigmoid(x) without overflow.
double log_sigmoid(double x);

}  // namespace hintflow
