// SPDX-License-Identifier: Apache-2.0

#include "hintflow/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hintflow {

PolicyParams::PolicyParams(PolicyShape shape) : shape_(std::move(shape)) {
    const std::size_t nl = shape_.languages;
    std::size_t offset = 1 + nl * nl;
    token_offsets_.reserve(nl + 1);
    for (std::size_t l = 0; l < nl; ++l) {
        token_offsets_.push_back(offset);
        offset += l < shape_.vocab.size() ? shape_.vocab[l] : 0;
    }
    token_offsets_.push_back(offset);
    answer_offset_ = offset;
    offset += nl * shape_.families * shape_.answers;
    values_.assign(offset, 0.0);
}

std::span<double> PolicyParams::lang_row(LanguageIndex input) {
    return std::span<double>(values_).subspan(lang_offset_ + input.value * shape_.languages, shape_.languages);
}
std::span<const double> PolicyParams::lang_row(LanguageIndex input) const {
    return std::span<const double>(values_).subspan(lang_offset_ + input.value * shape_.languages, shape_.languages);
}

std::span<double> PolicyParams::token_row(LanguageIndex reasoning) {
    const auto b = token_offsets_[reasoning.value];
    return std::span<double>(values_).subspan(b, token_offsets_[reasoning.value + 1] - b);
}
std::span<const double> PolicyParams::token_row(LanguageIndex reasoning) const {
    const auto b = token_offsets_[reasoning.value];
    return std::span<const double>(values_).subspan(b, token_offsets_[reasoning.value + 1] - b);
}

std::span<double> PolicyParams::answer_row(LanguageIndex reasoning, std::size_t family) {
    const auto b = answer_offset_ + (reasoning.value * shape_.families + family) * shape_.answers;
    return std::span<double>(values_).subspan(b, shape_.answers);
}
std::span<const double> PolicyParams::answer_row(LanguageIndex reasoning, std::size_t family) const {
    const auto b = answer_offset_ + (reasoning.value * shape_.families + family) * shape_.answers;
    return std::span<const double>(values_).subspan(b, shape_.answers);
}

bool PolicyParams::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

double log_softmax_at(std::span<const double> logits, std::size_t index) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - mx);
    return logits[index] - mx - std::log(sum);
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

}  // namespace hintflow
