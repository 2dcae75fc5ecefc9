#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "arena_fixtures.hpp"
#include "hintflow/errors.hpp"
#include "hintflow/grpo.hpp"
#include "oracles.hpp"

using namespace hintflow;

namespace {

double surrogate_at(const ArenaSpec& spec, const PolicyParams& p, const RolloutGroup& g, double eps) {
    std::vector<double> old_lp;
    for (const auto& o : g.outcomes) old_lp.push_back(o.logprob_old);
    return clipped_surrogate(old_lp, group_logprobs(spec, p, g), g.advantages, eps);
}

}  // namespace

TEST_CASE("standardization examples") {
    const std::vector<double> a{1, 0, 0, 0};
    const auto r = standardize_advantages(a);
    const long double s3 = oracle::sqrt(3);
    CHECK(r[0] == doctest::Approx(static_cast<double>(s3)).epsilon(1e-12));
    for (int i = 1; i < 4; ++i) CHECK(r[i] == doctest::Approx(static_cast<double>(-1 / s3)).epsilon(1e-12));

    const std::vector<double> flat{1, 1, 1, 1};
    for (double v : standardize_advantages(flat)) CHECK(v == 0.0);

    const std::vector<double> half{1, 1, 0, 0};
    CHECK(standardize_advantages(half) == std::vector<double>{1, 1, -1, -1});

    const std::vector<double> one{1};
    CHECK_THROWS_AS(standardize_advantages(one), DomainError);
}

TEST_CASE("standardization invariants against a long double reference") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> r(2 + gen() % 15);
        for (auto& v : r) v = (gen() & 1) ? u(gen) : static_cast<double>(gen() & 1);
        const auto a = standardize_advantages(r);
        const auto ref = oracle::standardize(r);
        for (std::size_t j = 0; j < r.size(); ++j) CHECK(std::abs(a[j] - static_cast<double>(ref[j])) < 1e-9);

        const double scale = 0.1 + std::abs(u(gen)), shift = u(gen);
        std::vector<double> moved(r);
        for (auto& v : moved) v = scale * v + shift;
        const auto b = standardize_advantages(moved);
        bool nonconstant = false;
        for (double v : ref) nonconstant |= v != 0;
        if (!nonconstant) continue;
        for (std::size_t j = 0; j < r.size(); ++j) CHECK(std::abs(a[j] - b[j]) < 1e-9);
    }
}

TEST_CASE("clipped surrogate examples") {
    const std::vector<double> a{std::log(1.5)}, z{0.0}, pos{1.0}, neg{-1.0};
    CHECK(clipped_surrogate(z, a, pos, 0.2) == doctest::Approx(1.2));
    const std::vector<double> b{std::log(0.5)};
    CHECK(clipped_surrogate(z, b, neg, 0.2) == doctest::Approx(-0.8));

    const std::vector<double> lp{-1.0, -2.5, -0.3}, adv{0.7, -1.2, 0.5};
    CHECK(clipped_surrogate(lp, lp, adv, 0.2) == (0.7 - 1.2 + 0.5) / 3);
    const std::vector<double> short_adv{1.0};
    CHECK_THROWS_AS(clipped_surrogate(lp, lp, short_adv, 0.2), DomainError);
}

TEST_CASE("clipping regions") {
    const std::vector<double> old{0.0};
    const std::vector<double> pos{2.0}, neg{-2.0};
    for (double rho : {1.2, 1.5, 3.0, 10.0}) {
        const std::vector<double> lp{std::log(rho)};
        CHECK(clipped_surrogate(old, lp, pos, 0.2) == doctest::Approx(2.4));
        CHECK(clipped_surrogate(old, lp, neg, 0.2) == doctest::Approx(-2.0 * rho));
    }
}

TEST_CASE("analytic gradient matches central differences") {
    const auto spec = default_arena();
    std::mt19937_64 gen(31);
    std::normal_distribution<double> shift(0.0, 0.3);
    int mixed = 0;
    for (int inst = 0; inst < 25; ++inst) {
        const auto old_policy = fixtures::random_policy(spec, gen);
        const auto task = make_tasks(spec, 1, gen()).front();
        auto group = fixtures::sample_group(spec, old_policy, task, gen() % (spec.trace_len + 1), 8, gen());
        for (auto& a : group.advantages) a = shift(gen) * 3;
        auto policy = old_policy;
        for (double& v : policy.values()) v += shift(gen);
        const double eps = 0.1 + 0.3 * static_cast<double>(gen() % 100) / 100.0;

        int clipped = 0;
        for (std::size_t i = 0; i < group.outcomes.size(); ++i) {
            const double rho = std::exp(sequence_logprob(spec, policy, task, group.hint_len(), group.outcomes[i]) -
                                        group.outcomes[i].logprob_old);
            const double a = group.advantages[i];
            clipped += (a > 0 && rho > 1 + eps) || (a < 0 && rho < 1 - eps);
        }
        mixed += clipped > 0 && clipped < 8;

        const auto g = surrogate_gradient(spec, policy, group, eps);
        double diff = 0, norm = 0;
        const double h = 1e-6;
        for (std::size_t j = 0; j < policy.size(); ++j) {
            auto up = policy, down = policy;
            up.values()[j] += h;
            down.values()[j] -= h;
            const double fd = (surrogate_at(spec, up, group, eps) - surrogate_at(spec, down, group, eps)) / (2 * h);
            diff += (fd - g.values()[j]) * (fd - g.values()[j]);
            norm += fd * fd;
        }
        CHECK(std::sqrt(diff) <= 1e-5 * std::max(std::sqrt(norm), 1e-12));
    }
    CHECK(mixed > 0);
}

TEST_CASE("gradient special cases") {
    const auto spec = default_arena();
    std::mt19937_64 gen(5);
    const auto policy = fixtures::random_policy(spec, gen);
    const auto task = make_tasks(spec, 1, 3).front();
    auto group = fixtures::sample_group(spec, policy, task, 4, 8, 9);

    auto zero = group;
    for (auto& a : zero.advantages) a = 0;
    const auto none = surrogate_gradient(spec, policy, zero, 0.2);
    for (double v : none.values()) CHECK(v == 0.0);

    // At the old policy every ratio is 1: plain policy gradient.
    auto ref = policy.zeros_like();
    for (std::size_t i = 0; i < group.outcomes.size(); ++i)
        accumulate_logprob_gradient(spec, policy, task, group.hint_len(), group.outcomes[i],
                                    group.advantages[i] / 8.0, ref);
    const auto g = surrogate_gradient(spec, policy, group, 0.2);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g.values()[j] == doctest::Approx(ref.values()[j]).epsilon(1e-12));
}

TEST_CASE("sgd step") {
    const auto spec = default_arena();
    std::mt19937_64 gen(6);
    const auto policy = fixtures::random_policy(spec, gen);
    auto grad = policy.zeros_like();
    CHECK(sgd_step(policy, grad, 0.5) == policy);
    grad.values()[7] = 2.0;
    CHECK(sgd_step(policy, grad, 0.0) == policy);
    const auto moved = sgd_step(policy, grad, 0.1);
    CHECK(moved.values()[7] == doctest::Approx(policy.values()[7] + 0.2));
    grad.values()[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sgd_step(policy, grad, 0.1), NumericError);
    CHECK_THROWS_AS(sgd_step(policy, fixtures::random_policy(fixtures::flat_arena(), gen), 0.1), DomainError);
}

TEST_CASE("a small ascent step does not lower the surrogate") {
    const auto spec = default_arena();
    std::mt19937_64 gen(41);
    for (int i = 0; i < 20; ++i) {
        const auto policy = fixtures::random_policy(spec, gen);
        const auto task = make_tasks(spec, 1, gen()).front();
        const auto group = fixtures::sample_group(spec, policy, task, gen() % 13, 8, gen());
        const double before = surrogate_at(spec, policy, group, 0.2);
        const auto next = sgd_step(policy, surrogate_gradient(spec, policy, group, 0.2), 1e-4);
        CHECK(surrogate_at(spec, next, group, 0.2) >= before - 1e-15);
    }
}

TEST_CASE("entropy estimates") {
    const auto spec = fixtures::flat_arena(4, 4);
    const PolicyParams uniform(spec.policy_shape());
    const auto tasks = make_tasks(spec, 100, 2);
    const auto e = entropy_estimate(spec, uniform, tasks, 0, 100, 7, EntropyScope::content);
    CHECK(e.samples == 10000);
    CHECK(std::abs(e.mean - static_cast<double>(oracle::log(4))) <= std::max(3 * e.std_error, 1e-12));

    PolicyParams sharp(spec.policy_shape());
    sharp.format_logit() = 60;
    for (std::uint32_t l = 0; l < 2; ++l) {
        sharp.lang_row(LanguageIndex{l})[0] = 60;
        sharp.token_row(LanguageIndex{l})[0] = 60;
        sharp.answer_row(LanguageIndex{l}, 0)[0] = 60;
    }
    CHECK(entropy_estimate(spec, sharp, tasks, 0, 10, 7).mean < 1e-6);

    // Shifting every logit of one factor leaves the estimate unchanged.
    std::mt19937_64 gen(3);
    const auto p = fixtures::random_policy(spec, gen);
    auto shifted = p;
    for (double& v : shifted.token_row(LanguageIndex{1})) v += 3.0;
    CHECK(entropy_estimate(spec, p, tasks, 0, 5, 1).mean ==
          doctest::Approx(entropy_estimate(spec, shifted, tasks, 0, 5, 1).mean).epsilon(1e-12));
}

TEST_CASE("hyperparameter validation") {
    TrainHyper h;
    CHECK_NOTHROW(h.validate());
    h.clip_eps = 0;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    h = {};
    h.kl_beta = 0.1;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    h = {};
    h.group_size = 1;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    h = {};
    h.tau = 1.5;
    CHECK_NOTHROW(h.validate());
}
