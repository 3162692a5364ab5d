#include "oracles.hpp"

#include "tdmlmc/anova.hpp"
#include "tdmlmc/error.hpp"
#include "tdmlmc/integrand.hpp"
#include "tdmlmc/mlmc.hpp"

#include <doctest.h>

#include <cmath>

using namespace tdmlmc;

namespace {

using Sizes = std::vector<std::size_t>;

EstimateSummary replicate_summary(const Estimator& est, std::size_t reps, std::uint64_t seed)
{
    return replicate(est, reps, UniformStream(seed));
}

} // namespace

TEST_CASE("truncation schedule for small and large d")
{
    const LevelSchedule s8 = truncation_schedule(8);
    CHECK(s8.L == 3);
    CHECK(s8.m == Sizes{0, 1, 3, 8});
    CHECK(s8.n == Sizes{0, 2, 1, 1});

    const LevelSchedule s2 = truncation_schedule(2);
    CHECK(s2.L == 1);
    CHECK(s2.m == Sizes{0, 2});
    CHECK(s2.n == Sizes{0, 1});

    const LevelSchedule s1000 = truncation_schedule(1000);
    CHECK(s1000.L == 10);
    CHECK(s1000.m[1] == 1);
    CHECK(s1000.m[9] == 511);
    CHECK(s1000.m[10] == 1000);
    CHECK(s1000.n[1] == 50);

    CHECK_THROWS_AS(truncation_schedule(1), InputError);
    CHECK_THROWS_AS(truncation_schedule(0), InputError);
}

TEST_CASE("schedule shape and draw budget for every d up to 2048")
{
    for (std::size_t d = 2; d <= 2048; ++d) {
        const LevelSchedule s = truncation_schedule(d);
        CHECK_NOTHROW(s.validate());
        REQUIRE(s.L == static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(d)) - 1e-12)));
        for (std::size_t l = 0; l < s.L; ++l)
            CHECK(s.m[l] == (std::size_t{1} << l) - 1);
        CHECK(s.m[s.L] == d);
        std::uint64_t draws = d;
        for (std::size_t l = 1; l <= s.L; ++l) {
            const double exact = static_cast<double>(d) / static_cast<double>(s.L) / std::ldexp(1.0, static_cast<int>(l));
            CHECK(static_cast<double>(s.n[l]) >= exact);
            CHECK(static_cast<double>(s.n[l]) < exact + 1.0);
            draws += s.n[l] * s.m[l];
        }
        CHECK(s.predicted_draws() == draws);
        CHECK(draws <= 9 * d);
    }
}

TEST_CASE("ceil_log2")
{
    CHECK(ceil_log2(1) == 0);
    CHECK(ceil_log2(2) == 1);
    CHECK(ceil_log2(3) == 2);
    CHECK(ceil_log2(1024) == 10);
    CHECK(ceil_log2(1025) == 11);
}

TEST_CASE("schedule validation")
{
    LevelSchedule s{2, {0, 1, 1}, {0, 1, 1}};
    CHECK_THROWS_AS(s.validate(), InputError);
    s = {2, {0, 1, 4}, {0, 0, 1}};
    CHECK_THROWS_AS(s.validate(), InputError);
    s = {2, {1, 2, 4}, {0, 1, 1}};
    CHECK_THROWS_AS(s.validate(), InputError);
    s = {2, {0, 1, 4}, {0, 3, 1}};
    CHECK_NOTHROW(s.validate());
    const Integrand f = make_additive({1, 1, 1});
    UniformStream rng(1);
    CHECK_THROWS_AS(estimate_tilde_phi(f, s, rng), InputError);
}

TEST_CASE("tilde phi books exactly d + sum n_l m_l draws")
{
    for (std::size_t d : {2u, 3u, 8u, 17u, 100u}) {
        const Integrand f = make_product(geometric_coefficients(d));
        const LevelSchedule s = truncation_schedule(d);
        UniformStream rng(d);
        const EstimateRecord r = estimate_tilde_phi(f, s, rng);
        CHECK(r.cost.coordinate_draws == s.predicted_draws());
        CHECK(r.cost.step_applications == 0);
        std::uint64_t payoffs = 1; // f(U')
        for (std::size_t l = 1; l <= s.L; ++l)
            payoffs += s.n[l] * (l == 1 ? 1 : 2);
        CHECK(r.cost.payoff_evals == payoffs);
        CHECK(r.per_level.size() == s.L);
    }
}

TEST_CASE("level values telescope to the estimate")
{
    const Integrand f = make_product(geometric_coefficients(12, 0.8));
    const LevelSchedule s = truncation_schedule(12);
    UniformStream rng(4);
    const EstimateRecord r = estimate_tilde_phi(f, s, rng);
    double total = 0.0;
    for (const LevelStat& ls : r.per_level) {
        CHECK(ls.diffs.count() == s.n[ls.level]);
        total += ls.diffs.mean();
    }
    CHECK(r.value == doctest::Approx(total).epsilon(1e-13));
}

TEST_CASE("dependence on the first coordinate only collapses higher levels")
{
    const Integrand f = make_additive({1, 0, 0, 0, 0, 0, 0, 0});
    const LevelSchedule s = truncation_schedule(8);
    UniformStream rng(6);
    for (int k = 0; k < 20; ++k) {
        const EstimateRecord r = estimate_tilde_phi(f, s, rng);
        for (const LevelStat& ls : r.per_level)
            if (s.m[ls.level - 1] >= 1) {
                CHECK(ls.diffs.mean() == 0.0);
                CHECK(ls.diffs.sum_sq() == 0.0);
            }
    }
}

TEST_CASE("tilde phi is unbiased on small examples")
{
    const Integrand f2 = make_additive({1, 1});
    const LevelSchedule s2 = truncation_schedule(2);
    const EstimateSummary a = replicate_summary(
        [&](UniformStream& st) { return estimate_tilde_phi(f2, s2, st); }, 10000, 1);
    CHECK(std::abs(a.mean) < 4.0 * a.se_mean);

    const Integrand f4 = make_product({1, 1, 1, 1});
    const LevelSchedule s4 = truncation_schedule(4);
    const EstimateSummary b = replicate_summary(
        [&](UniformStream& st) { return estimate_tilde_phi(f4, s4, st); }, 10000, 2);
    CHECK(std::abs(b.mean - 1.0) < 4.0 * b.se_mean);
}

TEST_CASE("phi_v is unbiased for several fixed suffixes")
{
    const Integrand add = make_additive(geometric_coefficients(6, 0.7));
    const LevelSchedule s6 = truncation_schedule(6);
    const auto mid = midpoint(6);
    const EstimateSummary a = replicate_summary(
        [&](UniformStream& st) { return estimate_phi_v(add, mid, s6, st); }, 10000, 3);
    CHECK(std::abs(a.mean) < 4.0 * a.se_mean);

    const Integrand prod = make_product({1, 1});
    const LevelSchedule s2 = truncation_schedule(2);
    const std::vector<double> zeros{0.0, 0.0};
    const EstimateSummary b = replicate_summary(
        [&](UniformStream& st) { return estimate_phi_v(prod, zeros, s2, st); }, 10000, 4);
    CHECK(std::abs(b.mean - 1.0) < 4.0 * b.se_mean);
}

TEST_CASE("phi_v skips the suffix draws and ignores v for a single level")
{
    const Integrand f = make_product({1, 0.5});
    const LevelSchedule s = truncation_schedule(2);
    const std::vector<double> v1{0.0, 0.0}, v2{0.9, 0.3};
    UniformStream a(12), b(12);
    const EstimateRecord ra = estimate_phi_v(f, v1, s, a);
    const EstimateRecord rb = estimate_phi_v(f, v2, s, b);
    CHECK(ra.value == rb.value);
    CHECK(ra.cost.coordinate_draws == s.predicted_draws() - 2);

    const LevelSchedule s8 = truncation_schedule(8);
    const Integrand g = make_additive(geometric_coefficients(8));
    UniformStream c(1);
    CHECK(estimate_phi_v(g, midpoint(8), s8, c).cost.coordinate_draws == s8.predicted_draws() - 8);
    CHECK_THROWS_AS(estimate_phi_v(g, v1, s8, c), InputError);
}

TEST_CASE("standard Monte Carlo")
{
    const Integrand f = make_additive({1, 1});
    UniformStream rng(5);
    const EstimateRecord one = standard_mc(f, 1, rng);
    CHECK(one.cost_units() == 3);

    const EstimateRecord many = standard_mc(f, 10000, rng);
    CHECK(std::abs(many.value) < 4.0 * std::sqrt((1.0 / 6) / 10000));
    CHECK(many.cost.coordinate_draws == 20000);
    CHECK(many.cost.payoff_evals == 10000);
    CHECK_THROWS_AS(standard_mc(f, 0, rng), InputError);

    const Integrand g = make_product({1, 0.5, 0.25});
    const double var_f = analytic_profile(g).var_f;
    const EstimateSummary s = replicate_summary([&](UniformStream& st) { return standard_mc(g, 50, st); }, 4000, 6);
    CHECK(std::abs(s.sample_variance - var_f / 50) < 4.0 * s.se_variance);
}

TEST_CASE("replicate summarizes a constant estimator")
{
    const Estimator constant = [](UniformStream&) {
        EstimateRecord r;
        r.value = 3.0;
        r.cost.payoff_evals = 5;
        return r;
    };
    const EstimateSummary s = replicate_summary(constant, 2, 0);
    CHECK(s.mean == 3.0);
    CHECK(s.sample_variance == 0.0);
    CHECK(s.mean_cost == 5.0);
    CHECK(s.replications == 2);
    CHECK_THROWS_AS(replicate_summary(constant, 1, 0), InputError);
}

TEST_CASE("replications do not depend on the thread count")
{
    const Integrand f = make_product(geometric_coefficients(16));
    const LevelSchedule s = truncation_schedule(16);
    const Estimator est = [&](UniformStream& st) { return estimate_tilde_phi(f, s, st); };
    const auto a = run_replications(est, 64, UniformStream(8), 1);
    const auto b = run_replications(est, 64, UniformStream(8), 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].value == b[k].value);
        CHECK(a[k].cost == b[k].cost);
    }
}

TEST_CASE("budget arithmetic")
{
    CHECK(samples_needed(1.0, 0.1) == 100);
    CHECK(samples_needed(0.025, 0.1) == 3);
    CHECK(samples_needed(1e-6, 1.0) == 1);
    CHECK_THROWS_AS(samples_needed(0.0, 0.1), InputError);
    CHECK_THROWS_AS(samples_needed(1.0, 0.0), InputError);

    EstimateSummary s;
    s.replications = 10;
    s.mean_cost = 10.0;
    s.sample_variance = 0.5;
    CHECK(work_normalized_variance(s) == 5.0);

    s.mean_cost = 3.0;
    s.sample_variance = 1.0;
    CHECK(total_budget(s, 0.1) == 300.0);
    CHECK(total_budget(s, 1e6) == 3.0);
    s.sample_variance = 0.0;
    CHECK(total_budget(s, 0.1) == 3.0);
}

TEST_CASE("optimal allocation")
{
    const std::vector<double> one{1.0};
    CHECK(optimal_allocation(one, one, 0.01) == std::vector<std::uint64_t>{100});

    const std::vector<double> V{4.0, 1.0}, t{1.0, 4.0};
    const auto n = optimal_allocation(V, t, 1e-4);
    CHECK(static_cast<double>(n[0]) / static_cast<double>(n[1]) == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(V[0] / static_cast<double>(n[0]) + V[1] / static_cast<double>(n[1]) <= 1e-4);

    const std::vector<double> V0{0.0, 1.0}, t1{1.0, 1.0};
    CHECK(optimal_allocation(V0, t1, 0.01)[0] == 1);
    const std::vector<double> Vz{0.0, 0.0};
    CHECK(optimal_allocation(Vz, t1, 0.01) == std::vector<std::uint64_t>{1, 1});
    const std::vector<double> tz{0.0, 1.0};
    CHECK_THROWS_AS(optimal_allocation(V, tz, 0.01), InputError);
}

TEST_CASE("level-variance inequality on hand-built inputs")
{
    const Sizes m{0, 1};
    const std::vector<double> V{0.3}, nu{0.3, 0.0};
    const Lemma1Report r = lemma1_check(m, V, nu);
    CHECK(r.lhs == doctest::Approx(0.3));
    CHECK(r.rhs == doctest::Approx(0.3));
    CHECK(r.pass);

    const Sizes m8{0, 1, 3, 8};
    const std::vector<double> V8{0.1, 0.2, 0.3}, zero(9, 0.0);
    CHECK(lemma1_check(m8, V8, zero).pass);

    std::vector<double> bumpy(9, 0.0);
    bumpy[2] = 1.0;
    CHECK_THROWS_AS(lemma1_check(m8, V8, bumpy), InputError);

    const std::vector<double> big{1.0, 0.0};
    CHECK_FALSE(lemma1_check(m, V, big).pass);
    CHECK(lemma1_check(m, V, big, 1.0).pass);
}

TEST_CASE("level-variance inequality holds with measured variances")
{
    const Integrand f = make_additive({1, 1});
    const LevelSchedule s = truncation_schedule(2);
    const auto moments = measure_level_variances(f, midpoint(2), s, 20000, UniformStream(2));
    REQUIRE(moments.size() == s.L + 1);
    std::vector<double> V, se;
    for (std::size_t l = 1; l <= s.L; ++l) {
        V.push_back(moments[l].variance());
        se.push_back(moments[l].se_variance());
    }
    const VarianceProfile p = analytic_profile(f);
    const double slack = lemma1_slack(s.m, V, se);
    CHECK(slack > 0.0);
    CHECK(lemma1_check(s.m, V, p.D, slack).pass);
}

TEST_CASE("variance bound and midpoint helpers")
{
    CHECK(tilde_phi_variance_bound(16, 2.0, 0.5) == doctest::Approx(16.0 * 4 / 16 * 2.0 * 0.5));
    CHECK(midpoint(3) == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("phi_v variance matches the sum of level variances")
{
    const Integrand f = make_product(geometric_coefficients(8, 0.8));
    const LevelSchedule s = truncation_schedule(8);
    const auto v = midpoint(8);
    const auto records = run_replications([&](UniformStream& st) { return estimate_phi_v(f, v, s, st); }, 20000,
                                          UniformStream(10));
    const EstimateSummary sum = summarize(records);
    const auto pooled = pooled_level_moments(records, s.L);
    REQUIRE(pooled.size() == s.L + 1);
    const VariancePrediction pred = predicted_variance(pooled, s);
    CHECK(std::abs(sum.sample_variance - pred.predicted) < 4.0 * std::hypot(sum.se_variance, pred.se));
}
