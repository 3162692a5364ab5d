#include "oracles.hpp"

#include "tdmlmc/anova.hpp"
#include "tdmlmc/error.hpp"
#include "tdmlmc/integrand.hpp"

#include <doctest.h>

#include <cmath>

using namespace tdmlmc;

TEST_CASE("analytic profile of the two-dimensional additive family")
{
    const VarianceProfile p = analytic_profile(make_additive({1, 1}));
    REQUIRE(p.D.size() == 3);
    CHECK(p.D[0] == doctest::Approx(1.0 / 6));
    CHECK(p.D[1] == doctest::Approx(1.0 / 12));
    CHECK(p.D[2] == 0.0);
    CHECK(p.var_f == doctest::Approx(1.0 / 6));
    CHECK(p.d_t == doctest::Approx(1.5));
}

TEST_CASE("analytic profile of the two-dimensional product family")
{
    const VarianceProfile p = analytic_profile(make_product({1, 1}));
    CHECK(p.D[0] == doctest::Approx(25.0 / 144));
    CHECK(p.D[1] == doctest::Approx(13.0 / 144));
    CHECK(p.D[2] == 0.0);
    CHECK(p.d_t == doctest::Approx(38.0 / 25));
}

TEST_CASE("analytic profiles match subset enumeration")
{
    for (bool product : {false, true}) {
        for (std::size_t d : {1u, 3u, 6u, 10u}) {
            for (double r : {1.0, 0.5, 0.9}) {
                const auto c = geometric_coefficients(d, r);
                const auto ref = oracle::enumerate_profile(product, c);
                const VarianceProfile p = analytic_profile(make_family(product ? Family::product : Family::additive, c));
                REQUIRE(p.D.size() == d + 1);
                for (std::size_t i = 0; i <= d; ++i)
                    CHECK(p.D[i] == doctest::Approx(ref.D[i]).epsilon(1e-12));
                CHECK(p.var_f == doctest::Approx(ref.var).epsilon(1e-12));
                CHECK(p.d_t == doctest::Approx(ref.d_t).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("profile invariants: monotone, pinned ends, sum equals d_t var_f")
{
    for (Family fam : {Family::additive, Family::product}) {
        const VarianceProfile p = analytic_profile(make_family(fam, {0.9, -0.3, 0.7, 1.0, 0.05}));
        CHECK(p.D.front() == doctest::Approx(p.var_f).epsilon(1e-14));
        CHECK(p.D.back() == 0.0);
        for (std::size_t i = 1; i < p.D.size(); ++i)
            CHECK(p.D[i] <= p.D[i - 1]);
        CHECK(truncation_dimension(p) == doctest::Approx(p.d_t).epsilon(1e-12));
        CHECK(p.d_t >= 1.0);
        CHECK(p.d_t <= 5.0);
    }
}

TEST_CASE("a single effective coordinate gives d_t = 1")
{
    const VarianceProfile p = analytic_profile(make_additive({2, 0, 0, 0}));
    CHECK(p.d_t == doctest::Approx(1.0));
    const VarianceProfile q = analytic_profile(make_additive({0, 0, 0, 2}));
    CHECK(q.d_t == doctest::Approx(4.0));
}

TEST_CASE("analytic profile needs family metadata")
{
    const Integrand f(2, [](std::span<const double> u) { return u[0]; });
    CHECK_THROWS_AS(analytic_profile(f), UnsupportedError);
}

TEST_CASE("constant integrands are degenerate")
{
    const Integrand f(3, [](std::span<const double>) { return 1.0; });
    CHECK_THROWS_AS(mc_profile(f, 100, UniformStream(1)), DegenerateError);
}

TEST_CASE("mc profile agrees with the analytic profile")
{
    for (Family fam : {Family::additive, Family::product}) {
        const Integrand f = make_family(fam, geometric_coefficients(4, 0.7));
        const VarianceProfile exact = analytic_profile(f);
        const VarianceProfile mc = mc_profile(f, 20000, UniformStream(9));
        CHECK(mc.source == ProfileSource::monte_carlo);
        CHECK(mc.sample_size == 20000);
        CHECK(mc.D.back() == 0.0);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(mc.se[i] > 0.0);
            CHECK(std::abs(mc.D_raw[i] - exact.D[i]) < 4.0 * mc.se[i]);
        }
        for (std::size_t i = 1; i < mc.D.size(); ++i)
            CHECK(mc.D[i] <= mc.D[i - 1]);
        CHECK(mc.d_t >= 1.0);
        CHECK(mc.d_t <= 4.0);
    }
}

TEST_CASE("mc profile is reproducible for a fixed stream")
{
    const Integrand f = make_product({1, 0.5, 0.25});
    const VarianceProfile a = mc_profile(f, 500, UniformStream(3));
    const VarianceProfile b = mc_profile(f, 500, UniformStream(3));
    CHECK(a.D_raw == b.D_raw);
    CHECK(a.d_t == b.d_t);
}

TEST_CASE("mc profile works on black-box integrands")
{
    // f = u1 + u2 u3: D(1) = var(u2 u3) = 7/144, D(2) = 1/36.
    const Integrand f(3, [](std::span<const double> u) { return u[0] + u[1] * u[2]; });
    const VarianceProfile p = mc_profile(f, 40000, UniformStream(17));
    CHECK(std::abs(p.D_raw[1] - 7.0 / 144) < 4.0 * p.se[1]);
    CHECK(std::abs(p.D_raw[2] - 1.0 / 36) < 4.0 * p.se[2]);
}

TEST_CASE("pair variance is bounded by four times the residual variance")
{
    for (Family fam : {Family::additive, Family::product}) {
        const Integrand f = make_family(fam, {1, 1, 0.5, 0.5});
        const VarianceProfile p = analytic_profile(f);
        for (std::size_t i = 0; i <= 4; ++i) {
            const InequalityReport r = check_prop1(f, i, p, 5000, UniformStream(30 + i));
            CHECK(r.pass);
            CHECK(r.rhs == doctest::Approx(4.0 * p.D[i]));
        }
    }
}

TEST_CASE("residual variance is below the error of any prefix approximation")
{
    const Integrand f = make_product({1, 0.8, 0.6});
    // The best prefix predictor of a product is the partial product.
    const PrefixFunction partial = [](std::span<const double> u) {
        const double c[] = {1, 0.8, 0.6};
        double p = 1.0;
        for (std::size_t k = 0; k < u.size(); ++k)
            p *= 1.0 + c[k] * (u[k] - 0.5);
        return p;
    };
    const PrefixFunction zero = [](std::span<const double>) { return 0.0; };
    for (std::size_t i = 0; i <= 3; ++i) {
        CHECK(check_prop2(f, partial, i, 20000, UniformStream(40 + i)).pass);
        CHECK(check_prop2(f, zero, i, 20000, UniformStream(50 + i)).pass);
    }
}

TEST_CASE("inequality checks reject out-of-range prefixes")
{
    const Integrand f = make_additive({1, 1});
    const VarianceProfile p = analytic_profile(f);
    CHECK_THROWS_AS(check_prop1(f, 3, p, 10, UniformStream(1)), InputError);
}
