#include "tdmlmc/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace tdmlmc;

TEST_CASE("moments match two-pass formulas and merge associatively")
{
    std::vector<double> x;
    for (int k = 0; k < 101; ++k)
        x.push_back(std::sin(0.37 * k) * 3.0 + 0.01 * k);

    Moments all, left, right;
    for (std::size_t k = 0; k < x.size(); ++k) {
        all.add(x[k]);
        (k < 40 ? left : right).add(x[k]);
    }
    left.merge(right);

    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0, m4 = 0;
    for (double v : x) {
        m2 += (v - mean) * (v - mean);
        m4 += std::pow(v - mean, 4);
    }
    for (const Moments* m : {&all, &left}) {
        CHECK(m->count() == x.size());
        CHECK(m->mean() == doctest::Approx(mean).epsilon(1e-13));
        CHECK(m->variance() == doctest::Approx(m2 / (n - 1)).epsilon(1e-12));
        CHECK(m->fourth_central() == doctest::Approx(m4 / n).epsilon(1e-12));
        CHECK(m->sum_sq() == doctest::Approx(std::inner_product(x.begin(), x.end(), x.begin(), 0.0)).epsilon(1e-12));
    }
}

TEST_CASE("line fit recovers an exact line")
{
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const LinearFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("isotonic projection pools violators")
{
    CHECK(isotonic_nonincreasing(std::vector<double>{3, 2, 1}) == std::vector<double>{3, 2, 1});
    const auto p = isotonic_nonincreasing(std::vector<double>{3, 1, 2, 0});
    CHECK(p == std::vector<double>{3, 1.5, 1.5, 0});
    const auto q = isotonic_nonincreasing(std::vector<double>{1, 2, 3});
    CHECK(q == std::vector<double>{2, 2, 2});
}

TEST_CASE("parallel_for visits every index once")
{
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t k) { hits[k] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS(parallel_for(10, 3, [](std::size_t k) {
        if (k == 5)
            throw std::runtime_error("boom");
    }));
}
