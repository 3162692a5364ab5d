#include "tdmlmc/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace tdmlmc;

namespace {

double correlation(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

double ks_uniform(std::vector<double> x)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        d = std::max(d, static_cast<double>(k + 1) / n - x[k]);
        d = std::max(d, x[k] - static_cast<double>(k) / n);
    }
    return d;
}

} // namespace

TEST_CASE("same seed gives the same draws")
{
    UniformStream a = new_stream(42), b = new_stream(42);
    CHECK(a.draw(1000) == b.draw(1000));
}

TEST_CASE("different seeds differ and zero is an ordinary seed")
{
    UniformStream a(42), b(43), z(0);
    CHECK(a.draw(1000) != b.draw(1000));
    const auto zs = z.draw(100);
    CHECK(std::all_of(zs.begin(), zs.end(), [](double x) { return x >= 0.0 && x < 1.0; }));
    CHECK(zs != UniformStream(1).draw(100));
}

TEST_CASE("fork derives independent, reproducible children")
{
    const UniformStream root(42);
    UniformStream c1 = root.fork(1), c2 = root.fork(2);
    CHECK(std::abs(correlation(c1.draw(10000), c2.draw(10000))) < 0.05);

    CHECK(root.fork(1).draw(50) == root.fork(1).draw(50));
    CHECK(root.fork(1).fork(1).draw(50) != root.fork(1).draw(50));
    CHECK(root.fork(1).path() == std::vector<std::uint64_t>{1});
    CHECK(root.fork(3).fork(7).path() == std::vector<std::uint64_t>{3, 7});
    CHECK(root.counter() == 0);
}

TEST_CASE("fork leaves the parent sequence untouched")
{
    UniformStream a(9), b(9);
    a.next();
    b.next();
    (void)a.fork(5).draw(10);
    CHECK(a.next() == b.next());
}

TEST_CASE("draw contract")
{
    UniformStream s(42);
    CHECK(s.draw(0).empty());
    CHECK(s.counter() == 0);

    const auto x = s.draw(100000);
    CHECK(s.counter() == 100000);
    CHECK(std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v < 1.0; }));
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("Kolmogorov-Smirnov statistic below the 1% critical value")
{
    // 1.628 / sqrt(n) is the asymptotic 1% critical value.
    const double critical = 1.628 / std::sqrt(10000.0);
    for (std::uint64_t seed : {0ull, 1ull, 42ull, 12345ull, 0xFFFFFFFFFFFFFFFFull}) {
        UniformStream s(seed);
        CHECK(ks_uniform(s.draw(10000)) < critical);
        CHECK(ks_uniform(s.fork(3).draw(10000)) < critical);
    }
}

TEST_CASE("draw_coordinates books draws on the ledger")
{
    UniformStream s(1);
    CostLedger ledger;
    std::vector<double> buf(17);
    draw_coordinates(s, buf, ledger);
    CHECK(ledger.coordinate_draws == 17);
    CHECK(ledger.total() == 17);
    CHECK(s.counter() == 17);
}
