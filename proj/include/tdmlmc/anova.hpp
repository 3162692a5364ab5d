#pragma once

#include "tdmlmc/integrand.hpp"
#include "tdmlmc/rng.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tdmlmc {

enum class ProfileSource { analytic, monte_carlo };

/// Residual variance profile D(0..d) of an integrand.
///
/// D(i) is the variance carried by ANOVA terms that involve some coordinate
/// beyond the first i. For Monte Carlo profiles `D` is the isotonic
/// (nonincreasing) projection of `D_raw`; `se` holds the standard errors of
/// the raw estimates.
struct VarianceProfile {
    std::vector<double> D;
    std::vector<double> D_raw;
    std::vector<double> se;
    double var_f = 0.0;
    double d_t = 0.0;
    ProfileSource source = ProfileSource::analytic;
    std::size_t sample_size = 0;

    std::size_t dimension() const { return D.empty() ? 0 : D.size() - 1; }
};

VarianceProfile analytic_profile(const Integrand& integrand);

// Pairing oracle. For i < d, draws n_pairs pairs (V, V') sharing exactly the
// first i coordinates; D(i) = Var f - Cov(f(V), f(V')) is estimated per pair as
// (f(V) - f(V'))^2 / 2. D(0) is pinned to the pooled variance of all
// evaluations and D(d) to 0.
VarianceProfile mc_profile(const Integrand& integrand, std::size_t n_pairs, const UniformStream& stream);

// sum_i D(i) / var_f.
double truncation_dimension(const VarianceProfile& profile);

struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0; // standard error of lhs - rhs
    bool pass = false;
};

// var(f(V) - f(V')) <= 4 D(i) for pairs sharing the first i coordinates.
// Passes when lhs <= rhs (1 + slack) + 4 se.
InequalityReport check_prop1(const Integrand& integrand, std::size_t i, const VarianceProfile& profile,
                             std::size_t n, const UniformStream& stream, double slack = 0.0);

using PrefixFunction = std::function<double(std::span<const double>)>;

// D(i) <= var(f(U) - g(U_1..U_i)), both sides estimated from the same draws.
InequalityReport check_prop2(const Integrand& integrand, const PrefixFunction& g, std::size_t i, std::size_t n,
                             const UniformStream& stream);

} // namespace tdmlmc
