#include "tdmlmc/anova.hpp"

#include "tdmlmc/error.hpp"
#include "tdmlmc/stats.hpp"

#include <algorithm>
#include <cmath>

namespace tdmlmc {

namespace {

// Variance mass of the ANOVA terms whose largest index is k (k = 1..d),
// stored at position k - 1.
std::vector<double> max_index_weights(const AnalyticFamily& family)
{
    const std::vector<double>& c = family.coeffs;
    std::vector<double> w(c.size());
    if (family.family == Family::additive) {
        for (std::size_t k = 0; k < c.size(); ++k)
            w[k] = c[k] * c[k] / 12.0;
        return w;
    }
    // Product: sigma^2_Y = prod_{j in Y} s_j, so the terms with max(Y) = k
    // sum to s_k prod_{j<k} (1 + s_j).
    double prefix = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double s = c[k] * c[k] / 12.0;
        w[k] = s * prefix;
        prefix *= 1.0 + s;
    }
    return w;
}

void fill_shared_prefix_pair(UniformStream& stream, std::size_t i, std::span<double> v, std::span<double> v_prime)
{
    stream.draw(v);
    std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i), v_prime.begin());
    stream.draw(v_prime.subspan(i));
}

} // namespace

VarianceProfile analytic_profile(const Integrand& integrand)
{
    const auto& family = integrand.analytic_family();
    if (!family)
        throw UnsupportedError("analytic_profile needs an integrand from an analytic family");
    const std::vector<double> w = max_index_weights(*family);
    const std::size_t d = w.size();

    VarianceProfile p;
    p.source = ProfileSource::analytic;
    p.D.assign(d + 1, 0.0);
    for (std::size_t i = d; i-- > 0;)
        p.D[i] = p.D[i + 1] + w[i];
    p.se.assign(d + 1, 0.0);
    p.var_f = p.D[0];
    if (!(p.var_f > 0.0))
        throw DegenerateError("analytic profile has zero variance");

    // d_t from its definition, sum_Y max(Y) sigma^2_Y / var.
    double weighted = 0.0;
    for (std::size_t k = 0; k < d; ++k)
        weighted += static_cast<double>(k + 1) * w[k];
    p.d_t = weighted / p.var_f;
    return p;
}

VarianceProfile mc_profile(const Integrand& integrand, std::size_t n_pairs, const UniformStream& stream)
{
    if (n_pairs < 2)
        throw InputError("mc_profile needs at least two pairs");
    const std::size_t d = integrand.dimension();

    std::vector<Moments> jansen(d);
    Moments pooled;
    std::vector<double> v(d), v_prime(d);
    for (std::size_t i = 0; i < d; ++i) {
        UniformStream s = stream.fork(i);
        for (std::size_t k = 0; k < n_pairs; ++k) {
            fill_shared_prefix_pair(s, i, v, v_prime);
            const double a = integrand.eval(v);
            const double b = integrand.eval(v_prime);
            pooled.add(a);
            pooled.add(b);
            jansen[i].add(0.5 * (a - b) * (a - b));
        }
    }

    VarianceProfile p;
    p.source = ProfileSource::monte_carlo;
    p.sample_size = n_pairs;
    p.var_f = pooled.variance();
    if (!(p.var_f > 0.0))
        throw DegenerateError("estimated variance of the integrand is zero");

    p.D_raw.assign(d + 1, 0.0);
    p.se.assign(d + 1, 0.0);
    p.D_raw[0] = p.var_f;
    // Independent evaluations only exist at i = 0, so the variance SE is
    // computed as if the pool had 2 n_pairs members.
    {
        const double var = pooled.population_variance();
        const double excess = std::max(0.0, pooled.fourth_central() - var * var);
        p.se[0] = std::sqrt(excess / (2.0 * static_cast<double>(n_pairs)));
    }
    for (std::size_t i = 1; i < d; ++i) {
        p.D_raw[i] = jansen[i].mean();
        p.se[i] = jansen[i].se_mean();
    }
    p.D = isotonic_nonincreasing(p.D_raw);
    p.D[d] = 0.0;
    p.d_t = std::clamp(truncation_dimension(p), 1.0, static_cast<double>(d));
    return p;
}

double truncation_dimension(const VarianceProfile& profile)
{
    if (!(profile.var_f > 0.0))
        throw DegenerateError("truncation_dimension needs a positive variance");
    double sum = 0.0;
    for (double x : profile.D)
        sum += x;
    return sum / profile.var_f;
}

InequalityReport check_prop1(const Integrand& integrand, std::size_t i, const VarianceProfile& profile,
                             std::size_t n, const UniformStream& stream, double slack)
{
    const std::size_t d = integrand.dimension();
    if (i > d)
        throw InputError("check_prop1: index exceeds the dimension");
    if (profile.dimension() != d)
        throw InputError("check_prop1: profile dimension does not match the integrand");
    if (n < 2)
        throw InputError("check_prop1: need at least two pairs");

    UniformStream s = stream.fork(i);
    std::vector<double> v(d), v_prime(d);
    Moments diff;
    for (std::size_t k = 0; k < n; ++k) {
        fill_shared_prefix_pair(s, i, v, v_prime);
        diff.add(integrand.eval(v) - integrand.eval(v_prime));
    }

    InequalityReport r;
    r.lhs = diff.variance();
    r.rhs = 4.0 * profile.D[i];
    const double se_rhs = 4.0 * (i < profile.se.size() ? profile.se[i] : 0.0);
    r.se = std::hypot(diff.se_variance(), se_rhs);
    r.pass = r.lhs <= r.rhs * (1.0 + slack) + 4.0 * r.se;
    return r;
}

InequalityReport check_prop2(const Integrand& integrand, const PrefixFunction& g, std::size_t i, std::size_t n,
                             const UniformStream& stream)
{
    const std::size_t d = integrand.dimension();
    if (i > d)
        throw InputError("check_prop2: index exceeds the dimension");
    if (n < 2)
        throw InputError("check_prop2: need at least two samples");

    UniformStream s = stream.fork(i);
    std::vector<double> v(d), v_prime(d);
    std::vector<double> jansen(n), residual(n);
    Moments lhs, res;
    for (std::size_t k = 0; k < n; ++k) {
        fill_shared_prefix_pair(s, i, v, v_prime);
        const double a = integrand.eval(v);
        const double b = integrand.eval(v_prime);
        jansen[k] = 0.5 * (a - b) * (a - b);
        residual[k] = a - g(std::span<const double>(v).first(i));
        lhs.add(jansen[k]);
        res.add(residual[k]);
    }

    // Paired difference of the per-sample contributions to each side gives
    // the standard error of lhs - rhs.
    Moments paired;
    const double centre = res.mean();
    for (std::size_t k = 0; k < n; ++k) {
        const double r = residual[k] - centre;
        paired.add(jansen[k] - r * r);
    }

    InequalityReport r;
    r.lhs = lhs.mean();
    r.rhs = res.variance();
    r.se = paired.se_mean();
    r.pass = r.lhs <= r.rhs + 4.0 * r.se;
    return r;
}

} // namespace tdmlmc
