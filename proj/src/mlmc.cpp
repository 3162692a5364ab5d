#include "tdmlmc/mlmc.hpp"

#include "tdmlmc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tdmlmc {

namespace {

// ceil(x), except that values within rounding noise of an integer snap to it.
std::uint64_t snapped_ceil(double x)
{
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x)))
        return static_cast<std::uint64_t>(std::max(0.0, r));
    return static_cast<std::uint64_t>(std::max(0.0, std::ceil(x)));
}

void check_schedule(const Integrand& integrand, const LevelSchedule& schedule)
{
    schedule.validate();
    if (schedule.dimension() != integrand.dimension())
        throw InputError("schedule ends at m_L = " + std::to_string(schedule.dimension())
                         + " but the integrand has dimension " + std::to_string(integrand.dimension()));
}

// Adds the level estimators for a bound suffix to `record`.
void run_levels(const Integrand& integrand, std::span<const double> suffix, const LevelSchedule& schedule,
                UniformStream& stream, EstimateRecord& record)
{
    const auto binding = integrand.bind_suffix(suffix, record.cost);
    std::vector<double> prefix(integrand.dimension());
    record.per_level.reserve(schedule.L);
    for (std::size_t l = 1; l <= schedule.L; ++l) {
        UniformStream level_stream = stream.fork(l);
        LevelStat stat{l, {}};
        const std::span<double> hi(prefix.data(), schedule.m[l]);
        const std::span<const double> lo(prefix.data(), schedule.m[l - 1]);
        for (std::size_t j = 0; j < schedule.n[l]; ++j) {
            draw_coordinates(level_stream, hi, record.cost);
            const double upper = binding->eval(hi, record.cost);
            const double lower = l >= 2 ? binding->eval(lo, record.cost) : 0.0;
            stat.diffs.add(upper - lower);
        }
        record.value += stat.diffs.mean();
        record.per_level.push_back(std::move(stat));
    }
}

} // namespace

void LevelSchedule::validate() const
{
    if (L < 1)
        throw InputError("schedule needs at least one level");
    if (m.size() != L + 1 || n.size() != L + 1)
        throw InputError("schedule vectors must have L + 1 entries");
    if (m[0] != 0)
        throw InputError("schedule must start at m_0 = 0");
    for (std::size_t l = 1; l <= L; ++l) {
        if (m[l] <= m[l - 1])
            throw InputError("prefix lengths must be strictly increasing");
        if (n[l] < 1)
            throw InputError("every level needs at least one replication");
    }
}

std::uint64_t LevelSchedule::predicted_draws() const
{
    std::uint64_t draws = dimension();
    for (std::size_t l = 1; l <= L; ++l)
        draws += static_cast<std::uint64_t>(n[l]) * m[l];
    return draws;
}

std::size_t ceil_log2(std::size_t d)
{
    if (d == 0)
        throw InputError("ceil_log2 of zero");
    std::size_t L = 0;
    while ((std::size_t{1} << L) < d)
        ++L;
    return L;
}

LevelSchedule truncation_schedule(std::size_t d)
{
    if (d < 2)
        throw InputError("truncation_schedule needs d >= 2 (ceil(log2 1) = 0 levels); use standard_mc for d = 1");
    LevelSchedule s;
    s.L = ceil_log2(d);
    s.m.resize(s.L + 1);
    s.n.assign(s.L + 1, 0);
    for (std::size_t l = 0; l < s.L; ++l)
        s.m[l] = (std::size_t{1} << l) - 1;
    s.m[s.L] = d;
    // ceil((d / L) 2^-l) in integer arithmetic.
    for (std::size_t l = 1; l <= s.L; ++l) {
        const std::size_t denom = s.L << l;
        s.n[l] = (d + denom - 1) / denom;
    }
    return s;
}

double hybrid_level_value(const Integrand& integrand, const LevelSchedule& schedule, std::size_t level,
                          std::span<const double> u, std::span<const double> u_prime, CostLedger& ledger)
{
    if (level > schedule.L)
        throw InputError("level exceeds the schedule");
    if (level == 0)
        return 0.0;
    return integrand.eval_hybrid({u, u_prime, schedule.m[level]}, ledger);
}

EstimateRecord estimate_tilde_phi(const Integrand& integrand, const LevelSchedule& schedule, UniformStream& stream)
{
    check_schedule(integrand, schedule);
    EstimateRecord record;
    std::vector<double> u_prime(integrand.dimension());
    UniformStream base = stream.fork(0);
    draw_coordinates(base, u_prime, record.cost);
    run_levels(integrand, u_prime, schedule, stream, record);
    return record;
}

EstimateRecord estimate_phi_v(const Integrand& integrand, std::span<const double> v, const LevelSchedule& schedule,
                              UniformStream& stream)
{
    check_schedule(integrand, schedule);
    if (v.size() != integrand.dimension())
        throw InputError("fixed suffix v has the wrong length");
    EstimateRecord record;
    run_levels(integrand, v, schedule, stream, record);
    return record;
}

EstimateRecord standard_mc(const Integrand& integrand, std::size_t n, UniformStream& stream)
{
    if (n < 1)
        throw InputError("standard_mc needs n >= 1");
    EstimateRecord record;
    LevelStat stat{1, {}};
    std::vector<double> u(integrand.dimension());
    for (std::size_t j = 0; j < n; ++j) {
        draw_coordinates(stream, u, record.cost);
        stat.diffs.add(integrand.eval(u, record.cost));
    }
    record.value = stat.diffs.mean();
    record.per_level.push_back(std::move(stat));
    return record;
}

std::vector<EstimateRecord> run_replications(const Estimator& estimator, std::size_t replications,
                                             const UniformStream& root, std::size_t threads)
{
    std::vector<EstimateRecord> records(replications);
    parallel_for(replications, threads, [&](std::size_t r) {
        UniformStream s = root.fork(r);
        records[r] = estimator(s);
    });
    return records;
}

EstimateSummary summarize(std::span<const EstimateRecord> records)
{
    if (records.size() < 2)
        throw InputError("a summary needs at least two replications");
    Moments values;
    double cost = 0.0;
    for (const EstimateRecord& rec : records) {
        values.add(rec.value);
        cost += static_cast<double>(rec.cost_units());
    }
    EstimateSummary s;
    s.replications = records.size();
    s.mean = values.mean();
    s.sample_variance = values.variance();
    s.mean_cost = cost / static_cast<double>(records.size());
    s.se_mean = values.se_mean();
    s.se_variance = values.se_variance();
    return s;
}

EstimateSummary replicate(const Estimator& estimator, std::size_t replications, const UniformStream& root,
                          std::size_t threads)
{
    if (replications < 2)
        throw InputError("replicate needs R >= 2");
    const auto records = run_replications(estimator, replications, root, threads);
    return summarize(records);
}

std::vector<Moments> pooled_level_moments(std::span<const EstimateRecord> records, std::size_t levels)
{
    std::vector<Moments> pooled(levels + 1);
    for (const EstimateRecord& rec : records)
        for (const LevelStat& stat : rec.per_level) {
            if (stat.level > levels)
                throw InputError("record has more levels than requested");
            pooled[stat.level].merge(stat.diffs);
        }
    return pooled;
}

std::uint64_t samples_needed(double variance, double eps)
{
    if (!(variance > 0.0) || !(eps > 0.0))
        throw InputError("samples_needed needs positive variance and eps");
    return std::max<std::uint64_t>(1, snapped_ceil(variance / (eps * eps)));
}

double work_normalized_variance(const EstimateSummary& summary)
{
    if (summary.replications < 2)
        throw InputError("work-normalized variance needs at least two replications");
    return summary.mean_cost * summary.sample_variance;
}

double total_budget(const EstimateSummary& summary, double eps)
{
    if (!(eps > 0.0))
        throw InputError("total_budget needs eps > 0");
    const std::uint64_t n = summary.sample_variance > 0.0 ? samples_needed(summary.sample_variance, eps) : 1;
    return static_cast<double>(n) * summary.mean_cost;
}

std::vector<std::uint64_t> optimal_allocation(std::span<const double> V, std::span<const double> t,
                                              double target_variance)
{
    if (V.size() != t.size() || V.empty())
        throw InputError("optimal_allocation: V and t must be nonempty and of equal length");
    if (!(target_variance > 0.0))
        throw InputError("optimal_allocation: target variance must be positive");
    double lambda = 0.0;
    for (std::size_t l = 0; l < V.size(); ++l) {
        if (!(t[l] > 0.0) || !(V[l] >= 0.0))
            throw InputError("optimal_allocation: need t_l > 0 and V_l >= 0");
        lambda += std::sqrt(V[l] * t[l]);
    }
    lambda /= target_variance;
    std::vector<std::uint64_t> n(V.size(), 1);
    for (std::size_t l = 0; l < V.size(); ++l)
        if (V[l] > 0.0)
            n[l] = std::max<std::uint64_t>(1, snapped_ceil(lambda * std::sqrt(V[l] / t[l])));
    return n;
}

Lemma1Report lemma1_check(std::span<const std::size_t> m, std::span<const double> V, std::span<const double> nu,
                          double slack)
{
    if (m.size() < 2 || V.size() != m.size() - 1)
        throw InputError("lemma1_check: need m_0..m_L and V_1..V_L");
    if (m.front() != 0)
        throw InputError("lemma1_check: m_0 must be 0");
    for (std::size_t l = 1; l < m.size(); ++l)
        if (m[l] <= m[l - 1])
            throw InputError("lemma1_check: prefix lengths must be strictly increasing");
    if (nu.size() != m.back() + 1)
        throw InputError("lemma1_check: nu must be indexed 0..d");
    for (std::size_t i = 1; i < nu.size(); ++i)
        if (nu[i] > nu[i - 1])
            throw InputError("lemma1_check: nu is not nonincreasing at index " + std::to_string(i));
    if (nu.back() != 0.0)
        throw InputError("lemma1_check: nu_d must be 0");

    Lemma1Report r;
    for (double x : nu)
        r.lhs += x;
    double root = 0.0;
    for (std::size_t l = 1; l < m.size(); ++l) {
        if (V[l - 1] < 0.0)
            throw InputError("lemma1_check: negative level variance");
        root += std::sqrt(static_cast<double>(m[l]) * V[l - 1]);
    }
    r.rhs = root * root;
    r.slack = slack;
    r.pass = r.lhs <= r.rhs + slack + 1e-12 * std::max(std::abs(r.lhs), std::abs(r.rhs));
    return r;
}

double lemma1_slack(std::span<const std::size_t> m, std::span<const double> V, std::span<const double> V_se)
{
    if (V.size() != V_se.size() || m.size() != V.size() + 1)
        throw InputError("lemma1_slack: size mismatch");
    double root = 0.0;
    double var_root = 0.0;
    for (std::size_t l = 1; l < m.size(); ++l) {
        const double ml = static_cast<double>(m[l]);
        root += std::sqrt(ml * V[l - 1]);
        if (V[l - 1] > 0.0) {
            const double grad = 0.5 * std::sqrt(ml / V[l - 1]);
            var_root += grad * grad * V_se[l - 1] * V_se[l - 1];
        }
    }
    return 4.0 * 2.0 * root * std::sqrt(var_root);
}

double tilde_phi_variance_bound(std::size_t d, double d_t, double var_f)
{
    return 16.0 * static_cast<double>(ceil_log2(d)) / static_cast<double>(d) * d_t * var_f;
}

VariancePrediction predicted_variance(std::span<const Moments> level_moments, const LevelSchedule& schedule)
{
    if (level_moments.size() != schedule.L + 1)
        throw InputError("predicted_variance: expected one moment block per level");
    VariancePrediction p;
    double var_se = 0.0;
    for (std::size_t l = 1; l <= schedule.L; ++l) {
        const double nl = static_cast<double>(schedule.n[l]);
        p.predicted += level_moments[l].variance() / nl;
        const double se = level_moments[l].se_variance() / nl;
        var_se += se * se;
    }
    p.se = std::sqrt(var_se);
    return p;
}

std::vector<Moments> measure_level_variances(const Integrand& integrand, std::span<const double> v,
                                             const LevelSchedule& schedule, std::size_t samples,
                                             const UniformStream& stream)
{
    check_schedule(integrand, schedule);
    if (v.size() != integrand.dimension())
        throw InputError("fixed suffix v has the wrong length");
    if (samples < 2)
        throw InputError("measure_level_variances needs at least two samples per level");
    CostLedger ledger;
    const auto binding = integrand.bind_suffix(v, ledger);
    std::vector<Moments> out(schedule.L + 1);
    std::vector<double> prefix(integrand.dimension());
    for (std::size_t l = 1; l <= schedule.L; ++l) {
        UniformStream s = stream.fork(l);
        const std::span<double> hi(prefix.data(), schedule.m[l]);
        const std::span<const double> lo(prefix.data(), schedule.m[l - 1]);
        for (std::size_t k = 0; k < samples; ++k) {
            s.draw(hi);
            const double upper = binding->eval(hi, ledger);
            const double lower = l >= 2 ? binding->eval(lo, ledger) : 0.0;
            out[l].add(upper - lower);
        }
    }
    return out;
}

std::vector<double> midpoint(std::size_t d)
{
    return std::vector<double>(d, 0.5);
}

} // namespace tdmlmc
