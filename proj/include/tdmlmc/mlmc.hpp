#pragma once

#include "tdmlmc/integrand.hpp"
#include "tdmlmc/rng.hpp"
#include "tdmlmc/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tdmlmc {

/// Level count L, prefix lengths m_0..m_L and replications n_1..n_L.
///
/// `n` has L + 1 entries so it can be indexed by level; n[0] is unused and 0.
struct LevelSchedule {
    std::size_t L = 0;
    std::vector<std::size_t> m;
    std::vector<std::size_t> n;

    std::size_t dimension() const { return m.empty() ? 0 : m.back(); }
    // m strictly increasing from 0, every n_l >= 1. Throws InputError.
    void validate() const;
    // Coordinate draws of one truncation-coupled replication: d + sum n_l m_l.
    std::uint64_t predicted_draws() const;
};

// Per-level differences h_l - h_{l-1} recorded in one replication.
struct LevelStat {
    std::size_t level = 0;
    Moments diffs;
};

struct EstimateRecord {
    double value = 0.0;
    CostLedger cost;
    std::vector<LevelStat> per_level;

    std::uint64_t cost_units() const { return cost.total(); }
};

struct EstimateSummary {
    double mean = 0.0;
    double sample_variance = 0.0;
    double mean_cost = 0.0;
    std::size_t replications = 0;
    double se_mean = 0.0;
    double se_variance = 0.0;
};

using Estimator = std::function<EstimateRecord(UniformStream&)>;

// L = ceil(log2 d), m_l = 2^l - 1 for l < L, m_L = d, n_l = ceil((d/L) 2^-l).
LevelSchedule truncation_schedule(std::size_t d);

// ceil(log2 d) for d >= 1.
std::size_t ceil_log2(std::size_t d);

// h_l(u, u') with the convention h_0 = 0.
double hybrid_level_value(const Integrand& integrand, const LevelSchedule& schedule, std::size_t level,
                          std::span<const double> u, std::span<const double> u_prime, CostLedger& ledger);

// One replication of the truncation-coupled estimator: U' drawn once, then
// for each level n_l prefixes of length m_l spliced onto U'.
EstimateRecord estimate_tilde_phi(const Integrand& integrand, const LevelSchedule& schedule, UniformStream& stream);

// Same with U' replaced by a fixed v; levels are then independent.
EstimateRecord estimate_phi_v(const Integrand& integrand, std::span<const double> v, const LevelSchedule& schedule,
                              UniformStream& stream);

// Mean of f over n uniform points.
EstimateRecord standard_mc(const Integrand& integrand, std::size_t n, UniformStream& stream);

// Replication r runs on root.fork(r). The records do not depend on `threads`.
std::vector<EstimateRecord> run_replications(const Estimator& estimator, std::size_t replications,
                                             const UniformStream& root, std::size_t threads = 1);
EstimateSummary summarize(std::span<const EstimateRecord> records);
EstimateSummary replicate(const Estimator& estimator, std::size_t replications, const UniformStream& root,
                          std::size_t threads = 1);

// Level differences pooled over all replications, indexed by level (0 unused).
std::vector<Moments> pooled_level_moments(std::span<const EstimateRecord> records, std::size_t levels);

// ceil(variance / eps^2).
std::uint64_t samples_needed(double variance, double eps);
double work_normalized_variance(const EstimateSummary& summary);
// n_eps * mean cost; a zero-variance estimator needs one replication.
double total_budget(const EstimateSummary& summary, double eps);

// n_l = ceil(lambda sqrt(V_l / t_l)) with lambda = sum sqrt(V_l t_l) / target,
// so that sum V_l / n_l <= target. Levels with V_l = 0 get n_l = 1.
std::vector<std::uint64_t> optimal_allocation(std::span<const double> V, std::span<const double> t,
                                              double target_variance);

struct Lemma1Report {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
};

// sum_i nu_i <= (sum_{l>=1} sqrt(m_l V_l))^2. `m` holds m_0..m_L and `V` holds
// V_1..V_L. nu must be nonincreasing with nu_d = 0.
Lemma1Report lemma1_check(std::span<const std::size_t> m, std::span<const double> V, std::span<const double> nu,
                          double slack = 0.0);
// Four standard errors of the right-hand side, propagated from se(V_l).
double lemma1_slack(std::span<const std::size_t> m, std::span<const double> V, std::span<const double> V_se);

// 16 ceil(log2 d) / d * d_t * var_f.
double tilde_phi_variance_bound(std::size_t d, double d_t, double var_f);

struct VariancePrediction {
    double predicted = 0.0; // sum_l V_l / n_l
    double se = 0.0;
};

// Variance of an independent-level estimator predicted from its pooled level
// variances.
VariancePrediction predicted_variance(std::span<const Moments> level_moments, const LevelSchedule& schedule);

// Estimates V_l = var(h_l(U, v) - h_{l-1}(U, v)) with `samples` draws per level.
std::vector<Moments> measure_level_variances(const Integrand& integrand, std::span<const double> v,
                                             const LevelSchedule& schedule, std::size_t samples,
                                             const UniformStream& stream);

std::vector<double> midpoint(std::size_t d);

} // namespace tdmlmc
