#pragma once

#include "tdmlmc/integrand.hpp"
#include "tdmlmc/mlmc.hpp"
#include "tdmlmc/rng.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tdmlmc {

/// Time-varying chain X_{i+1} = g_i(X_i, Y_i), 0 <= i < d, with payoff g(X_d).
///
/// `step(i, x, y)` is g_i. Steps and payoff must be deterministic.
struct ChainModel {
    std::size_t horizon = 0;
    double initial_state = 0.0;
    std::function<double(std::size_t, double, double)> step;
    std::function<double(double)> payoff;
};

struct Trajectory {
    std::vector<double> states; // X_0..X_d
    double payoff = 0.0;
};

// Draws Y_0..Y_{d-1}; books d draws, d steps and one payoff.
Trajectory simulate_chain(const ChainModel& model, UniformStream& stream, CostLedger& ledger);
// Same chain driven by given innovations Y_0..Y_{d-1}; no draws booked.
Trajectory simulate_chain(const ChainModel& model, std::span<const double> innovations, CostLedger& ledger);

// g(X_d^{(i)}): restart from X_0 at time d - i driven by tail = Y_{d-i}..Y_{d-1}.
double simulate_restart(const ChainModel& model, std::size_t i, std::span<const double> tail, CostLedger& ledger);

// g(X_d^{(m_hi)}) - g(X_d^{(m_lo)}) on one draw of the last m_hi innovations,
// with the low restart reusing the trailing m_lo of them. m_lo = 0 gives 0
// for the low term.
double coupled_level_pair(const ChainModel& model, std::size_t m_hi, std::size_t m_lo, UniformStream& stream,
                          CostLedger& ledger);

// L = ceil(log2 d), m_l = 2^l - 1 for l < L, m_L = d, n_l = ceil(d 2^(l (gamma - 1) / 2)).
LevelSchedule markov_schedule(std::size_t d, double gamma);

// Independent levels; level l uses stream.fork(l).
EstimateRecord estimate_markov_mlmc(const ChainModel& model, const LevelSchedule& schedule, UniformStream& stream);
EstimateRecord estimate_markov_mlmc(const ChainModel& model, double gamma, UniformStream& stream);

// Plain average of g(X_d) over n simulated paths.
EstimateRecord standard_mc_chain(const ChainModel& model, std::size_t n, UniformStream& stream);

struct DecayReport {
    std::vector<std::size_t> i_values;
    std::vector<double> msd; // E[(g(X_d) - g(X_d^{(i)}))^2]
    std::vector<double> se;
    // Power-law fit log msd = log c' + gamma log(i + 1).
    double fitted_gamma = 0.0;
    double fitted_c_prime = 0.0;
    double power_r_squared = 0.0;
    // Smallest c' with msd(i) <= c' (i + 1)^gamma at every measured i.
    double envelope_c_prime = 0.0;
    // Geometric fit log msd = log theta' + i log kappa.
    double log_kappa = 0.0;
    double geometric_r_squared = 0.0;
    std::size_t fitted_points = 0;
};

// Points with msd = 0 are excluded from the fits. i_values[k] uses stream.fork(k).
DecayReport measure_decay(const ChainModel& model, std::span<const std::size_t> i_values, std::size_t n,
                          const UniformStream& stream);

// Keeps X_0..X_{d-i} of a cached trajectory and redraws the last i steps.
// i = 0 returns the cached payoff at no cost.
double prefix_redraw_payoff(const ChainModel& model, const Trajectory& cached, std::size_t i, UniformStream& stream,
                            CostLedger& ledger);

using IncrementQuantiles = std::function<double(std::size_t, double)>;

// Lindley waiting times X_{i+1} = (X_i + zeta_i(Y_i))^+, X_0 = 0, payoff X_d.
ChainModel make_lindley(std::size_t d, IncrementQuantiles zeta);

// zeta_i(y) = a + (b - a) y for every i.
IncrementQuantiles uniform_increments(double a, double b);
// Uniform increments whose support widens and narrows with i:
// [a - s_i, b + s_i], s_i = amplitude * sin(2 pi i / period). The mean stays (a + b) / 2.
IncrementQuantiles modulated_increments(double a, double b, double amplitude = 0.1, double period = 32.0);

struct LindleyPreset {
    double a = -0.6;
    double b = 0.4;
    bool time_varying = false;
};
ChainModel lindley_preset(std::size_t d, const LindleyPreset& preset = {});

// Composite Simpson estimate of E[exp(theta zeta(Y))] with `resolution`
// subintervals (rounded up to even).
double check_drift(const std::function<double(double)>& zeta, double theta, std::size_t resolution = 2048);

// The chain as f on [0,1]^d with U_i = Y_{d-i}. Hybrids bound to a fixed u'
// reuse the cached u' trajectory, so a prefix of length m costs m steps.
Integrand chain_integrand(const ChainModel& model);

// Power-law gamma fitted on a pilot decay run, clamped to at most -1.01.
double calibrate_gamma(const ChainModel& model, std::size_t pilot_samples, const UniformStream& stream);

} // namespace tdmlmc
