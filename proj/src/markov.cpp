#include "tdmlmc/markov.hpp"

#include "tdmlmc/error.hpp"
#include "tdmlmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tdmlmc {

namespace {

void check_model(const ChainModel& model)
{
    if (model.horizon < 1)
        throw InputError("chain horizon must be at least 1");
    if (!model.step || !model.payoff)
        throw InputError("chain model needs step and payoff functions");
}

// Applies g_{start}..g_{start + ys.size() - 1} from x.
double advance(const ChainModel& model, double x, std::size_t start, std::span<const double> ys, CostLedger& ledger)
{
    for (std::size_t k = 0; k < ys.size(); ++k)
        x = model.step(start + k, x, ys[k]);
    ledger.step_applications += ys.size();
    return x;
}

class ChainSuffixBinding final : public SuffixBinding {
public:
    ChainSuffixBinding(ChainModel model, std::span<const double> u_prime, CostLedger& ledger)
        : model_(std::move(model)), innovations_(u_prime.size())
    {
        const std::size_t d = model_.horizon;
        for (std::size_t j = 0; j < d; ++j)
            innovations_[j] = u_prime[d - 1 - j];
        trajectory_ = simulate_chain(model_, innovations_, ledger);
        scratch_.resize(d);
    }

    double base_value() const override { return trajectory_.payoff; }

    // prefix = (u_1..u_m) = (Y_{d-1}..Y_{d-m}); keeps X_0..X_{d-m}.
    double eval(std::span<const double> prefix, CostLedger& ledger) override
    {
        const std::size_t d = model_.horizon;
        const std::size_t m = prefix.size();
        if (m > d)
            throw InputError("hybrid prefix longer than the horizon");
        for (std::size_t k = 0; k < m; ++k)
            scratch_[k] = prefix[m - 1 - k];
        const double x = advance(model_, trajectory_.states[d - m], d - m, std::span(scratch_).first(m), ledger);
        ++ledger.payoff_evals;
        return model_.payoff(x);
    }

private:
    ChainModel model_;
    std::vector<double> innovations_;
    std::vector<double> scratch_;
    Trajectory trajectory_;
};

} // namespace

Trajectory simulate_chain(const ChainModel& model, std::span<const double> innovations, CostLedger& ledger)
{
    check_model(model);
    if (innovations.size() != model.horizon)
        throw InputError("simulate_chain: expected " + std::to_string(model.horizon) + " innovations");
    Trajectory t;
    t.states.resize(model.horizon + 1);
    t.states[0] = model.initial_state;
    for (std::size_t i = 0; i < model.horizon; ++i)
        t.states[i + 1] = model.step(i, t.states[i], innovations[i]);
    ledger.step_applications += model.horizon;
    t.payoff = model.payoff(t.states.back());
    ++ledger.payoff_evals;
    return t;
}

Trajectory simulate_chain(const ChainModel& model, UniformStream& stream, CostLedger& ledger)
{
    check_model(model);
    std::vector<double> ys(model.horizon);
    draw_coordinates(stream, ys, ledger);
    return simulate_chain(model, ys, ledger);
}

double simulate_restart(const ChainModel& model, std::size_t i, std::span<const double> tail, CostLedger& ledger)
{
    check_model(model);
    if (i > model.horizon)
        throw InputError("simulate_restart: i exceeds the horizon");
    if (tail.size() != i)
        throw InputError("simulate_restart: expected " + std::to_string(i) + " trailing innovations");
    const double x = advance(model, model.initial_state, model.horizon - i, tail, ledger);
    ++ledger.payoff_evals;
    return model.payoff(x);
}

double coupled_level_pair(const ChainModel& model, std::size_t m_hi, std::size_t m_lo, UniformStream& stream,
                          CostLedger& ledger)
{
    if (m_lo >= m_hi || m_hi > model.horizon)
        throw InputError("coupled_level_pair needs 0 <= m_lo < m_hi <= d");
    std::vector<double> tail(m_hi);
    draw_coordinates(stream, tail, ledger);
    const double hi = simulate_restart(model, m_hi, tail, ledger);
    if (m_lo == 0)
        return hi;
    const double lo = simulate_restart(model, m_lo, std::span<const double>(tail).last(m_lo), ledger);
    return hi - lo;
}

LevelSchedule markov_schedule(std::size_t d, double gamma)
{
    if (d < 2)
        throw InputError("markov_schedule needs d >= 2");
    if (!(gamma < -1.0))
        throw InputError("markov_schedule needs gamma < -1");
    LevelSchedule s;
    s.L = ceil_log2(d);
    s.m.resize(s.L + 1);
    s.n.assign(s.L + 1, 0);
    for (std::size_t l = 0; l < s.L; ++l)
        s.m[l] = (std::size_t{1} << l) - 1;
    s.m[s.L] = d;
    for (std::size_t l = 1; l <= s.L; ++l) {
        const double target = static_cast<double>(d) * std::exp2(static_cast<double>(l) * (gamma - 1.0) / 2.0);
        s.n[l] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(target)));
    }
    return s;
}

EstimateRecord estimate_markov_mlmc(const ChainModel& model, const LevelSchedule& schedule, UniformStream& stream)
{
    check_model(model);
    schedule.validate();
    if (schedule.dimension() != model.horizon)
        throw InputError("schedule does not end at the chain horizon");
    EstimateRecord record;
    record.per_level.reserve(schedule.L);
    for (std::size_t l = 1; l <= schedule.L; ++l) {
        UniformStream level_stream = stream.fork(l);
        LevelStat stat{l, {}};
        for (std::size_t j = 0; j < schedule.n[l]; ++j)
            stat.diffs.add(coupled_level_pair(model, schedule.m[l], schedule.m[l - 1], level_stream, record.cost));
        record.value += stat.diffs.mean();
        record.per_level.push_back(std::move(stat));
    }
    return record;
}

EstimateRecord estimate_markov_mlmc(const ChainModel& model, double gamma, UniformStream& stream)
{
    return estimate_markov_mlmc(model, markov_schedule(model.horizon, gamma), stream);
}

EstimateRecord standard_mc_chain(const ChainModel& model, std::size_t n, UniformStream& stream)
{
    if (n < 1)
        throw InputError("standard_mc_chain needs n >= 1");
    EstimateRecord record;
    LevelStat stat{1, {}};
    std::vector<double> ys(model.horizon);
    for (std::size_t j = 0; j < n; ++j) {
        draw_coordinates(stream, ys, record.cost);
        stat.diffs.add(simulate_chain(model, ys, record.cost).payoff);
    }
    record.value = stat.diffs.mean();
    record.per_level.push_back(std::move(stat));
    return record;
}

DecayReport measure_decay(const ChainModel& model, std::span<const std::size_t> i_values, std::size_t n,
                          const UniformStream& stream)
{
    check_model(model);
    if (n < 2)
        throw InputError("measure_decay needs n >= 2");
    const std::size_t d = model.horizon;
    DecayReport report;
    report.i_values.assign(i_values.begin(), i_values.end());
    std::vector<double> ys(d);
    CostLedger ledger;
    for (std::size_t k = 0; k < i_values.size(); ++k) {
        const std::size_t i = i_values[k];
        if (i > d)
            throw InputError("measure_decay: i = " + std::to_string(i) + " exceeds the horizon");
        UniformStream s = stream.fork(k);
        Moments sq;
        for (std::size_t j = 0; j < n; ++j) {
            s.draw(ys);
            const double full = simulate_chain(model, ys, ledger).payoff;
            const double restart = simulate_restart(model, i, std::span<const double>(ys).last(i), ledger);
            const double diff = full - restart;
            sq.add(diff * diff);
        }
        report.msd.push_back(sq.mean());
        report.se.push_back(sq.se_mean());
    }

    std::vector<double> log_i1, idx, log_msd;
    for (std::size_t k = 0; k < report.msd.size(); ++k) {
        if (report.msd[k] > 0.0) {
            log_i1.push_back(std::log(static_cast<double>(report.i_values[k]) + 1.0));
            idx.push_back(static_cast<double>(report.i_values[k]));
            log_msd.push_back(std::log(report.msd[k]));
        }
    }
    report.fitted_points = log_msd.size();
    if (log_msd.size() >= 2) {
        const LinearFit power = fit_line(log_i1, log_msd);
        report.fitted_gamma = power.slope;
        report.fitted_c_prime = std::exp(power.intercept);
        report.power_r_squared = power.r_squared;
        double envelope = 0.0;
        for (std::size_t k = 0; k < log_msd.size(); ++k)
            envelope = std::max(envelope, std::exp(log_msd[k] - power.slope * log_i1[k]));
        report.envelope_c_prime = envelope;

        const LinearFit geometric = fit_line(idx, log_msd);
        report.log_kappa = geometric.slope;
        report.geometric_r_squared = geometric.r_squared;
    }
    return report;
}

double prefix_redraw_payoff(const ChainModel& model, const Trajectory& cached, std::size_t i, UniformStream& stream,
                            CostLedger& ledger)
{
    check_model(model);
    const std::size_t d = model.horizon;
    if (cached.states.size() != d + 1)
        throw InputError("cached trajectory does not match the horizon");
    if (i > d)
        throw InputError("prefix_redraw_payoff: i exceeds the horizon");
    if (i == 0)
        return cached.payoff;
    std::vector<double> ys(i);
    draw_coordinates(stream, ys, ledger);
    const double x = advance(model, cached.states[d - i], d - i, ys, ledger);
    ++ledger.payoff_evals;
    return model.payoff(x);
}

ChainModel make_lindley(std::size_t d, IncrementQuantiles zeta)
{
    if (!zeta)
        throw InputError("make_lindley needs increment quantile functions");
    ChainModel model;
    model.horizon = d;
    model.initial_state = 0.0;
    model.step = [zeta = std::move(zeta)](std::size_t i, double x, double y) { return std::max(0.0, x + zeta(i, y)); };
    model.payoff = [](double x) { return x; };
    return model;
}

IncrementQuantiles uniform_increments(double a, double b)
{
    return [a, b](std::size_t, double y) { return a + (b - a) * y; };
}

IncrementQuantiles modulated_increments(double a, double b, double amplitude, double period)
{
    if (!(period > 0.0))
        throw InputError("modulation period must be positive");
    return [a, b, amplitude, period](std::size_t i, double y) {
        const double s = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period);
        const double lo = a - s;
        const double hi = b + s;
        return lo + (hi - lo) * y;
    };
}

ChainModel lindley_preset(std::size_t d, const LindleyPreset& preset)
{
    if (!(preset.b > preset.a))
        throw InputError("Lindley preset needs b > a");
    return make_lindley(d, preset.time_varying ? modulated_increments(preset.a, preset.b)
                                               : uniform_increments(preset.a, preset.b));
}

double check_drift(const std::function<double(double)>& zeta, double theta, std::size_t resolution)
{
    if (!(theta > 0.0))
        throw InputError("check_drift needs theta > 0");
    const std::size_t n = std::max<std::size_t>(2, resolution + (resolution % 2));
    const double h = 1.0 / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double value = std::exp(theta * zeta(static_cast<double>(k) * h));
        if (!std::isfinite(value))
            throw NumericalError("check_drift: non-finite integrand at y = " + std::to_string(static_cast<double>(k) * h));
        const double weight = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += weight * value;
    }
    return acc * h / 3.0;
}

Integrand chain_integrand(const ChainModel& model)
{
    check_model(model);
    const std::size_t d = model.horizon;
    auto evaluator = [model](std::span<const double> u, CostLedger& ledger) {
        const std::size_t h = model.horizon;
        double x = model.initial_state;
        for (std::size_t j = 0; j < h; ++j)
            x = model.step(j, x, u[h - 1 - j]);
        ledger.step_applications += h;
        return model.payoff(x);
    };
    auto binder = [model](std::span<const double> u_prime, CostLedger& ledger) -> std::unique_ptr<SuffixBinding> {
        return std::make_unique<ChainSuffixBinding>(model, u_prime, ledger);
    };
    return Integrand::with_cost_model(d, evaluator, binder);
}

double calibrate_gamma(const ChainModel& model, std::size_t pilot_samples, const UniformStream& stream)
{
    std::vector<std::size_t> i_values;
    for (std::size_t i = 1; i < model.horizon; i *= 2)
        i_values.push_back(i);
    if (i_values.size() < 2)
        return -1.01;
    const DecayReport report = measure_decay(model, i_values, pilot_samples, stream);
    if (report.fitted_points < 2)
        return -1.01;
    return std::min(report.fitted_gamma, -1.01);
}

} // namespace tdmlmc
