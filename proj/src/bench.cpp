#include "tdmlmc/bench.hpp"

#include "tdmlmc/error.hpp"

#include <cmath>
#include <cstdio>

namespace tdmlmc {

std::string to_string(Method method)
{
    switch (method) {
    case Method::mc:
        return "mc";
    case Method::mlmc:
        return "mlmc";
    case Method::mlmc_fixed:
        return "mlmc-fixed";
    }
    return "?";
}

Method method_from_string(const std::string& name)
{
    if (name == "mc")
        return Method::mc;
    if (name == "mlmc")
        return Method::mlmc;
    if (name == "mlmc-fixed")
        return Method::mlmc_fixed;
    throw InputError("unknown method '" + name + "' (expected mc, mlmc or mlmc-fixed)");
}

Integrand IntegrandSpec::build(std::size_t dimension) const
{
    if (!coeffs.empty()) {
        if (coeffs.size() != dimension)
            throw ConfigError("integrand.coeffs", "integrand.coeffs has " + std::to_string(coeffs.size())
                                                      + " entries but d = " + std::to_string(dimension));
        return make_family(family, coeffs);
    }
    return make_family(family, geometric_coefficients(dimension, decay_r));
}

ChainModel ChainSpec::build() const
{
    if (preset != "lindley")
        throw ConfigError("chain.preset", "unknown chain preset '" + preset + "' (only lindley ships)");
    return lindley_preset(d, {a, b, time_varying});
}

namespace {

template <typename Fn>
auto as_config_error(const std::string& key, Fn&& fn)
{
    try {
        return fn();
    } catch (const InputError& e) {
        throw ConfigError(key, "config key '" + key + "': " + e.what());
    }
}

void check_finite(double x, const std::string& what)
{
    if (!std::isfinite(x))
        throw NumericalError("non-finite " + what);
}

} // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& config)
{
    config.require_known(known_config_keys());
    ExperimentConfig c;
    c.seed = config.get_uint("seed", c.seed);
    c.threads = config.get_uint("threads", c.threads);
    if (c.threads == 0)
        throw ConfigError("threads", "threads must be at least 1");
    c.out = config.get_string("out", c.out);

    c.integrand.family = as_config_error("integrand.family", [&] {
        return family_from_string(config.get_string("integrand.family", "additive"));
    });
    c.integrand.coeffs = config.get_doubles("integrand.coeffs", {});
    c.integrand.d = config.get_uint("integrand.d", c.integrand.coeffs.empty() ? c.integrand.d : c.integrand.coeffs.size());
    c.integrand.decay_r = config.get_double("integrand.decay_r", c.integrand.decay_r);
    if (c.integrand.d < 1)
        throw ConfigError("integrand.d", "integrand.d must be at least 1");
    if (!c.integrand.coeffs.empty() && c.integrand.coeffs.size() != c.integrand.d)
        throw ConfigError("integrand.coeffs", "integrand.coeffs length does not match integrand.d");
    if (c.integrand.coeffs.empty() && !(std::abs(c.integrand.decay_r) > 0.0))
        throw ConfigError("integrand.decay_r", "integrand.decay_r must be nonzero");

    const auto method_names = config.get_strings("run.methods", {"mc", "mlmc"});
    if (method_names.empty())
        throw ConfigError("run.methods", "run.methods is empty");
    c.methods.clear();
    for (const auto& name : method_names)
        c.methods.push_back(as_config_error("run.methods", [&] { return method_from_string(name); }));

    c.d_grid = config.get_sizes("run.d_grid", {c.integrand.d});
    if (c.d_grid.empty())
        throw ConfigError("run.d_grid", "run.d_grid is empty");
    if (config.has("run.d_grid"))
        for (std::size_t d : c.d_grid)
            if (d < 2)
                throw ConfigError("run.d_grid", "run.d_grid entries must be at least 2");
    if (!c.integrand.coeffs.empty())
        for (std::size_t d : c.d_grid)
            if (d != c.integrand.coeffs.size())
                throw ConfigError("run.d_grid", "explicit integrand.coeffs fix d; run.d_grid must match it");

    c.eps = config.get_doubles("run.eps", c.eps);
    if (c.eps.empty())
        throw ConfigError("run.eps", "run.eps is empty");
    for (double e : c.eps)
        if (!(e > 0.0))
            throw ConfigError("run.eps", "run.eps entries must be positive");

    c.reps = config.get_uint("run.reps", c.reps);
    if (c.reps < 2)
        throw ConfigError("run.reps", "run.reps must be at least 2");
    c.mc_n = config.get_uint("run.mc_n", c.mc_n);
    if (c.mc_n < 1)
        throw ConfigError("run.mc_n", "run.mc_n must be at least 1");

    const std::string fix = config.get_string("run.fix_v", "midpoint");
    if (fix == "midpoint")
        c.fix_v = FixV::midpoint;
    else if (fix == "sample")
        c.fix_v = FixV::sample;
    else if (fix == "explicit")
        c.fix_v = FixV::explicit_v;
    else
        throw ConfigError("run.fix_v", "run.fix_v must be midpoint, sample or explicit");
    c.v = config.get_doubles("run.v", {});
    if (c.fix_v == FixV::explicit_v) {
        if (c.v.empty())
            throw ConfigError("run.v", "run.fix_v = explicit needs run.v");
        for (double x : c.v)
            if (!(x >= 0.0 && x <= 1.0))
                throw ConfigError("run.v", "run.v entries must lie in [0, 1]");
    }

    c.anova_method = config.get_string("anova.method", c.anova_method);
    if (c.anova_method != "analytic" && c.anova_method != "mc")
        throw ConfigError("anova.method", "anova.method must be analytic or mc");
    c.anova_pairs = config.get_uint("anova.pairs", c.anova_pairs);
    if (c.anova_pairs < 2)
        throw ConfigError("anova.pairs", "anova.pairs must be at least 2");

    c.chain.preset = config.get_string("chain.preset", c.chain.preset);
    if (c.chain.preset != "lindley")
        throw ConfigError("chain.preset", "unknown chain preset '" + c.chain.preset + "'");
    c.chain.d = config.get_uint("chain.d", c.chain.d);
    if (c.chain.d < 2)
        throw ConfigError("chain.d", "chain.d must be at least 2");
    c.chain.a = config.get_double("chain.a", c.chain.a);
    c.chain.b = config.get_double("chain.b", c.chain.b);
    if (!(c.chain.b > c.chain.a))
        throw ConfigError("chain.b", "chain.b must exceed chain.a");
    c.chain.time_varying = config.get_bool("chain.time_varying", c.chain.time_varying);
    c.chain.gamma = config.get_double("chain.gamma", c.chain.gamma);
    if (!(c.chain.gamma < -1.0))
        throw ConfigError("chain.gamma", "chain.gamma must be below -1");
    c.chain.calibrate = config.get_bool("chain.calibrate", c.chain.calibrate);
    c.chain.pilot = config.get_uint("chain.pilot", c.chain.pilot);
    if (c.chain.pilot < 2)
        throw ConfigError("chain.pilot", "chain.pilot must be at least 2");

    c.decay_i = config.get_sizes("decay.i", c.decay_i);
    if (c.decay_i.empty())
        throw ConfigError("decay.i", "decay.i is empty");
    for (std::size_t i : c.decay_i)
        if (i > c.chain.d)
            throw ConfigError("decay.i", "decay.i entries must not exceed chain.d");
    c.decay_n = config.get_uint("decay.n", c.decay_n);
    if (c.decay_n < 2)
        throw ConfigError("decay.n", "decay.n must be at least 2");

    c.lemma1_samples = config.get_uint("lemma1.samples", c.lemma1_samples);
    if (c.lemma1_samples < 2)
        throw ConfigError("lemma1.samples", "lemma1.samples must be at least 2");
    return c;
}

std::vector<double> resolve_fixed_v(const ExperimentConfig& config, std::size_t d)
{
    switch (config.fix_v) {
    case FixV::midpoint:
        return midpoint(d);
    case FixV::sample: {
        UniformStream s = UniformStream(config.seed).fork(stream_label::fixed_v).fork(d);
        return s.draw(d);
    }
    case FixV::explicit_v:
        if (config.v.size() != d)
            throw ConfigError("run.v", "run.v has " + std::to_string(config.v.size()) + " entries but d = "
                                           + std::to_string(d));
        return config.v;
    }
    return midpoint(d);
}

UniformStream cell_stream(const ExperimentConfig& config, Method method, std::size_t d)
{
    std::uint64_t label = stream_label::mc;
    if (method == Method::mlmc)
        label = stream_label::mlmc;
    else if (method == Method::mlmc_fixed)
        label = stream_label::mlmc_fixed;
    return UniformStream(config.seed).fork(label).fork(d);
}

Estimator make_estimator(Method method, const Integrand& integrand, const ExperimentConfig& config)
{
    const std::size_t d = integrand.dimension();
    switch (method) {
    case Method::mc:
        return [integrand, n = config.mc_n](UniformStream& s) { return standard_mc(integrand, n, s); };
    case Method::mlmc:
        return [integrand, schedule = truncation_schedule(d)](UniformStream& s) {
            return estimate_tilde_phi(integrand, schedule, s);
        };
    case Method::mlmc_fixed:
        return [integrand, schedule = truncation_schedule(d), v = resolve_fixed_v(config, d)](UniformStream& s) {
            return estimate_phi_v(integrand, v, schedule, s);
        };
    }
    throw InputError("unknown method");
}

namespace {

struct Cell {
    Method method;
    std::size_t d;
    std::vector<EstimateRecord> records;
    EstimateSummary summary;
    std::optional<double> bound;
};

Cell run_cell(const ExperimentConfig& config, Method method, std::size_t d)
{
    const Integrand integrand = config.integrand.build(d);
    Cell cell{method, d, {}, {}, std::nullopt};
    cell.records = run_replications(make_estimator(method, integrand, config), config.reps,
                                    cell_stream(config, method, d), config.threads);
    cell.summary = summarize(cell.records);
    const std::string where = "result in cell method=" + to_string(method) + " d=" + std::to_string(d);
    check_finite(cell.summary.mean, where);
    check_finite(cell.summary.sample_variance, where);
    if (method == Method::mlmc) {
        const VarianceProfile p = analytic_profile(integrand);
        cell.bound = tilde_phi_variance_bound(d, p.d_t, p.var_f);
    }
    return cell;
}

BenchRow make_row(const Cell& cell, double eps)
{
    BenchRow row;
    row.method = cell.method;
    row.d = cell.d;
    row.eps = eps;
    row.reps = cell.summary.replications;
    row.mean = cell.summary.mean;
    row.sample_variance = cell.summary.sample_variance;
    row.mean_cost = cell.summary.mean_cost;
    row.wnv = work_normalized_variance(cell.summary);
    row.total_budget = total_budget(cell.summary, eps);
    row.theoretical_bound = cell.bound;
    return row;
}

std::string optional_real(const std::optional<double>& x)
{
    return x ? format_real(*x) : std::string();
}

} // namespace

std::vector<BenchRow> compare_scaling(const ExperimentConfig& config)
{
    if (config.methods.empty())
        throw ConfigError("run.methods", "run.methods is empty");
    if (config.d_grid.empty())
        throw ConfigError("run.d_grid", "run.d_grid is empty");
    std::vector<BenchRow> rows;
    for (Method method : config.methods)
        for (std::size_t d : config.d_grid) {
            const Cell cell = run_cell(config, method, d);
            for (double eps : config.eps)
                rows.push_back(make_row(cell, eps));
        }
    return rows;
}

void run_config(const ExperimentConfig& config, std::ostream& out)
{
    if (config.methods.empty())
        throw ConfigError("run.methods", "run.methods is empty");
    out << "record,method,d,eps,rep,value,cost_units,mean,sample_variance,mean_cost,wnv,total_budget,theoretical_bound\n";
    for (Method method : config.methods)
        for (std::size_t d : config.d_grid) {
            const Cell cell = run_cell(config, method, d);
            for (std::size_t r = 0; r < cell.records.size(); ++r)
                out << "rep," << to_string(method) << ',' << d << ",," << r << ',' << format_real(cell.records[r].value)
                    << ',' << cell.records[r].cost_units() << ",,,,,,\n";
            for (double eps : config.eps) {
                const BenchRow row = make_row(cell, eps);
                out << "summary," << to_string(method) << ',' << d << ',' << format_real(eps) << ",,,,"
                    << format_real(row.mean) << ',' << format_real(row.sample_variance) << ','
                    << format_real(row.mean_cost) << ',' << format_real(row.wnv) << ','
                    << format_real(row.total_budget) << ',' << optional_real(row.theoretical_bound) << '\n';
            }
        }
}

std::vector<Lemma1Row> lemma1_diagnostic(const ExperimentConfig& config)
{
    std::vector<Lemma1Row> rows;
    for (std::size_t d : config.d_grid) {
        const Integrand integrand = config.integrand.build(d);
        const VarianceProfile profile = analytic_profile(integrand);
        const LevelSchedule schedule = truncation_schedule(d);
        const std::vector<double> v = resolve_fixed_v(config, d);
        const UniformStream stream = UniformStream(config.seed).fork(stream_label::lemma1).fork(d);
        const auto levels = measure_level_variances(integrand, v, schedule, config.lemma1_samples, stream);

        std::vector<double> V, V_se;
        for (std::size_t l = 1; l <= schedule.L; ++l) {
            V.push_back(levels[l].variance());
            V_se.push_back(levels[l].se_variance());
        }
        const double slack = lemma1_slack(schedule.m, V, V_se);
        rows.push_back({config.integrand.family, d, schedule.L, lemma1_check(schedule.m, V, profile.D, slack)});
    }
    return rows;
}

std::string format_real(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows)
{
    out << "method,d,eps,reps,mean,sample_variance,mean_cost,wnv,total_budget,theoretical_bound\n";
    for (const BenchRow& r : rows) {
        const std::string where = "bench row method=" + to_string(r.method) + " d=" + std::to_string(r.d);
        check_finite(r.mean, where);
        check_finite(r.sample_variance, where);
        check_finite(r.total_budget, where);
        out << to_string(r.method) << ',' << r.d << ',' << format_real(r.eps) << ',' << r.reps << ','
            << format_real(r.mean) << ',' << format_real(r.sample_variance) << ',' << format_real(r.mean_cost) << ','
            << format_real(r.wnv) << ',' << format_real(r.total_budget) << ',' << optional_real(r.theoretical_bound)
            << '\n';
    }
}

void write_estimate_csv(std::ostream& out, std::span<const EstimateRecord> records)
{
    out << "rep,value,cost_units,level,level_sum,level_count\n";
    for (std::size_t r = 0; r < records.size(); ++r) {
        const EstimateRecord& rec = records[r];
        check_finite(rec.value, "estimate in replication " + std::to_string(r));
        for (const LevelStat& stat : rec.per_level)
            out << r << ',' << format_real(rec.value) << ',' << rec.cost_units() << ',' << stat.level << ','
                << format_real(stat.diffs.sum()) << ',' << stat.diffs.count() << '\n';
    }
}

void write_profile_csv(std::ostream& out, const VarianceProfile& profile)
{
    out << "i,D,SE,d_t,var_f\n";
    for (std::size_t i = 0; i < profile.D.size(); ++i) {
        check_finite(profile.D[i], "D(" + std::to_string(i) + ")");
        out << i << ',' << format_real(profile.D[i]) << ',' << format_real(profile.se[i]) << ','
            << format_real(profile.d_t) << ',' << format_real(profile.var_f) << '\n';
    }
}

void write_decay_csv(std::ostream& out, const DecayReport& report)
{
    out << "i,msd,se,fitted_gamma,fitted_c_prime,envelope_c_prime,log_kappa,power_r2,geometric_r2\n";
    for (std::size_t k = 0; k < report.i_values.size(); ++k) {
        check_finite(report.msd[k], "msd at i=" + std::to_string(report.i_values[k]));
        out << report.i_values[k] << ',' << format_real(report.msd[k]) << ',' << format_real(report.se[k]) << ','
            << format_real(report.fitted_gamma) << ',' << format_real(report.fitted_c_prime) << ','
            << format_real(report.envelope_c_prime) << ',' << format_real(report.log_kappa) << ','
            << format_real(report.power_r_squared) << ',' << format_real(report.geometric_r_squared) << '\n';
    }
}

void write_lemma1_csv(std::ostream& out, std::span<const Lemma1Row> rows)
{
    out << "family,d,levels,lhs,rhs,slack,pass\n";
    for (const Lemma1Row& r : rows)
        out << to_string(r.family) << ',' << r.d << ',' << r.levels << ',' << format_real(r.report.lhs) << ','
            << format_real(r.report.rhs) << ',' << format_real(r.report.slack) << ',' << (r.report.pass ? 1 : 0)
            << '\n';
}

} // namespace tdmlmc
