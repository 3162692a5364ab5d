#include "tdmlmc/cli.hpp"

#include "tdmlmc/bench.hpp"
#include "tdmlmc/error.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace tdmlmc {

namespace {

// CLI options write into config keys; only options given on the command line
// override the --config file.
class Overrides {
public:
    CLI::Option* option(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help)
    {
        auto& slot = values_[key];
        CLI::Option* opt = app.add_option(flag, slot.value, help);
        slot.options.push_back(opt);
        return opt;
    }

    CLI::Option* flag(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help)
    {
        auto& slot = values_[key];
        CLI::Option* opt = app.add_flag_callback(flag, [&slot] { slot.value = "true"; }, help);
        slot.options.push_back(opt);
        return opt;
    }

    void apply(Config& config) const
    {
        for (const auto& [key, slot] : values_)
            for (const CLI::Option* opt : slot.options)
                if (opt->count() > 0)
                    config.set(key, slot.value);
    }

private:
    struct Slot {
        std::string value;
        std::vector<CLI::Option*> options;
    };
    std::map<std::string, Slot> values_;
};

void add_integrand_options(CLI::App& sub, Overrides& o, std::string& integrand_arg)
{
    sub.add_option("--integrand", integrand_arg, "Integrand config file, or a family name (additive|product)");
    o.option(sub, "--d", "integrand.d", "Dimension");
    o.option(sub, "--coeffs", "integrand.coeffs", "Explicit coefficients, comma separated");
    o.option(sub, "--decay-r", "integrand.decay_r", "Geometric coefficient ratio r (c_i = r^(i-1))");
}

void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw ConfigError("out", "cannot open output file '" + path + "'");
    file << text;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Truncation-dimension aware multilevel Monte Carlo benchmarks", "tdmlmc"};
    app.require_subcommand(1);
    Overrides o;
    std::string config_path;
    std::string integrand_arg;

    app.add_option("--config", config_path, "Flat key-value config file");
    o.option(app, "--seed", "seed", "Root seed (decimal 64-bit)");
    o.option(app, "--out", "out", "Output CSV path (stdout when omitted)");
    o.option(app, "--threads", "threads", "Worker threads");

    auto* anova = app.add_subcommand("anova", "Residual variance profile D(i) and truncation dimension");
    add_integrand_options(*anova, o, integrand_arg);
    o.option(*anova, "--method", "anova.method", "analytic|mc");
    o.option(*anova, "--pairs", "anova.pairs", "Pairs per index for the Monte Carlo oracle");

    auto* estimate = app.add_subcommand("estimate", "Replicate one estimator; long-format per-level CSV");
    add_integrand_options(*estimate, o, integrand_arg);
    o.option(*estimate, "--method", "run.methods", "mlmc|mlmc-fixed|mc");
    o.option(*estimate, "--reps", "run.reps", "Replications");
    o.option(*estimate, "--fix-v", "run.fix_v", "midpoint|sample|explicit");
    o.option(*estimate, "--v", "run.v", "Explicit fixed suffix for --fix-v explicit");
    o.option(*estimate, "--mc-n", "run.mc_n", "Points per standard MC replication");

    auto* bench = app.add_subcommand("bench", "Cost/variance scaling over a dimension grid");
    add_integrand_options(*bench, o, integrand_arg);
    o.option(*bench, "--d-grid", "run.d_grid", "Dimensions, comma separated");
    o.option(*bench, "--eps", "run.eps", "Target standard deviations, comma separated");
    o.option(*bench, "--methods", "run.methods", "Methods, comma separated");
    o.option(*bench, "--reps", "run.reps", "Replications per cell");
    o.option(*bench, "--fix-v", "run.fix_v", "midpoint|sample|explicit");
    o.option(*bench, "--mc-n", "run.mc_n", "Points per standard MC replication");

    auto* markov = app.add_subcommand("markov", "Multilevel estimator for Lindley chains");
    o.option(*markov, "--preset", "chain.preset", "Chain preset (lindley)");
    o.option(*markov, "--d", "chain.d", "Horizon");
    o.option(*markov, "--a", "chain.a", "Increment lower bound");
    o.option(*markov, "--b", "chain.b", "Increment upper bound");
    o.flag(*markov, "--time-varying", "chain.time_varying", "Sinusoidally modulated increments");
    o.option(*markov, "--gamma", "chain.gamma", "Decay exponent gamma < -1");
    o.flag(*markov, "--calibrate", "chain.calibrate", "Fit gamma on a pilot decay run");
    o.option(*markov, "--pilot", "chain.pilot", "Pilot samples per index for --calibrate");
    o.option(*markov, "--reps", "run.reps", "Replications");

    auto* decay = markov->add_subcommand("decay", "Mean squared restart gap and decay fits");
    o.option(*decay, "--i", "decay.i", "Restart lengths, comma separated");
    o.option(*decay, "--n", "decay.n", "Samples per restart length");

    auto* lemma1 = app.add_subcommand("lemma1", "Lower-bound inequality with measured level variances");
    add_integrand_options(*lemma1, o, integrand_arg);
    o.option(*lemma1, "--d-grid", "run.d_grid", "Dimensions, comma separated");
    o.option(*lemma1, "--samples", "lemma1.samples", "Samples per level");
    o.option(*lemma1, "--fix-v", "run.fix_v", "midpoint|sample|explicit");

    auto* run = app.add_subcommand("run", "Run every cell of a config; per-replication and summary rows");

    for (CLI::App* sub : {anova, estimate, bench, markov, decay, lemma1, run})
        sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "tdmlmc: " << e.what() << '\n';
        return 2;
    }

    try {
        Config config;
        if (!config_path.empty())
            config = Config::load(config_path);
        if (!integrand_arg.empty()) {
            if (std::filesystem::is_regular_file(integrand_arg))
                config.merge(Config::load(integrand_arg));
            else
                config.set("integrand.family", integrand_arg);
        }
        o.apply(config);
        if (estimate->parsed() && !config.has("run.methods"))
            config.set("run.methods", "mlmc");
        const ExperimentConfig cfg = ExperimentConfig::from_config(config);
        const UniformStream root(cfg.seed);
        std::ostringstream text;

        if (anova->parsed()) {
            const Integrand integrand = cfg.integrand.build();
            const VarianceProfile profile = cfg.anova_method == "analytic"
                ? analytic_profile(integrand)
                : mc_profile(integrand, cfg.anova_pairs, root.fork(stream_label::anova).fork(integrand.dimension()));
            write_profile_csv(text, profile);
        } else if (estimate->parsed()) {
            if (cfg.methods.size() != 1)
                throw ConfigError("run.methods", "estimate runs exactly one method");
            const Integrand integrand = cfg.integrand.build();
            const Method method = cfg.methods.front();
            const auto records = run_replications(make_estimator(method, integrand, cfg), cfg.reps,
                                                  cell_stream(cfg, method, integrand.dimension()), cfg.threads);
            write_estimate_csv(text, records);
        } else if (bench->parsed()) {
            write_bench_csv(text, compare_scaling(cfg));
        } else if (markov->parsed()) {
            const ChainModel model = cfg.chain.build();
            if (decay->parsed()) {
                const DecayReport report = measure_decay(model, cfg.decay_i, cfg.decay_n,
                                                         root.fork(stream_label::decay).fork(model.horizon));
                write_decay_csv(text, report);
            } else {
                const double gamma = cfg.chain.calibrate
                    ? calibrate_gamma(model, cfg.chain.pilot, root.fork(stream_label::calibration).fork(model.horizon))
                    : cfg.chain.gamma;
                const LevelSchedule schedule = markov_schedule(model.horizon, gamma);
                const auto records = run_replications(
                    [&](UniformStream& s) { return estimate_markov_mlmc(model, schedule, s); }, cfg.reps,
                    root.fork(stream_label::markov).fork(model.horizon), cfg.threads);
                write_estimate_csv(text, records);
            }
        } else if (lemma1->parsed()) {
            const auto rows = lemma1_diagnostic(cfg);
            write_lemma1_csv(text, rows);
        } else if (run->parsed()) {
            run_config(cfg, text);
        }
        emit(cfg.out, text.str(), out);
        return 0;
    } catch (const ConfigError& e) {
        err << "tdmlmc: config error [" << e.key() << "]: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        err << "tdmlmc: invalid input: " << e.what() << '\n';
        return 2;
    } catch (const UnsupportedError& e) {
        err << "tdmlmc: unsupported: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "tdmlmc: numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const DegenerateError& e) {
        err << "tdmlmc: numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "tdmlmc: " << e.what() << '\n';
        return 1;
    }
}

int run_cli(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace tdmlmc
