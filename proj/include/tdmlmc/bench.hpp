#pragma once

#include "tdmlmc/anova.hpp"
#include "tdmlmc/config.hpp"
#include "tdmlmc/integrand.hpp"
#include "tdmlmc/markov.hpp"
#include "tdmlmc/mlmc.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace tdmlmc {

enum class Method { mc, mlmc, mlmc_fixed };
std::string to_string(Method method);
Method method_from_string(const std::string& name);

enum class FixV { midpoint, sample, explicit_v };

// Fork labels under the root seed stream. Each method owns its label, so
// adding a method never shifts the draws of another.
namespace stream_label {
inline constexpr std::uint64_t mc = 1;
inline constexpr std::uint64_t mlmc = 2;
inline constexpr std::uint64_t mlmc_fixed = 3;
inline constexpr std::uint64_t markov = 4;
inline constexpr std::uint64_t anova = 5;
inline constexpr std::uint64_t lemma1 = 6;
inline constexpr std::uint64_t fixed_v = 7;
inline constexpr std::uint64_t decay = 8;
inline constexpr std::uint64_t calibration = 9;
} // namespace stream_label

struct IntegrandSpec {
    Family family = Family::additive;
    std::size_t d = 16;
    std::vector<double> coeffs; // explicit; overrides decay_r
    double decay_r = 0.5;

    Integrand build() const { return build(d); }
    Integrand build(std::size_t dimension) const;
};

struct ChainSpec {
    std::string preset = "lindley";
    std::size_t d = 256;
    double a = -0.6;
    double b = 0.4;
    bool time_varying = false;
    double gamma = -2.0;
    bool calibrate = false;
    std::size_t pilot = 10000;

    ChainModel build() const;
};

struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::size_t threads = 1;
    std::string out;
    IntegrandSpec integrand;
    std::vector<Method> methods{Method::mc, Method::mlmc};
    std::vector<std::size_t> d_grid{16};
    std::vector<double> eps{0.02};
    std::size_t reps = 1000;
    std::size_t mc_n = 1;
    FixV fix_v = FixV::midpoint;
    std::vector<double> v;
    std::string anova_method = "analytic";
    std::size_t anova_pairs = 100000;
    ChainSpec chain;
    std::vector<std::size_t> decay_i{4, 8, 16, 32, 64};
    std::size_t decay_n = 100000;
    std::size_t lemma1_samples = 100000;

    // Validates every key; throws ConfigError naming the offending key.
    static ExperimentConfig from_config(const Config& config);
};

struct BenchRow {
    Method method = Method::mc;
    std::size_t d = 0;
    double eps = 0.0;
    std::size_t reps = 0;
    double mean = 0.0;
    double sample_variance = 0.0;
    double mean_cost = 0.0;
    double wnv = 0.0;
    double total_budget = 0.0;
    std::optional<double> theoretical_bound; // mlmc rows only
};

// The fixed suffix used by mlmc-fixed at dimension d.
std::vector<double> resolve_fixed_v(const ExperimentConfig& config, std::size_t d);

Estimator make_estimator(Method method, const Integrand& integrand, const ExperimentConfig& config);

// Root stream of one (method, d) cell.
UniformStream cell_stream(const ExperimentConfig& config, Method method, std::size_t d);

std::vector<BenchRow> compare_scaling(const ExperimentConfig& config);

// Every (method, d) cell: per-replication rows followed by one summary row per eps.
void run_config(const ExperimentConfig& config, std::ostream& out);

struct Lemma1Row {
    Family family = Family::additive;
    std::size_t d = 0;
    std::size_t levels = 0;
    Lemma1Report report;
};

std::vector<Lemma1Row> lemma1_diagnostic(const ExperimentConfig& config);

// 17 significant digits, '.' decimal.
std::string format_real(double x);

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);
void write_estimate_csv(std::ostream& out, std::span<const EstimateRecord> records);
void write_profile_csv(std::ostream& out, const VarianceProfile& profile);
void write_decay_csv(std::ostream& out, const DecayReport& report);
void write_lemma1_csv(std::ostream& out, std::span<const Lemma1Row> rows);

} // namespace tdmlmc
