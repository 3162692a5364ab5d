#pragma once

#include "tdmlmc/rng.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tdmlmc {

enum class Family { additive, product };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

// Closed-form test family: f(u) = sum c_i (u_i - 1/2) or prod (1 + c_i (u_i - 1/2)).
struct AnalyticFamily {
    Family family;
    std::vector<double> coeffs;
};

/// Argument of a hybrid evaluation: (u_1..u_m, u'_{m+1}..u'_d).
struct HybridPoint {
    std::span<const double> u;
    std::span<const double> u_prime;
    std::size_t m = 0;
};

/// f with its trailing coordinates bound to a fixed u'.
///
/// `eval(prefix)` returns f(prefix_1..prefix_m, u'_{m+1}..u'_d) with
/// m = prefix.size(). Implementations may cache work done on u' so that a
/// prefix of length m costs O(m) rather than O(d).
class SuffixBinding {
public:
    virtual ~SuffixBinding() = default;
    virtual double base_value() const = 0; // f(u')
    virtual double eval(std::span<const double> prefix, CostLedger& ledger) = 0;
};

/// A square-integrable f : [0,1]^d -> R.
///
/// Immutable and cheap to copy; evaluation is safe from many threads.
/// Every evaluation through a ledger books one payoff unit, plus whatever
/// step work the evaluator itself reports.
class Integrand {
public:
    using Function = std::function<double(std::span<const double>)>;
    using Evaluator = std::function<double(std::span<const double>, CostLedger&)>;
    using Binder = std::function<std::unique_ptr<SuffixBinding>(std::span<const double>, CostLedger&)>;

    Integrand(std::size_t dimension, Function f, std::optional<double> known_mean = std::nullopt);

    // Full control over cost accounting and hybrid evaluation. `binder` may be
    // empty, in which case hybrids are evaluated by splicing.
    static Integrand with_cost_model(std::size_t dimension, Evaluator evaluator, Binder binder,
                                     std::optional<double> known_mean = std::nullopt);

    static Integrand from_family(AnalyticFamily family);

    std::size_t dimension() const { return impl_->dimension; }
    const std::optional<double>& known_mean() const { return impl_->known_mean; }
    const std::optional<AnalyticFamily>& analytic_family() const { return impl_->family; }

    double eval(std::span<const double> u, CostLedger& ledger) const;
    double eval(std::span<const double> u) const;

    // f of the spliced vector. m = 0 is a real splice, i.e. f(u'); the level-0
    // convention h_0 = 0 lives in the level code (see hybrid_level_value).
    double eval_hybrid(const HybridPoint& h, CostLedger& ledger) const;
    double eval_hybrid(const HybridPoint& h) const;

    // Books one payoff evaluation for f(u').
    std::unique_ptr<SuffixBinding> bind_suffix(std::span<const double> u_prime, CostLedger& ledger) const;

private:
    struct Impl {
        std::size_t dimension;
        Evaluator evaluator;
        Binder binder;
        std::optional<double> known_mean;
        std::optional<AnalyticFamily> family;
    };
    explicit Integrand(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    std::shared_ptr<const Impl> impl_;
};

Integrand make_additive(std::vector<double> coeffs);
Integrand make_product(std::vector<double> coeffs);
Integrand make_family(Family family, std::vector<double> coeffs);

// c_i = r^(i-1), i = 1..d.
std::vector<double> geometric_coefficients(std::size_t d, double r = 0.5);

// The spliced vector (u_1..u_m, u'_{m+1}..u'_d).
std::vector<double> splice(const HybridPoint& h);

} // namespace tdmlmc
