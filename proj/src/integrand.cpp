#include "tdmlmc/integrand.hpp"

#include "tdmlmc/error.hpp"

#include <algorithm>
#include <cmath>

namespace tdmlmc {

std::string to_string(Family family)
{
    return family == Family::additive ? "additive" : "product";
}

Family family_from_string(const std::string& name)
{
    if (name == "additive")
        return Family::additive;
    if (name == "product")
        return Family::product;
    throw InputError("unknown integrand family '" + name + "' (expected additive or product)");
}

namespace {

class SplicingBinding final : public SuffixBinding {
public:
    SplicingBinding(Integrand::Evaluator evaluator, std::span<const double> u_prime, CostLedger& ledger)
        : evaluator_(std::move(evaluator)), buffer_(u_prime.begin(), u_prime.end()), suffix_(buffer_)
    {
        base_ = evaluator_(buffer_, ledger);
        ++ledger.payoff_evals;
    }

    double base_value() const override { return base_; }

    double eval(std::span<const double> prefix, CostLedger& ledger) override
    {
        if (prefix.size() > buffer_.size())
            throw InputError("hybrid prefix longer than the dimension");
        std::copy(prefix.begin(), prefix.end(), buffer_.begin());
        const double value = evaluator_(buffer_, ledger);
        ++ledger.payoff_evals;
        std::copy(suffix_.begin(), suffix_.begin() + static_cast<std::ptrdiff_t>(prefix.size()), buffer_.begin());
        return value;
    }

private:
    Integrand::Evaluator evaluator_;
    std::vector<double> buffer_;
    std::vector<double> suffix_;
    double base_ = 0.0;
};

void check_dimension(std::span<const double> u, std::size_t d, const char* what)
{
    if (u.size() != d)
        throw InputError(std::string(what) + ": expected a vector of length " + std::to_string(d) + ", got "
                         + std::to_string(u.size()));
}

} // namespace

Integrand::Integrand(std::size_t dimension, Function f, std::optional<double> known_mean)
{
    if (dimension == 0)
        throw InputError("integrand dimension must be at least 1");
    if (!f)
        throw InputError("integrand function is empty");
    auto impl = std::make_shared<Impl>();
    impl->dimension = dimension;
    impl->evaluator = [f = std::move(f)](std::span<const double> u, CostLedger&) { return f(u); };
    impl->known_mean = known_mean;
    impl_ = std::move(impl);
}

Integrand Integrand::with_cost_model(std::size_t dimension, Evaluator evaluator, Binder binder,
                                     std::optional<double> known_mean)
{
    if (dimension == 0)
        throw InputError("integrand dimension must be at least 1");
    if (!evaluator)
        throw InputError("integrand evaluator is empty");
    auto impl = std::make_shared<Impl>();
    impl->dimension = dimension;
    impl->evaluator = std::move(evaluator);
    impl->binder = std::move(binder);
    impl->known_mean = known_mean;
    return Integrand(std::move(impl));
}

Integrand Integrand::from_family(AnalyticFamily family)
{
    const std::vector<double>& c = family.coeffs;
    if (c.empty())
        throw InputError("coefficient vector is empty");
    if (std::none_of(c.begin(), c.end(), [](double x) { return x != 0.0; }))
        throw InputError("all-zero coefficients give a zero-variance integrand");
    for (double x : c)
        if (!std::isfinite(x))
            throw InputError("coefficients must be finite");

    auto impl = std::make_shared<Impl>();
    impl->dimension = c.size();
    if (family.family == Family::additive) {
        impl->evaluator = [c](std::span<const double> u, CostLedger&) {
            double s = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i)
                s += c[i] * (u[i] - 0.5);
            return s;
        };
        impl->known_mean = 0.0;
    } else {
        for (double x : c)
            if (!(x > -1.0 && x <= 1.0))
                throw InputError("product family coefficients must lie in (-1, 1]");
        impl->evaluator = [c](std::span<const double> u, CostLedger&) {
            double p = 1.0;
            for (std::size_t i = 0; i < c.size(); ++i)
                p *= 1.0 + c[i] * (u[i] - 0.5);
            return p;
        };
        impl->known_mean = 1.0;
    }
    impl->family = std::move(family);
    return Integrand(std::move(impl));
}

double Integrand::eval(std::span<const double> u, CostLedger& ledger) const
{
    check_dimension(u, dimension(), "eval");
    const double value = impl_->evaluator(u, ledger);
    ++ledger.payoff_evals;
    return value;
}

double Integrand::eval(std::span<const double> u) const
{
    CostLedger scratch;
    return eval(u, scratch);
}

double Integrand::eval_hybrid(const HybridPoint& h, CostLedger& ledger) const
{
    check_dimension(h.u, dimension(), "eval_hybrid (u)");
    check_dimension(h.u_prime, dimension(), "eval_hybrid (u')");
    if (h.m > dimension())
        throw InputError("eval_hybrid: prefix length exceeds the dimension");
    const std::vector<double> x = splice(h);
    return eval(x, ledger);
}

double Integrand::eval_hybrid(const HybridPoint& h) const
{
    CostLedger scratch;
    return eval_hybrid(h, scratch);
}

std::unique_ptr<SuffixBinding> Integrand::bind_suffix(std::span<const double> u_prime, CostLedger& ledger) const
{
    check_dimension(u_prime, dimension(), "bind_suffix");
    if (impl_->binder)
        return impl_->binder(u_prime, ledger);
    return std::make_unique<SplicingBinding>(impl_->evaluator, u_prime, ledger);
}

Integrand make_additive(std::vector<double> coeffs)
{
    return Integrand::from_family({Family::additive, std::move(coeffs)});
}

Integrand make_product(std::vector<double> coeffs)
{
    return Integrand::from_family({Family::product, std::move(coeffs)});
}

Integrand make_family(Family family, std::vector<double> coeffs)
{
    return Integrand::from_family({family, std::move(coeffs)});
}

std::vector<double> geometric_coefficients(std::size_t d, double r)
{
    std::vector<double> c(d);
    double x = 1.0;
    for (double& ci : c) {
        ci = x;
        x *= r;
    }
    return c;
}

std::vector<double> splice(const HybridPoint& h)
{
    std::vector<double> x(h.u_prime.begin(), h.u_prime.end());
    std::copy(h.u.begin(), h.u.begin() + static_cast<std::ptrdiff_t>(h.m), x.begin());
    return x;
}

} // namespace tdmlmc
