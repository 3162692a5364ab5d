#include "tdmlmc/anova.hpp"
#include "tdmlmc/bench.hpp"
#include "tdmlmc/cli.hpp"
#include "tdmlmc/error.hpp"
#include "tdmlmc/integrand.hpp"
#include "tdmlmc/markov.hpp"
#include "tdmlmc/mlmc.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace tdmlmc;

namespace {

Integrand python_integrand(std::size_t d, py::function fn, std::optional<double> known_mean)
{
    auto holder = std::make_shared<py::function>(std::move(fn));
    return Integrand(
        d,
        [holder](std::span<const double> u) {
            py::gil_scoped_acquire gil;
            return (*holder)(std::vector<double>(u.begin(), u.end())).cast<double>();
        },
        known_mean);
}

Estimator method_estimator(const std::string& method, const Integrand& f, std::optional<std::vector<double>> v,
                           std::size_t mc_n)
{
    const std::size_t d = f.dimension();
    if (method == "mc")
        return [f, mc_n](UniformStream& s) { return standard_mc(f, mc_n, s); };
    if (method == "mlmc")
        return [f, sch = truncation_schedule(d)](UniformStream& s) { return estimate_tilde_phi(f, sch, s); };
    if (method == "mlmc-fixed")
        return [f, sch = truncation_schedule(d), v = v.value_or(midpoint(d))](UniformStream& s) {
            return estimate_phi_v(f, v, sch, s);
        };
    throw InputError("unknown method '" + method + "'");
}

py::dict summary_dict(const EstimateSummary& s)
{
    py::dict out;
    out["mean"] = s.mean;
    out["sample_variance"] = s.sample_variance;
    out["mean_cost"] = s.mean_cost;
    out["replications"] = s.replications;
    out["se_mean"] = s.se_mean;
    out["se_variance"] = s.se_variance;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Truncation-dimension multilevel Monte Carlo";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_TypeError);
    py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ArithmeticError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<CostLedger>(m, "CostLedger")
        .def(py::init<>())
        .def_readwrite("coordinate_draws", &CostLedger::coordinate_draws)
        .def_readwrite("step_applications", &CostLedger::step_applications)
        .def_readwrite("payoff_evals", &CostLedger::payoff_evals)
        .def("total", &CostLedger::total)
        .def("__repr__", [](const CostLedger& c) {
            std::ostringstream s;
            s << "CostLedger(draws=" << c.coordinate_draws << ", steps=" << c.step_applications
              << ", payoffs=" << c.payoff_evals << ")";
            return s.str();
        });

    py::class_<UniformStream>(m, "UniformStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("fork", &UniformStream::fork, py::arg("label"))
        .def("next", &UniformStream::next)
        .def("draw", py::overload_cast<std::size_t>(&UniformStream::draw), py::arg("n"))
        .def_property_readonly("seed", &UniformStream::seed)
        .def_property_readonly("path", &UniformStream::path)
        .def_property_readonly("counter", &UniformStream::counter);

    py::class_<Integrand>(m, "Integrand")
        .def(py::init(&python_integrand), py::arg("d"), py::arg("f"), py::arg("known_mean") = py::none())
        .def_property_readonly("dimension", &Integrand::dimension)
        .def_property_readonly("known_mean", &Integrand::known_mean)
        .def("__call__", [](const Integrand& f, const std::vector<double>& u) { return f.eval(u); })
        .def("eval_hybrid", [](const Integrand& f, const std::vector<double>& u, const std::vector<double>& u_prime,
                               std::size_t prefix) { return f.eval_hybrid({u, u_prime, prefix}); },
             py::arg("u"), py::arg("u_prime"), py::arg("m"));

    m.def("make_additive", &make_additive, py::arg("coeffs"));
    m.def("make_product", &make_product, py::arg("coeffs"));
    m.def("geometric_coefficients", &geometric_coefficients, py::arg("d"), py::arg("r") = 0.5);

    py::class_<VarianceProfile>(m, "VarianceProfile")
        .def_readonly("D", &VarianceProfile::D)
        .def_readonly("D_raw", &VarianceProfile::D_raw)
        .def_readonly("se", &VarianceProfile::se)
        .def_readonly("var_f", &VarianceProfile::var_f)
        .def_readonly("d_t", &VarianceProfile::d_t)
        .def_readonly("sample_size", &VarianceProfile::sample_size);

    m.def("analytic_profile", &analytic_profile, py::arg("integrand"));
    m.def("mc_profile",
          [](const Integrand& f, std::size_t n_pairs, std::uint64_t seed) {
              return mc_profile(f, n_pairs, UniformStream(seed));
          },
          py::arg("integrand"), py::arg("n_pairs"), py::arg("seed") = 42);

    py::class_<LevelSchedule>(m, "LevelSchedule")
        .def_readonly("L", &LevelSchedule::L)
        .def_readonly("m", &LevelSchedule::m)
        .def_readonly("n", &LevelSchedule::n)
        .def("predicted_draws", &LevelSchedule::predicted_draws);

    m.def("truncation_schedule", &truncation_schedule, py::arg("d"));
    m.def("markov_schedule", &markov_schedule, py::arg("d"), py::arg("gamma"));

    py::class_<EstimateRecord>(m, "EstimateRecord")
        .def_readonly("value", &EstimateRecord::value)
        .def_readonly("cost", &EstimateRecord::cost)
        .def("cost_units", &EstimateRecord::cost_units);

    m.def("estimate",
          [](const Integrand& f, const std::string& method, std::uint64_t seed, std::optional<std::vector<double>> v,
             std::size_t mc_n) {
              UniformStream s(seed);
              return method_estimator(method, f, std::move(v), mc_n)(s);
          },
          py::arg("integrand"), py::arg("method") = "mlmc", py::arg("seed") = 42, py::arg("v") = py::none(),
          py::arg("mc_n") = 1);
    m.def("replicate",
          [](const Integrand& f, const std::string& method, std::size_t reps, std::uint64_t seed,
             std::optional<std::vector<double>> v, std::size_t mc_n) {
              const Estimator est = method_estimator(method, f, std::move(v), mc_n);
              py::gil_scoped_release release;
              return replicate(est, reps, UniformStream(seed));
          },
          py::arg("integrand"), py::arg("method") = "mlmc", py::arg("reps") = 1000, py::arg("seed") = 42,
          py::arg("v") = py::none(), py::arg("mc_n") = 1);

    py::class_<EstimateSummary>(m, "EstimateSummary")
        .def_readonly("mean", &EstimateSummary::mean)
        .def_readonly("sample_variance", &EstimateSummary::sample_variance)
        .def_readonly("mean_cost", &EstimateSummary::mean_cost)
        .def_readonly("replications", &EstimateSummary::replications)
        .def_readonly("se_mean", &EstimateSummary::se_mean)
        .def_readonly("se_variance", &EstimateSummary::se_variance)
        .def("as_dict", &summary_dict);

    m.def("samples_needed", &samples_needed, py::arg("variance"), py::arg("eps"));
    m.def("total_budget", &total_budget, py::arg("summary"), py::arg("eps"));
    m.def("work_normalized_variance", &work_normalized_variance, py::arg("summary"));
    m.def("tilde_phi_variance_bound", &tilde_phi_variance_bound, py::arg("d"), py::arg("d_t"), py::arg("var_f"));

    py::class_<ChainModel>(m, "ChainModel").def_readonly("horizon", &ChainModel::horizon);
    m.def("lindley_preset",
          [](std::size_t d, double a, double b, bool time_varying) {
              return lindley_preset(d, {a, b, time_varying});
          },
          py::arg("d"), py::arg("a") = -0.6, py::arg("b") = 0.4, py::arg("time_varying") = false);
    m.def("simulate_chain",
          [](const ChainModel& model, const std::vector<double>& innovations) {
              CostLedger ledger;
              return simulate_chain(model, innovations, ledger).states;
          },
          py::arg("model"), py::arg("innovations"));
    m.def("replicate_markov",
          [](const ChainModel& model, double gamma, std::size_t reps, std::uint64_t seed) {
              py::gil_scoped_release release;
              return replicate([&](UniformStream& s) { return estimate_markov_mlmc(model, gamma, s); }, reps,
                               UniformStream(seed));
          },
          py::arg("model"), py::arg("gamma") = -2.0, py::arg("reps") = 1000, py::arg("seed") = 42);
    m.def("chain_integrand", &chain_integrand, py::arg("model"));

    py::class_<DecayReport>(m, "DecayReport")
        .def_readonly("i_values", &DecayReport::i_values)
        .def_readonly("msd", &DecayReport::msd)
        .def_readonly("se", &DecayReport::se)
        .def_readonly("fitted_gamma", &DecayReport::fitted_gamma)
        .def_readonly("fitted_c_prime", &DecayReport::fitted_c_prime)
        .def_readonly("envelope_c_prime", &DecayReport::envelope_c_prime)
        .def_readonly("log_kappa", &DecayReport::log_kappa)
        .def_readonly("geometric_r_squared", &DecayReport::geometric_r_squared);
    m.def("measure_decay",
          [](const ChainModel& model, const std::vector<std::size_t>& i_values, std::size_t n, std::uint64_t seed) {
              py::gil_scoped_release release;
              return measure_decay(model, i_values, n, UniformStream(seed));
          },
          py::arg("model"), py::arg("i_values"), py::arg("n"), py::arg("seed") = 42);
    m.def("check_drift", &check_drift, py::arg("zeta"), py::arg("theta"), py::arg("resolution") = 2048);

    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              std::ostringstream out, err;
              int code = 0;
              {
                  py::gil_scoped_release release;
                  code = run_cli(args, out, err);
              }
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"));

#ifdef TDMLMC_VERSION
    m.attr("__version__") = TDMLMC_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
