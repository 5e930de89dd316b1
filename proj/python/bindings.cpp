#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ppinfer/conjugate.hpp"
#include "ppinfer/error.hpp"
#include "ppinfer/events.hpp"
#include "ppinfer/gmc.hpp"
#include "ppinfer/io.hpp"
#include "ppinfer/rjmcmc.hpp"
#include "ppinfer/simulate.hpp"

namespace py = pybind11;
using namespace ppinfer;

namespace {

BinnedCounts counts_for(const EventSeries& data, std::size_t bins) {
  return bin_events(data, BinGrid::uniform(data.horizon(), bins));
}

py::dict band_dict(const PosteriorBand& band) {
  py::dict d;
  d["edges"] = band.grid.edges();
  d["mean"] = band.mean;
  py::list levels;
  for (const auto& l : band.levels) {
    py::dict b;
    b["level"] = l.level;
    b["lower"] = l.lower;
    b["upper"] = l.upper;
    levels.append(b);
  }
  d["bands"] = levels;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian intensity estimation for replicated Poisson point processes";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<LogicError>(m, "LogicError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<EventSeries>(m, "EventSeries")
      .def(py::init<double, std::vector<std::vector<double>>>(), py::arg("horizon"),
           py::arg("replicates"))
      .def_property_readonly("horizon", &EventSeries::horizon)
      .def_property_readonly("replicates", &EventSeries::replicates)
      .def_property_readonly("replicate_count", &EventSeries::replicate_count)
      .def_property_readonly("total_events", &EventSeries::total_events)
      .def("__eq__", [](const EventSeries& a, const EventSeries& b) { return a == b; })
      .def("__repr__", [](const EventSeries& e) {
        return "EventSeries(horizon=" + std::to_string(e.horizon()) +
               ", replicates=" + std::to_string(e.replicate_count()) +
               ", events=" + std::to_string(e.total_events()) + ")";
      });

  m.def("bin_counts",
        [](const EventSeries& data, std::size_t bins) { return counts_for(data, bins).counts; },
        py::arg("data"), py::arg("bins"), "Pooled counts H_k on N equal bins.");

  m.def("rule_of_thumb_bins",
        py::overload_cast<std::size_t, std::size_t>(&rule_of_thumb_bins),
        py::arg("total_events"), py::arg("cap") = 50);

  m.def("conjugate_band",
        [](const EventSeries& data, std::size_t bins, double alpha, double beta,
           std::vector<double> levels) {
          return band_dict(credible_band(fit_conjugate(counts_for(data, bins), {alpha, beta}), levels));
        },
        py::arg("data"), py::arg("bins"), py::arg("alpha") = 0.1, py::arg("beta") = 0.1,
        py::arg("levels") = std::vector<double>{0.75, 0.95});

  m.def("log_marginal_likelihood",
        [](const EventSeries& data, std::size_t bins, double alpha, double beta) {
          return log_marginal_likelihood(counts_for(data, bins), {alpha, beta});
        },
        py::arg("data"), py::arg("bins"), py::arg("alpha") = 0.1, py::arg("beta") = 0.1);

  m.def("select_bins",
        [](const EventSeries& data, double alpha, double beta, std::size_t first, std::size_t last) {
          const auto range = last == 0 ? default_bin_candidates(data) : BinCandidates{first, last};
          const auto sel = select_bins_empirical_bayes(data, {alpha, beta}, range);
          return py::make_tuple(sel.best, sel.profile);
        },
        py::arg("data"), py::arg("alpha") = 0.1, py::arg("beta") = 0.1, py::arg("first") = 1,
        py::arg("last") = 0);

  m.def("calibrate_beta",
        [](const EventSeries& data, std::size_t bins, double alpha) {
          return calibrate_beta(counts_for(data, bins), alpha);
        },
        py::arg("data"), py::arg("bins"), py::arg("alpha"));

  m.def("simulate",
        [](const std::string& intensity, std::size_t n, std::uint64_t seed) {
          RngStream rng(seed);
          return simulate_poisson(rng, parse_intensity(intensity), n);
        },
        py::arg("intensity"), py::arg("n"), py::arg("seed"));

  m.def("run_gmc",
        [](const EventSeries& data, std::size_t bins, std::uint64_t seed, std::size_t iterations,
           std::size_t burn_in, std::string alpha_prior, bool tie_alpha) {
          GmcHyperparams hp;
          hp.alpha_prior = parse_alpha_prior(alpha_prior);
          hp.tie_alpha = tie_alpha;
          GmcRunOptions opts;
          opts.iterations = iterations;
          opts.burn_in = burn_in;
          RngStream rng(seed);
          ChainOutput out;
          {
            py::gil_scoped_release release;
            out = run_gmc(counts_for(data, bins), hp, opts, rng);
          }
          py::array_t<double> psi({out.kept(), out.bins});
          std::copy(out.psi_samples.begin(), out.psi_samples.end(), psi.mutable_data());
          py::dict d;
          d["psi"] = psi;
          d["alpha"] = py::array_t<double>(out.alpha_samples.size(), out.alpha_samples.data());
          d["acceptance_rate"] = out.acceptance_rate();
          return d;
        },
        py::arg("data"), py::arg("bins"), py::arg("seed"), py::arg("iterations") = 30000,
        py::arg("burn_in") = 15000, py::arg("alpha_prior") = "exp:0.1", py::arg("tie_alpha") = true);

  m.def("run_rj",
        [](const EventSeries& data, std::size_t nmax, std::uint64_t seed, std::size_t iterations,
           std::size_t burn_in, double eta, double alpha, double beta) {
          RjConfig cfg;
          cfg.model_prior = ModelIndexPrior::discrete_uniform(nmax);
          cfg.seed = seed;
          cfg.iterations = iterations;
          cfg.burn_in = burn_in;
          cfg.eta = eta;
          cfg.prior_on_psi = {alpha, beta};
          py::gil_scoped_release release;
          return run_rj(data, cfg).frequencies;
        },
        py::arg("data"), py::arg("nmax"), py::arg("seed"), py::arg("iterations") = 30000,
        py::arg("burn_in") = 15000, py::arg("eta") = 0.45, py::arg("alpha") = 0.1,
        py::arg("beta") = 0.1);

  m.def("exact_model_posterior",
        [](const EventSeries& data, std::size_t nmax, double alpha, double beta) {
          RjConfig cfg;
          cfg.model_prior = ModelIndexPrior::discrete_uniform(nmax);
          cfg.prior_on_psi = {alpha, beta};
          return exact_model_posterior(data, cfg);
        },
        py::arg("data"), py::arg("nmax"), py::arg("alpha") = 0.1, py::arg("beta") = 0.1);

  m.def("read_events",
        [](const std::string& path, std::optional<double> horizon, const std::string& format) {
          return ingest_events_file(path, parse_event_format(format), horizon).events;
        },
        py::arg("path"), py::arg("horizon") = std::nullopt, py::arg("format") = "auto");

  m.def("fit_report_json",
        [](const EventSeries& data, const std::string& method, const std::string& bins,
           std::optional<std::uint64_t> seed, std::size_t iterations, double alpha,
           std::optional<double> beta) {
          FitConfig cfg;
          cfg.method = parse_fit_method(method);
          cfg.grid = GridSpec::parse(bins);
          cfg.seed = seed;
          cfg.iterations = iterations;
          cfg.alpha = alpha;
          cfg.beta = beta;
          FitResult r;
          {
            py::gil_scoped_release release;
            r = run_fit(data, cfg);
          }
          return report_to_json(r.report);
        },
        py::arg("data"), py::arg("method") = "conjugate", py::arg("bins") = "rule",
        py::arg("seed") = std::nullopt, py::arg("iterations") = 30000, py::arg("alpha") = 0.1,
        py::arg("beta") = 0.1);
}
