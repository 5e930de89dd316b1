#include "ppinfer/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>

#include "ppinfer/conjugate.hpp"
#include "ppinfer/error.hpp"
#include "ppinfer/io.hpp"
#include "ppinfer/simulate.hpp"
#include "ppinfer/text.hpp"

namespace ppinfer {

namespace {

struct InputOptions {
  std::string path = "-";
  std::string format = "auto";
  std::optional<double> horizon;
};

void add_input(CLI::App* cmd, InputOptions& o) {
  cmd->add_option("input", o.path, "Event file ('-' for stdin)")->capture_default_str();
  cmd->add_option("--format", o.format, "auto, csv or plain")->capture_default_str();
  cmd->add_option("--horizon,-T", o.horizon, "Observation horizon T");
}

IngestResult read_input(const InputOptions& o, std::istream& in) {
  const auto fmt = parse_event_format(o.format);
  if (o.path == "-") return ingest_events(in, fmt, o.horizon, "<stdin>");
  return ingest_events_file(o.path, fmt, o.horizon);
}

// Runs `emit` on stdout or on a freshly opened file.
template <typename Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& emit) {
  if (path == "-") {
    emit(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  emit(file);
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

struct SeedOptions {
  std::optional<std::uint64_t> seed;
  bool no_seed = false;
};

void add_seed(CLI::App* cmd, SeedOptions& s) {
  auto* seed = cmd->add_option("--seed", s.seed, "Random seed");
  cmd->add_flag("--no-seed", s.no_seed, "Run without a fixed seed")->excludes(seed);
}

std::uint64_t resolve_seed(const SeedOptions& s, const std::string& command) {
  if (s.seed) return *s.seed;
  if (!s.no_seed) throw CLI::ValidationError(command + ": --seed is required (or pass --no-seed)");
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

// Fills options not given on the command line from a `key = value` file.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config '" + path + "': " + std::strerror(errno));
  for (auto item : CLI::ConfigINI().from_config(file)) {
    if (item.name == "++" || item.name == "--") continue;
    std::replace(item.name.begin(), item.name.end(), '_', '-');
    auto* opt = cmd->get_option_no_throw("--" + item.name);
    if (opt == nullptr) opt = cmd->get_option_no_throw(item.name);
    if (opt == nullptr || item.name == "config") {
      throw CLI::ValidationError(path + ": unknown key '" + item.name + "'");
    }
    if (opt->count() > 0) continue;
    if (item.inputs.size() > 1 && opt->get_expected_max() <= 1) {
      std::string joined;
      for (const auto& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
      item.inputs = {joined};
    }
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> v;
  for (const auto& p : split_trim(text, ',')) v.push_back(parse_real(p, what));
  return v;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Bayesian intensity estimation for replicated Poisson point processes", "ppinfer"};
  app.require_subcommand(1);

  // fit -------------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Fit a piecewise-constant intensity and write a report");
  InputOptions fit_in;
  add_input(fit, fit_in);
  FitConfig cfg;
  std::string method = "gmc";
  std::string bins = "rule";
  std::string beta = "0.1";
  std::string levels = "0.75,0.95";
  std::string output = "-";
  std::string report_format = "json";
  std::string save_chain;
  bool no_tie = false;
  bool no_timing = false;
  SeedOptions fit_seed;
  std::string config_path;
  fit->add_option("--config", config_path, "Key = value configuration file; flags override it");
  fit->add_option("--method", method, "conjugate, gmc or rj")->capture_default_str();
  fit->add_option("--bins", bins, "N, rule, ebayes or ebayes:a..b")->capture_default_str();
  fit->add_option("--alpha", cfg.alpha, "Gamma prior shape")->capture_default_str();
  fit->add_option("--beta", beta, "Gamma prior rate, or auto")->capture_default_str();
  fit->add_option("--alpha1", cfg.alpha1, "Shape of the first chain coefficient")->capture_default_str();
  fit->add_option("--beta1", cfg.beta1, "Rate of the first chain coefficient")->capture_default_str();
  fit->add_option("--alpha-prior", cfg.alpha_prior, "exp:r, gamma:a,b, uniform:u or levy")
      ->capture_default_str();
  fit->add_flag("--no-tie", no_tie, "Keep alpha_zeta and alpha_psi fixed");
  fit->add_option("--alpha-zeta", cfg.alpha_zeta, "Fixed or initial alpha_zeta")->capture_default_str();
  fit->add_option("--alpha-psi", cfg.alpha_psi, "Fixed or initial alpha_psi")->capture_default_str();
  fit->add_option("--eta", cfg.eta, "Model-walk move probability")->capture_default_str();
  fit->add_option("--model-prior", cfg.model_prior, "uniform:Nmax or poisson:mean,Nmax")
      ->capture_default_str();
  fit->add_option("--iters", cfg.iterations, "MCMC iterations")->capture_default_str();
  fit->add_option("--burn-in", cfg.burn_in_fraction, "Burn-in fraction in [0,1)")->capture_default_str();
  fit->add_option("--levels", levels, "Comma-separated band levels")->capture_default_str();
  fit->add_option("--period", cfg.period, "Fold the data with this period");
  fit->add_option("--output,-o", output, "Report path ('-' for stdout)")->capture_default_str();
  fit->add_option("--report-format", report_format, "json or csv")->capture_default_str();
  fit->add_option("--save-chain", save_chain, "Write kept MCMC draws to this CSV file");
  fit->add_flag("--no-timing", no_timing, "Write elapsed_seconds = 0 for reproducible reports");
  add_seed(fit, fit_seed);

  // select-bins -----------------------------------------------------------
  auto* sel = app.add_subcommand("select-bins", "Empirical-Bayes marginal-likelihood profile over N");
  InputOptions sel_in;
  add_input(sel, sel_in);
  double sel_alpha = 0.1;
  double sel_beta = 0.1;
  std::string sel_range;
  std::optional<double> sel_period;
  std::string sel_output = "-";
  sel->add_option("--alpha", sel_alpha, "Gamma prior shape")->capture_default_str();
  sel->add_option("--beta", sel_beta, "Gamma prior rate")->capture_default_str();
  sel->add_option("--range", sel_range, "Candidate range a..b (default 1..min(200, H))");
  sel->add_option("--period", sel_period, "Fold the data with this period");
  sel->add_option("--output,-o", sel_output, "CSV path ('-' for stdout)")->capture_default_str();

  // simulate --------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Simulate replicated Poisson processes by thinning");
  std::string sim_intensity;
  std::size_t sim_n = 1;
  std::string sim_output = "-";
  SeedOptions sim_seed;
  sim->add_option("--intensity", sim_intensity,
                  "oscillating_exponential, bart_simpson, step_sine, constant:c[,T], "
                  "linear:a,b[,T] or step:T;h1,h2,...")
      ->required();
  sim->add_option("--n", sim_n, "Number of replicates")->capture_default_str();
  sim->add_option("--output,-o", sim_output, "Event CSV path ('-' for stdout)")->capture_default_str();
  add_seed(sim, sim_seed);

  // experiment ------------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "Convergence-rate experiments (mse or contraction)");
  std::string exp_kind;
  std::string exp_intensity;
  std::string exp_sizes = "50,500,5000";
  double exp_h = 1.0;
  double exp_c = 1.0;
  std::size_t exp_reps = 50;
  std::optional<std::size_t> exp_fixed;
  double exp_alpha = 0.1;
  double exp_beta = 0.1;
  double exp_radius = 3.0;
  std::size_t exp_draws = 1000;
  std::size_t exp_datasets = 1;
  unsigned exp_threads = 1;
  std::string exp_output = "-";
  SeedOptions exp_seed;
  exp->add_option("kind", exp_kind, "mse or contraction")->required()->check(CLI::IsMember({"mse", "contraction"}));
  exp->add_option("--intensity", exp_intensity, "Intensity spec (see simulate)")->required();
  exp->add_option("--sizes", exp_sizes, "Comma-separated increasing sample sizes")->capture_default_str();
  exp->add_option("--regularity", exp_h, "Regularity h in (0,1]")->capture_default_str();
  exp->add_option("--c", exp_c, "Constant in N = round(c n^{1/(2h+1)})")->capture_default_str();
  exp->add_option("--reps", exp_reps, "Replications per size (mse)")->capture_default_str();
  exp->add_option("--fixed-bins", exp_fixed, "Use this N for every size (mse)");
  exp->add_option("--alpha", exp_alpha, "Gamma prior shape")->capture_default_str();
  exp->add_option("--beta", exp_beta, "Gamma prior rate")->capture_default_str();
  exp->add_option("--radius", exp_radius, "Ball radius multiplier M (contraction)")->capture_default_str();
  exp->add_option("--draws", exp_draws, "Posterior draws per dataset (contraction)")->capture_default_str();
  exp->add_option("--datasets", exp_datasets, "Datasets per size (contraction)")->capture_default_str();
  exp->add_option("--threads", exp_threads, "Worker threads (mse)")->capture_default_str();
  exp->add_option("--output,-o", exp_output, "CSV path ('-' for stdout)")->capture_default_str();
  add_seed(exp, exp_seed);

  // diagnostics -----------------------------------------------------------
  auto* diag = app.add_subcommand("diagnostics", "ACF, trace or summary of a saved chain");
  std::string diag_path;
  std::string diag_column;
  std::string diag_what = "acf";
  std::size_t diag_lags = 20;
  std::string diag_output = "-";
  diag->add_option("chain", diag_path, "Chain CSV written by fit --save-chain ('-' for stdin)")->required();
  diag->add_option("--column", diag_column, "Column to analyse (default: the first)");
  diag->add_option("--what", diag_what, "acf, trace or summary")
      ->check(CLI::IsMember({"acf", "trace", "summary"}))
      ->capture_default_str();
  diag->add_option("--max-lag", diag_lags, "Largest ACF lag")->capture_default_str();
  diag->add_option("--output,-o", diag_output, "CSV path ('-' for stdout)")->capture_default_str();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    }

    if (fit->parsed()) {
      if (!config_path.empty()) apply_config_file(fit, config_path);
      cfg.method = parse_fit_method(method);
      cfg.grid = GridSpec::parse(bins);
      cfg.beta = beta == "auto" ? std::nullopt : std::optional<double>(parse_real(beta, "beta"));
      cfg.levels = parse_list(levels, "band level");
      cfg.tie_alpha = !no_tie;
      cfg.horizon = fit_in.horizon;
      const auto fmt = parse_report_format(report_format);
      if (cfg.method != FitMethod::Conjugate) {
        cfg.seed = resolve_seed(fit_seed, "fit");
      } else if (fit_seed.seed) {
        cfg.seed = fit_seed.seed;
      }
      cfg.validate();
      auto ingest = read_input(fit_in, in);
      for (const auto& w : ingest.warnings) err << "warning: " << w << '\n';
      auto result = run_fit(ingest.events, cfg);
      result.report.horizon_from_data = ingest.horizon_from_data;
      result.report.warnings.insert(result.report.warnings.begin(), ingest.warnings.begin(),
                                    ingest.warnings.end());
      if (no_timing) result.report.elapsed_seconds = 0.0;
      write_report(result.report, output, fmt, out);
      if (!save_chain.empty()) {
        if (result.chain.columns.empty()) throw ConfigError("--save-chain needs an MCMC method");
        with_output(save_chain, out, [&](std::ostream& o) { write_chain_csv(o, result.chain); });
      }
    } else if (sel->parsed()) {
      auto ingest = read_input(sel_in, in);
      for (const auto& w : ingest.warnings) err << "warning: " << w << '\n';
      const EventSeries data = sel_period ? fold_periodic(ingest.events, *sel_period) : ingest.events;
      BinCandidates range = default_bin_candidates(data);
      if (!sel_range.empty()) {
        const auto g = GridSpec::parse("ebayes:" + sel_range);
        range = {g.first, g.last};
      }
      const auto selection = select_bins_empirical_bayes(data, {sel_alpha, sel_beta}, range);
      with_output(sel_output, out, [&](std::ostream& o) {
        o << "# best=" << selection.best << "\nN,log_marginal_likelihood\n";
        for (const auto& [n, lml] : selection.profile) o << n << ',' << format_real(lml) << '\n';
      });
    } else if (sim->parsed()) {
      const auto intensity = parse_intensity(sim_intensity);
      RngStream rng(resolve_seed(sim_seed, "simulate"));
      const auto events = simulate_poisson(rng, intensity, sim_n);
      with_output(sim_output, out, [&](std::ostream& o) { write_events(o, events); });
    } else if (exp->parsed()) {
      const auto intensity = parse_intensity(exp_intensity);
      std::vector<std::size_t> sizes;
      for (const auto& p : split_trim(exp_sizes, ',')) sizes.push_back(parse_count(p, "sample size"));
      const std::uint64_t seed = resolve_seed(exp_seed, "experiment");
      std::vector<ExperimentRow> rows;
      if (exp_kind == "mse") {
        MseOptions o;
        o.sample_sizes = sizes;
        o.h = exp_h;
        o.c = exp_c;
        o.replications = exp_reps;
        o.fixed_bins = exp_fixed;
        o.prior = {exp_alpha, exp_beta};
        o.seed = seed;
        o.threads = exp_threads;
        rows = mse_experiment(intensity, o);
      } else {
        ContractionOptions o;
        o.sample_sizes = sizes;
        o.h = exp_h;
        o.c = exp_c;
        o.radius = exp_radius;
        o.posterior_draws = exp_draws;
        o.datasets = exp_datasets;
        o.prior = {exp_alpha, exp_beta};
        o.seed = seed;
        rows = contraction_experiment(intensity, o);
      }
      with_output(exp_output, out, [&](std::ostream& o) { write_experiment_csv(o, rows); });
    } else if (diag->parsed()) {
      ChainTable chain;
      if (diag_path == "-") {
        chain = read_chain_csv(in, "<stdin>");
      } else {
        std::ifstream file(diag_path);
        if (!file) throw IoError("cannot open '" + diag_path + "': " + std::strerror(errno));
        chain = read_chain_csv(file, diag_path);
      }
      const std::string column = diag_column.empty() ? chain.columns.front() : diag_column;
      const auto series = chain.column(column);
      with_output(diag_output, out, [&](std::ostream& o) {
        if (diag_what == "trace") {
          o << "iteration," << column << '\n';
          for (std::size_t i = 0; i < series.size(); ++i) o << (i + 1) << ',' << format_real(series[i]) << '\n';
          return;
        }
        const auto d = compute_diagnostics(column, series, diag_lags);
        if (diag_what == "acf") {
          o << "lag,acf\n";
          for (std::size_t l = 0; l < d.acf.size(); ++l) o << (l + 1) << ',' << format_real(d.acf[l]) << '\n';
          return;
        }
        o << "metric,value\n";
        o << "draws," << series.size() << '\n';
        if (d.trace) {
          o << "mean," << format_real(d.trace->mean) << "\nsd," << format_real(d.trace->sd)
            << "\nq025," << format_real(d.trace->q025) << "\nmedian," << format_real(d.trace->median)
            << "\nq975," << format_real(d.trace->q975) << '\n';
        }
        if (d.ess) o << "ess," << format_real(*d.ess) << '\n';
      });
    }
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace ppinfer
