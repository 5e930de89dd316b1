#include "ppinfer/io.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "ppinfer/conjugate.hpp"
#include "ppinfer/error.hpp"
#include "ppinfer/rjmcmc.hpp"
#include "ppinfer/text.hpp"

namespace ppinfer {

using Json = nlohmann::ordered_json;

namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

struct Metadata {
  std::optional<double> horizon;
  std::optional<std::size_t> replicates;
};

// "# horizon=T replicates=n"; unknown keys and free text are ignored.
void read_metadata(std::string_view comment, Metadata& meta, const std::string& at) {
  std::istringstream words{std::string(comment.substr(1))};
  std::string word;
  while (words >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) continue;
    const auto key = word.substr(0, eq);
    const auto value = word.substr(eq + 1);
    try {
      if (key == "horizon") meta.horizon = parse_real(value, "horizon");
      if (key == "replicates") meta.replicates = parse_count(value, "replicate count");
    } catch (const ParameterError& e) {
      throw DataError(at + e.what());
    }
  }
}

struct RawEvent {
  std::size_t label;
  double time;
  std::size_t line;
};

}  // namespace

EventFormat parse_event_format(const std::string& name) {
  if (name == "auto") return EventFormat::Auto;
  if (name == "csv") return EventFormat::Csv;
  if (name == "plain") return EventFormat::Plain;
  throw ParameterError("unknown event format '" + name + "' (expected auto, csv or plain)");
}

IngestResult ingest_events(std::istream& in, EventFormat format, std::optional<double> horizon,
                           const std::string& source) {
  Metadata meta;
  std::vector<RawEvent> raw;
  std::vector<std::string> warnings;
  bool header_seen = false;
  bool first_data = true;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      read_metadata(text, meta, where(source, lineno));
      continue;
    }
    if (first_data && format == EventFormat::Auto) {
      format = text.find(',') != std::string_view::npos ? EventFormat::Csv : EventFormat::Plain;
    }
    if (format == EventFormat::Csv) {
      if (first_data && text == "replicate,time") {
        header_seen = true;
        first_data = false;
        continue;
      }
      const auto fields = split_trim(text, ',');
      if (fields.size() != 2) {
        throw DataError(where(source, lineno) + "expected 'replicate,time', got '" +
                        std::string(text) + "'");
      }
      std::size_t label = 0;
      double t = 0.0;
      try {
        label = parse_count(fields[0], "replicate label");
        t = parse_real(fields[1], "event time");
      } catch (const ParameterError& e) {
        throw DataError(where(source, lineno) + e.what());
      }
      if (label == 0) throw DataError(where(source, lineno) + "replicate labels start at 1");
      raw.push_back({label, t, lineno});
    } else {
      double t = 0.0;
      try {
        t = parse_real(text, "event time");
      } catch (const ParameterError& e) {
        throw DataError(where(source, lineno) + e.what());
      }
      raw.push_back({1, t, lineno});
    }
    first_data = false;
  }
  if (in.bad()) throw IoError("read error on " + source);
  (void)header_seen;

  for (const auto& e : raw) {
    if (!std::isfinite(e.time)) {
      throw DataError(where(source, e.line) + "event time must be finite");
    }
    if (e.time < 0.0) {
      throw DataError(where(source, e.line) + "negative event time " + format_real(e.time));
    }
  }

  // Replicate labels.
  std::size_t n = 1;
  std::map<std::size_t, std::size_t> relabel;
  if (meta.replicates) {
    n = *meta.replicates;
    if (n == 0) throw DataError(source + ": replicates=0 in metadata");
    for (const auto& e : raw) {
      if (e.label > n) {
        throw DataError(where(source, e.line) + "replicate label " + std::to_string(e.label) +
                        " exceeds replicates=" + std::to_string(n));
      }
      relabel[e.label] = e.label;
    }
  } else {
    for (const auto& e : raw) relabel[e.label] = 0;
    std::size_t next = 1;
    bool contiguous = true;
    for (auto& [label, index] : relabel) {
      if (label != next) contiguous = false;
      index = next++;
    }
    n = std::max<std::size_t>(1, relabel.size());
    if (!contiguous) {
      warnings.push_back("replicate labels were not 1.." + std::to_string(relabel.size()) +
                         "; relabelled in increasing order");
    }
  }
  if (raw.empty()) warnings.push_back(source + " contains no events");

  // Horizon: explicit argument, then metadata, then the largest time.
  bool from_data = false;
  double T = 0.0;
  if (horizon) {
    T = *horizon;
  } else if (meta.horizon) {
    T = *meta.horizon;
  } else {
    from_data = true;
    for (const auto& e : raw) T = std::max(T, e.time);
    if (raw.empty() || T == 0.0) {
      T = 1.0;
      warnings.push_back("horizon not given and cannot be taken from the data; using T = 1");
    } else {
      warnings.push_back("horizon not given; using the largest event time T = " + format_real(T));
    }
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw DataError(source + ": horizon must be positive and finite, got " + format_real(T));
  }
  std::vector<std::vector<double>> reps(n);
  for (const auto& e : raw) {
    if (e.time > T) {
      throw DataError(where(source, e.line) + "event time " + format_real(e.time) +
                      " exceeds the horizon " + format_real(T));
    }
    reps[relabel[e.label] - 1].push_back(e.time);
  }
  return {EventSeries(T, std::move(reps)), std::move(warnings), from_data};
}

IngestResult ingest_events_file(const std::string& path, EventFormat format,
                                std::optional<double> horizon) {
  if (path == "-") return ingest_events(std::cin, format, horizon, "<stdin>");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
  return ingest_events(in, format, horizon, path);
}

void write_events(std::ostream& out, const EventSeries& events) {
  out << "# horizon=" << format_real(events.horizon())
      << " replicates=" << events.replicate_count() << "\nreplicate,time\n";
  for (std::size_t j = 0; j < events.replicate_count(); ++j) {
    for (double t : events.replicate(j)) out << (j + 1) << ',' << format_real(t) << '\n';
  }
}

// ---------------------------------------------------------------------------

std::string to_string(FitMethod m) {
  switch (m) {
    case FitMethod::Conjugate: return "conjugate";
    case FitMethod::Gmc: return "gmc";
    case FitMethod::Rj: return "rj";
  }
  return "?";
}

FitMethod parse_fit_method(const std::string& name) {
  if (name == "conjugate") return FitMethod::Conjugate;
  if (name == "gmc") return FitMethod::Gmc;
  if (name == "rj") return FitMethod::Rj;
  throw ParameterError("unknown method '" + name + "' (expected conjugate, gmc or rj)");
}

GridSpec GridSpec::parse(const std::string& text) {
  const auto t = std::string(trim(text));
  GridSpec g;
  if (t == "rule") return g;
  if (t.rfind("ebayes", 0) == 0) {
    g.mode = Mode::EBayes;
    if (t == "ebayes") return g;
    if (t[6] != ':') throw ParameterError("bad grid spec '" + t + "'");
    const auto range = t.substr(7);
    const auto dots = range.find("..");
    if (dots == std::string::npos) throw ParameterError("ebayes range must look like a..b");
    g.first = parse_count(range.substr(0, dots), "ebayes lower bound");
    g.last = parse_count(range.substr(dots + 2), "ebayes upper bound");
    if (g.first < 1 || g.last < g.first) {
      throw ParameterError("ebayes range '" + range + "' must satisfy 1 <= a <= b");
    }
    return g;
  }
  g.mode = Mode::Explicit;
  g.bins = parse_count(t, "bin count");
  if (g.bins < 1) throw ParameterError("bin count must be at least 1");
  return g;
}

std::string GridSpec::to_string() const {
  switch (mode) {
    case Mode::Rule: return "rule";
    case Mode::Explicit: return std::to_string(bins);
    case Mode::EBayes:
      if (last == 0) return "ebayes";
      return "ebayes:" + std::to_string(first) + ".." + std::to_string(last);
  }
  return "?";
}

namespace {

std::pair<std::string, std::vector<double>> split_spec(const std::string& text) {
  const auto colon = text.find(':');
  std::string name(trim(text.substr(0, colon)));
  std::vector<double> args;
  if (colon != std::string::npos) {
    for (const auto& p : split_trim(text.substr(colon + 1), ',')) {
      args.push_back(parse_real(p, name + " parameter"));
    }
  }
  return {name, args};
}

ModelIndexPrior parse_model_prior(const std::string& text) {
  const auto [name, v] = split_spec(text);
  auto count = [](double x) {
    if (!(x >= 1.0) || x != std::floor(x)) throw ParameterError("Nmax must be a positive integer");
    return static_cast<std::size_t>(x);
  };
  if (name == "uniform" && v.size() == 1) return ModelIndexPrior::discrete_uniform(count(v[0]));
  if (name == "poisson" && v.size() == 2) return ModelIndexPrior::shifted_poisson(v[0], count(v[1]));
  throw ParameterError("bad model prior '" + text + "' (expected uniform:Nmax or poisson:mean,Nmax)");
}

}  // namespace

AlphaPrior parse_alpha_prior(const std::string& text) {
  const auto [name, v] = split_spec(text);
  AlphaPrior p;
  if (name == "exp" && v.size() == 1) {
    p = AlphaPrior::exponential(v[0]);
  } else if (name == "gamma" && v.size() == 2) {
    p = AlphaPrior::gamma(v[0], v[1]);
  } else if (name == "uniform" && v.size() == 1) {
    p = AlphaPrior::uniform(v[0]);
  } else if (name == "levy" && v.empty()) {
    p = AlphaPrior::levy();
  } else {
    throw ParameterError("bad alpha prior '" + text +
                         "' (expected exp:r, gamma:a,b, uniform:u or levy)");
  }
  p.validate();
  return p;
}

std::string to_string(const AlphaPrior& prior) {
  switch (prior.kind) {
    case AlphaPrior::Kind::Exponential: return "exp:" + format_real(prior.a);
    case AlphaPrior::Kind::Gamma: return "gamma:" + format_real(prior.a) + "," + format_real(prior.b);
    case AlphaPrior::Kind::Uniform: return "uniform:" + format_real(prior.a);
    case AlphaPrior::Kind::Levy: return "levy";
  }
  return "?";
}

void FitConfig::validate() const {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (beta && !(*beta > 0.0)) throw ParameterError("beta must be positive (or auto)");
  if (!(alpha1 > 0.0) || !(beta1 > 0.0)) throw ParameterError("alpha1 and beta1 must be positive");
  if (!(alpha_zeta > 0.0) || !(alpha_psi > 0.0)) {
    throw ParameterError("alpha_zeta and alpha_psi must be positive");
  }
  parse_alpha_prior(alpha_prior);
  parse_model_prior(model_prior);
  if (!(eta > 0.0 && eta < 0.5)) throw ParameterError("eta must lie in (0, 1/2)");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw ParameterError("burn-in fraction must lie in [0, 1)");
  }
  if (iterations == 0 || burn_in() >= iterations) {
    throw ParameterError("iterations must exceed the burn-in");
  }
  for (double l : levels) {
    if (!(l > 0.0 && l < 1.0)) throw ParameterError("band level " + format_real(l) + " outside (0,1)");
  }
  if (period && !(*period > 0.0)) throw ParameterError("period must be positive");
  if (horizon && !(*horizon > 0.0)) throw ParameterError("horizon must be positive");
  if (grid.mode == GridSpec::Mode::EBayes && !beta) {
    throw ConfigError("ebayes bin selection needs a numeric beta, not auto");
  }
  if (method == FitMethod::Rj && !beta) throw ConfigError("rj needs a numeric beta, not auto");
}

std::size_t FitConfig::burn_in() const {
  return static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(iterations)));
}

std::vector<double> ChainTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ParameterError("chain has no column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = values[r * columns.size() + c];
  return out;
}

Diagnostics compute_diagnostics(const std::string& name, const std::vector<double>& series,
                                std::size_t max_lag) {
  Diagnostics d;
  d.monitored = name;
  if (series.empty()) return d;
  auto sorted = series;
  std::sort(sorted.begin(), sorted.end());
  TraceSummary s;
  double sum = 0.0;
  for (double v : series) sum += v;
  s.mean = sum / static_cast<double>(series.size());
  double ss = 0.0;
  for (double v : series) ss += (v - s.mean) * (v - s.mean);
  s.sd = series.size() > 1 ? std::sqrt(ss / static_cast<double>(series.size() - 1)) : 0.0;
  s.q025 = sorted_quantile(sorted, 0.025);
  s.median = sorted_quantile(sorted, 0.5);
  s.q975 = sorted_quantile(sorted, 0.975);
  d.trace = s;
  if (series.size() > 1) {
    const auto acf = autocorrelation(series, std::min(max_lag, series.size() - 1));
    d.acf.assign(acf.begin() + 1, acf.end());
  }
  d.ess = effective_sample_size(series);
  return d;
}

FitResult run_fit(const EventSeries& input, const FitConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  FitResult result;
  FitReport& rep = result.report;
  rep.config = config;

  const EventSeries data = config.period ? fold_periodic(input, *config.period) : input;
  rep.horizon = data.horizon();
  rep.replicates = data.replicate_count();
  rep.total_events = data.total_events();

  std::size_t bins = 0;
  switch (config.grid.mode) {
    case GridSpec::Mode::Explicit: bins = config.grid.bins; break;
    case GridSpec::Mode::Rule: bins = rule_of_thumb_bins(data); break;
    case GridSpec::Mode::EBayes: {
      const auto range = config.grid.last == 0 ? default_bin_candidates(data)
                                               : BinCandidates{config.grid.first, config.grid.last};
      auto sel = select_bins_empirical_bayes(data, {config.alpha, *config.beta}, range);
      bins = sel.best;
      rep.bin_profile = std::move(sel.profile);
      break;
    }
  }
  const auto grid = BinGrid::uniform(data.horizon(), bins);
  const auto counts = bin_events(data, grid);

  const bool stochastic = config.method != FitMethod::Conjugate;
  if (stochastic) {
    if (config.seed) {
      rep.seed = config.seed;
    } else {
      std::random_device rd;
      rep.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
      rep.warnings.push_back("no seed given; drew seed " + std::to_string(*rep.seed));
    }
  }

  PosteriorBand band{grid, {}, {}};
  switch (config.method) {
    case FitMethod::Conjugate: {
      const double beta = config.beta ? *config.beta : calibrate_beta(counts, config.alpha);
      rep.beta_used = beta;
      band = credible_band(fit_conjugate(counts, {config.alpha, beta}), config.levels);
      break;
    }
    case FitMethod::Gmc: {
      GmcHyperparams hp;
      hp.alpha1 = config.alpha1;
      hp.beta1 = config.beta1;
      hp.alpha_zeta = config.alpha_zeta;
      hp.alpha_psi = config.alpha_psi;
      hp.tie_alpha = config.tie_alpha;
      hp.alpha_prior = parse_alpha_prior(config.alpha_prior);
      GmcRunOptions opts;
      opts.iterations = config.iterations;
      opts.burn_in = config.burn_in();
      RngStream rng(*rep.seed);
      const auto chain = run_gmc(counts, hp, opts, rng);
      band = summarize_chain(chain, grid, config.levels);

      auto& table = result.chain;
      if (hp.tie_alpha) table.columns.emplace_back("alpha");
      for (std::size_t k = 0; k < bins; ++k) table.columns.push_back("psi_" + std::to_string(k + 1));
      table.values.reserve(chain.kept() * table.columns.size());
      for (std::size_t r = 0; r < chain.kept(); ++r) {
        if (hp.tie_alpha) table.values.push_back(chain.alpha_samples[r]);
        for (std::size_t k = 0; k < bins; ++k) table.values.push_back(chain.psi(r, k));
      }
      if (hp.tie_alpha) {
        rep.diagnostics = compute_diagnostics("alpha", chain.alpha_samples);
        if (bins > 1) rep.diagnostics.acceptance_rate = chain.acceptance_rate();
      } else {
        const std::size_t mid = bins / 2;
        rep.diagnostics = compute_diagnostics("psi_" + std::to_string(mid + 1), chain.psi_column(mid));
      }
      break;
    }
    case FitMethod::Rj: {
      RjConfig rj;
      rj.eta = config.eta;
      rj.prior_on_psi = {config.alpha, *config.beta};
      rj.model_prior = parse_model_prior(config.model_prior);
      rj.iterations = config.iterations;
      rj.burn_in = config.burn_in();
      rj.seed = *rep.seed;
      rj.draw_psi = true;
      const auto out = run_rj(data, rj);
      band = summarize_model_mixture(out, data.horizon(), bins, config.levels);
      for (std::size_t n = 1; n <= out.frequencies.size(); ++n) {
        rep.model_frequencies.emplace_back(n, out.frequencies[n - 1]);
      }
      std::vector<double> kept(out.trace.begin() + static_cast<std::ptrdiff_t>(out.burn_in),
                               out.trace.end());
      result.chain.columns = {"N"};
      result.chain.values = kept;
      rep.diagnostics = compute_diagnostics("N", kept);
      rep.diagnostics.acceptance_rate =
          static_cast<double>(out.accepted) / static_cast<double>(out.trace.size());
      break;
    }
  }
  rep.edges = band.grid.edges();
  rep.mean = band.mean;
  rep.bands = band.levels;
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

Json config_to_json(const FitConfig& c) {
  Json j;
  j["method"] = to_string(c.method);
  j["bins"] = c.grid.to_string();
  j["alpha"] = c.alpha;
  j["beta"] = c.beta ? Json(*c.beta) : Json("auto");
  j["alpha1"] = c.alpha1;
  j["beta1"] = c.beta1;
  j["alpha_prior"] = c.alpha_prior;
  j["tie_alpha"] = c.tie_alpha;
  j["alpha_zeta"] = c.alpha_zeta;
  j["alpha_psi"] = c.alpha_psi;
  j["eta"] = c.eta;
  j["model_prior"] = c.model_prior;
  j["iterations"] = c.iterations;
  j["burn_in_fraction"] = c.burn_in_fraction;
  j["seed"] = opt(c.seed);
  j["levels"] = c.levels;
  j["period"] = opt(c.period);
  j["horizon"] = opt(c.horizon);
  return j;
}

FitConfig config_from_json(const Json& j) {
  FitConfig c;
  c.method = parse_fit_method(j.at("method").get<std::string>());
  c.grid = GridSpec::parse(j.at("bins").get<std::string>());
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").is_string() ? std::nullopt : std::optional<double>(j.at("beta").get<double>());
  c.alpha1 = j.at("alpha1").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.alpha_prior = j.at("alpha_prior").get<std::string>();
  c.tie_alpha = j.at("tie_alpha").get<bool>();
  c.alpha_zeta = j.at("alpha_zeta").get<double>();
  c.alpha_psi = j.at("alpha_psi").get<double>();
  c.eta = j.at("eta").get<double>();
  c.model_prior = j.at("model_prior").get<std::string>();
  c.iterations = j.at("iterations").get<std::size_t>();
  c.burn_in_fraction = j.at("burn_in_fraction").get<double>();
  c.seed = get_opt<std::uint64_t>(j, "seed");
  c.levels = j.at("levels").get<std::vector<double>>();
  c.period = get_opt<double>(j, "period");
  c.horizon = get_opt<double>(j, "horizon");
  return c;
}

}  // namespace

std::string report_to_json(const FitReport& r) {
  Json j;
  j["config"] = config_to_json(r.config);
  j["horizon"] = r.horizon;
  j["horizon_from_data"] = r.horizon_from_data;
  j["replicates"] = r.replicates;
  j["total_events"] = r.total_events;
  j["bins"] = r.bins();
  j["edges"] = r.edges;
  j["mean"] = r.mean;
  Json bands = Json::array();
  for (const auto& b : r.bands) bands.push_back({{"level", b.level}, {"lower", b.lower}, {"upper", b.upper}});
  j["bands"] = bands;
  j["beta_used"] = opt(r.beta_used);
  Json profile = Json::array();
  for (const auto& [n, lml] : r.bin_profile) profile.push_back({{"N", n}, {"log_ml", lml}});
  j["bin_profile"] = profile;
  Json freq = Json::array();
  for (const auto& [n, count] : r.model_frequencies) freq.push_back({{"N", n}, {"count", count}});
  j["model_frequencies"] = freq;
  Json d;
  d["monitored"] = r.diagnostics.monitored;
  d["acceptance_rate"] = opt(r.diagnostics.acceptance_rate);
  if (r.diagnostics.trace) {
    const auto& t = *r.diagnostics.trace;
    d["trace"] = {{"mean", t.mean}, {"sd", t.sd}, {"q025", t.q025}, {"median", t.median}, {"q975", t.q975}};
  } else {
    d["trace"] = nullptr;
  }
  d["acf"] = r.diagnostics.acf;
  d["ess"] = opt(r.diagnostics.ess);
  j["diagnostics"] = d;
  j["warnings"] = r.warnings;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["seed"] = opt(r.seed);
  return j.dump(2) + "\n";
}

FitReport report_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
  try {
    FitReport r;
    r.config = config_from_json(j.at("config"));
    r.horizon = j.at("horizon").get<double>();
    r.horizon_from_data = j.at("horizon_from_data").get<bool>();
    r.replicates = j.at("replicates").get<std::size_t>();
    r.total_events = j.at("total_events").get<std::size_t>();
    r.edges = j.at("edges").get<std::vector<double>>();
    r.mean = j.at("mean").get<std::vector<double>>();
    for (const auto& b : j.at("bands")) {
      r.bands.push_back({b.at("level").get<double>(), b.at("lower").get<std::vector<double>>(),
                         b.at("upper").get<std::vector<double>>()});
    }
    r.beta_used = get_opt<double>(j, "beta_used");
    for (const auto& p : j.at("bin_profile")) {
      r.bin_profile.emplace_back(p.at("N").get<std::size_t>(), p.at("log_ml").get<double>());
    }
    for (const auto& f : j.at("model_frequencies")) {
      r.model_frequencies.emplace_back(f.at("N").get<std::size_t>(), f.at("count").get<std::size_t>());
    }
    const auto& d = j.at("diagnostics");
    r.diagnostics.monitored = d.at("monitored").get<std::string>();
    r.diagnostics.acceptance_rate = get_opt<double>(d, "acceptance_rate");
    if (!d.at("trace").is_null()) {
      const auto& t = d.at("trace");
      r.diagnostics.trace = TraceSummary{t.at("mean").get<double>(), t.at("sd").get<double>(),
                                         t.at("q025").get<double>(), t.at("median").get<double>(),
                                         t.at("q975").get<double>()};
    }
    r.diagnostics.acf = d.at("acf").get<std::vector<double>>();
    r.diagnostics.ess = get_opt<double>(d, "ess");
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.elapsed_seconds = j.at("elapsed_seconds").get<double>();
    r.seed = get_opt<std::uint64_t>(j, "seed");
    return r;
  } catch (const Json::exception& e) {
    throw DataError(std::string("invalid report JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV report

void write_report_csv(std::ostream& out, const FitReport& r) {
  out << "bin_index,edge_lo,edge_hi,mean";
  for (const auto& b : r.bands) out << ",lo_" << format_real(b.level) << ",hi_" << format_real(b.level);
  out << '\n';
  for (std::size_t k = 0; k < r.mean.size(); ++k) {
    out << (k + 1) << ',' << format_real(r.edges[k]) << ',' << format_real(r.edges[k + 1]) << ','
        << format_real(r.mean[k]);
    for (const auto& b : r.bands) out << ',' << format_real(b.lower[k]) << ',' << format_real(b.upper[k]);
    out << '\n';
  }
}

FitReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("report CSV is empty");
  const auto header = split_trim(line, ',');
  if (header.size() < 4 || header[0] != "bin_index" || header[1] != "edge_lo" ||
      header[2] != "edge_hi" || header[3] != "mean" || (header.size() - 4) % 2 != 0) {
    throw DataError("report CSV header must start with bin_index,edge_lo,edge_hi,mean");
  }
  FitReport r;
  for (std::size_t c = 4; c < header.size(); c += 2) {
    if (header[c].rfind("lo_", 0) != 0 || header[c + 1] != "hi_" + header[c].substr(3)) {
      throw DataError("report CSV band columns must come in lo_<level>,hi_<level> pairs");
    }
    r.bands.push_back({parse_real(header[c].substr(3), "band level"), {}, {}});
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto f = split_trim(line, ',');
    if (f.size() != header.size()) {
      throw DataError("report CSV line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    try {
      if (parse_count(f[0], "bin index") != r.mean.size() + 1) {
        throw DataError("report CSV line " + std::to_string(lineno) + ": bins out of order");
      }
      if (r.edges.empty()) r.edges.push_back(parse_real(f[1], "edge_lo"));
      r.edges.push_back(parse_real(f[2], "edge_hi"));
      r.mean.push_back(parse_real(f[3], "mean"));
      for (std::size_t b = 0; b < r.bands.size(); ++b) {
        r.bands[b].lower.push_back(parse_real(f[4 + 2 * b], "band lower"));
        r.bands[b].upper.push_back(parse_real(f[5 + 2 * b], "band upper"));
      }
    } catch (const ParameterError& e) {
      throw DataError("report CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!r.edges.empty()) r.horizon = r.edges.back();
  return r;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw ParameterError("unknown report format '" + name + "' (expected json or csv)");
}

void write_report(const FitReport& report, const std::string& path, ReportFormat format,
                  std::ostream& stdout_stream) {
  auto emit = [&](std::ostream& out) {
    if (format == ReportFormat::Json) {
      out << report_to_json(report);
    } else {
      write_report_csv(out, report);
    }
  };
  if (path == "-") {
    emit(stdout_stream);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  emit(out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed: " + std::strerror(errno));
}

FitReport read_report(const std::string& path, ReportFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
  if (format == ReportFormat::Csv) return read_report_csv(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

// ---------------------------------------------------------------------------
// Chains

void write_chain_csv(std::ostream& out, const ChainTable& chain) {
  for (std::size_t c = 0; c < chain.columns.size(); ++c) {
    out << (c ? "," : "") << chain.columns[c];
  }
  out << '\n';
  const std::size_t w = chain.columns.size();
  for (std::size_t r = 0; r < chain.rows(); ++r) {
    for (std::size_t c = 0; c < w; ++c) out << (c ? "," : "") << format_real(chain.values[r * w + c]);
    out << '\n';
  }
}

ChainTable read_chain_csv(std::istream& in, const std::string& source) {
  ChainTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    if (t.columns.empty()) {
      t.columns = split_trim(line, ',');
      continue;
    }
    const auto f = split_trim(line, ',');
    if (f.size() != t.columns.size()) {
      throw DataError(where(source, lineno) + "expected " + std::to_string(t.columns.size()) +
                      " fields, got " + std::to_string(f.size()));
    }
    for (const auto& v : f) {
      try {
        t.values.push_back(parse_real(v, "chain value"));
      } catch (const ParameterError& e) {
        throw DataError(where(source, lineno) + e.what());
      }
    }
  }
  if (t.columns.empty()) throw DataError(source + ": chain file is empty");
  return t;
}

}  // namespace ppinfer
