#include "ppinfer/simulate.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include "ppinfer/error.hpp"
#include "ppinfer/text.hpp"

namespace ppinfer {

namespace {

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

}  // namespace

void NamedIntensity::validate(std::size_t points) const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ParameterError("intensity '" + name + "' needs a positive horizon");
  }
  if (!(lambda_max >= 0.0) || !std::isfinite(lambda_max)) {
    throw ParameterError("intensity '" + name + "' needs a finite nonnegative lambda_max");
  }
  for (std::size_t i = 0; i < points; ++i) {
    const double x = horizon * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = fn(x);
    if (!(v >= 0.0) || v > lambda_max) {
      throw ParameterError("intensity '" + name + "' takes value " + format_real(v) + " at x = " +
                           format_real(x) + ", outside [0, lambda_max]");
    }
  }
}

NamedIntensity oscillating_exponential() {
  constexpr double T = 10.0;
  constexpr double a = 0.2;
  // 10 int e^{-ax} + 8 int e^{-ax} cos x over [0, T].
  const double exp_part = (1.0 - std::exp(-a * T)) / a;
  const double cos_part = (std::exp(-a * T) * (std::sin(T) - a * std::cos(T)) + a) / (a * a + 1.0);
  return {"oscillating_exponential", T,
          [](double x) { return 2.0 * std::exp(-x / 5.0) * (5.0 + 4.0 * std::cos(x)); }, 18.0,
          10.0 * exp_part + 8.0 * cos_part};
}

NamedIntensity bart_simpson() {
  constexpr double T = 6.0;
  auto fn = [](double x) {
    double v = 0.5 * normal_pdf(x, 3.0, 1.0);
    for (int j = 0; j < 5; ++j) v += 0.1 * normal_pdf(x, j / 2.0 + 2.0, 0.1);
    return v;
  };
  double mass = 0.5 * (normal_cdf(T, 3.0, 1.0) - normal_cdf(0.0, 3.0, 1.0));
  for (int j = 0; j < 5; ++j) {
    mass += 0.1 * (normal_cdf(T, j / 2.0 + 2.0, 0.1) - normal_cdf(0.0, j / 2.0 + 2.0, 0.1));
  }
  // Peak value is about 0.5984 at x = 3.
  return {"bart_simpson", T, fn, 0.61, mass};
}

NamedIntensity step_sine() {
  auto fn = [](double x) { return 2.0 + 0.2 * std::sin(30.0 * x) + (x >= 0.7 ? 1.0 : 0.0); };
  const double integral = 2.0 + 0.2 * (1.0 - std::cos(30.0)) / 30.0 + 0.3;
  return {"step_sine", 1.0, fn, 3.2, integral};
}

NamedIntensity constant_intensity(double c, double horizon) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("constant intensity must be >= 0");
  return {"constant", horizon, [c](double) { return c; }, c, c * horizon};
}

NamedIntensity linear_intensity(double a, double b, double horizon) {
  const double end = a + b * horizon;
  if (!(a >= 0.0) || !(end >= 0.0)) {
    throw ParameterError("linear intensity a + b x must be nonnegative on [0, T]");
  }
  return {"linear", horizon, [a, b](double x) { return a + b * x; }, std::max(a, end),
          a * horizon + 0.5 * b * horizon * horizon};
}

NamedIntensity step_intensity(const PiecewiseIntensity& steps) {
  const auto& h = steps.heights();
  return {"step", steps.grid().horizon(), [steps](double x) { return steps.evaluate(x); },
          *std::max_element(h.begin(), h.end()), steps.integral()};
}

NamedIntensity parse_intensity(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name(trim(spec.substr(0, colon)));
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto numbers = [&](std::string_view text) {
    std::vector<double> v;
    if (trim(text).empty()) return v;
    for (const auto& p : split_trim(text, ',')) v.push_back(parse_real(p, "intensity parameter"));
    return v;
  };
  if (name == "oscillating_exponential" || name == "bart_simpson" || name == "step_sine") {
    if (!trim(args).empty()) throw ParameterError("intensity '" + name + "' takes no parameters");
    if (name == "oscillating_exponential") return oscillating_exponential();
    if (name == "bart_simpson") return bart_simpson();
    return step_sine();
  }
  if (name == "constant") {
    const auto v = numbers(args);
    if (v.empty() || v.size() > 2) throw ParameterError("usage: constant:c[,T]");
    return constant_intensity(v[0], v.size() == 2 ? v[1] : 1.0);
  }
  if (name == "linear") {
    const auto v = numbers(args);
    if (v.size() < 2 || v.size() > 3) throw ParameterError("usage: linear:a,b[,T]");
    return linear_intensity(v[0], v[1], v.size() == 3 ? v[2] : 1.0);
  }
  if (name == "step") {
    const auto semi = args.find(';');
    if (semi == std::string::npos) throw ParameterError("usage: step:T;h1,h2,...");
    const double horizon = parse_real(args.substr(0, semi), "step horizon");
    const auto heights = numbers(args.substr(semi + 1));
    if (heights.empty()) throw ParameterError("step intensity needs at least one height");
    return step_intensity({BinGrid::uniform(horizon, heights.size()), heights});
  }
  throw ParameterError("unknown intensity '" + name + "'");
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    total += Rule::integrate(f, lo, p + 1 == panels ? b : lo + width);
  }
  return total;
}

namespace {

// One dominating path per replicate, marked kept/rejected.
void thin_replicate(RngStream& rng, const NamedIntensity& intensity, std::vector<double>* parent,
                    std::vector<double>& kept, std::vector<double>* rejected) {
  const double lmax = intensity.lambda_max;
  double t = 0.0;
  while (true) {
    t += rng.exponential(lmax);
    if (t > intensity.horizon) break;
    const double u = rng.uniform();
    if (parent) parent->push_back(t);
    if (u * lmax <= intensity.fn(t)) {
      kept.push_back(t);
    } else if (rejected) {
      rejected->push_back(t);
    }
  }
}

}  // namespace

EventSeries simulate_poisson(RngStream& rng, const NamedIntensity& intensity, std::size_t n) {
  if (n == 0) throw ParameterError("simulate_poisson needs at least one replicate");
  if (!(intensity.lambda_max >= 0.0) || !std::isfinite(intensity.lambda_max)) {
    throw ParameterError("simulate_poisson needs a finite nonnegative lambda_max");
  }
  std::vector<std::vector<double>> reps(n);
  if (intensity.lambda_max > 0.0) {
    for (auto& r : reps) thin_replicate(rng, intensity, nullptr, r, nullptr);
  }
  return {intensity.horizon, std::move(reps)};
}

ThinningSplit simulate_thinning_split(RngStream& rng, const NamedIntensity& intensity,
                                      std::size_t n) {
  if (n == 0) throw ParameterError("simulate_thinning_split needs at least one replicate");
  std::vector<std::vector<double>> parent(n);
  std::vector<std::vector<double>> kept(n);
  std::vector<std::vector<double>> rejected(n);
  if (intensity.lambda_max > 0.0) {
    for (std::size_t j = 0; j < n; ++j) thin_replicate(rng, intensity, &parent[j], kept[j], &rejected[j]);
  }
  const double T = intensity.horizon;
  return {EventSeries(T, std::move(parent)), EventSeries(T, std::move(kept)),
          EventSeries(T, std::move(rejected))};
}

std::size_t scaled_bin_count(std::size_t n, double h, double c) {
  if (!(h > 0.0 && h <= 1.0)) throw ParameterError("regularity h must lie in (0, 1]");
  if (!(c > 0.0)) throw ParameterError("bin-count constant c must be positive");
  const double target = c * std::pow(static_cast<double>(n), 1.0 / (2.0 * h + 1.0));
  return static_cast<std::size_t>(std::max<long long>(1, std::llround(target)));
}

double squared_projection_bias(const NamedIntensity& intensity, const BinGrid& grid) {
  double total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double lo = grid.lower(k);
    const double hi = grid.upper(k);
    const double avg = integrate(intensity.fn, lo, hi) / (hi - lo);
    total += integrate([&](double x) { const double d = intensity.fn(x) - avg; return d * d; },
                       lo, hi);
  }
  return total;
}

namespace {

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw ParameterError("experiment needs at least one sample size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw ParameterError("sample sizes must be positive");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw ParameterError("sample sizes must increase");
  }
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += threads) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<ExperimentRow> mse_experiment(const NamedIntensity& intensity, const MseOptions& opts) {
  check_sizes(opts.sample_sizes);
  if (opts.replications < 2) throw ParameterError("mse_experiment needs at least 2 replications");
  opts.prior.validate();
  const RngStream root(opts.seed);
  std::vector<ExperimentRow> rows;
  for (std::size_t i = 0; i < opts.sample_sizes.size(); ++i) {
    const std::size_t n = opts.sample_sizes[i];
    const std::size_t bins = opts.fixed_bins.value_or(scaled_bin_count(n, opts.h, opts.c));
    const auto grid = BinGrid::uniform(intensity.horizon, bins);
    std::vector<double> err(opts.replications);
    parallel_for(opts.replications, opts.threads, [&](std::size_t r) {
      RngStream rng = root.split(i * opts.replications + r);
      const auto data = simulate_poisson(rng, intensity, n);
      const auto fit = posterior_mean(fit_conjugate(bin_events(data, grid), opts.prior));
      const double d = l2_distance(fit, intensity.fn);
      err[r] = d * d;
    });
    double mean = 0.0;
    for (double e : err) mean += e;
    mean /= static_cast<double>(err.size());
    double var = 0.0;
    for (double e : err) var += (e - mean) * (e - mean);
    var /= static_cast<double>(err.size() - 1);
    rows.push_back({n, bins, "mse", mean, opts.seed});
    rows.push_back({n, bins, "mse_se", std::sqrt(var / static_cast<double>(err.size())), opts.seed});
  }
  return rows;
}

std::vector<ExperimentRow> contraction_experiment(const NamedIntensity& intensity,
                                                  const ContractionOptions& opts) {
  check_sizes(opts.sample_sizes);
  if (opts.datasets == 0 || opts.posterior_draws == 0) {
    throw ParameterError("contraction_experiment needs datasets and draws");
  }
  if (!(opts.radius > 0.0)) throw ParameterError("radius multiplier must be positive");
  opts.prior.validate();
  const RngStream root(opts.seed);
  std::vector<ExperimentRow> rows;
  for (std::size_t i = 0; i < opts.sample_sizes.size(); ++i) {
    const std::size_t n = opts.sample_sizes[i];
    const std::size_t bins = scaled_bin_count(n, opts.h, opts.c);
    const auto grid = BinGrid::uniform(intensity.horizon, bins);
    const double eps = std::pow(static_cast<double>(n), -opts.h / (2.0 * opts.h + 1.0));
    double sum = 0.0;
    for (std::size_t d = 0; d < opts.datasets; ++d) {
      RngStream rng = root.split(i * opts.datasets + d);
      const auto data = simulate_poisson(rng, intensity, n);
      const auto post = fit_conjugate(bin_events(data, grid), opts.prior);
      std::size_t outside = 0;
      for (std::size_t s = 0; s < opts.posterior_draws; ++s) {
        if (l2_distance(post.sample(rng), intensity.fn) >= opts.radius * eps) ++outside;
      }
      const double mass = static_cast<double>(outside) / static_cast<double>(opts.posterior_draws);
      rows.push_back({n, bins, "mass_outside:" + std::to_string(d + 1), mass, opts.seed});
      sum += mass;
    }
    rows.push_back({n, bins, "mass_outside", sum / static_cast<double>(opts.datasets), opts.seed});
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("loglog_slope needs two equal-length series of length >= 2");
  }
  const auto m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - sx / m;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - sy / m);
  }
  return sxy / sxx;
}

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "n,N,metric,value,seed\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.bins << ',' << r.metric << ',' << format_real(r.value) << ',' << r.seed
        << '\n';
  }
}

}  // namespace ppinfer
