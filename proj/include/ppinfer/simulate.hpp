#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ppinfer/conjugate.hpp"
#include "ppinfer/events.hpp"
#include "ppinfer/random.hpp"

namespace ppinfer {

/// Closed-form test intensity on [0, T] with a known upper bound.
struct NamedIntensity {
  std::string name;
  double horizon = 1.0;
  std::function<double(double)> fn;
  double lambda_max = 0.0;
  /// Closed-form integral over [0, T], when one is known.
  std::optional<double> integral;

  [[nodiscard]] double operator()(double x) const { return fn(x); }
  /// Checks lambda >= 0 and lambda <= lambda_max on a uniform grid of `points` nodes.
  void validate(std::size_t points = 10001) const;
};

/// 2 exp(-x/5) (5 + 4 cos x) on [0, 10].
NamedIntensity oscillating_exponential();
/// 0.5 phi(x; 3, 1) + 0.1 sum_{j=0..4} phi(x; j/2 + 2, 0.1) on [0, 6].
NamedIntensity bart_simpson();
/// 2 + 0.2 sin(30 x) + 1{x >= 0.7} on [0, 1].
NamedIntensity step_sine();
NamedIntensity constant_intensity(double c, double horizon = 1.0);
/// a + b x; must stay nonnegative on [0, T].
NamedIntensity linear_intensity(double a, double b, double horizon = 1.0);
NamedIntensity step_intensity(const PiecewiseIntensity& steps);

/*!
 * Builds an intensity from a textual spec:
 *   oscillating_exponential | bart_simpson | step_sine
 *   constant:c[,T] | linear:a,b[,T] | step:T;h1,h2,...
 */
NamedIntensity parse_intensity(const std::string& spec);

/// Composite 10-point Gauss-Legendre rule on `panels` equal panels of [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels = 64);

/// Lewis-Shedler thinning; one independent pattern per replicate.
EventSeries simulate_poisson(RngStream& rng, const NamedIntensity& intensity, std::size_t n);

/// Dominating process together with its thinned and complementary parts.
struct ThinningSplit {
  EventSeries parent;
  EventSeries kept;
  EventSeries rejected;
};

ThinningSplit simulate_thinning_split(RngStream& rng, const NamedIntensity& intensity,
                                      std::size_t n);

/// N = round(c n^{1/(2h+1)}), at least 1.
std::size_t scaled_bin_count(std::size_t n, double h, double c = 1.0);

/// ||lambda - lambda_bar||_2^2 where lambda_bar is the bin average of lambda on `grid`.
double squared_projection_bias(const NamedIntensity& intensity, const BinGrid& grid);

struct ExperimentRow {
  std::size_t n = 0;
  std::size_t bins = 0;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
};

struct MseOptions {
  std::vector<std::size_t> sample_sizes;
  double h = 1.0;
  std::size_t replications = 50;
  double c = 1.0;
  /// Overrides the scaled bin count for every n.
  std::optional<std::size_t> fixed_bins;
  IndepGammaPrior prior{0.1, 0.1};
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Rows "mse" and "mse_se" per sample size.
std::vector<ExperimentRow> mse_experiment(const NamedIntensity& intensity, const MseOptions& opts);

struct ContractionOptions {
  std::vector<std::size_t> sample_sizes;
  double h = 1.0;
  double radius = 3.0;
  std::size_t posterior_draws = 1000;
  std::size_t datasets = 1;
  double c = 1.0;
  IndepGammaPrior prior{0.1, 0.1};
  std::uint64_t seed = 0;
};

/*!
 * Per sample size and dataset, the share of posterior draws with
 * ||lambda - lambda_0||_2 >= radius * n^{-h/(2h+1)} (metric "mass_outside:<d>"),
 * then the mean over datasets (metric "mass_outside").
 */
std::vector<ExperimentRow> contraction_experiment(const NamedIntensity& intensity,
                                                  const ContractionOptions& opts);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

}  // namespace ppinfer
