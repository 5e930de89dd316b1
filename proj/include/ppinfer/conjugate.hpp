#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ppinfer/events.hpp"
#include "ppinfer/random.hpp"

namespace ppinfer {

/// psi_k i.i.d. G(shape, rate).
struct IndepGammaPrior {
  double shape = 0.1;
  double rate = 0.1;

  void validate() const;
};

/// Product of per-bin gamma laws G(alpha + H_k, beta + n Delta_k).
struct IndepGammaPosterior {
  BinGrid grid;
  std::vector<GammaParams> bins;

  /// One joint draw of (psi_1, ..., psi_N).
  [[nodiscard]] PiecewiseIntensity sample(RngStream& rng) const;
};

struct BandLevel {
  double level = 0.95;
  std::vector<double> lower;
  std::vector<double> upper;

  friend bool operator==(const BandLevel&, const BandLevel&) = default;
};

/// Pointwise mean with lower/upper curves at each credibility level.
struct PosteriorBand {
  BinGrid grid;
  std::vector<double> mean;
  std::vector<BandLevel> levels;

  [[nodiscard]] PiecewiseIntensity mean_intensity() const { return {grid, mean}; }
};

IndepGammaPosterior fit_conjugate(const BinnedCounts& counts, const IndepGammaPrior& prior);

/// psi_hat_k = (H_k + alpha) / (n Delta_k + beta).
PiecewiseIntensity posterior_mean(const IndepGammaPosterior& post);

/// Equal-tailed marginal bands from the exact gamma quantiles of each bin.
PosteriorBand credible_band(const IndepGammaPosterior& post, const std::vector<double>& levels);

/*!
 * Log marginal likelihood of the binned data under the independent gamma prior:
 *
 *   Tn + N (alpha ln beta - lnGamma(alpha))
 *      + sum_k [lnGamma(alpha + H_k) - (alpha + H_k) ln(n Delta_k + beta)].
 *
 * The Tn term does not depend on N; pass include_tn = false to drop it.
 */
double log_marginal_likelihood(const BinnedCounts& counts, const IndepGammaPrior& prior,
                               bool include_tn = true);

struct BinCandidates {
  std::size_t first = 1;
  std::size_t last = 1;
};

/// 1 .. min(200, H), never empty.
BinCandidates default_bin_candidates(const EventSeries& data);

struct BinSelection {
  std::size_t best = 1;
  std::vector<std::pair<std::size_t, double>> profile;
};

/// Maximises the log marginal likelihood over uniform grids; ties go to the smaller N.
BinSelection select_bins_empirical_bayes(const EventSeries& data, const IndepGammaPrior& prior,
                                         BinCandidates candidates);

/*!
 * Rate beta solving alpha / beta = mean_k (H_k + alpha) / (n Delta_k + beta),
 * i.e. the prior mean equals the average posterior mean. The root is unique;
 * all-zero counts have no informative root and raise ConfigError.
 */
double calibrate_beta(const BinnedCounts& counts, double alpha);

/// alpha / beta - mean_k (H_k + alpha) / (n Delta_k + beta).
double beta_equation_residual(const BinnedCounts& counts, double alpha, double beta);

}  // namespace ppinfer
