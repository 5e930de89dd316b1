#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ppinfer/conjugate.hpp"
#include "ppinfer/events.hpp"
#include "ppinfer/random.hpp"

namespace ppinfer {

/// Prior on the tied chain coupling alpha = alpha_zeta = alpha_psi.
struct AlphaPrior {
  enum class Kind { Exponential, Gamma, Uniform, Levy };

  Kind kind = Kind::Exponential;
  /// Exponential: rate. Gamma: shape. Uniform: upper bound. Levy: unused.
  double a = 0.1;
  /// Gamma: rate. Otherwise unused.
  double b = 0.0;

  static AlphaPrior exponential(double rate) { return {Kind::Exponential, rate, 0.0}; }
  static AlphaPrior gamma(double shape, double rate) { return {Kind::Gamma, shape, rate}; }
  static AlphaPrior uniform(double upper) { return {Kind::Uniform, upper, 0.0}; }
  /// Standard Levy law, i.e. IG(1/2, 1/2).
  static AlphaPrior levy() { return {Kind::Levy, 0.0, 0.0}; }

  void validate() const;
  /// Normalised log density at alpha > 0 (-infinity outside the support).
  [[nodiscard]] double log_density(double alpha) const;
  [[nodiscard]] double sample(RngStream& rng) const;
};

struct GmcHyperparams {
  double alpha1 = 0.1;
  double beta1 = 0.1;
  /// Fixed couplings when tie_alpha is off; starting value of alpha otherwise.
  double alpha_zeta = 1.0;
  double alpha_psi = 1.0;
  bool tie_alpha = true;
  AlphaPrior alpha_prior = AlphaPrior::exponential(0.1);

  void validate() const;
};

/// Sampler state. zeta[i] holds zeta_{i+2}, so zeta.size() == psi.size() - 1.
struct GmcState {
  std::vector<double> psi;
  std::vector<double> zeta;
  double alpha_zeta = 1.0;
  double alpha_psi = 1.0;
  /// Random-walk standard deviation on log(alpha).
  double mwg_log_step = 0.5;
  RngStream rng;

  /// Tied alpha (equal to both couplings when tie_alpha is on).
  [[nodiscard]] double alpha() const { return alpha_zeta; }
};

/// Draw (psi, zeta) from the gamma Markov chain prior on `grid`.
std::pair<PiecewiseIntensity, std::vector<double>> sample_gmc_prior(RngStream& rng,
                                                                    const GmcHyperparams& hp,
                                                                    const BinGrid& grid);

// Full conditionals of the Gibbs sampler.

/// zeta_k | psi_{k-1}, psi_k ~ IG(a_zeta + a_psi, a_zeta psi_{k-1} + a_psi psi_k).
InvGammaParams zeta_conditional(double alpha_zeta, double alpha_psi, double psi_prev, double psi);
/// psi_1 | zeta_2 ~ G(alpha1 + a_zeta + H_1, beta1 + a_zeta / zeta_2 + n Delta_1).
GammaParams psi_first_conditional(double alpha1, double beta1, double alpha_zeta, double zeta_next,
                                  double count, double exposure);
/// psi_k | zeta_k, zeta_{k+1} ~ G(a_psi + a_zeta + H_k, a_psi / zeta_k + a_zeta / zeta_{k+1} + n Delta_k).
GammaParams psi_interior_conditional(double alpha_psi, double alpha_zeta, double zeta,
                                     double zeta_next, double count, double exposure);
/// psi_N | zeta_N ~ G(a_psi + H_N, a_psi / zeta_N + n Delta_N).
GammaParams psi_last_conditional(double alpha_psi, double zeta, double count, double exposure);

/*!
 * One Gibbs sweep: every zeta (k = 2..N) given the current psi, then every
 * psi given the fresh zeta. With N = 1 the single coefficient is drawn from
 * G(alpha1 + H_1, beta1 + n Delta_1).
 */
void gibbs_sweep(GmcState& state, const BinnedCounts& counts, const GmcHyperparams& hp);

/*!
 * Unnormalised log full conditional of log(alpha) for the tied chain:
 *
 *   a~ + log pi(e^a~) + 2(N-1)[alpha log alpha - lnGamma(alpha)]
 *      + alpha sum_k [ln psi_{k-1} + ln psi_k - 2 ln zeta_k - (psi_{k-1} + psi_k) / zeta_k].
 */
double log_alpha_target(double log_alpha, const std::vector<double>& psi,
                        const std::vector<double>& zeta, const AlphaPrior& prior);

/// Metropolis-within-Gibbs random-walk update of log(alpha). Returns true on acceptance.
bool mwg_alpha_update(GmcState& state, const GmcHyperparams& hp);

struct GmcRunOptions {
  std::size_t iterations = 30000;
  std::size_t burn_in = 15000;
  std::optional<PiecewiseIntensity> init;
  double initial_log_step = 0.5;
  /// Robbins-Monro adaptation of the step during burn-in.
  bool adapt_step = true;
  double target_acceptance = 0.35;
};

struct ChainOutput {
  std::size_t bins = 0;
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  /// Row-major (kept iteration x bin).
  std::vector<double> psi_samples;
  /// Tied alpha per kept iteration (empty when tie_alpha is off).
  std::vector<double> alpha_samples;
  std::size_t mwg_proposed = 0;
  std::size_t mwg_accepted = 0;
  std::size_t burn_in_proposed = 0;
  std::size_t burn_in_accepted = 0;
  double final_log_step = 0.0;

  [[nodiscard]] std::size_t kept() const { return iterations - burn_in; }
  [[nodiscard]] double psi(std::size_t row, std::size_t k) const { return psi_samples[row * bins + k]; }
  [[nodiscard]] std::vector<double> psi_column(std::size_t k) const;
  /// Post-burn-in MwG acceptance rate (0 when no proposals were made).
  [[nodiscard]] double acceptance_rate() const;

  friend bool operator==(const ChainOutput&, const ChainOutput&) = default;
};

/*!
 * Runs the GMC sampler. Unless `opts.init` is given, psi starts from one draw
 * of the independent gamma posterior with alpha = beta = 0.1.
 */
ChainOutput run_gmc(const EventSeries& data, const BinGrid& grid, const GmcHyperparams& hp,
                    const GmcRunOptions& opts, RngStream& rng);
ChainOutput run_gmc(const BinnedCounts& counts, const GmcHyperparams& hp, const GmcRunOptions& opts,
                    RngStream& rng);

/// min(cap, nearest integer to H / 4), at least 1. Halves round away from zero.
std::size_t rule_of_thumb_bins(const EventSeries& data, std::size_t cap = 50);
std::size_t rule_of_thumb_bins(std::size_t total_events, std::size_t cap = 50);

/// Pointwise mean and type-7 empirical quantile bands of the kept psi samples.
PosteriorBand summarize_chain(const ChainOutput& out, const BinGrid& grid,
                              const std::vector<double>& levels);

/// Type-7 (linear interpolation) quantile of an ascending-sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double prob);

/// Biased sample autocorrelation for lags 0..max_lag; constant input gives 1, 0, 0, ...
std::vector<double> autocorrelation(const std::vector<double>& series, std::size_t max_lag);

/// Effective sample size from Geyer's initial monotone positive-pair sequence.
double effective_sample_size(const std::vector<double>& series);

/// Batch-means standard error of the sample mean.
double batch_means_se(const std::vector<double>& series, std::size_t batches = 50);

}  // namespace ppinfer
