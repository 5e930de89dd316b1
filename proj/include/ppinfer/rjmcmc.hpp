#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "ppinfer/conjugate.hpp"
#include "ppinfer/events.hpp"
#include "ppinfer/random.hpp"

namespace ppinfer {

/// Prior probabilities pi_N on the model index N in 1..Nmax.
class ModelIndexPrior {
 public:
  enum class Kind { DiscreteUniform, ShiftedPoisson };

  static ModelIndexPrior discrete_uniform(std::size_t nmax);
  /// Poisson(mean) restricted to {1, ..., nmax} and renormalised.
  static ModelIndexPrior shifted_poisson(double mean, std::size_t nmax);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::size_t nmax() const { return log_mass_.size(); }
  [[nodiscard]] double mean() const { return mean_; }
  /// log pi_N; throws DomainError outside 1..Nmax.
  [[nodiscard]] double log_mass(std::size_t n) const;

 private:
  ModelIndexPrior(Kind kind, double mean, std::vector<double> log_mass);

  Kind kind_;
  double mean_;
  std::vector<double> log_mass_;
};

struct RjConfig {
  /// Probability of each neighbouring move away from the boundaries; 0 < eta < 1/2.
  double eta = 0.45;
  IndepGammaPrior prior_on_psi{0.1, 0.1};
  ModelIndexPrior model_prior = ModelIndexPrior::discrete_uniform(50);
  std::size_t iterations = 30000;
  std::size_t burn_in = 15000;
  std::uint64_t seed = 0;
  /// Starting model; defaults to the rule-of-thumb bin count capped at Nmax.
  std::optional<std::size_t> initial_model;
  /// Draw psi^(N) from its conditional posterior at every kept iteration.
  bool draw_psi = false;
  bool memoize = true;

  void validate() const;
};

struct RjOutput {
  /// Model index after every iteration, burn-in included.
  std::vector<std::size_t> trace;
  std::size_t burn_in = 0;
  std::size_t accepted = 0;
  /// counts[N - 1] = number of kept iterations spent in model N.
  std::vector<std::size_t> frequencies;
  /// R(N) for every model that was evaluated (NaN when never visited).
  std::vector<double> cached_scores;
  std::size_t score_evaluations = 0;
  /// One psi draw per kept iteration when draw_psi is on.
  std::vector<std::vector<double>> psi_draws;

  [[nodiscard]] std::size_t kept() const { return trace.size() - burn_in; }
  [[nodiscard]] std::vector<std::pair<std::size_t, double>> relative_frequencies() const;
};

/// R(N) = log ML_N + log pi_N.
double log_model_score(const EventSeries& data, std::size_t n, const RjConfig& cfg);

/// Proposal probability q(to | from) of the nearest-neighbour model walk.
double proposal_probability(std::size_t from, std::size_t to, double eta,
                            std::size_t nmax = std::numeric_limits<std::size_t>::max());

/// log q(from | to) - log q(to | from); both boundaries are mirrored.
double proposal_log_ratio(std::size_t from, std::size_t to, double eta,
                          std::size_t nmax = std::numeric_limits<std::size_t>::max());

/*!
 * One model-walk step from `current` under log scores `score(N)`: propose a
 * neighbour, then accept iff log U < R(N') - R(N) + proposal_log_ratio.
 * Returns the new index; `moved` reports an accepted move to a different model.
 */
std::size_t rj_transition(RngStream& rng, std::size_t current, double eta, std::size_t nmax,
                          const std::function<double(std::size_t)>& score, bool& moved);

RjOutput run_rj(const EventSeries& data, const RjConfig& cfg);

/// Exact posterior over 1..Nmax by enumeration of R(N).
std::vector<std::pair<std::size_t, double>> exact_model_posterior(const EventSeries& data,
                                                                  const RjConfig& cfg);

/// Averages step-function draws living on different grids over a common uniform grid.
PosteriorBand summarize_model_mixture(const RjOutput& out, double horizon, std::size_t report_bins,
                                      const std::vector<double>& levels);

}  // namespace ppinfer
