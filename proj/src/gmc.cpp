#include "ppinfer/gmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ppinfer/error.hpp"
#include "ppinfer/special.hpp"

namespace ppinfer {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void AlphaPrior::validate() const {
  switch (kind) {
    case Kind::Exponential:
    case Kind::Uniform:
      if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("alpha prior parameter must be positive");
      break;
    case Kind::Gamma:
      if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw ParameterError("gamma alpha prior needs positive shape and rate");
      }
      break;
    case Kind::Levy:
      break;
  }
}

double AlphaPrior::log_density(double alpha) const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) return kNegInf;
  switch (kind) {
    case Kind::Exponential:
      return std::log(a) - a * alpha;
    case Kind::Gamma:
      return a * std::log(b) - log_gamma_fn(a) + (a - 1.0) * std::log(alpha) - b * alpha;
    case Kind::Uniform:
      return alpha <= a ? -std::log(a) : kNegInf;
    case Kind::Levy:
      return 0.5 * std::log(0.5) - log_gamma_fn(0.5) - 1.5 * std::log(alpha) - 0.5 / alpha;
  }
  return kNegInf;
}

double AlphaPrior::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::Exponential:
      return rng.exponential(a);
    case Kind::Gamma:
      return sample_gamma(rng, {a, b});
    case Kind::Uniform:
      return a * rng.uniform();
    case Kind::Levy:
      return sample_inverse_gamma(rng, 0.5, 0.5);
  }
  return 1.0;
}

void GmcHyperparams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(alpha1) || !positive(beta1)) {
    throw ParameterError("GMC needs positive alpha1 and beta1");
  }
  if (!positive(alpha_zeta) || !positive(alpha_psi)) {
    throw ParameterError("GMC couplings alpha_zeta and alpha_psi must be positive");
  }
  if (tie_alpha && alpha_zeta != alpha_psi) {
    throw ParameterError("tied GMC couplings must start equal (alpha_zeta == alpha_psi)");
  }
  if (tie_alpha) alpha_prior.validate();
}

std::pair<PiecewiseIntensity, std::vector<double>> sample_gmc_prior(RngStream& rng,
                                                                    const GmcHyperparams& hp,
                                                                    const BinGrid& grid) {
  hp.validate();
  const std::size_t n = grid.size();
  std::vector<double> psi(n);
  std::vector<double> zeta(n - 1);
  psi[0] = sample_gamma(rng, {hp.alpha1, hp.beta1});
  for (std::size_t k = 1; k < n; ++k) {
    zeta[k - 1] = sample_inverse_gamma(rng, hp.alpha_zeta, hp.alpha_zeta * psi[k - 1]);
    psi[k] = sample_gamma(rng, {hp.alpha_psi, hp.alpha_psi / zeta[k - 1]});
  }
  return {PiecewiseIntensity(grid, std::move(psi)), std::move(zeta)};
}

InvGammaParams zeta_conditional(double alpha_zeta, double alpha_psi, double psi_prev, double psi) {
  return {alpha_zeta + alpha_psi, alpha_zeta * psi_prev + alpha_psi * psi};
}

GammaParams psi_first_conditional(double alpha1, double beta1, double alpha_zeta, double zeta_next,
                                  double count, double exposure) {
  return {alpha1 + alpha_zeta + count, beta1 + alpha_zeta / zeta_next + exposure};
}

GammaParams psi_interior_conditional(double alpha_psi, double alpha_zeta, double zeta,
                                     double zeta_next, double count, double exposure) {
  return {alpha_psi + alpha_zeta + count, alpha_psi / zeta + alpha_zeta / zeta_next + exposure};
}

GammaParams psi_last_conditional(double alpha_psi, double zeta, double count, double exposure) {
  return {alpha_psi + count, alpha_psi / zeta + exposure};
}

void gibbs_sweep(GmcState& state, const BinnedCounts& counts, const GmcHyperparams& hp) {
  const std::size_t n = counts.counts.size();
  if (state.psi.size() != n || (n > 0 && state.zeta.size() != n - 1)) {
    throw LogicError("GMC state dimensions do not match the bin counts");
  }
  auto& rng = state.rng;
  auto count = [&](std::size_t k) { return static_cast<double>(counts.counts[k]); };

  if (n == 1) {
    state.psi[0] =
        sample_gamma(rng, {hp.alpha1 + count(0), hp.beta1 + counts.exposure(0)});
    return;
  }
  const double az = state.alpha_zeta;
  const double ap = state.alpha_psi;
  auto& psi = state.psi;
  auto& zeta = state.zeta;

  for (std::size_t k = 1; k < n; ++k) {
    zeta[k - 1] = sample_inverse_gamma(rng, zeta_conditional(az, ap, psi[k - 1], psi[k]));
  }
  psi[0] = sample_gamma(
      rng, psi_first_conditional(hp.alpha1, hp.beta1, az, zeta[0], count(0), counts.exposure(0)));
  for (std::size_t k = 1; k + 1 < n; ++k) {
    psi[k] = sample_gamma(rng, psi_interior_conditional(ap, az, zeta[k - 1], zeta[k], count(k),
                                                        counts.exposure(k)));
  }
  psi[n - 1] =
      sample_gamma(rng, psi_last_conditional(ap, zeta[n - 2], count(n - 1), counts.exposure(n - 1)));
}

namespace {

// The alpha-free part of the tied-alpha log target.
double coupling_statistic(const std::vector<double>& psi, const std::vector<double>& zeta) {
  double s = 0.0;
  for (std::size_t k = 1; k < psi.size(); ++k) {
    const double z = zeta[k - 1];
    s += std::log(psi[k - 1]) + std::log(psi[k]) - 2.0 * std::log(z) - (psi[k - 1] + psi[k]) / z;
  }
  return s;
}

double log_alpha_target_from(double log_alpha, std::size_t bins, double stat,
                             const AlphaPrior& prior) {
  const double alpha = std::exp(log_alpha);
  const double lp = prior.log_density(alpha);
  if (!std::isfinite(lp) || !(alpha > 0.0) || !std::isfinite(alpha)) return kNegInf;
  const double pairs = 2.0 * static_cast<double>(bins - 1);
  return log_alpha + lp + pairs * (alpha * std::log(alpha) - log_gamma_fn(alpha)) + alpha * stat;
}

}  // namespace

double log_alpha_target(double log_alpha, const std::vector<double>& psi,
                        const std::vector<double>& zeta, const AlphaPrior& prior) {
  if (psi.size() < 2 || zeta.size() != psi.size() - 1) {
    throw LogicError("log_alpha_target needs N >= 2 and N - 1 latent zeta values");
  }
  return log_alpha_target_from(log_alpha, psi.size(), coupling_statistic(psi, zeta), prior);
}

bool mwg_alpha_update(GmcState& state, const GmcHyperparams& hp) {
  if (!hp.tie_alpha) throw LogicError("alpha update requires tied couplings");
  const std::size_t n = state.psi.size();
  if (n < 2) throw LogicError("alpha update requires at least two bins");

  const double stat = coupling_statistic(state.psi, state.zeta);
  const double current = std::log(state.alpha_zeta);
  const double proposal = current + state.mwg_log_step * state.rng.normal();
  const double log_u = std::log(state.rng.uniform());
  const double target_new = log_alpha_target_from(proposal, n, stat, hp.alpha_prior);
  if (!std::isfinite(target_new)) return false;
  const double target_old = log_alpha_target_from(current, n, stat, hp.alpha_prior);
  if (log_u < target_new - target_old) {
    state.alpha_zeta = state.alpha_psi = std::exp(proposal);
    return true;
  }
  return false;
}

std::vector<double> ChainOutput::psi_column(std::size_t k) const {
  std::vector<double> col(kept());
  for (std::size_t r = 0; r < col.size(); ++r) col[r] = psi(r, k);
  return col;
}

double ChainOutput::acceptance_rate() const {
  return mwg_proposed == 0 ? 0.0
                           : static_cast<double>(mwg_accepted) / static_cast<double>(mwg_proposed);
}

ChainOutput run_gmc(const EventSeries& data, const BinGrid& grid, const GmcHyperparams& hp,
                    const GmcRunOptions& opts, RngStream& rng) {
  return run_gmc(bin_events(data, grid), hp, opts, rng);
}

ChainOutput run_gmc(const BinnedCounts& counts, const GmcHyperparams& hp, const GmcRunOptions& opts,
                    RngStream& rng) {
  hp.validate();
  if (opts.iterations <= opts.burn_in) {
    throw ParameterError("iterations (" + std::to_string(opts.iterations) +
                         ") must exceed burn-in (" + std::to_string(opts.burn_in) + ")");
  }
  const std::size_t n = counts.counts.size();
  GmcState state{{}, {}, hp.alpha_zeta, hp.tie_alpha ? hp.alpha_zeta : hp.alpha_psi,
                 opts.initial_log_step, rng};

  if (opts.init) {
    if (!(opts.init->grid() == counts.grid)) {
      throw ConfigError("initial intensity must use the same grid as the data");
    }
    state.psi = opts.init->heights();
    for (double& v : state.psi) v = std::fmax(v, std::numeric_limits<double>::min());
  } else {
    state.psi = fit_conjugate(counts, {0.1, 0.1}).sample(state.rng).heights();
  }
  state.zeta.resize(n - 1);
  for (std::size_t k = 1; k < n; ++k) state.zeta[k - 1] = 0.5 * (state.psi[k - 1] + state.psi[k]);

  ChainOutput out;
  out.bins = n;
  out.iterations = opts.iterations;
  out.burn_in = opts.burn_in;
  out.psi_samples.reserve(out.kept() * n);
  if (hp.tie_alpha) out.alpha_samples.reserve(out.kept());

  const bool update_alpha = hp.tie_alpha && n >= 2;
  double log_step = std::log(state.mwg_log_step);
  for (std::size_t it = 0; it < opts.iterations; ++it) {
    gibbs_sweep(state, counts, hp);
    const bool burning = it < opts.burn_in;
    if (update_alpha) {
      const bool accepted = mwg_alpha_update(state, hp);
      if (burning) {
        ++out.burn_in_proposed;
        out.burn_in_accepted += accepted ? 1 : 0;
        if (opts.adapt_step) {
          const double gain = std::pow(static_cast<double>(it + 1), -0.6);
          log_step += gain * ((accepted ? 1.0 : 0.0) - opts.target_acceptance);
          log_step = std::clamp(log_step, -12.0, 5.0);
          state.mwg_log_step = std::exp(log_step);
        }
      } else {
        ++out.mwg_proposed;
        out.mwg_accepted += accepted ? 1 : 0;
      }
    } else if (hp.tie_alpha) {
      // A single bin carries no information on the coupling: alpha is a prior draw.
      state.alpha_zeta = state.alpha_psi = hp.alpha_prior.sample(state.rng);
    }
    if (!burning) {
      out.psi_samples.insert(out.psi_samples.end(), state.psi.begin(), state.psi.end());
      if (hp.tie_alpha) out.alpha_samples.push_back(state.alpha_zeta);
    }
  }
  out.final_log_step = state.mwg_log_step;
  rng = state.rng;
  return out;
}

std::size_t rule_of_thumb_bins(std::size_t total_events, std::size_t cap) {
  const auto nearest = static_cast<std::size_t>(std::llround(static_cast<double>(total_events) / 4.0));
  return std::max<std::size_t>(1, std::min(cap, nearest));
}

std::size_t rule_of_thumb_bins(const EventSeries& data, std::size_t cap) {
  return rule_of_thumb_bins(data.total_events(), cap);
}

double sorted_quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw ParameterError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

PosteriorBand summarize_chain(const ChainOutput& out, const BinGrid& grid,
                              const std::vector<double>& levels) {
  if (out.kept() == 0 || out.psi_samples.empty()) {
    throw ParameterError("cannot summarise a chain without kept samples");
  }
  if (grid.size() != out.bins) throw ConfigError("chain and grid disagree on the bin count");
  PosteriorBand band{grid, std::vector<double>(out.bins), {}};
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw ParameterError("credibility level must lie in (0,1), got " + std::to_string(level));
    }
    band.levels.push_back({level, std::vector<double>(out.bins), std::vector<double>(out.bins)});
  }
  for (std::size_t k = 0; k < out.bins; ++k) {
    auto col = out.psi_column(k);
    band.mean[k] = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    std::sort(col.begin(), col.end());
    for (auto& bl : band.levels) {
      bl.lower[k] = sorted_quantile(col, 0.5 * (1.0 - bl.level));
      bl.upper[k] = sorted_quantile(col, 0.5 * (1.0 + bl.level));
    }
    // Rounding in the interpolation must not push the mean outside a band.
    for (auto& bl : band.levels) {
      bl.lower[k] = std::min(bl.lower[k], band.mean[k]);
      bl.upper[k] = std::max(bl.upper[k], band.mean[k]);
    }
  }
  return band;
}

std::vector<double> autocorrelation(const std::vector<double>& series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n <= max_lag) throw ParameterError("series must be longer than max_lag");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centred(n);
  for (std::size_t t = 0; t < n; ++t) centred[t] = series[t] - mean;
  std::vector<double> acf(max_lag + 1, 0.0);
  double c0 = 0.0;
  for (double v : centred) c0 += v * v;
  acf[0] = 1.0;
  if (c0 == 0.0) return acf;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) c += centred[t] * centred[t + lag];
    acf[lag] = c / c0;
  }
  return acf;
}

double effective_sample_size(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centred(n);
  for (std::size_t t = 0; t < n; ++t) centred[t] = series[t] - mean;
  double c0 = 0.0;
  for (double v : centred) c0 += v * v;
  if (c0 == 0.0) return static_cast<double>(n);
  auto rho = [&](std::size_t lag) {
    double c = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) c += centred[t] * centred[t + lag];
    return c / c0;
  };
  // Sum of consecutive autocorrelation pairs, truncated at the first
  // non-positive pair and forced to be non-increasing.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

double batch_means_se(const std::vector<double>& series, std::size_t batches) {
  if (batches < 2 || series.size() < 2 * batches) {
    throw ParameterError("batch_means_se needs at least two observations per batch");
  }
  const std::size_t size = series.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < size; ++i) s += series[b * size + i];
    means[b] = s / static_cast<double>(size);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(batches - 1);
  return std::sqrt(var / static_cast<double>(batches));
}

}  // namespace ppinfer
