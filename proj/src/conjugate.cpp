#include "ppinfer/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ppinfer/error.hpp"
#include "ppinfer/special.hpp"

namespace ppinfer {

void IndepGammaPrior::validate() const {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw ParameterError("independent gamma prior needs positive shape and rate");
  }
}

PiecewiseIntensity IndepGammaPosterior::sample(RngStream& rng) const {
  std::vector<double> psi(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) psi[k] = sample_gamma(rng, bins[k]);
  return {grid, std::move(psi)};
}

IndepGammaPosterior fit_conjugate(const BinnedCounts& counts, const IndepGammaPrior& prior) {
  prior.validate();
  if (counts.counts.size() != counts.grid.size()) {
    throw ConfigError("bin counts do not match their grid");
  }
  IndepGammaPosterior post{counts.grid, {}};
  post.bins.reserve(counts.counts.size());
  for (std::size_t k = 0; k < counts.counts.size(); ++k) {
    post.bins.push_back({prior.shape + static_cast<double>(counts.counts[k]),
                         prior.rate + counts.exposure(k)});
  }
  return post;
}

PiecewiseIntensity posterior_mean(const IndepGammaPosterior& post) {
  std::vector<double> mean(post.bins.size());
  std::transform(post.bins.begin(), post.bins.end(), mean.begin(),
                 [](const GammaParams& g) { return g.mean(); });
  return {post.grid, std::move(mean)};
}

PosteriorBand credible_band(const IndepGammaPosterior& post, const std::vector<double>& levels) {
  PosteriorBand band{post.grid, posterior_mean(post).heights(), {}};
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw ParameterError("credibility level must lie in (0,1), got " + std::to_string(level));
    }
    BandLevel bl{level, std::vector<double>(post.bins.size()),
                 std::vector<double>(post.bins.size())};
    for (std::size_t k = 0; k < post.bins.size(); ++k) {
      bl.lower[k] = gamma_quantile(0.5 * (1.0 - level), post.bins[k]);
      bl.upper[k] = gamma_quantile(0.5 * (1.0 + level), post.bins[k]);
    }
    band.levels.push_back(std::move(bl));
  }
  return band;
}

double log_marginal_likelihood(const BinnedCounts& counts, const IndepGammaPrior& prior,
                               bool include_tn) {
  prior.validate();
  const double a = prior.shape;
  const double b = prior.rate;
  const auto nbins = static_cast<double>(counts.counts.size());
  double lml = nbins * (a * std::log(b) - log_gamma_fn(a));
  for (std::size_t k = 0; k < counts.counts.size(); ++k) {
    const double shape = a + static_cast<double>(counts.counts[k]);
    lml += log_gamma_fn(shape) - shape * std::log(counts.exposure(k) + b);
  }
  if (include_tn) lml += counts.grid.horizon() * static_cast<double>(counts.replicates);
  return lml;
}

BinCandidates default_bin_candidates(const EventSeries& data) {
  const std::size_t h = data.total_events();
  return {1, std::max<std::size_t>(1, std::min<std::size_t>(200, h))};
}

BinSelection select_bins_empirical_bayes(const EventSeries& data, const IndepGammaPrior& prior,
                                         BinCandidates candidates) {
  if (candidates.first < 1 || candidates.last < candidates.first) {
    throw ParameterError("bin candidate range must be non-empty and start at 1 or above");
  }
  BinSelection out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t n = candidates.first; n <= candidates.last; ++n) {
    const auto counts = bin_events(data, BinGrid::uniform(data.horizon(), n));
    const double lml = log_marginal_likelihood(counts, prior);
    out.profile.emplace_back(n, lml);
    if (lml > best) {
      best = lml;
      out.best = n;
    }
  }
  return out;
}

double beta_equation_residual(const BinnedCounts& counts, double alpha, double beta) {
  double avg = 0.0;
  for (std::size_t k = 0; k < counts.counts.size(); ++k) {
    avg += (static_cast<double>(counts.counts[k]) + alpha) / (counts.exposure(k) + beta);
  }
  avg /= static_cast<double>(counts.counts.size());
  return alpha / beta - avg;
}

double calibrate_beta(const BinnedCounts& counts, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("calibrate_beta needs a positive alpha");
  }
  if (counts.total() == 0) {
    throw ConfigError(
        "cannot calibrate beta from data without events; set beta manually (--beta)");
  }
  // g(beta) = beta * residual(beta) is strictly decreasing from g(0+) = alpha
  // to g(inf) = -mean(H) < 0, so the root is unique.
  const auto nbins = static_cast<double>(counts.counts.size());
  auto g = [&](double beta) {
    double s = 0.0;
    for (std::size_t k = 0; k < counts.counts.size(); ++k) {
      s += (static_cast<double>(counts.counts[k]) + alpha) / (counts.exposure(k) + beta);
    }
    return alpha - beta * s / nbins;
  };
  auto dg = [&](double beta) {
    double s = 0.0;
    for (std::size_t k = 0; k < counts.counts.size(); ++k) {
      const double c = counts.exposure(k);
      s += (static_cast<double>(counts.counts[k]) + alpha) * c / ((c + beta) * (c + beta));
    }
    return -s / nbins;
  };

  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000) throw NumericalError("calibrate_beta could not bracket the root");
  }
  double beta = 0.5 * (lo + hi);
  for (int iter = 0; iter < 500; ++iter) {
    const double gb = g(beta);
    if (gb == 0.0) break;
    if (gb > 0.0) {
      lo = beta;
    } else {
      hi = beta;
    }
    double next = beta - gb / dg(beta);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == beta || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) {
      beta = next;
      break;
    }
    beta = next;
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw NumericalError("calibrate_beta failed to converge");
  }
  // Polish: pick the neighbouring double with the smallest residual.
  double best = beta;
  double best_res = std::fabs(beta_equation_residual(counts, alpha, beta));
  double cand = beta;
  for (int step = 0; step < 4; ++step) {
    for (double dir : {-1.0, 1.0}) {
      cand = beta;
      for (int i = 0; i <= step; ++i) cand = std::nextafter(cand, dir * 1e308);
      const double r = std::fabs(beta_equation_residual(counts, alpha, cand));
      if (r < best_res) {
        best_res = r;
        best = cand;
      }
    }
  }
  return best;
}

}  // namespace ppinfer
