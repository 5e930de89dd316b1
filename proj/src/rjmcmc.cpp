#include "ppinfer/rjmcmc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "ppinfer/error.hpp"
#include "ppinfer/gmc.hpp"
#include "ppinfer/random.hpp"
#include "ppinfer/special.hpp"

namespace ppinfer {

ModelIndexPrior::ModelIndexPrior(Kind kind, double mean, std::vector<double> log_mass)
    : kind_(kind), mean_(mean), log_mass_(std::move(log_mass)) {}

ModelIndexPrior ModelIndexPrior::discrete_uniform(std::size_t nmax) {
  if (nmax < 1) throw ParameterError("model prior needs Nmax >= 1");
  return {Kind::DiscreteUniform, 0.0,
          std::vector<double>(nmax, -std::log(static_cast<double>(nmax)))};
}

ModelIndexPrior ModelIndexPrior::shifted_poisson(double mean, std::size_t nmax) {
  if (nmax < 1) throw ParameterError("model prior needs Nmax >= 1");
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw ParameterError("shifted Poisson model prior needs a positive mean");
  }
  std::vector<double> lm(nmax);
  for (std::size_t n = 1; n <= nmax; ++n) {
    const auto x = static_cast<double>(n);
    lm[n - 1] = x * std::log(mean) - mean - log_gamma_fn(x + 1.0);
  }
  const double top = *std::max_element(lm.begin(), lm.end());
  double s = 0.0;
  for (double v : lm) s += std::exp(v - top);
  const double log_norm = top + std::log(s);
  for (double& v : lm) v -= log_norm;
  return {Kind::ShiftedPoisson, mean, std::move(lm)};
}

double ModelIndexPrior::log_mass(std::size_t n) const {
  if (n < 1 || n > log_mass_.size()) {
    throw DomainError("model index " + std::to_string(n) + " outside 1.." +
                      std::to_string(log_mass_.size()));
  }
  return log_mass_[n - 1];
}

void RjConfig::validate() const {
  if (!(eta > 0.0 && eta < 0.5)) throw ParameterError("eta must lie in (0, 1/2)");
  prior_on_psi.validate();
  if (iterations <= burn_in) throw ParameterError("iterations must exceed burn-in");
  if (initial_model && (*initial_model < 1 || *initial_model > model_prior.nmax())) {
    throw DomainError("initial model index outside the prior support");
  }
}

double log_model_score(const EventSeries& data, std::size_t n, const RjConfig& cfg) {
  const double log_prior = cfg.model_prior.log_mass(n);
  const auto counts = bin_events(data, BinGrid::uniform(data.horizon(), n));
  return log_marginal_likelihood(counts, cfg.prior_on_psi) + log_prior;
}

double proposal_probability(std::size_t from, std::size_t to, double eta, std::size_t nmax) {
  if (from < 1 || from > nmax || to < 1 || to > nmax) return 0.0;
  if (nmax == 1) return 1.0;
  const std::size_t gap = from > to ? from - to : to - from;
  if (gap > 1) return 0.0;
  if (from == 1 || from == nmax) return 0.5;
  return gap == 0 ? 1.0 - 2.0 * eta : eta;
}

double proposal_log_ratio(std::size_t from, std::size_t to, double eta, std::size_t nmax) {
  if (from < 1 || to < 1 || (from > to ? from - to : to - from) > 1) {
    throw LogicError("proposal_log_ratio: " + std::to_string(from) + " -> " + std::to_string(to) +
                     " is not a nearest-neighbour move");
  }
  if (from == to) return 0.0;
  return std::log(proposal_probability(to, from, eta, nmax)) -
         std::log(proposal_probability(from, to, eta, nmax));
}

namespace {

std::size_t draw_proposal(RngStream& rng, std::size_t from, double eta, std::size_t nmax) {
  if (nmax == 1) return 1;
  const double u = rng.uniform();
  if (from == 1) return u < 0.5 ? 1 : 2;
  if (from == nmax) return u < 0.5 ? nmax : nmax - 1;
  if (u < eta) return from - 1;
  if (u < 2.0 * eta) return from + 1;
  return from;
}

class ScoreTable {
 public:
  ScoreTable(const EventSeries& data, const RjConfig& cfg)
      : data_(data), cfg_(cfg), scores_(cfg.model_prior.nmax(), std::nan("")) {}

  double score(std::size_t n) {
    if (cfg_.memoize && !std::isnan(scores_[n - 1])) return scores_[n - 1];
    const double r = log_model_score(data_, n, cfg_);
    ++evaluations_;
    scores_[n - 1] = r;
    return r;
  }

  const BinnedCounts& counts(std::size_t n) {
    auto it = counts_.find(n);
    if (it == counts_.end() || !cfg_.memoize) {
      auto c = bin_events(data_, BinGrid::uniform(data_.horizon(), n));
      it = counts_.insert_or_assign(n, std::move(c)).first;
    }
    return it->second;
  }

  [[nodiscard]] const std::vector<double>& scores() const { return scores_; }
  [[nodiscard]] std::size_t evaluations() const { return evaluations_; }

 private:
  const EventSeries& data_;
  const RjConfig& cfg_;
  std::vector<double> scores_;
  std::map<std::size_t, BinnedCounts> counts_;
  std::size_t evaluations_ = 0;
};

}  // namespace

std::size_t rj_transition(RngStream& rng, std::size_t current, double eta, std::size_t nmax,
                          const std::function<double(std::size_t)>& score, bool& moved) {
  const std::size_t proposal = draw_proposal(rng, current, eta, nmax);
  const double log_u = std::log(rng.uniform());
  moved = false;
  if (proposal == current) return current;
  const double log_accept =
      score(proposal) - score(current) + proposal_log_ratio(current, proposal, eta, nmax);
  if (log_u < log_accept) {
    moved = true;
    return proposal;
  }
  return current;
}

RjOutput run_rj(const EventSeries& data, const RjConfig& cfg) {
  cfg.validate();
  const std::size_t nmax = cfg.model_prior.nmax();
  RngStream rng(cfg.seed);
  ScoreTable table(data, cfg);

  std::size_t current =
      cfg.initial_model.value_or(std::min(nmax, rule_of_thumb_bins(data)));

  RjOutput out;
  out.burn_in = cfg.burn_in;
  out.trace.reserve(cfg.iterations);
  out.frequencies.assign(nmax, 0);

  auto score = [&](std::size_t n) { return table.score(n); };
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    bool moved = false;
    current = rj_transition(rng, current, cfg.eta, nmax, score, moved);
    if (moved) ++out.accepted;
    out.trace.push_back(current);
    if (it >= cfg.burn_in) {
      ++out.frequencies[current - 1];
      if (cfg.draw_psi) {
        const auto post = fit_conjugate(table.counts(current), cfg.prior_on_psi);
        out.psi_draws.push_back(post.sample(rng).heights());
      }
    }
  }
  out.cached_scores = table.scores();
  out.score_evaluations = table.evaluations();
  return out;
}

std::vector<std::pair<std::size_t, double>> RjOutput::relative_frequencies() const {
  std::vector<std::pair<std::size_t, double>> rel;
  const auto total = static_cast<double>(kept());
  for (std::size_t n = 1; n <= frequencies.size(); ++n) {
    rel.emplace_back(n, static_cast<double>(frequencies[n - 1]) / total);
  }
  return rel;
}

std::vector<std::pair<std::size_t, double>> exact_model_posterior(const EventSeries& data,
                                                                  const RjConfig& cfg) {
  const std::size_t nmax = cfg.model_prior.nmax();
  std::vector<double> r(nmax);
  for (std::size_t n = 1; n <= nmax; ++n) r[n - 1] = log_model_score(data, n, cfg);
  const double top = *std::max_element(r.begin(), r.end());
  double s = 0.0;
  for (double v : r) s += std::exp(v - top);
  const double log_norm = top + std::log(s);
  std::vector<std::pair<std::size_t, double>> post;
  for (std::size_t n = 1; n <= nmax; ++n) post.emplace_back(n, std::exp(r[n - 1] - log_norm));
  return post;
}

PosteriorBand summarize_model_mixture(const RjOutput& out, double horizon, std::size_t report_bins,
                                      const std::vector<double>& levels) {
  if (out.psi_draws.empty()) {
    throw ParameterError("no within-model draws recorded; enable draw_psi");
  }
  const auto grid = BinGrid::uniform(horizon, report_bins);
  ChainOutput pooled;
  pooled.bins = report_bins;
  pooled.iterations = out.psi_draws.size();
  pooled.burn_in = 0;
  pooled.psi_samples.reserve(out.psi_draws.size() * report_bins);
  for (const auto& draw : out.psi_draws) {
    const auto model_grid = BinGrid::uniform(horizon, draw.size());
    for (std::size_t c = 0; c < report_bins; ++c) {
      const double mid = 0.5 * (grid.lower(c) + grid.upper(c));
      pooled.psi_samples.push_back(draw[model_grid.locate(mid)]);
    }
  }
  return summarize_chain(pooled, grid, levels);
}

}  // namespace ppinfer
