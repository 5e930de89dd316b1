#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "ppinfer/conjugate.hpp"
#include "ppinfer/error.hpp"
#include "ppinfer/rjmcmc.hpp"
#include "ppinfer/simulate.hpp"

using namespace ppinfer;

namespace {

RjConfig flat(std::size_t nmax, double a = 1.0, double b = 1.0) {
  RjConfig cfg;
  cfg.prior_on_psi = {a, b};
  cfg.model_prior = ModelIndexPrior::discrete_uniform(nmax);
  return cfg;
}

double poisson_log_pmf(std::size_t k, double m) {
  return static_cast<double>(k) * std::log(m) - m - oracle::log_factorial(static_cast<unsigned>(k));
}

}  // namespace

TEST_CASE("model index priors") {
  const auto u = ModelIndexPrior::discrete_uniform(50);
  CHECK(u.nmax() == 50);
  CHECK(u.log_mass(1) == doctest::Approx(-std::log(50.0)));
  CHECK(u.log_mass(50) == u.log_mass(1));
  CHECK_THROWS_AS((void)u.log_mass(0), DomainError);
  CHECK_THROWS_AS((void)u.log_mass(51), DomainError);

  // Poisson(23) restricted to {1, ..., 60} and renormalised.
  const auto p = ModelIndexPrior::shifted_poisson(23.0, 60);
  std::vector<double> raw;
  for (std::size_t n = 1; n <= 60; ++n) raw.push_back(poisson_log_pmf(n, 23.0));
  const double norm = oracle::log_sum_exp(raw);
  double total = 0.0;
  for (std::size_t n = 1; n <= 60; ++n) {
    CHECK(p.log_mass(n) == doctest::Approx(raw[n - 1] - norm).epsilon(1e-12));
    total += std::exp(p.log_mass(n));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(ModelIndexPrior::discrete_uniform(0), ParameterError);
  CHECK_THROWS_AS(ModelIndexPrior::shifted_poisson(-1.0, 5), ParameterError);
}

TEST_CASE("proposal ratios") {
  CHECK(proposal_log_ratio(5, 6, 0.45) == 0.0);
  CHECK(proposal_log_ratio(6, 5, 0.45) == 0.0);
  CHECK(proposal_log_ratio(1, 2, 0.45) == doctest::Approx(std::log(0.45) - std::log(0.5)).epsilon(1e-15));
  CHECK(proposal_log_ratio(1, 2, 0.45) == doctest::Approx(-0.10536).epsilon(1e-4));
  CHECK(proposal_log_ratio(2, 1, 0.45) == doctest::Approx(0.10536).epsilon(1e-4));
  CHECK(proposal_log_ratio(3, 3, 0.45) == 0.0);
  CHECK(proposal_log_ratio(1, 1, 0.45) == 0.0);
  CHECK_THROWS_AS(proposal_log_ratio(2, 4, 0.45), LogicError);
  CHECK_THROWS_AS(proposal_log_ratio(0, 1, 0.45), LogicError);
  // Upper boundary mirrors the lower one.
  CHECK(proposal_log_ratio(10, 9, 0.3, 10) == doctest::Approx(std::log(0.3) - std::log(0.5)));
  CHECK(proposal_log_ratio(9, 10, 0.3, 10) == doctest::Approx(std::log(0.5) - std::log(0.3)));
}

TEST_CASE("proposal kernel rows sum to one") {
  for (std::size_t nmax : {1, 2, 3, 7}) {
    for (std::size_t from = 1; from <= nmax; ++from) {
      double s = 0.0;
      for (std::size_t to = 1; to <= nmax; ++to) s += proposal_probability(from, to, 0.3, nmax);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  CHECK(proposal_probability(1, 3, 0.3, 5) == 0.0);
  CHECK(proposal_probability(1, 6, 0.3, 5) == 0.0);
}

TEST_CASE("scores under a flat prior differ by the marginal likelihood") {
  const EventSeries data(1.0, {{0.1, 0.2, 0.3, 0.4}});
  const auto cfg = flat(5);
  for (std::size_t a = 1; a <= 5; ++a) {
    for (std::size_t b = 1; b <= 5; ++b) {
      const double lml_a = log_marginal_likelihood(bin_events(data, BinGrid::uniform(1.0, a)), {1.0, 1.0});
      const double lml_b = log_marginal_likelihood(bin_events(data, BinGrid::uniform(1.0, b)), {1.0, 1.0});
      CHECK(log_model_score(data, a, cfg) - log_model_score(data, b, cfg) ==
            doctest::Approx(lml_a - lml_b).epsilon(1e-12));
    }
  }
  CHECK(log_model_score(data, 2, cfg) == doctest::Approx(1.74526 - std::log(5.0)).epsilon(1e-5));
  CHECK_THROWS_AS(log_model_score(data, 6, cfg), DomainError);
  CHECK_THROWS_AS(log_model_score(data, 0, cfg), DomainError);
}

TEST_CASE("empty data scores decrease in N") {
  const auto data = EventSeries::empty(1.0);
  const auto cfg = flat(20);
  for (std::size_t n = 1; n <= 20; ++n) {
    const double nn = static_cast<double>(n);
    CHECK(log_model_score(data, n, cfg) + std::log(20.0) ==
          doctest::Approx(1.0 + nn * std::log(nn / (nn + 1.0))).epsilon(1e-12));
    if (n > 1) CHECK(log_model_score(data, n, cfg) < log_model_score(data, n - 1, cfg));
  }
}

TEST_CASE("shifted Poisson prior dominates on empty data") {
  const auto data = EventSeries::empty(1.0);
  RjConfig cfg = flat(50);
  cfg.model_prior = ModelIndexPrior::shifted_poisson(23.0, 50);
  const double lml1 = 1.0 + std::log(0.5);
  const double lml23 = 1.0 + 23.0 * std::log(23.0 / 24.0);
  const double prior_gap = poisson_log_pmf(23, 23.0) - poisson_log_pmf(1, 23.0);
  CHECK(prior_gap > lml1 - lml23);
  CHECK(log_model_score(data, 23, cfg) - log_model_score(data, 1, cfg) ==
        doctest::Approx(prior_gap + lml23 - lml1).epsilon(1e-10));
}

TEST_CASE("exact model posterior on empty data") {
  const auto post = exact_model_posterior(EventSeries::empty(1.0), flat(3));
  std::vector<double> w;
  for (double n : {1.0, 2.0, 3.0}) w.push_back(std::exp(n * std::log(n / (n + 1.0))));
  const double s = w[0] + w[1] + w[2];
  REQUIRE(post.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(post[i].first == i + 1);
    CHECK(post[i].second == doctest::Approx(w[i] / s).epsilon(1e-12));
  }
  CHECK(post[0].second == doctest::Approx(0.365947).epsilon(1e-5));
  CHECK(post[1].second == doctest::Approx(0.325286).epsilon(1e-5));
  CHECK(post[2].second == doctest::Approx(0.308767).epsilon(1e-5));

  const auto one = exact_model_posterior(EventSeries(1.0, {{0.5}}), flat(1));
  REQUIRE(one.size() == 1);
  CHECK(one[0].second == 1.0);
}

TEST_CASE("single-model support") {
  auto cfg = flat(1);
  cfg.iterations = 1000;
  cfg.burn_in = 100;
  const auto out = run_rj(EventSeries(1.0, {{0.2, 0.6}}), cfg);
  for (auto n : out.trace) CHECK(n == 1);
  CHECK(out.accepted == 0);
  CHECK(out.frequencies == std::vector<std::size_t>{900});
}

TEST_CASE("config validation") {
  const auto data = EventSeries::empty(1.0);
  auto cfg = flat(5);
  cfg.eta = 0.5;
  CHECK_THROWS_AS(run_rj(data, cfg), ParameterError);
  cfg.eta = 0.0;
  CHECK_THROWS_AS(run_rj(data, cfg), ParameterError);
  cfg = flat(5);
  cfg.burn_in = cfg.iterations;
  CHECK_THROWS_AS(run_rj(data, cfg), ParameterError);
  cfg = flat(5);
  cfg.initial_model = 6;
  CHECK_THROWS_AS(run_rj(data, cfg), DomainError);
}

TEST_CASE("frequencies, cache and memoisation") {
  RngStream sim(9);
  const auto data = simulate_poisson(sim, step_sine(), 3);
  auto cfg = flat(12, 0.5, 0.5);
  cfg.iterations = 5000;
  cfg.burn_in = 1000;
  cfg.seed = 17;
  cfg.draw_psi = true;
  const auto a = run_rj(data, cfg);
  CHECK(std::accumulate(a.frequencies.begin(), a.frequencies.end(), std::size_t{0}) == a.kept());
  CHECK(a.kept() == 4000);
  CHECK(a.psi_draws.size() == 4000);
  for (std::size_t i = 0; i < a.psi_draws.size(); ++i) CHECK(a.psi_draws[i].size() == a.trace[1000 + i]);

  std::size_t visited = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    if (!std::isnan(a.cached_scores[n - 1])) {
      ++visited;
      CHECK(a.cached_scores[n - 1] == log_model_score(data, n, cfg));
    }
  }
  CHECK(a.score_evaluations == visited);

  cfg.memoize = false;
  const auto b = run_rj(data, cfg);
  CHECK(a.trace == b.trace);
  CHECK(a.frequencies == b.frequencies);
  CHECK(a.psi_draws == b.psi_draws);
  CHECK(a.accepted == b.accepted);
  CHECK(b.score_evaluations > a.score_evaluations);

  double sum = 0.0;
  for (const auto& [n, f] : a.relative_frequencies()) sum += f;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("chain frequencies approach the exact posterior") {
  const EventSeries data(1.0, {{0.05, 0.1, 0.12, 0.2, 0.22, 0.3, 0.7, 0.9}});
  auto cfg = flat(5);
  cfg.iterations = 200000;
  cfg.burn_in = 10000;
  cfg.seed = 99;
  cfg.initial_model = 1;
  const auto exact = exact_model_posterior(data, cfg);
  const auto rel = run_rj(data, cfg).relative_frequencies();
  double tv = 0.0;
  for (std::size_t i = 0; i < 5; ++i) tv += 0.5 * std::fabs(exact[i].second - rel[i].second);
  MESSAGE("TV distance ", tv);
  CHECK(tv < 0.02);
}

TEST_CASE("transition flows balance on a three-model toy") {
  const double r[] = {0.0, 1.3, -0.4};
  auto score = [&](std::size_t n) { return r[n - 1]; };
  const double eta = 0.3;
  const std::size_t nmax = 3;
  std::vector<double> pi(3);
  const double z = std::exp(r[0]) + std::exp(r[1]) + std::exp(r[2]);
  for (std::size_t i = 0; i < 3; ++i) pi[i] = std::exp(r[i]) / z;

  RngStream rng(123);
  std::vector<std::vector<double>> flows(3, std::vector<double>(3, 0.0));
  std::size_t cur = 2;
  constexpr std::size_t steps = 1000000;
  for (std::size_t it = 0; it < steps; ++it) {
    bool moved = false;
    const auto next = rj_transition(rng, cur, eta, nmax, score, moved);
    CHECK(moved == (next != cur));
    flows[cur - 1][next - 1] += 1.0;
    cur = next;
  }
  for (std::size_t i = 1; i <= 3; ++i) {
    for (std::size_t j = 1; j <= 3; ++j) {
      if (i == j || (i > j ? i - j : j - i) > 1) continue;
      const double q_ij = proposal_probability(i, j, eta, nmax);
      const double q_ji = proposal_probability(j, i, eta, nmax);
      const double expected = pi[i - 1] * q_ij * std::min(1.0, pi[j - 1] * q_ji / (pi[i - 1] * q_ij));
      const double p = expected;
      const double sigma = std::sqrt(steps * p * (1.0 - p));
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::fabs(flows[i - 1][j - 1] - steps * expected) < 3.0 * sigma);
      CHECK(std::fabs(flows[i - 1][j - 1] - flows[j - 1][i - 1]) < 3.0 * sigma);
    }
  }
}

TEST_CASE("model mixture bands") {
  const EventSeries data(2.0, {{0.1, 0.2, 0.3, 1.5}});
  auto cfg = flat(4);
  cfg.iterations = 4000;
  cfg.burn_in = 2000;
  cfg.draw_psi = true;
  const auto out = run_rj(data, cfg);
  const auto band = summarize_model_mixture(out, 2.0, 8, {0.9});
  CHECK(band.grid.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(band.levels[0].lower[k] <= band.mean[k]);
    CHECK(band.mean[k] <= band.levels[0].upper[k]);
  }
  cfg.draw_psi = false;
  CHECK_THROWS_AS(summarize_model_mixture(run_rj(data, cfg), 2.0, 8, {0.9}), ParameterError);
}
