#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "ppinfer/conjugate.hpp"
#include "ppinfer/error.hpp"
#include "ppinfer/gmc.hpp"
#include "ppinfer/simulate.hpp"
#include "ppinfer/special.hpp"

using namespace ppinfer;

namespace {

BinnedCounts make_counts(double T, std::size_t n, std::vector<std::uint64_t> h) {
  const auto N = h.size();
  return {BinGrid::uniform(T, N), std::move(h), n};
}

// LML written out term by term, independent of the library.
double lml_by_hand(const std::vector<double>& times, double T, std::size_t n, std::size_t N,
                   double a, double b) {
  std::vector<int> h(N, 0);
  for (double t : times) ++h[std::min<std::size_t>(N - 1, static_cast<std::size_t>(t / T * N))];
  const double d = T / static_cast<double>(N);
  double v = T * static_cast<double>(n) + static_cast<double>(N) * (a * std::log(b) - std::lgamma(a));
  for (int hk : h) v += std::lgamma(a + hk) - (a + hk) * std::log(static_cast<double>(n) * d + b);
  return v;
}

}  // namespace

TEST_CASE("posterior parameters by substitution") {
  const auto post = fit_conjugate(make_counts(1.0, 2, {5, 0}), {0.1, 0.1});
  CHECK(post.bins[0].shape == doctest::Approx(5.1));
  CHECK(post.bins[0].rate == doctest::Approx(1.1));
  CHECK(post.bins[1].shape == 0.1);
  CHECK(post.bins[1].rate == doctest::Approx(1.1));
  CHECK(posterior_mean(post).heights()[0] == doctest::Approx(51.0 / 11.0).epsilon(1e-14));
  CHECK(posterior_mean(post).heights()[0] == doctest::Approx(4.63636).epsilon(1e-6));
}

TEST_CASE("empty data keeps the prior shape") {
  const auto post = fit_conjugate(bin_events(EventSeries::empty(3.0, 4), BinGrid::uniform(3.0, 6)), {0.7, 0.2});
  for (const auto& g : post.bins) {
    CHECK(g.shape == 0.7);
    CHECK(g.rate == doctest::Approx(0.2 + 4 * 0.5));
  }
}

TEST_CASE("diffuse limit recovers the frequentist estimator") {
  const auto c = make_counts(2.0, 3, {4, 0, 9, 1});
  const auto mean = posterior_mean(fit_conjugate(c, {1e-12, 1e-12})).heights();
  for (std::size_t k = 0; k < 4; ++k) {
    const double freq = static_cast<double>(c.counts[k]) / c.exposure(k);
    CHECK(std::fabs(mean[k] - freq) <= 1e-9 * std::max(freq, 1.0));
  }
}

TEST_CASE("posterior density matches prior times likelihood on a grid") {
  // T = 1, n = 2, four events split 3 / 1.
  const auto c = make_counts(1.0, 2, {3, 1});
  const IndepGammaPrior prior{0.1, 0.1};
  const auto post = fit_conjugate(c, prior);
  constexpr int m = 1000;
  const double h = 20.0 / m;
  std::vector<double> joint(m * m), exact(m * m);
  double zj = 0.0, ze = 0.0;
  for (int i = 0; i < m; ++i) {
    const double p1 = (i + 0.5) * h;
    for (int j = 0; j < m; ++j) {
      const double p2 = (j + 0.5) * h;
      const double lp = oracle::gamma_log_pdf(p1, 0.1, 0.1) + oracle::gamma_log_pdf(p2, 0.1, 0.1) +
                        3 * std::log(p1) - 1.0 * p1 + 1 * std::log(p2) - 1.0 * p2;
      joint[i * m + j] = std::exp(lp);
      exact[i * m + j] = std::exp(oracle::gamma_log_pdf(p1, post.bins[0].shape, post.bins[0].rate) +
                                  oracle::gamma_log_pdf(p2, post.bins[1].shape, post.bins[1].rate));
      zj += joint[i * m + j];
      ze += exact[i * m + j];
    }
  }
  double tv = 0.0;
  for (int i = 0; i < m * m; ++i) tv += std::fabs(joint[i] / zj - exact[i] / ze);
  CHECK(0.5 * tv < 1e-3);
}

TEST_CASE("credible band quantiles") {
  const IndepGammaPosterior unit{BinGrid::uniform(1.0, 1), {{1.0, 1.0}}};
  const auto band = credible_band(unit, {0.95});
  CHECK(band.levels[0].lower[0] == doctest::Approx(-std::log(0.975)).epsilon(1e-12));
  CHECK(band.levels[0].upper[0] == doctest::Approx(-std::log(0.025)).epsilon(1e-12));
  CHECK(band.levels[0].lower[0] == doctest::Approx(0.025318).epsilon(1e-5));

  const IndepGammaPosterior g{BinGrid::uniform(1.0, 1), {{5.1, 1.1}}};
  const auto b2 = credible_band(g, {0.5, 0.95});
  CHECK(b2.levels[1].lower[0] < b2.levels[0].lower[0]);
  CHECK(b2.levels[0].upper[0] < b2.levels[1].upper[0]);
  CHECK(b2.levels[1].lower[0] < 51.0 / 11.0);
  CHECK(51.0 / 11.0 < b2.levels[1].upper[0]);
  CHECK(std::fabs(gamma_cdf(b2.levels[1].lower[0], {5.1, 1.1}) - 0.025) < 1e-9);
  CHECK(std::fabs(gamma_cdf(b2.levels[1].upper[0], {5.1, 1.1}) - 0.975) < 1e-9);
  CHECK_THROWS_AS(credible_band(g, {1.0}), ParameterError);
}

TEST_CASE("bands contain the mean and nest when the posterior shape is at least one") {
  RngStream rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint64_t> h(6);
    for (auto& x : h) x = static_cast<std::uint64_t>(20 * rng.uniform());
    const auto post = fit_conjugate(make_counts(1.0 + trial, 1 + trial % 5, h), {1.0 + rng.uniform(), 0.1});
    const auto band = credible_band(post, {0.5, 0.75, 0.95});
    for (std::size_t k = 0; k < 6; ++k) {
      for (std::size_t l = 0; l < 3; ++l) {
        CHECK(band.levels[l].lower[k] <= band.mean[k]);
        CHECK(band.mean[k] <= band.levels[l].upper[k]);
        if (l > 0) {
          CHECK(band.levels[l].lower[k] <= band.levels[l - 1].lower[k]);
          CHECK(band.levels[l - 1].upper[k] <= band.levels[l].upper[k]);
        }
      }
    }
  }
}

TEST_CASE("log marginal likelihood hand values") {
  for (std::size_t N = 1; N <= 6; ++N) {
    const auto c = bin_events(EventSeries::empty(1.0), BinGrid::uniform(1.0, N));
    const double n = static_cast<double>(N);
    CHECK(log_marginal_likelihood(c, {1.0, 1.0}) == doctest::Approx(1.0 + n * std::log(n / (n + 1.0))).epsilon(1e-14));
  }
  const auto one = bin_events(EventSeries::empty(1.0), BinGrid::uniform(1.0, 1));
  CHECK(log_marginal_likelihood(one, {1.0, 1.0}) == doctest::Approx(0.30685).epsilon(1e-5));
  const auto two = bin_events(EventSeries::empty(1.0), BinGrid::uniform(1.0, 2));
  CHECK(log_marginal_likelihood(two, {1.0, 1.0}) == doctest::Approx(0.18907).epsilon(1e-5));
  CHECK(log_marginal_likelihood(two, {1.0, 1.0}, false) == doctest::Approx(0.18907 - 1.0).epsilon(1e-5));

  const auto three = make_counts(1.0, 1, {3});
  CHECK(log_marginal_likelihood(three, {1.0, 1.0}) ==
        doctest::Approx(1.0 + std::log(6.0) - 4.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(log_marginal_likelihood(three, {1.0, 1.0}) == doctest::Approx(0.01924).epsilon(1e-3));
}

TEST_CASE("log marginal likelihood against a prior Monte-Carlo average") {
  // n = 2, T = 1, events {0.1, 0.2, 0.3, 0.7}.
  const EventSeries data(1.0, {{0.1, 0.3}, {0.2, 0.7}});
  RngStream rng(31);
  for (std::size_t N : {1u, 2u, 3u}) {
    const auto c = bin_events(data, BinGrid::uniform(1.0, N));
    constexpr std::size_t draws = 200000;
    std::vector<double> logs(draws);
    for (auto& l : logs) {
      l = 2.0;
      for (std::size_t k = 0; k < N; ++k) {
        const double psi = sample_gamma(rng, {1.0, 1.0});
        l += static_cast<double>(c.counts[k]) * std::log(psi) - c.exposure(k) * psi;
      }
    }
    const double log_mean = oracle::log_sum_exp(logs) - std::log(static_cast<double>(draws));
    std::vector<double> ratio(draws);
    for (std::size_t i = 0; i < draws; ++i) ratio[i] = std::exp(logs[i] - log_mean);
    const double se = oracle::iid_se(ratio);  // relative SE of the mean
    CAPTURE(N);
    CHECK(std::fabs(log_marginal_likelihood(c, {1.0, 1.0}) - log_mean) < 3.0 * se);
  }
}

TEST_CASE("log marginal likelihood is invariant under bin permutation and sufficient") {
  const auto a = make_counts(4.0, 3, {5, 0, 2, 9});
  const auto b = make_counts(4.0, 3, {9, 2, 0, 5});
  CHECK(log_marginal_likelihood(a, {0.3, 0.2}) == doctest::Approx(log_marginal_likelihood(b, {0.3, 0.2})).epsilon(1e-14));

  const EventSeries x(1.0, {{0.1, 0.2, 0.8}});
  const EventSeries y(1.0, {{0.45, 0.05, 0.51}});
  const auto gx = bin_events(x, BinGrid::uniform(1.0, 2));
  const auto gy = bin_events(y, BinGrid::uniform(1.0, 2));
  CHECK(gx.counts == gy.counts);
  CHECK(log_marginal_likelihood(gx, {0.1, 0.1}) == log_marginal_likelihood(gy, {0.1, 0.1}));
  const auto bx = credible_band(fit_conjugate(gx, {0.1, 0.1}), {0.9});
  const auto by = credible_band(fit_conjugate(gy, {0.1, 0.1}), {0.9});
  CHECK(bx.mean == by.mean);
  CHECK(bx.levels[0].lower == by.levels[0].lower);
  CHECK(bx.levels[0].upper == by.levels[0].upper);
}

TEST_CASE("empirical Bayes on empty data picks one bin") {
  const auto sel = select_bins_empirical_bayes(EventSeries::empty(1.0), {1.0, 1.0}, {1, 50});
  CHECK(sel.best == 1);
  REQUIRE(sel.profile.size() == 50);
  for (std::size_t i = 1; i < 50; ++i) CHECK(sel.profile[i].second < sel.profile[i - 1].second);
  CHECK(default_bin_candidates(EventSeries::empty(1.0)).last == 1);
}

TEST_CASE("empirical Bayes finds an interior maximum") {
  const std::vector<double> times{0.1, 0.2, 0.3, 0.4};
  const double l1 = lml_by_hand(times, 1.0, 1, 1, 1.0, 1.0);
  const double l2 = lml_by_hand(times, 1.0, 1, 2, 1.0, 1.0);
  const double l3 = lml_by_hand(times, 1.0, 1, 3, 1.0, 1.0);
  REQUIRE(l1 < l2);
  REQUIRE(l2 > l3);
  const auto sel = select_bins_empirical_bayes(EventSeries(1.0, {times}), {1.0, 1.0}, {1, 3});
  CHECK(sel.best == 2);
  CHECK(sel.profile[0].second == doctest::Approx(l1).epsilon(1e-13));
  CHECK(sel.profile[1].second == doctest::Approx(l2).epsilon(1e-13));
  CHECK(sel.profile[2].second == doctest::Approx(l3).epsilon(1e-13));
}

TEST_CASE("empirical Bayes candidate ranges") {
  const EventSeries data(2.0, {{0.5, 1.5}});
  const auto sel = select_bins_empirical_bayes(data, {1.0, 1.0}, {2, 2});
  CHECK(sel.best == 2);
  CHECK_THROWS_AS(select_bins_empirical_bayes(data, {1.0, 1.0}, {0, 3}), ParameterError);
  CHECK_THROWS_AS(select_bins_empirical_bayes(data, {1.0, 1.0}, {3, 2}), ParameterError);
}

TEST_CASE("a skewed posterior puts its mean above the central band") {
  // G(0.1, 1.1): P(X <= mean) is about 0.83, above the 0.75 upper quantile of a 50% band.
  const auto post = fit_conjugate(make_counts(1.0, 1, {0}), {0.1, 0.1});
  const auto band = credible_band(post, {0.5});
  CHECK(band.mean[0] > band.levels[0].upper[0]);
}

TEST_CASE("empirical Bayes oversmooths the oscillating exponential") {
  RngStream rng(46);
  const auto data = simulate_poisson(rng, oscillating_exponential(), 1);
  const auto sel = select_bins_empirical_bayes(data, {0.1, 0.1}, {1, 50});
  MESSAGE("oscillating exponential, n = 1, seed 46: H = ", data.total_events(), ", N* = ", sel.best);
  CHECK(sel.best < rule_of_thumb_bins(data));

  std::vector<std::size_t> best;
  for (std::uint64_t seed = 0; seed < 101; ++seed) {
    RngStream r(seed);
    best.push_back(select_bins_empirical_bayes(simulate_poisson(r, oscillating_exponential(), 1),
                                               {0.1, 0.1}, {1, 50}).best);
  }
  std::nth_element(best.begin(), best.begin() + 50, best.end());
  CHECK(best[50] <= 6);
}

TEST_CASE("conjugate fit on a large oscillating-exponential sample") {
  RngStream rng(4000);
  const auto truth = oscillating_exponential();
  const auto data = simulate_poisson(rng, truth, 4000);
  const auto mean = posterior_mean(fit_conjugate(bin_events(data, BinGrid::uniform(10.0, 48)), {0.1, 0.1}));
  const double d = l2_distance(mean, truth.fn);
  // Squared distance = projection bias + estimation noise; the noise has mean sum_k lambda_k / n
  // = int(lambda) N / (T n) and relative spread about sqrt(2 / N).
  const double bias = squared_projection_bias(truth, BinGrid::uniform(10.0, 48));
  const double noise = *truth.integral * 48.0 / (10.0 * 4000.0);
  MESSAGE("n = 4000, N = 48, seed 4000: L2 distance ", d, ", bias floor ", std::sqrt(bias));
  CHECK(std::fabs(d * d - bias - noise) < 4.0 * noise * std::sqrt(2.0 / 48.0));
}

TEST_CASE("beta calibration") {
  CHECK(calibrate_beta(make_counts(1.0, 1, {3}), 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // H = alpha n Delta / beta0 for beta0 = 0.25, alpha = 2, n Delta = 2.
  CHECK(calibrate_beta(make_counts(2.0, 1, {16}), 2.0) == doctest::Approx(0.25).epsilon(1e-14));
  const auto c = make_counts(1.0, 2, {2, 0, 5});
  const double beta = calibrate_beta(c, 0.1);
  CHECK(beta > 0.0);
  CHECK(std::fabs(beta_equation_residual(c, 0.1, beta)) < 1e-12);
}

TEST_CASE("beta calibration residual on random instances") {
  RngStream rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint64_t> h(1 + trial % 20);
    for (auto& x : h) x = static_cast<std::uint64_t>(50 * rng.uniform() * rng.uniform());
    h[0] += 1;
    const auto c = make_counts(0.5 + 10 * rng.uniform(), 1 + trial % 7, h);
    const double alpha = std::exp(-3.0 + 6.0 * rng.uniform());
    const double beta = calibrate_beta(c, alpha);
    CHECK(std::fabs(beta_equation_residual(c, alpha, beta)) < 1e-12);
  }
}

TEST_CASE("beta calibration refuses empty data") {
  CHECK_THROWS_AS(calibrate_beta(make_counts(1.0, 1, {0, 0}), 1.0), ConfigError);
  CHECK_THROWS_AS(calibrate_beta(make_counts(1.0, 1, {1}), 0.0), ParameterError);
}
