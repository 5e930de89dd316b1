#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "ppinfer/error.hpp"
#include "ppinfer/random.hpp"

using namespace ppinfer;

namespace {

std::vector<double> gamma_draws(std::uint64_t seed, GammaParams p, std::size_t n) {
  RngStream rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = sample_gamma(rng, p);
  return v;
}

}  // namespace

TEST_CASE("same seed gives the same stream") {
  RngStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs = differs || x != c();
  }
  CHECK(differs);
}

TEST_CASE("split depends only on the parent key and the id") {
  RngStream parent(7);
  const auto before = parent.split(3);
  for (int i = 0; i < 100; ++i) parent();
  auto after = parent.split(3);
  auto fresh = before;
  for (int i = 0; i < 100; ++i) CHECK(fresh() == after());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t id = 0; id < 64; ++id) firsts.insert(parent.split(id)());
  CHECK(firsts.size() == 64);
  CHECK(RngStream(7, 3) == RngStream(7).split(3));
}

TEST_CASE("uniforms stay strictly inside (0, 1)") {
  RngStream rng(1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / 200000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal variates have unit variance") {
  RngStream rng(2);
  std::vector<double> v(200000);
  for (auto& x : v) x = rng.normal();
  CHECK(std::fabs(oracle::mean(v)) < 4.0 / std::sqrt(200000.0));
  CHECK(oracle::variance(v) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma with shape 1 is exponential") {
  const auto v = gamma_draws(11, {1.0, 2.0}, 100000);
  CHECK(oracle::ks_statistic(v, [](double x) { return oracle::exp_cdf(x, 2.0); }) < 0.006);
}

TEST_CASE("gamma(2, 3) mean over a million draws") {
  const auto v = gamma_draws(12, {2.0, 3.0}, 1000000);
  const double sigma = std::sqrt(2.0 / 9.0 / 1e6);
  CHECK(std::fabs(oracle::mean(v) - 2.0 / 3.0) < 4.0 * sigma);
}

TEST_CASE("gamma moments across shapes") {
  std::uint64_t seed = 100;
  for (double shape : {0.05, 0.1, 1.0, 2.0, 10.0, 100.0}) {
    for (double rate : {0.1, 1.0}) {
      CAPTURE(shape);
      CAPTURE(rate);
      constexpr std::size_t n = 400000;
      const auto v = gamma_draws(seed++, {shape, rate}, n);
      const double mu = shape / rate;
      const double var = shape / (rate * rate);
      // Var of the sample variance: (mu4 - sigma^4) / n with mu4 = 3a(a+2)/b^4.
      const double mu4 = 3.0 * shape * (shape + 2.0) / std::pow(rate, 4);
      CHECK(std::fabs(oracle::mean(v) - mu) < 4.0 * std::sqrt(var / n));
      CHECK(std::fabs(oracle::variance(v) - var) < 5.0 * std::sqrt((mu4 - var * var) / n));
      CHECK(*std::min_element(v.begin(), v.end()) > 0.0);
    }
  }
}

TEST_CASE("inverse gamma mean and median") {
  RngStream rng(21);
  std::vector<double> v(1000000);
  for (auto& x : v) x = sample_inverse_gamma(rng, 2.0, 2.0);
  CHECK(std::fabs(oracle::mean(v) - 2.0) < 4.0 * oracle::iid_se(v));

  for (auto& x : v) x = sample_inverse_gamma(rng, InvGammaParams{1.0, 3.0});
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  CHECK(v[v.size() / 2] == doctest::Approx(3.0 / std::log(2.0)).epsilon(0.02));
}

TEST_CASE("reciprocal of an inverse gamma draw is gamma") {
  RngStream rng(22);
  std::vector<double> v(100000);
  for (auto& x : v) x = 1.0 / sample_inverse_gamma(rng, 3.5, 1.5);
  CHECK(oracle::ks_statistic(v, [](double x) { return boost::math::gamma_p(3.5, 1.5 * x); }) < 0.006);
}

TEST_CASE("invalid parameters are rejected") {
  RngStream rng(0);
  CHECK_THROWS_AS(sample_gamma(rng, {0.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(sample_gamma(rng, {1.0, -1.0}), ParameterError);
  CHECK_THROWS_AS(sample_gamma(rng, {std::nan(""), 1.0}), ParameterError);
  CHECK_THROWS_AS(sample_inverse_gamma(rng, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(rng.exponential(0.0), ParameterError);
}

TEST_CASE("gamma params report their moments") {
  const GammaParams g{5.1, 1.1};
  CHECK(g.mean() == doctest::Approx(5.1 / 1.1));
  CHECK(g.variance() == doctest::Approx(5.1 / 1.21));
}
