#include "ppinfer/special.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "ppinfer/error.hpp"

namespace ppinfer {

double log_gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ParameterError("log_gamma_fn requires a positive finite argument, got " +
                         std::to_string(x));
  }
  return boost::math::lgamma(x);
}

double gamma_cdf(double x, const GammaParams& p) {
  p.validate();
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(p.shape, p.rate * x);
}

double inverse_gamma_cdf(double x, const InvGammaParams& p) {
  p.validate();
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_q(p.shape, p.scale / x);
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw ParameterError("normal_quantile requires prob in (0,1), got " + std::to_string(prob));
  }
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * prob);
}

namespace {

double initial_guess(double shape, double prob) {
  // Small-argument series P(a, y) ~ y^a / Gamma(a + 1) is accurate when the
  // target sits deep in the left tail; Wilson-Hilferty elsewhere.
  const double log_small = (std::log(prob) + boost::math::lgamma(shape + 1.0)) / shape;
  if (shape < 1.0 || log_small < std::log(0.2 * shape)) {
    return std::exp(log_small);
  }
  const double z = normal_quantile(prob);
  const double c = 1.0 / (9.0 * shape);
  const double w = 1.0 - c + z * std::sqrt(c);
  if (w <= 0.0) return std::exp(log_small);
  return shape * w * w * w;
}

}  // namespace

double gamma_quantile(double prob, const GammaParams& p) {
  p.validate();
  if (!(prob > 0.0 && prob < 1.0)) {
    throw ParameterError("gamma_quantile requires prob in (0,1), got " + std::to_string(prob));
  }
  const double a = p.shape;
  const double tiny = std::numeric_limits<double>::min();

  // Work on the unit-rate scale y = rate * x.
  double y = initial_guess(a, prob);
  if (!(y > tiny) || !std::isfinite(y)) y = tiny;

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  auto f = [&](double v) { return boost::math::gamma_p(a, v) - prob; };

  double fy = f(y);
  for (int iter = 0; iter < 400; ++iter) {
    if (fy == 0.0) break;
    if (fy < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    if (std::isfinite(hi) && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;

    const double dens = boost::math::gamma_p_derivative(a, y);
    double next = (dens > 0.0 && std::isfinite(dens)) ? y - fy / dens
                                                       : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : (lo > 0.0 ? 2.0 * lo : 2.0 * y);
    }
    if (next == y) break;
    y = next;
    fy = f(y);
    if (std::fabs(fy) <= 1e-15 * prob) break;
  }
  if (!std::isfinite(y)) {
    throw NumericalError("gamma_quantile failed to converge for shape " + std::to_string(a));
  }
  // An exact underflow is reported as the smallest positive normal value.
  return std::fmax(y / p.rate, tiny);
}

}  // namespace ppinfer
