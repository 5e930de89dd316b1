#pragma once

#include "ppinfer/random.hpp"

namespace ppinfer {

/// ln Gamma(x) for x > 0.
double log_gamma_fn(double x);

/// Regularized lower incomplete gamma P(shape, rate * x): the G(shape, rate) CDF.
double gamma_cdf(double x, const GammaParams& p);

/// CDF of IG(shape, scale) at x, i.e. Q(shape, scale / x).
double inverse_gamma_cdf(double x, const InvGammaParams& p);

/*!
 * Quantile of G(shape, rate): the x with gamma_cdf(x) = prob.
 *
 * Bracketed Newton iteration on the unit-rate variable, started from the
 * Wilson-Hilferty approximation (or the small-argument series for
 * tiny shapes). Any Newton step leaving the bracket is replaced by
 * bisection, so the iteration always converges. Monotone in prob.
 */
double gamma_quantile(double prob, const GammaParams& p);

/// Standard normal quantile.
double normal_quantile(double prob);

}  // namespace ppinfer
