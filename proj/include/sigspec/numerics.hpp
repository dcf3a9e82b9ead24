#pragma once

#include <cstdint>
#include <functional>

#include "sigspec/common.hpp"

namespace sigspec {

/// Standard normal upper tail Q(x) = P(Z > x).
/// Relative error a few ulp of erfc on |x| <= 8, absolute error far below
/// 1e-30 beyond (erfc is exact to underflow).
double normal_upper_tail(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with k degrees of freedom.
double chi2_sf(double x, double k);

/// Poisson pmf and CDF, stable for large mean via lgamma.
double poisson_pmf(long k, double mu);
double poisson_cdf(long k, double mu);

/// Adaptive Simpson quadrature on [a, b] with absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol);

/// Integral over [a, infinity), advancing in doubling windows until a window
/// contributes less than tol relative to the accumulated absolute mass.
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double abs_tol);

/// Modified Bessel function of the second kind, real order nu >= 0, x > 0,
/// via trapezoidal evaluation of the cosh integral representation.
/// Accuracy on the order of 1e-12 relative for moderate arguments; the
/// library relies on it only away from the half-integer closed forms.
double bessel_k(double nu, double x);

/// One standard normal variate by Box-Muller; consumes two uniforms.
double draw_normal(Rng& rng);

/// Uniform double in (0, 1), never returning an endpoint.
double draw_uniform(Rng& rng);

/// Poisson count by the exponential-gaps method; exact for any mean.
long draw_poisson(double mean, Rng& rng);

/// The replication rng: a fresh engine deterministically derived from
/// (seed, rep), independent of worker scheduling.
Rng rng_for_rep(std::uint64_t seed, std::uint64_t rep);

} // namespace sigspec
