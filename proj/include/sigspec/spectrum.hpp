#pragma once

#include <span>
#include <vector>

#include "sigspec/common.hpp"
#include "sigspec/gfield.hpp"
#include "sigspec/placement.hpp"

namespace sigspec {

/// Propagation and shadowing parameters.  The path gain from a transmitter
/// at x is (K |x|)^beta; the inverse signal strength is g(x)/S_x with
/// S_x = exp(sigma Z_x - sigma^2/beta).  Thresholds are kept in normalized
/// units (multiples of one transmitter power); dBm conversion lives at the
/// CLI boundary only.
struct PropagationParams {
    double K = 1.0;      // km^-1
    double beta = 4.0;   // > 2
    double sigma = 1.0;  // log-shadowing scale
    double kappa = 1.0;  // km^-2, used by disc/limit mean measures
};

void validate(const PropagationParams& p);

/// g(x) = (K |x|)^beta; the origin is outside the model's domain.
double pathloss(const PropagationParams& p, Point x);
double h_of(const PropagationParams& p, double r);
/// log h(r), safe where h itself would overflow.
double log_h_of(const PropagationParams& p, double r);

/// b = (1/sigma) log(g/t) + sigma/beta.  The log-domain form takes log(g).
double b_of(const PropagationParams& p, double g_val, double t);
double b_of_log(const PropagationParams& p, double log_g, double t);

/// P(0 < g(x)/S_x <= t): the standard normal upper tail at b.
double marginal_prob(const PropagationParams& p, Point x, double t);
double marginal_prob_radial(const PropagationParams& p, double r, double t);

/// Mean count M(t) for a fixed configuration: sum of marginal probabilities.
double mean_measure_det(const PropagationParams& p, const PointConfig& config,
                        double t);

/// int_a^b Q(b(r))^power r dr, with the quadrature subdivided along level
/// sets of b so the transition annulus is resolved even when the interval
/// spans many orders of magnitude.  b may be infinite.
double radial_marginal_mass(const PropagationParams& p, double a, double b,
                            double t, int power = 1, double abs_tol = 1e-12);

/// Mean count for a homogeneous placement restricted to the disc of radius
/// C, by radial quadrature.
double mean_measure_poisson_disc(const PropagationParams& p, double C,
                                 double t);

/// Large-sigma / whole-plane mean measure kappa pi t^{2/beta} / K^2.  For a
/// homogeneous random placement on the plane this equals the mean count at
/// every sigma.
double mean_measure_limit(const PropagationParams& p, double t);

/// Sorted realized inverse signal strengths up to the largest threshold and
/// the counts at each threshold.
struct SpectrumSample {
    std::vector<double> y;
    std::vector<long> counts;
};

SpectrumSample realize_spectrum(const PropagationParams& p,
                                const PointConfig& config,
                                const FieldSample& field,
                                std::span<const double> thresholds);

/// Two-sided bounds on the Gaussian Mills ratio
/// int_r^inf e^{-u^2/2} du / e^{-r^2/2}:
/// max(1/(r+1), r/(r^2+1)) <= ratio <= min(sqrt(pi/2), 1/r).
struct MillsBounds {
    double lower;
    double upper;
};
MillsBounds mills_bounds(double r);

/// For X ~ Normal(m, v^2): E e^{-X^2/2}, E X e^{-X^2/2} in closed form, and
/// the bound E X 1[X>0] <= sqrt(v^2 + m^2).
struct GaussExpect {
    double e_exp;
    double ex_exp;
    double ex_pos_bound;
};
GaussExpect gauss_expect_identities(double m, double v);

} // namespace sigspec
