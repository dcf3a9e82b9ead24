#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sigspec/common.hpp"
#include "sigspec/correlation.hpp"
#include "sigspec/placement.hpp"
#include "sigspec/spectrum.hpp"

namespace sigspec {

enum class BoundCase { Deterministic, PoissonPlacement, HardCore };

enum class MeanDevMode { Quadrature, MonteCarlo, UserGamma };

/// Everything the Poisson-approximation error bounds consume.  R is the
/// interaction radius (must satisfy the P2 monotonicity check), C >= R the
/// truncation radius.  Deterministic placements supply geometry statistics
/// and the configuration mean measure; random placements supply the process
/// descriptors instead and use the whole-plane mean kappa pi t^{2/beta}/K^2.
struct BoundInputs {
    PropagationParams params;
    CorrelationModel model;
    double t = 1.0;
    double R = 1.0;
    double C = 1.0;
    BoundCase bcase = BoundCase::Deterministic;

    // deterministic case
    GeometryStats stats;
    double mean_measure = 0.0;  // M(t) of the configuration
    bool config_closed = true;  // no transmitters beyond C
    // exact truncation mass 2 sum_{|x|>C} Q(b_x) when the full configuration
    // is known; negative means "not available, use the analytic surrogate"
    double truncation_sum = -1.0;

    // random cases
    double d = 0.0;       // exclusion radius around the receiver
    double eps0 = 0.0;    // Poisson: near-pair split radius
    double eps_c = 0.0;   // Poisson: minimum-distance event scale
    double t_star = 0.0;  // Poisson: point-count cap (0 -> 16 e kappa R^2)
    double eps_star = 0.0; // hard core distance

    // hard-core mean-deviation estimation
    MeanDevMode mean_dev_mode = MeanDevMode::MonteCarlo;
    double gamma_plus = 0.0;   // user-supplied positive variation mass
    int mean_dev_reps = 200;
    std::uint64_t mean_dev_seed = 1;
};

/// Itemized bound: named non-negative terms, the preconditions actually
/// checked, and the total (sum of terms) when every precondition holds.
struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    std::vector<std::pair<std::string, bool>> preconditions;
    std::vector<std::pair<std::string, double>> metadata; // not summed
    double f_value = 0.0;
    bool valid = false;
    bool informative = false; // valid and total < 1
    double total = std::numeric_limits<double>::quiet_NaN();

    double term(const std::string& key) const;
};

void write_bound_report(const BoundReport& report, std::ostream& out);
void write_bound_report_kv(const BoundReport& report, std::ostream& out);

/// F = (4 pi + 1)/delta * T * (rho~^2(R) + (1/(sqrt(3) R^2)) int_R^inf s rho~^2(s) ds).
/// Zero when the correlation term vanishes (compact support within R, nugget),
/// in which case delta is not consulted.
double f_factor(double delta, double T, const CorrelationModel& model,
                double R);

/// Wasserstein-type bound between the spectrum of a fixed configuration and
/// the Poisson process with its mean measure, restricted to [0, t].
BoundReport d2_bound_det(const BoundInputs& in);

/// Total variation version; only the b_* > 0 and P2 preconditions apply.
BoundReport dtv_bound_det(const BoundInputs& in);

/// Poisson transmitter placement.  Mean-deviation terms are bounded by
/// Cauchy-Schwarz through Var(M^Xi(s)) = kappa int Q(b_x(s))^2 dx, evaluated
/// by radial quadrature and integrated over s.
BoundReport d2_bound_poisson(const BoundInputs& in);

/// Second-order stationary hard-core placement with distance eps_star.
/// Mean-deviation terms come either from a seeded Monte Carlo estimate over
/// mean_dev_reps thinned configurations (with the neglected tail added) or
/// from the user-supplied positive-variation mass gamma_plus.
BoundReport d2_bound_hardcore(const BoundInputs& in);

/// Upper bound on the conditional-variance quadratic form gamma' Gamma^-1
/// gamma for conditioning points outside the R-ball; equals f_factor.
double gamma_quadform_bound(double delta, double T,
                            const CorrelationModel& model, double R);

/// The exact quadratic form, solved through the factorization.
double gamma_quadform_exact(const CorrelationModel& model, Point x0,
                            std::span<const Point> conditioning);

/// dTV(N(m, s^2), N(0,1)) <= 2 |1 - s^2| + sqrt(pi/2) |m|, and the exact
/// distance by adaptive quadrature (abs tol 1e-9).
double dtv_normal_bound(double m, double s);
double dtv_normal_exact(double m, double s);

/// P(X >= s) <= exp(-s (log(s/mu) - 1) - mu) for X ~ Poisson(mu), s >= mu.
double poisson_chernoff(double mu, double s);

/// Bound on the Wasserstein distance between two finite Poisson processes on
/// [0, t] with mean-value functions L1, L2 (non-decreasing, 0 at 0):
/// int_0^t |L1 - L2| ds + |L1(t) - L2(t)|.
double d2_poisson_poisson(const std::function<double(double)>& L1,
                          const std::function<double(double)>& L2, double t);

enum class ScheduleCase { DetD2, DetDTV, Poisson, HardCore };

/// The parameter choices under which the bounds provably vanish as sigma
/// grows, for a dominator with tail exponent a (polynomial decay r^-(1+a);
/// the Poisson case assumes exponential decay and uses R = sigma^3).
struct Schedule {
    double C = 0.0;
    double R = 0.0;
    double d = 0.0;
    double eps0 = 0.0;
    double eps_c = 0.0;
    double t_star = 0.0;
};

Schedule convergence_schedule(double sigma, double a,
                              const PropagationParams& params,
                              ScheduleCase scase,
                              const CorrelationModel& model);

} // namespace sigspec
