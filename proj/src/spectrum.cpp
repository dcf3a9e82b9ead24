#include "sigspec/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "sigspec/numerics.hpp"

namespace sigspec {

namespace {
constexpr double kPi = 3.141592653589793;
}

void validate(const PropagationParams& p) {
    if (!(p.K > 0.0)) throw ParameterError("propagation: K must be positive");
    if (!(p.beta > 2.0)) throw ParameterError("propagation: beta must exceed 2");
    if (!(p.sigma > 0.0)) throw ParameterError("propagation: sigma must be positive");
    if (!(p.kappa > 0.0)) throw ParameterError("propagation: kappa must be positive");
}

double h_of(const PropagationParams& p, double r) {
    if (!(r > 0.0)) throw ParameterError("pathloss at the origin is undefined");
    return std::pow(p.K * r, p.beta);
}

double log_h_of(const PropagationParams& p, double r) {
    if (!(r > 0.0)) throw ParameterError("pathloss at the origin is undefined");
    return p.beta * std::log(p.K * r);
}

double pathloss(const PropagationParams& p, Point x) {
    return h_of(p, norm(x));
}

double b_of(const PropagationParams& p, double g_val, double t) {
    if (!(g_val > 0.0) || !(t > 0.0))
        throw ParameterError("b_of: g and t must be positive");
    return b_of_log(p, std::log(g_val), t);
}

double b_of_log(const PropagationParams& p, double log_g, double t) {
    return (log_g - std::log(t)) / p.sigma + p.sigma / p.beta;
}

double marginal_prob_radial(const PropagationParams& p, double r, double t) {
    return normal_upper_tail(b_of_log(p, log_h_of(p, r), t));
}

double marginal_prob(const PropagationParams& p, Point x, double t) {
    return marginal_prob_radial(p, norm(x), t);
}

double mean_measure_det(const PropagationParams& p, const PointConfig& config,
                        double t) {
    double m = 0.0;
    for (const auto& x : config.points) m += marginal_prob(p, x, t);
    return m;
}

namespace {

// radius where b(r) = u: log(K r) = (log t + sigma u - sigma^2/beta) / beta
double radius_of_b(const PropagationParams& p, double u, double t) {
    return std::exp((std::log(t) + p.sigma * u - p.sigma * p.sigma / p.beta) /
                    p.beta) /
           p.K;
}

} // namespace

double radial_marginal_mass(const PropagationParams& p, double a, double b,
                            double t, int power, double abs_tol) {
    if (!(t > 0.0)) return 0.0;
    if (a < 0.0) a = 0.0;
    if (!(b > a)) return 0.0;
    auto f = [&](double r) {
        if (r <= 0.0) return 0.0;
        double q = marginal_prob_radial(p, r, t);
        return (power == 2 ? q * q : q) * r;
    };
    // Split at the level sets b(r) = -10, -8, ..., 10; outside that band the
    // tail probability is flat (~1) or negligible, inside it each segment is
    // smooth at the quadrature's scale.
    std::vector<double> cuts;
    cuts.push_back(a);
    for (int u = -10; u <= 10; u += 2) {
        double r = radius_of_b(p, double(u), t);
        if (r > a && (std::isinf(b) || r < b)) cuts.push_back(r);
    }
    if (!std::isinf(b)) cuts.push_back(b);
    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate(f, cuts[i], cuts[i + 1],
                           abs_tol / double(cuts.size()));
    if (std::isinf(b)) total += integrate_to_inf(f, cuts.back(), abs_tol);
    return total;
}

double mean_measure_poisson_disc(const PropagationParams& p, double C,
                                 double t) {
    if (!(C > 0.0)) throw ParameterError("mean_measure_poisson_disc: C > 0");
    if (!(t > 0.0)) return 0.0;
    double tol = 1e-8 * std::max(1.0, mean_measure_limit(p, t));
    return p.kappa * 2.0 * kPi * radial_marginal_mass(p, 0.0, C, t, 1, tol);
}

double mean_measure_limit(const PropagationParams& p, double t) {
    if (t < 0.0) throw ParameterError("mean_measure_limit: t must be >= 0");
    if (t == 0.0) return 0.0;
    return p.kappa * kPi * std::pow(t, 2.0 / p.beta) / (p.K * p.K);
}

SpectrumSample realize_spectrum(const PropagationParams& p,
                                const PointConfig& config,
                                const FieldSample& field,
                                std::span<const double> thresholds) {
    if (long(config.points.size()) != field.s.size())
        throw ParameterError("realize_spectrum: field/configuration length mismatch");
    SpectrumSample out;
    out.counts.assign(thresholds.size(), 0);
    if (thresholds.empty()) return out;
    const double t_max = thresholds.back();
    for (size_t i = 0; i < config.points.size(); ++i) {
        double y = pathloss(p, config.points[i]) / field.s(i);
        if (y <= t_max) out.y.push_back(y);
    }
    std::sort(out.y.begin(), out.y.end());
    for (size_t k = 0; k < thresholds.size(); ++k)
        out.counts[k] = std::upper_bound(out.y.begin(), out.y.end(),
                                         thresholds[k]) -
                        out.y.begin();
    return out;
}

MillsBounds mills_bounds(double r) {
    if (!(r > 0.0)) throw ParameterError("mills_bounds: r must be positive");
    return {std::max(1.0 / (r + 1.0), r / (r * r + 1.0)),
            std::min(std::sqrt(kPi / 2.0), 1.0 / r)};
}

GaussExpect gauss_expect_identities(double m, double v) {
    if (!(v > 0.0)) throw ParameterError("gauss_expect_identities: v > 0");
    const double v2 = v * v;
    const double e = std::exp(-m * m / (2.0 * (1.0 + v2)));
    GaussExpect g;
    g.e_exp = e / std::sqrt(v2 + 1.0);
    g.ex_exp = m * e / std::pow(v2 + 1.0, 1.5);
    g.ex_pos_bound = std::sqrt(v2 + m * m);
    return g;
}

} // namespace sigspec
