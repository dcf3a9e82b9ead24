#include "sigspec/bounds.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "sigspec/numerics.hpp"

namespace sigspec {

namespace {

constexpr double kPi = 3.141592653589793;

double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

// min(M, 1 + 2 log+ M): the smoothing factor in the Wasserstein bound.
double wasserstein_prefactor(double m) {
    return std::min(m, 1.0 + 2.0 * log_plus(m));
}

// 2 pi int_C^inf Q(b(r)) r dr, the expected count beyond the truncation
// radius per unit intensity.
double radial_tail_mass(const PropagationParams& p, double C, double t) {
    const double inf = std::numeric_limits<double>::infinity();
    return 2.0 * kPi *
           radial_marginal_mass(p, C, inf, t, 1,
                                1e-12 * std::max(1.0, mean_measure_limit(p, t)));
}

// Var(M^Xi(s)) for Poisson placement: kappa int Q(b_x(s))^2 dx.
double poisson_mean_variance(const PropagationParams& p, double s) {
    if (!(s > 0.0)) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    return p.kappa * 2.0 * kPi *
           radial_marginal_mass(p, 0.0, inf, s, 2,
                                1e-12 * std::max(1.0, mean_measure_limit(p, s)));
}

// The conditioning block shared by every Wasserstein bound:
// 8 (t+1) (B_C + 1/sigma) sqrt(F) / sqrt(1 - F^2)
//   + (t+1) (1 + 1/b^2) sqrt(F) exp(-b^2 (1/F - 1) / 2).
// F = 0 kills both pieces.
std::pair<double, double> field_coupling_terms(double F, double B_C, double b,
                                               double sigma, double t) {
    if (F <= 0.0) return {0.0, 0.0};
    double sqrt_f = std::sqrt(F);
    double main_term = F < 1.0 ? 8.0 * (t + 1.0) * (B_C + 1.0 / sigma) *
                                     sqrt_f / std::sqrt(1.0 - F * F)
                               : std::numeric_limits<double>::infinity();
    double exp_term = (t + 1.0) * (1.0 + 1.0 / (b * b)) * sqrt_f *
                      std::exp(-0.5 * b * b * (1.0 / F - 1.0));
    return {main_term, exp_term};
}

// F for a model at separation eps: skips the u.p.d. constant entirely when
// the correlation mass at R already vanishes (nugget, compact support inside
// R), and falls back to delta = 1 for configurations without a point pair
// (no conditioning set has more than one point, where any constant works).
double f_factor_model(const CorrelationModel& model, double eps, double T,
                      double R) {
    double rho = radial_dominator(model, R);
    double corr_mass =
        rho * rho + tail_integral(model, R) / (std::sqrt(3.0) * R * R);
    if (corr_mass == 0.0) return 0.0;
    if (!std::isfinite(eps)) return f_factor(1.0, T, model, R);
    return f_factor(upd_delta(model, eps), T, model, R);
}

void require_domain(const BoundInputs& in) {
    if (!(in.t > 0.0)) throw ParameterError("bound: t must be positive");
    if (!(in.R > 0.0)) throw ParameterError("bound: R must be positive");
    if (!(in.C > 0.0)) throw ParameterError("bound: C must be positive");
}

void finalize(BoundReport& rep) {
    rep.valid = true;
    for (const auto& [name, ok] : rep.preconditions) rep.valid &= ok;
    if (!rep.valid) {
        rep.total = std::numeric_limits<double>::quiet_NaN();
        rep.informative = false;
        return;
    }
    rep.total = 0.0;
    for (const auto& [name, v] : rep.terms) rep.total += v;
    rep.informative = rep.total < 1.0;
}

struct MeanDevTerms {
    double at_t = 0.0;
    double integral = 0.0;
    double se_at_t = 0.0;
    double se_integral = 0.0;
};

// Seeded Monte Carlo estimate of E|M^Xi(t) - M(t)| and its s-integral for
// the hard-core placement.  Configurations are generated on a disc chosen so
// the neglected exterior mean mass is below 1e-6 (1 + M(t)); twice that mass
// is added to each estimate to keep the reported terms valid upper bounds.
MeanDevTerms hardcore_mean_dev_mc(const BoundInputs& in) {
    if (in.mean_dev_reps < 30)
        throw InsufficientReplicationsError(
            "hard-core mean-deviation estimate needs at least 30 replications");
    const auto& p = in.params;
    const double t = in.t;
    const double tol = 1e-6 * (1.0 + mean_measure_limit(p, t));
    double gen_radius = std::max(1.0, in.eps_star);
    while (radial_tail_mass(p, gen_radius, t) > tol && gen_radius < 4096.0)
        gen_radius *= 2.0;
    const double tail = radial_tail_mass(p, gen_radius, t);
    const double kappa_parent =
        matern2_parent_for_target(p.kappa, in.eps_star);

    // Simpson grid over [0, t] for the per-configuration deviation integral.
    const int n_nodes = 129;
    const double quad_tol = 1e-10 * (1.0 + mean_measure_limit(p, t));
    std::vector<double> s_grid(n_nodes), m_disc(n_nodes);
    for (int j = 0; j < n_nodes; ++j) {
        s_grid[j] = t * double(j) / double(n_nodes - 1);
        m_disc[j] = s_grid[j] == 0.0
                        ? 0.0
                        : p.kappa * 2.0 * kPi *
                              radial_marginal_mass(p, 0.0, gen_radius,
                                                   s_grid[j], 1, quad_tol);
    }
    std::vector<double> dev_t(in.mean_dev_reps), dev_int(in.mean_dev_reps);
    for (int rep = 0; rep < in.mean_dev_reps; ++rep) {
        Rng rng = rng_for_rep(in.mean_dev_seed, std::uint64_t(rep));
        PointConfig cfg =
            gen_hardcore_matern2(kappa_parent, in.eps_star, gen_radius, rng);
        std::vector<double> dev(n_nodes, 0.0);
        for (int j = 1; j < n_nodes; ++j)
            dev[j] = std::fabs(mean_measure_det(p, cfg, s_grid[j]) - m_disc[j]);
        dev_t[rep] = dev[n_nodes - 1];
        double h = t / double(n_nodes - 1);
        double acc = dev[0] + dev[n_nodes - 1];
        for (int j = 1; j < n_nodes - 1; ++j)
            acc += (j % 2 ? 4.0 : 2.0) * dev[j];
        dev_int[rep] = acc * h / 3.0;
    }
    auto mean_sd = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= double(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::pair{m, std::sqrt(ss / double(v.size() - 1) /
                                      double(v.size()))};
    };
    auto [mt, set] = mean_sd(dev_t);
    auto [mi, sei] = mean_sd(dev_int);
    return {mt + 2.0 * tail, mi + 2.0 * tail * t, set, sei};
}

// Var(M^Xi(s)) bound for a hard-core process from the user-supplied positive
// variation mass: kappa pi / sigma^2 + (1 + 2 gamma+) M(s) Q(b(1/sigma, s)).
double hardcore_mean_variance_user(const BoundInputs& in, double s) {
    if (!(s > 0.0)) return 0.0;
    const auto& p = in.params;
    double q_near = marginal_prob_radial(p, 1.0 / p.sigma, s);
    return p.kappa * kPi / (p.sigma * p.sigma) +
           (1.0 + 2.0 * in.gamma_plus) * mean_measure_limit(p, s) * q_near;
}

} // namespace

double BoundReport::term(const std::string& key) const {
    for (const auto& [name, v] : terms)
        if (name == key) return v;
    throw ParameterError("bound report has no term named " + key);
}

void write_bound_report(const BoundReport& report, std::ostream& out) {
    out << report.name << "\n";
    for (const auto& [name, ok] : report.preconditions)
        out << "  precondition " << name << ": " << (ok ? "ok" : "FAILED")
            << "\n";
    out << "  F = " << report.f_value << "\n";
    for (const auto& [name, v] : report.terms)
        out << "  " << name << " = " << v << "\n";
    for (const auto& [name, v] : report.metadata)
        out << "  # " << name << " = " << v << "\n";
    if (report.valid)
        out << "  total = " << report.total
            << (report.informative ? "" : "  (not informative: >= 1)") << "\n";
    else
        out << "  total = (invalid: preconditions not met)\n";
}

void write_bound_report_kv(const BoundReport& report, std::ostream& out) {
    out << "name = " << report.name << "\n";
    out << "valid = " << (report.valid ? 1 : 0) << "\n";
    out << "informative = " << (report.informative ? 1 : 0) << "\n";
    out << "f_value = " << report.f_value << "\n";
    for (const auto& [name, ok] : report.preconditions)
        out << "precondition." << name << " = " << (ok ? 1 : 0) << "\n";
    for (const auto& [name, v] : report.terms)
        out << "term." << name << " = " << v << "\n";
    for (const auto& [name, v] : report.metadata)
        out << "meta." << name << " = " << v << "\n";
    if (report.valid) out << "total = " << report.total << "\n";
}

double f_factor(double delta, double T, const CorrelationModel& model,
                double R) {
    if (!(T >= 1.0)) throw ParameterError("f_factor: T must be at least 1");
    if (!(R > 0.0)) throw ParameterError("f_factor: R must be positive");
    double rho = radial_dominator(model, R);
    double corr_mass =
        rho * rho + tail_integral(model, R) / (std::sqrt(3.0) * R * R);
    if (corr_mass == 0.0) return 0.0;
    if (!(delta > 0.0)) throw ParameterError("f_factor: delta must be positive");
    return (4.0 * kPi + 1.0) / delta * T * corr_mass;
}

BoundReport d2_bound_det(const BoundInputs& in) {
    validate(in.params);
    require_domain(in);
    const auto& p = in.params;
    BoundReport rep;
    rep.name = "d2 bound, fixed placement";
    const double b_star = b_of_log(p, log_h_of(p, in.stats.d_star), in.t);
    const double B_C = b_of_log(p, log_h_of(p, in.C), in.t);
    const double F = f_factor_model(in.model, in.stats.eps_min,
                                    double(in.stats.t_upper), in.R);
    rep.f_value = F;
    rep.preconditions = {
        {"b_star_positive", b_star > 0.0},
        {"B_C_above_one", B_C > 1.0},
        {"B_C_sq_F_at_most_one", B_C * B_C * F <= 1.0},
        {"F_below_one", F < 1.0},
        {"p2_at_R", check_p2(in.model, in.R).ok},
        {"C_at_least_R", in.C >= in.R},
    };
    double trunc = in.config_closed
                       ? 0.0
                       : (in.truncation_sum >= 0.0
                              ? in.truncation_sum
                              : 2.0 * p.kappa * radial_tail_mass(p, in.C, in.t));
    const double pref = wasserstein_prefactor(in.mean_measure);
    const double T = double(in.stats.t_upper);
    double rho_eps = radial_dominator(in.model, in.stats.eps_min);
    double pair_mean = pref * T * normal_upper_tail(b_star);
    double pair_joint =
        pref * T * 5.0 *
        std::exp(-0.25 * b_star * b_star * (1.0 - rho_eps));
    auto [main_term, exp_term] =
        field_coupling_terms(F, B_C, b_star, p.sigma, in.t);
    rep.terms = {
        {"truncation", trunc},
        {"pair_mean", pair_mean},
        {"pair_joint", pair_joint},
        {"field_coupling_main", pref * main_term},
        {"field_coupling_exp", pref * exp_term},
    };
    finalize(rep);
    return rep;
}

BoundReport dtv_bound_det(const BoundInputs& in) {
    validate(in.params);
    require_domain(in);
    const auto& p = in.params;
    BoundReport rep;
    rep.name = "dTV bound, fixed placement";
    const double b_star = b_of_log(p, log_h_of(p, in.stats.d_star), in.t);
    const double F = f_factor_model(in.model, in.stats.eps_min,
                                    double(in.stats.t_upper), in.R);
    rep.f_value = F;
    rep.preconditions = {
        {"b_star_positive", b_star > 0.0},
        {"p2_at_R", check_p2(in.model, in.R).ok},
        {"C_at_least_R", in.C >= in.R},
    };
    double trunc = in.config_closed
                       ? 0.0
                       : (in.truncation_sum >= 0.0
                              ? in.truncation_sum
                              : 2.0 * p.kappa * radial_tail_mass(p, in.C, in.t));
    const double T = double(in.stats.t_upper);
    const double M = in.mean_measure;
    double rho_eps = radial_dominator(in.model, in.stats.eps_min);
    double area_factor = 4.0 / 3.0 *
                         (kPi * in.C * in.C / (in.R * in.R) +
                          (5.0 * kPi + 3.0) * in.C / in.R);
    rep.terms = {
        {"truncation", trunc},
        {"pair_mean", M * T * normal_upper_tail(b_star)},
        {"pair_joint",
         M * T * 5.0 * std::exp(-0.25 * b_star * b_star * (1.0 - rho_eps))},
        {"field_coupling_area",
         area_factor * T * (std::sqrt(F) + 2.0 * F)},
    };
    finalize(rep);
    return rep;
}

BoundReport d2_bound_poisson(const BoundInputs& in) {
    validate(in.params);
    require_domain(in);
    const auto& p = in.params;
    BoundReport rep;
    rep.name = "d2 bound, Poisson placement";
    const double t_star =
        in.t_star > 0.0 ? in.t_star
                        : 16.0 * std::exp(1.0) * p.kappa * in.R * in.R;
    const double b = b_of_log(p, log_h_of(p, in.d), in.t);
    const double B_C = b_of_log(p, log_h_of(p, in.C), in.t);
    const double F = f_factor_model(in.model, in.eps_c, t_star, in.R);
    rep.f_value = F;
    const double chernoff_mean = 16.0 * p.kappa * in.R * in.R;
    rep.preconditions = {
        {"b_positive", b > 0.0},
        {"B_C_above_one", B_C > 1.0},
        {"B_C_sq_F_at_most_one", B_C * B_C * F <= 1.0},
        {"F_below_one", F < 1.0},
        {"t_star_at_least_16_kappa_R_sq", t_star >= chernoff_mean},
        {"p2_at_R", check_p2(in.model, in.R).ok},
        {"C_at_least_R", in.C >= in.R},
        {"eps0_positive", in.eps0 > 0.0},
        {"eps_c_positive", in.eps_c > 0.0},
    };
    const double M = mean_measure_limit(p, in.t);
    double mean_dev_t = std::sqrt(poisson_mean_variance(p, in.t));
    double mean_dev_int = integrate(
        [&](double s) { return std::sqrt(poisson_mean_variance(p, s)); }, 0.0,
        in.t, 1e-8 * (1.0 + mean_dev_t * in.t));
    double rho_eps0 = radial_dominator(in.model, in.eps0);
    auto [main_term, exp_term] = field_coupling_terms(F, B_C, b, p.sigma, in.t);
    rep.terms = {
        {"truncation", 2.0 * p.kappa * radial_tail_mass(p, in.C, in.t)},
        {"mean_dev_t", mean_dev_t},
        {"mean_dev_integral", mean_dev_int},
        {"pair_mean",
         M * (p.kappa * kPi * in.R * in.R + 1.0) *
             normal_upper_tail(b)},
        {"pair_joint",
         M * 5.0 * p.kappa * kPi *
             (in.eps0 * in.eps0 +
              in.R * in.R *
                  std::exp(-0.25 * b * b * (1.0 - rho_eps0)))},
        {"field_coupling_main", M * main_term},
        {"field_coupling_exp", M * exp_term},
        {"origin_ball", p.kappa * kPi * in.d * in.d},
        {"count_chernoff",
         std::pow(in.C / in.R + 1.0, 2.0) *
             poisson_chernoff(chernoff_mean, t_star)},
        {"min_dist",
         std::pow(2.0 * in.C / in.eps_c + 1.0, 2.0) *
             std::pow(4.0 * p.kappa * in.eps_c * in.eps_c, 2.0)},
    };
    finalize(rep);
    return rep;
}

BoundReport d2_bound_hardcore(const BoundInputs& in) {
    validate(in.params);
    require_domain(in);
    const auto& p = in.params;
    if (!(in.eps_star > 0.0))
        throw ParameterError("hard-core bound: eps_star must be positive");
    BoundReport rep;
    rep.name = "d2 bound, hard-core placement";
    const double t_star =
        4.0 * std::pow((in.R + 0.5 * in.eps_star) / in.eps_star, 2.0);
    const double b = b_of_log(p, log_h_of(p, in.d), in.t);
    const double B_C = b_of_log(p, log_h_of(p, in.C), in.t);
    const double F = f_factor_model(in.model, in.eps_star, t_star, in.R);
    rep.f_value = F;
    rep.preconditions = {
        {"b_positive", b > 0.0},
        {"B_C_above_one", B_C > 1.0},
        {"B_C_sq_F_at_most_one", B_C * B_C * F <= 1.0},
        {"F_below_one", F < 1.0},
        {"p2_at_R", check_p2(in.model, in.R).ok},
        {"C_at_least_R", in.C >= in.R},
    };
    double mean_dev_t, mean_dev_int;
    if (in.mean_dev_mode == MeanDevMode::MonteCarlo) {
        MeanDevTerms md = hardcore_mean_dev_mc(in);
        mean_dev_t = md.at_t;
        mean_dev_int = md.integral;
        rep.metadata.push_back({"mean_dev_t_se", md.se_at_t});
        rep.metadata.push_back({"mean_dev_integral_se", md.se_integral});
        rep.metadata.push_back({"mean_dev_reps", double(in.mean_dev_reps)});
    } else if (in.mean_dev_mode == MeanDevMode::UserGamma) {
        rep.preconditions.push_back(
            {"sigma_above_2_over_eps_star", p.sigma > 2.0 / in.eps_star});
        mean_dev_t = std::sqrt(hardcore_mean_variance_user(in, in.t));
        mean_dev_int = integrate(
            [&](double s) {
                return std::sqrt(hardcore_mean_variance_user(in, s));
            },
            0.0, in.t, 1e-8 * (1.0 + mean_dev_t * in.t));
    } else {
        throw ParameterError(
            "hard-core bound: mean_dev_mode must be MonteCarlo or UserGamma");
    }
    const double M = mean_measure_limit(p, in.t);
    double rho_eps = radial_dominator(in.model, in.eps_star);
    auto [main_term, exp_term] = field_coupling_terms(F, B_C, b, p.sigma, in.t);
    rep.terms = {
        {"truncation", 2.0 * p.kappa * radial_tail_mass(p, in.C, in.t)},
        {"mean_dev_t", mean_dev_t},
        {"mean_dev_integral", mean_dev_int},
        {"pair_mean", M * t_star * normal_upper_tail(b)},
        {"pair_joint",
         M * t_star * 5.0 *
             std::exp(-0.25 * b * b * (1.0 - rho_eps))},
        {"origin_ball", p.kappa * kPi * in.d * in.d},
        {"field_coupling_main", M * main_term},
        {"field_coupling_exp", M * exp_term},
    };
    finalize(rep);
    return rep;
}

double gamma_quadform_bound(double delta, double T,
                            const CorrelationModel& model, double R) {
    return f_factor(delta, T, model, R);
}

double gamma_quadform_exact(const CorrelationModel& model, Point x0,
                            std::span<const Point> conditioning) {
    if (conditioning.empty()) return 0.0;
    Eigen::MatrixXd gamma_mat = corr_matrix(model, conditioning);
    Eigen::VectorXd gamma(conditioning.size());
    for (size_t k = 0; k < conditioning.size(); ++k)
        gamma(k) = eval_rho(model, dist(x0, conditioning[k]));
    Eigen::LLT<Eigen::MatrixXd> llt(gamma_mat);
    if (llt.info() != Eigen::Success)
        throw IllConditionedError("gamma_quadform_exact: singular matrix");
    return gamma.dot(llt.solve(gamma));
}

double dtv_normal_bound(double m, double s) {
    if (!(s > 0.0)) throw ParameterError("dtv_normal_bound: s must be positive");
    return 2.0 * std::fabs(1.0 - s * s) + std::sqrt(kPi / 2.0) * std::fabs(m);
}

double dtv_normal_exact(double m, double s) {
    if (!(s > 0.0)) throw ParameterError("dtv_normal_exact: s must be positive");
    double lo = std::min(-10.0, m - 10.0 * s);
    double hi = std::max(10.0, m + 10.0 * s);
    return 0.5 * integrate(
                     [&](double x) {
                         return std::fabs(normal_pdf((x - m) / s) / s -
                                          normal_pdf(x));
                     },
                     lo, hi, 1e-9);
}

double poisson_chernoff(double mu, double s) {
    if (!(mu > 0.0)) throw ParameterError("poisson_chernoff: mu must be positive");
    if (s < mu) throw ParameterError("poisson_chernoff: requires s >= mu");
    return std::exp(-s * (std::log(s / mu) - 1.0) - mu);
}

double d2_poisson_poisson(const std::function<double(double)>& L1,
                          const std::function<double(double)>& L2, double t) {
    if (!(t > 0.0)) throw ParameterError("d2_poisson_poisson: t must be positive");
    auto check = [&](const std::function<double(double)>& L, const char* who) {
        if (std::fabs(L(0.0)) > 1e-12)
            throw ParameterError(std::string(who) +
                                 ": mean-value function must vanish at 0");
        double prev = 0.0;
        const int n = 1024;
        for (int i = 1; i <= n; ++i) {
            double v = L(t * double(i) / n);
            if (v < prev - 1e-12 * (1.0 + std::fabs(prev)))
                throw ParameterError(std::string(who) +
                                     ": mean-value function must be non-decreasing");
            prev = v;
        }
    };
    check(L1, "d2_poisson_poisson: L1");
    check(L2, "d2_poisson_poisson: L2");
    double endpoint = std::fabs(L1(t) - L2(t));
    double area = integrate(
        [&](double s) { return std::fabs(L1(s) - L2(s)); }, 0.0, t,
        1e-10 * (1.0 + std::fabs(L1(t)) + std::fabs(L2(t))) * std::max(t, 1.0));
    return area + endpoint;
}

Schedule convergence_schedule(double sigma, double a,
                              const PropagationParams& params,
                              ScheduleCase scase,
                              const CorrelationModel& model) {
    if (!(sigma > 1.0))
        throw ParameterError("convergence_schedule: sigma must exceed 1");
    if (!(a > 0.0))
        throw ParameterError("convergence_schedule: tail exponent a must be positive");
    const double beta = params.beta;
    Schedule sch;
    sch.C = std::exp(sigma * sigma / (beta * beta) + std::pow(sigma, 1.1));
    switch (scase) {
        case ScheduleCase::DetD2:
        case ScheduleCase::HardCore:
            sch.R = std::pow(sigma, 2.0 / a);
            break;
        case ScheduleCase::DetDTV:
            sch.R = std::exp(2.0 * sigma * sigma / (a * beta * beta) +
                             2.0 * std::pow(sigma, 1.1) / a);
            break;
        case ScheduleCase::Poisson:
            sch.R = sigma * sigma * sigma;
            break;
    }
    sch.d = 1.0 / (sigma * sigma);
    sch.eps_c = std::exp(-sigma * sigma / (beta * beta) -
                         2.0 * std::pow(sigma, 1.1));
    sch.t_star = 16.0 * std::exp(1.0) * params.kappa * sch.R * sch.R;

    // eps0 = 1/sigma + sup{eps >= 0 : 1 - rho~(eps) <= 1/sigma}, by bisection.
    const double target = 1.0 - 1.0 / sigma;
    double lo = 0.0, hi = model.kind == CorrKind::Nugget ? 0.0 : model.scale;
    while (hi > 0.0 && radial_dominator(model, hi) >= target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (radial_dominator(model, mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    sch.eps0 = 1.0 / sigma + lo;
    return sch;
}

} // namespace sigspec
