#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sigspec/bounds.hpp"
#include "sigspec/gfield.hpp"
#include "sigspec/numerics.hpp"

using namespace sigspec;

namespace {
constexpr double kPi = 3.141592653589793;

CorrelationModel expo(double s) { return {CorrKind::Exponential, s, 0.5, 2}; }
CorrelationModel wendland(double s, int k) { return {CorrKind::Wendland, s, double(k), 2}; }
CorrelationModel nugget() { return {CorrKind::Nugget, 1.0, 0.0, 2}; }

// 10 x 10 unit-spacing grid centered away from the origin
PointConfig unit_grid() {
    PointConfig cfg;
    cfg.kind = PlacementKind::Explicit;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            cfg.points.push_back({i - 4.5, j - 4.5});
    cfg.disc_radius = 4.5 * std::sqrt(2.0) + 1e-9;
    cfg.intensity = 100.0 / (kPi * cfg.disc_radius * cfg.disc_radius);
    return cfg;
}

BoundInputs det_inputs(const PointConfig& cfg, const CorrelationModel& model,
                       const PropagationParams& params, double t, double R) {
    BoundInputs in;
    in.params = params;
    in.model = model;
    in.t = t;
    in.R = R;
    in.C = cfg.disc_radius;
    in.bcase = BoundCase::Deterministic;
    in.stats = geometry_stats(cfg, R);
    in.mean_measure = mean_measure_det(params, cfg, t);
    in.config_closed = true;
    return in;
}

void check_terms_nonnegative_and_sum(const BoundReport& rep) {
    double sum = 0.0;
    for (const auto& [name, v] : rep.terms) {
        CHECK(v >= 0.0);
        sum += v;
    }
    if (rep.valid) CHECK(rep.total == doctest::Approx(sum).epsilon(1e-14));
}

} // namespace

TEST_CASE("f_factor") {
    CHECK(f_factor(1e-4, 5.0, wendland(1.0, 2), 1.0) == 0.0);
    CHECK(f_factor(1e-4, 5.0, nugget(), 1.0) == 0.0);
    // arithmetic oracle from the closed-form pieces
    CorrelationModel m = expo(0.2);
    double delta = upd_delta(m, 0.1);
    double rho = std::exp(-5.0);
    double tail = std::exp(-10.0) * (0.2 / 2.0 + 0.04 / 4.0);
    double expect = (4.0 * kPi + 1.0) / delta * 7.0 *
                    (rho * rho + tail / std::sqrt(3.0));
    CHECK(f_factor(delta, 7.0, m, 1.0) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("deterministic d2 bound: nugget collapse") {
    PointConfig cfg = unit_grid();
    PropagationParams p{1.0, 3.6, 12.0, 1.0};
    BoundInputs in = det_inputs(cfg, nugget(), p, 1.0, 2.0);
    BoundReport rep = d2_bound_det(in);
    CHECK(rep.valid);
    CHECK(rep.f_value == 0.0);
    check_terms_nonnegative_and_sum(rep);
    // with F = 0 and rho~(eps) = 0 only the pair terms survive:
    // prefactor * T * [Q(b*) + 5 e^{-b*^2/4}]
    double b_star = b_of_log(p, log_h_of(p, in.stats.d_star), in.t);
    double pref = std::min(in.mean_measure,
                           1.0 + 2.0 * std::max(0.0, std::log(in.mean_measure)));
    double expect = pref * double(in.stats.t_upper) *
                    (normal_upper_tail(b_star) +
                     5.0 * std::exp(-0.25 * b_star * b_star));
    CHECK(rep.term("truncation") == 0.0);
    CHECK(rep.term("field_coupling_main") == 0.0);
    CHECK(rep.term("field_coupling_exp") == 0.0);
    CHECK(rep.total == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("deterministic d2 bound: invalid preconditions yield no total") {
    PointConfig cfg = unit_grid();
    PropagationParams p{1.0, 3.6, 2.0, 1.0};
    // t far above h(d*) at small sigma: b* < 0
    BoundInputs in = det_inputs(cfg, expo(0.2), p, 1e6, 2.0);
    BoundReport rep = d2_bound_det(in);
    CHECK_FALSE(rep.valid);
    CHECK(std::isnan(rep.total));
    CHECK_THROWS_AS(d2_bound_det(det_inputs(cfg, expo(0.2), p, -1.0, 2.0)),
                    ParameterError);
}

TEST_CASE("deterministic bounds handle compact support and single points") {
    PropagationParams p{1.0, 3.6, 12.0, 1.0};
    // Wendland with support inside R: F = 0 without needing the u.p.d.
    // constant, pair_joint decays at the full rate since rho~(eps) = 0
    PointConfig cfg = unit_grid();
    BoundInputs in = det_inputs(cfg, wendland(0.8, 2), p, 1.0, 2.0);
    BoundReport rep = d2_bound_det(in);
    CHECK(rep.valid);
    CHECK(rep.f_value == 0.0);
    // a single-point configuration has no pairs; eps_min is infinite and the
    // bound still evaluates
    PointConfig single{{{1.0, 0.0}}, 1.5, PlacementKind::Explicit, 1.0};
    BoundInputs in1 = det_inputs(single, expo(0.2), p, 1.0, 1.0);
    BoundReport rep1 = d2_bound_det(in1);
    CHECK(rep1.valid);
    check_terms_nonnegative_and_sum(rep1);
}

TEST_CASE("deterministic d2 bound: decreasing along the schedule") {
    PointConfig cfg = unit_grid();
    CorrelationModel m = expo(0.2);
    double prev = std::numeric_limits<double>::infinity();
    for (double sigma : {8.0, 16.0, 24.0}) {
        PropagationParams p{1.0, 3.6, sigma, 1.0};
        Schedule sch = convergence_schedule(sigma, 1.0, p, ScheduleCase::DetD2, m);
        BoundInputs in = det_inputs(cfg, m, p, 1.0, sch.R);
        in.C = sch.C;
        BoundReport rep = d2_bound_det(in);
        CHECK(rep.valid);
        check_terms_nonnegative_and_sum(rep);
        CHECK(rep.total <= prev);
        prev = rep.total;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("deterministic dTV bound") {
    PointConfig cfg = unit_grid();
    PropagationParams p{1.0, 3.6, 16.0, 1.0};
    BoundInputs in = det_inputs(cfg, nugget(), p, 1.0, 2.0);
    BoundReport rep = dtv_bound_det(in);
    CHECK(rep.valid);
    CHECK(rep.term("field_coupling_area") == 0.0); // F = 0
    check_terms_nonnegative_and_sum(rep);

    // C = R: area factor reduces to (4/3)(pi + 5 pi + 3) T (sqrt F + 2F)
    BoundInputs in2 = det_inputs(cfg, expo(0.2), p, 1.0, 2.0);
    in2.C = in2.R;
    BoundReport rep2 = dtv_bound_det(in2);
    double F = rep2.f_value;
    double expect = 4.0 / 3.0 * (kPi + 5.0 * kPi + 3.0) *
                    double(in2.stats.t_upper) * (std::sqrt(F) + 2.0 * F);
    CHECK(rep2.term("field_coupling_area") == doctest::Approx(expect).epsilon(1e-12));

    // both d2 and dTV totals finite and non-negative on the same inputs
    BoundReport d2 = d2_bound_det(in2);
    if (d2.valid) CHECK(d2.total >= 0.0);
    CHECK(rep2.total >= 0.0);
}

TEST_CASE("poisson-placement bound: structure and composition") {
    PropagationParams p{1.0, 4.0, 10.0, 2.0};
    CorrelationModel m = expo(0.2);
    BoundInputs in;
    in.params = p;
    in.model = m;
    in.t = 1.0;
    in.R = 3.0;
    in.C = 50.0;
    in.bcase = BoundCase::PoissonPlacement;
    in.d = 0.01; // keeps b(d) > 0 at sigma = 10
    in.eps0 = 0.05;
    in.eps_c = 0.01;
    in.t_star = 16.0 * std::exp(1.0) * p.kappa * in.R * in.R;
    BoundReport rep = d2_bound_poisson(in);
    CHECK(rep.valid);
    check_terms_nonnegative_and_sum(rep);
    // origin term is exactly kappa pi d^2 and vanishes with d
    CHECK(rep.term("origin_ball") ==
          doctest::Approx(p.kappa * kPi * in.d * in.d).epsilon(1e-12));
    // chernoff term is the composition with the tail bound
    double expect = std::pow(in.C / in.R + 1.0, 2.0) *
                    poisson_chernoff(16.0 * p.kappa * in.R * in.R, in.t_star);
    CHECK(rep.term("count_chernoff") == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("poisson mean-variance quadrature matches Monte Carlo") {
    PropagationParams p{1.0, 4.0, 2.0, 2.0};
    const double t = 1.0;
    // effective support: Q(b(r)) < 1e-12 beyond this radius
    double Ceff = 1.0;
    while (marginal_prob_radial(p, Ceff, t) > 1e-12) Ceff *= 1.3;
    const int reps = 1000;
    Rng rng(123);
    std::vector<double> vals(reps);
    for (int i = 0; i < reps; ++i) {
        PointConfig cfg = gen_poisson(p.kappa, Ceff, rng);
        vals[i] = mean_measure_det(p, cfg, t);
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= reps;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (reps - 1);
    double quad = p.kappa * 2.0 * kPi *
                  radial_marginal_mass(p, 0.0,
                                       std::numeric_limits<double>::infinity(),
                                       t, 2, 1e-12);
    CHECK(std::fabs(var - quad) < 3.0 * quad * std::sqrt(2.0 / reps));
    // and the empirical mean of M^Xi agrees with the limit mean
    CHECK(std::fabs(mean - mean_measure_limit(p, t)) <
          3.0 * std::sqrt(quad / reps) + 1e-6);
}

TEST_CASE("hard-core bound: t_star substitution and structure") {
    PropagationParams p{1.0, 4.0, 10.0, 2.0};
    CorrelationModel m = expo(0.1);
    BoundInputs in;
    in.params = p;
    in.model = m;
    in.t = 1.0;
    in.R = 1.0;
    in.C = 30.0;
    in.bcase = BoundCase::HardCore;
    in.d = 0.01;
    in.eps_star = 2.0; // eps* = 2R -> T* = 4
    in.mean_dev_mode = MeanDevMode::UserGamma;
    in.gamma_plus = 0.5;
    BoundReport rep = d2_bound_hardcore(in);
    CHECK(rep.valid);
    check_terms_nonnegative_and_sum(rep);
    double b = b_of_log(p, log_h_of(p, in.d), in.t);
    double M = mean_measure_limit(p, in.t);
    CHECK(rep.term("pair_mean") ==
          doctest::Approx(M * 4.0 * normal_upper_tail(b)).epsilon(1e-12));
    // too few Monte Carlo replications is rejected
    BoundInputs bad = in;
    bad.eps_star = 0.3;
    bad.mean_dev_mode = MeanDevMode::MonteCarlo;
    bad.mean_dev_reps = 10;
    CHECK_THROWS_AS(d2_bound_hardcore(bad), InsufficientReplicationsError);
}

TEST_CASE("hard-core Monte Carlo mean deviation: relative ergodic trend") {
    // the relative deviation of the conditional mean count shrinks as the
    // observation disc grows
    PropagationParams p{0.2, 4.0, 2.0, 3.0};
    const double eps_star = 0.25;
    const double kp = matern2_parent_for_target(p.kappa, eps_star);
    const double t = 50.0; // most of each disc contributes
    Rng rng(7);
    double prev = std::numeric_limits<double>::infinity();
    for (double radius : {5.0, 10.0, 20.0}) {
        double m_disc = p.kappa * 2.0 * kPi *
                        radial_marginal_mass(p, 0.0, radius, t, 1, 1e-10);
        double acc = 0.0;
        const int reps = 60;
        for (int i = 0; i < reps; ++i) {
            PointConfig cfg = gen_hardcore_matern2(kp, eps_star, radius, rng);
            acc += std::fabs(mean_measure_det(p, cfg, t) - m_disc);
        }
        double rel = acc / reps / m_disc;
        CHECK(rel < prev);
        prev = rel;
    }
}

TEST_CASE("quadratic-form bound dominates the exact value") {
    CorrelationModel m = expo(0.2);
    const double R = 1.0, eps = 0.1;
    double delta = upd_delta(m, eps);
    // no conditioning points
    CHECK(gamma_quadform_exact(m, {0.0, 0.0}, {}) == 0.0);
    // one point at distance r > R: exact = rho(r)^2
    std::vector<Point> one = {{1.5, 0.0}};
    double rho = eval_rho(m, 1.5);
    CHECK(gamma_quadform_exact(m, {0.0, 0.0}, one) ==
          doctest::Approx(rho * rho).epsilon(1e-12));
    CHECK(rho * rho <= gamma_quadform_bound(delta, 1.0, m, R));
    // random admissible geometries
    Rng rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        Point x0{0.0, 0.0};
        std::vector<Point> pts;
        int target = 3 + int(draw_uniform(rng) * 25);
        int guard = 0;
        while (int(pts.size()) < target && ++guard < 20000) {
            double r = R + 1e-6 + draw_uniform(rng) * 4.0;
            double a = 2.0 * kPi * draw_uniform(rng);
            Point cand{r * std::cos(a), r * std::sin(a)};
            bool ok = true;
            for (const auto& q : pts)
                if (dist(cand, q) < eps) { ok = false; break; }
            if (ok) pts.push_back(cand);
        }
        PointConfig wrap{pts, 10.0, PlacementKind::Explicit, 1.0};
        GeometryStats st = geometry_stats(wrap, R);
        double exact = gamma_quadform_exact(m, x0, pts);
        double bound = gamma_quadform_bound(delta, double(st.t_upper), m, R);
        CHECK(exact >= 0.0);
        CHECK(exact <= bound);
    }
}

TEST_CASE("normal total-variation bound and exact distance") {
    CHECK(dtv_normal_bound(0.0, 1.0) == 0.0);
    CHECK(dtv_normal_exact(0.0, 1.0) < 1e-10);
    CHECK(dtv_normal_bound(1.0, 1.0) == doctest::Approx(1.25331413731550025).epsilon(1e-12));
    CHECK(dtv_normal_exact(1.0, 1.0) ==
          doctest::Approx(0.382924922548026).epsilon(1e-7));
    // closed-form oracle via density crossings for s != 1
    auto exact_oracle = [](double m, double s) {
        if (std::fabs(s - 1.0) < 1e-14)
            return 2.0 * normal_cdf(std::fabs(m) / 2.0) - 1.0;
        double a = 0.5 - 0.5 / (s * s);
        double b = m / (s * s);
        double c = -m * m / (2.0 * s * s) - std::log(s);
        double disc = std::sqrt(b * b - 4.0 * a * c);
        double x1 = (-b + disc) / (2.0 * a), x2 = (-b - disc) / (2.0 * a);
        if (x1 > x2) std::swap(x1, x2);
        double std_mass = normal_cdf(x2) - normal_cdf(x1);
        double alt_mass = normal_cdf((x2 - m) / s) - normal_cdf((x1 - m) / s);
        return std::fabs(std_mass - alt_mass);
    };
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            double m = -2.0 + 4.0 * double(i) / 19.0;
            double s = 0.3 + 2.2 * double(j) / 19.0;
            double exact = dtv_normal_exact(m, s);
            CHECK(exact <= std::min(dtv_normal_bound(m, s), 1.0) + 1e-9);
            CHECK(exact == doctest::Approx(exact_oracle(m, s)).epsilon(1e-6));
        }
    }
}

TEST_CASE("poisson chernoff bound") {
    CHECK(poisson_chernoff(3.0, 3.0) == doctest::Approx(1.0));
    CHECK(poisson_chernoff(2.0, 2.0 * std::exp(1.0)) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(poisson_chernoff(3.0, 2.0), ParameterError);
    auto exact_tail = [](double mu, double s) {
        long k0 = long(std::ceil(s));
        return 1.0 - poisson_cdf(k0 - 1, mu);
    };
    for (double mu : {1.0, 5.0, 20.0}) {
        for (double ratio : {1.5, 2.0, 4.0}) {
            double s = ratio * mu;
            CHECK(poisson_chernoff(mu, s) >= exact_tail(mu, s));
        }
    }
}

TEST_CASE("d2 between two Poisson processes") {
    auto L1 = [](double s) { return s; };
    auto L2 = [](double s) { return 2.0 * s; };
    CHECK(d2_poisson_poisson(L1, L2, 1.0) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(d2_poisson_poisson(L1, L1, 1.0) == doctest::Approx(0.0));
    auto bad = [](double s) { return -s; };
    CHECK_THROWS_AS(d2_poisson_poisson(L1, bad, 1.0), ParameterError);
    // limit mean vs disc mean, against a dense trapezoid oracle
    PropagationParams p{1.0, 4.0, 2.0, 1.0};
    const double C = 3.0, t = 5.0;
    auto La = [&](double s) { return s <= 0.0 ? 0.0 : mean_measure_limit(p, s); };
    auto Lb = [&](double s) {
        return s <= 0.0 ? 0.0 : mean_measure_poisson_disc(p, C, s);
    };
    double got = d2_poisson_poisson(La, Lb, t);
    const int n = 20000;
    double trap = 0.0;
    for (int i = 0; i <= n; ++i) {
        double s = t * double(i) / n;
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        trap += w * std::fabs(La(s) - Lb(s));
    }
    trap = trap * t / n + std::fabs(La(t) - Lb(t));
    CHECK(got == doctest::Approx(trap).epsilon(1e-5));
}

TEST_CASE("convergence schedule") {
    PropagationParams p{4000.0, 3.6, 2.302585092994046, 5.0};
    CorrelationModel m = expo(0.2);
    Schedule sch = convergence_schedule(2.302585092994046, 1.0, p,
                                        ScheduleCase::DetD2, m);
    double sig = 2.302585092994046;
    CHECK(sch.C == doctest::Approx(std::exp(sig * sig / (3.6 * 3.6) +
                                            std::pow(sig, 1.1)))
                       .epsilon(1e-12));
    CHECK(sch.R == doctest::Approx(std::pow(sig, 2.0)).epsilon(1e-12));
    CHECK(sch.d == doctest::Approx(1.0 / (sig * sig)).epsilon(1e-12));
    // eps0 closed form for the exponential dominator
    double expect_eps0 = 1.0 / sig - 0.2 * std::log(1.0 - 1.0 / sig);
    CHECK(sch.eps0 == doctest::Approx(expect_eps0).epsilon(1e-7));
    // Poisson case radius and count cap
    Schedule schp = convergence_schedule(sig, 1.0, p, ScheduleCase::Poisson, m);
    CHECK(schp.R == doctest::Approx(sig * sig * sig).epsilon(1e-12));
    CHECK(schp.t_star ==
          doctest::Approx(16.0 * std::exp(1.0) * 5.0 * schp.R * schp.R)
              .epsilon(1e-12));
    // nugget: eps0 = 1/sigma exactly
    Schedule schn = convergence_schedule(4.0, 1.0, p, ScheduleCase::DetD2, nugget());
    CHECK(schn.eps0 == doctest::Approx(0.25).epsilon(1e-9));
}
