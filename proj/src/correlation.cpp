#include "sigspec/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "sigspec/numerics.hpp"

namespace sigspec {

namespace {
constexpr double kPi = 3.141592653589793;

bool near_half_integer(double nu, double half) {
    return std::fabs(nu - half) < 1e-12;
}

// Wendland minimal-degree compactly supported polynomials phi_{d,k},
// normalized to 1 at the origin, with u = r/scale in [0,1].
double wendland(double u, int d, int k) {
    if (u >= 1.0) return 0.0;
    const double l = std::floor(d / 2) + k + 1;
    const double q = 1.0 - u;
    switch (k) {
        case 0:
            return std::pow(q, l);
        case 1:
            return std::pow(q, l + 1) * ((l + 1) * u + 1.0);
        case 2:
            return std::pow(q, l + 2) *
                   (((l * l + 4 * l + 3) * u + (3 * l + 6)) * u + 3.0) / 3.0;
        case 3:
            return std::pow(q, l + 3) *
                   ((((l * l * l + 9 * l * l + 23 * l + 15) * u +
                      (6 * l * l + 36 * l + 45)) * u +
                     (15 * l + 45)) * u + 15.0) / 15.0;
        default:
            throw ParameterError("wendland: smoothness k must be in {0,1,2,3}");
    }
}

double matern(double u, double nu) {
    // u = r / theta
    if (u == 0.0) return 1.0;
    if (near_half_integer(nu, 0.5)) return std::exp(-u);
    if (near_half_integer(nu, 1.5)) return (1.0 + u) * std::exp(-u);
    if (near_half_integer(nu, 2.5))
        return (1.0 + u + u * u / 3.0) * std::exp(-u);
    if (u > 705.0) return 0.0;
    return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(u, nu) *
           bessel_k(nu, u);
}

} // namespace

const char* corr_kind_name(CorrKind kind) {
    switch (kind) {
        case CorrKind::Nugget: return "nugget";
        case CorrKind::Exponential: return "exponential";
        case CorrKind::Matern: return "matern";
        case CorrKind::SquaredExponential: return "squared_exponential";
        case CorrKind::Wendland: return "wendland";
    }
    return "?";
}

CorrKind corr_kind_from_name(const std::string& name) {
    if (name == "nugget") return CorrKind::Nugget;
    if (name == "exponential") return CorrKind::Exponential;
    if (name == "matern") return CorrKind::Matern;
    if (name == "squared_exponential") return CorrKind::SquaredExponential;
    if (name == "wendland") return CorrKind::Wendland;
    throw ParameterError("unknown correlation kind: " + name);
}

void validate(const CorrelationModel& model) {
    if (model.dimension < 1)
        throw ParameterError("correlation model: dimension must be >= 1");
    if (model.kind == CorrKind::Nugget) return;
    if (!(model.scale > 0.0))
        throw ParameterError("correlation model: scale must be positive");
    if (model.kind == CorrKind::Matern && !(model.smoothness > 0.0))
        throw ParameterError("correlation model: Matern nu must be positive");
    if (model.kind == CorrKind::Wendland) {
        double k = model.smoothness;
        if (k < 0.0 || k != std::floor(k) || k > 3.0)
            throw ParameterError("correlation model: Wendland k must be an integer in {0,1,2,3}");
    }
}

double eval_rho(const CorrelationModel& model, double r) {
    validate(model);
    if (r < 0.0) throw ParameterError("eval_rho: negative lag");
    if (r == 0.0) return 1.0;
    switch (model.kind) {
        case CorrKind::Nugget:
            return 0.0;
        case CorrKind::Exponential:
            return std::exp(-r / model.scale);
        case CorrKind::SquaredExponential:
            return std::exp(-r * r / (2.0 * model.scale * model.scale));
        case CorrKind::Matern:
            return matern(r / model.scale, model.smoothness);
        case CorrKind::Wendland:
            return wendland(r / model.scale, model.dimension,
                            int(model.smoothness));
    }
    return 0.0;
}

double radial_dominator(const CorrelationModel& model, double r) {
    // All supported models are isotropic with non-increasing rho0.
    return eval_rho(model, r);
}

P2Result check_p2(const CorrelationModel& model, double R,
                  const P2Options& opt) {
    if (!(R > 0.0)) throw ParameterError("check_p2: R must be positive");
    auto value = [&](double r) {
        double rho = radial_dominator(model, R + std::sqrt(3.0) * R * (r - 1.0));
        return r * rho * rho;
    };
    double prev = value(1.0);
    const double step = std::log(opt.r_max) / (opt.grid_points - 1);
    for (int i = 1; i < opt.grid_points; ++i) {
        double r = std::exp(i * step);
        double cur = value(r);
        if (cur > prev + opt.tol) return {false, r};
        prev = cur;
    }
    return {true, 0.0};
}

double spectral_density(const CorrelationModel& model, double w) {
    validate(model);
    if (w < 0.0) throw ParameterError("spectral_density: negative frequency");
    const int d = model.dimension;
    switch (model.kind) {
        case CorrKind::Exponential:
        case CorrKind::Matern: {
            const double nu =
                model.kind == CorrKind::Exponential ? 0.5 : model.smoothness;
            const double th = model.scale;
            const double c = std::exp(std::lgamma(nu + 0.5 * d) - std::lgamma(nu)) *
                             std::pow(th, d) / std::pow(kPi, 0.5 * d);
            return c * std::pow(1.0 + th * th * w * w, -(nu + 0.5 * d));
        }
        case CorrKind::SquaredExponential: {
            const double th = model.scale;
            return std::pow(th / std::sqrt(2.0 * kPi), d) *
                   std::exp(-0.5 * th * th * w * w);
        }
        default:
            throw UnsupportedModelError(
                std::string("spectral_density: unsupported kind ") +
                corr_kind_name(model.kind));
    }
}

double upd_delta(const CorrelationModel& model, double eps) {
    validate(model);
    if (!(eps > 0.0)) throw ParameterError("upd_delta: eps must be positive");
    if (model.kind == CorrKind::Nugget) return 1.0;
    if (model.kind == CorrKind::Wendland)
        throw UnsupportedModelError(
            "upd_delta: no computable constant for the Wendland class");
    const int d = model.dimension;
    const double gd = std::tgamma(0.5 * d + 1.0);
    const double H =
        24.0 / eps * std::pow(kPi * gd * gd / 9.0, 1.0 / (d + 1.0));
    // The supported spectral densities are radially non-increasing, so the
    // infimum over the ball of radius 2H is attained on its boundary.
    const double f0 = spectral_density(model, 2.0 * H);
    return std::pow(kPi, 0.5 * d) / (std::pow(2.0, d + 1.0) * gd) *
           std::pow(H, d) * f0;
}

Eigen::MatrixXd corr_matrix(const CorrelationModel& model,
                            std::span<const Point> points) {
    validate(model);
    const int n = int(points.size());
    Eigen::MatrixXd m(n, n);
    // plain sqrt: coordinates are a few tens of km, hypot's range guards
    // would dominate this n^2 hot loop
    for (int j = 0; j < n; ++j) {
        m(j, j) = 1.0;
        for (int i = j + 1; i < n; ++i) {
            double dx = points[i].x - points[j].x;
            double dy = points[i].y - points[j].y;
            double r = std::sqrt(dx * dx + dy * dy);
            if (r == 0.0)
                throw DegenerateConfigError("corr_matrix: duplicate points");
            m(i, j) = m(j, i) = eval_rho(model, r);
        }
    }
    return m;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

namespace {

// 16-node Gauss-Legendre on [-1,1]; exact through polynomial degree 31,
// enough for any squared Wendland polynomial used here.
constexpr double kGlNodes[8] = {
    0.09501250983763744, 0.28160355077925891, 0.45801677765722739,
    0.61787624440264375, 0.75540440835500303, 0.86563120238783174,
    0.94457502307323258, 0.98940093499164993};
constexpr double kGlWeights[8] = {
    0.18945061045506850, 0.18260341504492359, 0.16915651939500254,
    0.14959598881657673, 0.12462897125553387, 0.09515851168249278,
    0.06225352393864789, 0.02715245941175409};

double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 8; ++i)
        sum += kGlWeights[i] * (f(c - h * kGlNodes[i]) + f(c + h * kGlNodes[i]));
    return sum * h;
}

} // namespace

double tail_integral(const CorrelationModel& model, double R) {
    validate(model);
    if (!(R > 0.0)) throw ParameterError("tail_integral: R must be positive");
    auto sq = [&](double s) {
        double rho = radial_dominator(model, s);
        return s * rho * rho;
    };
    switch (model.kind) {
        case CorrKind::Nugget:
            return 0.0;
        case CorrKind::Exponential: {
            const double th = model.scale;
            double e = -2.0 * R / th;
            if (e < -745.0) return 0.0;
            return std::exp(e) * (th * R / 2.0 + th * th / 4.0);
        }
        case CorrKind::SquaredExponential: {
            const double th = model.scale;
            double e = -R * R / (th * th);
            if (e < -745.0) return 0.0;
            return 0.5 * th * th * std::exp(e);
        }
        case CorrKind::Wendland:
            if (R >= model.scale) return 0.0;
            return gauss_legendre(sq, R, model.scale);
        case CorrKind::Matern: {
            // rho~ <= c (s/theta)^nu K_nu decays like e^{-s/theta}; truncate
            // where the integrand is negligible relative to the head.
            const double th = model.scale;
            if (R / th > 400.0) return 0.0;
            double s_max = R;
            while (sq(s_max) > 1e-18 && s_max < R + 2000.0 * th) s_max += th;
            return integrate(sq, R, s_max, 1e-12);
        }
    }
    return 0.0;
}

} // namespace sigspec
