#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sigspec/common.hpp"

namespace sigspec {

enum class CorrKind { Nugget, Exponential, Matern, SquaredExponential, Wendland };

/// An isotropic correlation model.  `scale` is the decorrelation distance in
/// km (theta for the Matern family, the support radius for Wendland);
/// `smoothness` is the Matern nu or the Wendland smoothness index k in
/// {0,1,2,3}; `dimension` is the ambient dimension used by the spectral
/// density and the uniform-positive-definiteness constant.
struct CorrelationModel {
    CorrKind kind = CorrKind::Exponential;
    double scale = 1.0;
    double smoothness = 0.5;
    int dimension = 2;
};

const char* corr_kind_name(CorrKind kind);
CorrKind corr_kind_from_name(const std::string& name);

/// rho0(r): the correlation at lag r >= 0.  Always 1 at r = 0.
double eval_rho(const CorrelationModel& model, double r);

/// The non-increasing radial upper bound consumed by every error-bound term.
/// For the isotropic models here it coincides with eval_rho; bound code goes
/// through this entry point and never reads rho directly.
double radial_dominator(const CorrelationModel& model, double r);

struct P2Options {
    int grid_points = 10000;
    double r_max = 1e3;
    double tol = 1e-12;
};

struct P2Result {
    bool ok = true;
    double violation_r = 0.0; // first grid point violating monotonicity
};

/// Checks that r -> r * rho~^2(R + sqrt(3) R (r-1)) is non-increasing on a
/// geometric grid over [1, r_max].
P2Result check_p2(const CorrelationModel& model, double R,
                  const P2Options& opt = {});

/// Isotropic spectral density f(w) with probability-measure normalization
/// (the inverse Fourier transform of rho integrates to one).  Supported for
/// the Matern family (the exponential is Matern nu = 1/2) and the squared
/// exponential; other kinds raise UnsupportedModelError.
double spectral_density(const CorrelationModel& model, double w);

/// The uniform-positive-definiteness constant delta(eps): a positive lower
/// bound on the smallest eigenvalue of the correlation matrix of any point
/// set with minimum pairwise distance eps.  H is fixed at its admissible
/// lower limit and the density infimum over B(0,2H) uses the radial
/// monotonicity of the supported densities.  Nugget returns 1.
double upd_delta(const CorrelationModel& model, double eps);

/// Correlation matrix of a point set; throws DegenerateConfigError on
/// duplicate points.
Eigen::MatrixXd corr_matrix(const CorrelationModel& model,
                            std::span<const Point> points);

double min_eigenvalue(const Eigen::MatrixXd& m);

/// int_R^inf s * rho~^2(s) ds.  Closed forms for the exponential and squared
/// exponential, exact Gauss-Legendre for the Wendland polynomials, adaptive
/// quadrature (abs tol 1e-12) otherwise.
double tail_integral(const CorrelationModel& model, double R);

void validate(const CorrelationModel& model);

} // namespace sigspec
