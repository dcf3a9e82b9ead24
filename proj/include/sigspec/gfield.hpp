#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sigspec/common.hpp"
#include "sigspec/correlation.hpp"

namespace sigspec {

/// Field values z and the derived shadow variables s = exp(sigma z - sigma^2/beta).
struct FieldSample {
    Eigen::VectorXd z;
    Eigen::VectorXd s;
    double sigma = 0.0;
    double beta = 0.0;
};

Eigen::VectorXd shadow(const Eigen::VectorXd& z, double sigma, double beta);

FieldSample make_field_sample(Eigen::VectorXd z, double sigma, double beta);

/// Exact sampler: one lower-triangular factorization of the correlation
/// matrix, reusable across draws.  If the factorization fails numerically it
/// is retried with diagonal ridges 1e-10 then 1e-8; the ridge actually used
/// is recorded.  Immutable once built, safe to share across threads.
class CholeskyFieldSampler {
  public:
    CholeskyFieldSampler(const CorrelationModel& model,
                         std::span<const Point> points);

    Eigen::VectorXd sample(Rng& rng) const;

    int size() const { return int(chol_.rows()); }
    double ridge() const { return ridge_; }

  private:
    Eigen::MatrixXd chol_; // lower factor
    double ridge_ = 0.0;
};

/// Approximate stationary-field sampler by random cosine features: with m
/// features, z(x) = sqrt(2/m) sum_j cos(w_j.x + phi_j) with w_j drawn from
/// the spectral density.  Frequencies and phases are redrawn on every call,
/// so the covariance is unbiased across draws with per-lag standard error
/// at most 1/sqrt(2m).  The default feature count 500000 puts that error
/// at 1e-3.  Supported for the Matern family and the squared exponential.
class SpectralFieldSampler {
  public:
    static constexpr long kDefaultFeatures = 500000;

    SpectralFieldSampler(const CorrelationModel& model,
                         std::span<const Point> points,
                         long features = kDefaultFeatures);

    Eigen::VectorXd sample(Rng& rng) const;

    long features() const { return features_; }
    double covariance_error_bound() const; // 1/sqrt(2m)

  private:
    CorrelationModel model_;
    std::vector<Point> points_;
    long features_;
};

/// Conditional mean and variance of the field at point `i` given observed
/// values on `cond_set`, solved through the factorization of the
/// conditioning correlation matrix (same ridge policy as the sampler).
struct ConditionalStats {
    double mu = 0.0;
    double tau_sq = 1.0;
};

ConditionalStats conditional_stats(const CorrelationModel& model,
                                   std::span<const Point> points, int i,
                                   std::span<const int> cond_set,
                                   const Eigen::VectorXd& z_cond);

} // namespace sigspec
