#include "sigspec/gfield.hpp"

#include <cmath>

#include "sigspec/numerics.hpp"

namespace sigspec {

namespace {
constexpr double kPi = 3.141592653589793;
constexpr double kRidges[] = {0.0, 1e-10, 1e-8};
} // namespace

Eigen::VectorXd shadow(const Eigen::VectorXd& z, double sigma, double beta) {
    if (!(sigma > 0.0)) throw ParameterError("shadow: sigma must be positive");
    if (!(beta > 2.0)) throw ParameterError("shadow: beta must exceed 2");
    const double c = sigma * sigma / beta;
    return (sigma * z.array() - c).exp();
}

FieldSample make_field_sample(Eigen::VectorXd z, double sigma, double beta) {
    FieldSample f;
    f.s = shadow(z, sigma, beta);
    f.z = std::move(z);
    f.sigma = sigma;
    f.beta = beta;
    return f;
}

CholeskyFieldSampler::CholeskyFieldSampler(const CorrelationModel& model,
                                           std::span<const Point> points) {
    Eigen::MatrixXd corr = corr_matrix(model, points);
    for (double ridge : kRidges) {
        Eigen::MatrixXd work = corr;
        if (ridge > 0.0) work.diagonal().array() += ridge;
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) {
            chol_ = llt.matrixL();
            ridge_ = ridge;
            return;
        }
    }
    throw IllConditionedError(
        "correlation matrix not factorizable at maximum ridge; min eigenvalue "
        "estimate " +
        std::to_string(min_eigenvalue(corr)));
}

Eigen::VectorXd CholeskyFieldSampler::sample(Rng& rng) const {
    const int n = size();
    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) e(i) = draw_normal(rng);
    return chol_.triangularView<Eigen::Lower>() * e;
}

SpectralFieldSampler::SpectralFieldSampler(const CorrelationModel& model,
                                           std::span<const Point> points,
                                           long features)
    : model_(model), points_(points.begin(), points.end()),
      features_(features) {
    if (features <= 0)
        throw ParameterError("SpectralFieldSampler: feature count must be positive");
    switch (model.kind) {
        case CorrKind::Exponential:
        case CorrKind::Matern:
        case CorrKind::SquaredExponential:
            break;
        default:
            throw UnsupportedModelError(
                std::string("SpectralFieldSampler: unsupported kind ") +
                corr_kind_name(model.kind));
    }
}

double SpectralFieldSampler::covariance_error_bound() const {
    return 1.0 / std::sqrt(2.0 * double(features_));
}

Eigen::VectorXd SpectralFieldSampler::sample(Rng& rng) const {
    const long n = long(points_.size());
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    const double nu = model_.kind == CorrKind::Exponential ? 0.5
                                                           : model_.smoothness;
    for (long j = 0; j < features_; ++j) {
        double w;
        if (model_.kind == CorrKind::SquaredExponential) {
            // radial frequency of an isotropic Gaussian with sd 1/scale
            double a = draw_normal(rng), b = draw_normal(rng);
            w = std::hypot(a, b) / model_.scale;
        } else {
            // Matern radial inverse CDF in d = 2
            double u = draw_uniform(rng);
            w = std::sqrt(std::pow(1.0 - u, -1.0 / nu) - 1.0) / model_.scale;
        }
        double ang = 2.0 * kPi * draw_uniform(rng);
        double wx = w * std::cos(ang), wy = w * std::sin(ang);
        double phase = 2.0 * kPi * draw_uniform(rng);
        for (long i = 0; i < n; ++i)
            z(i) += std::cos(wx * points_[i].x + wy * points_[i].y + phase);
    }
    z *= std::sqrt(2.0 / double(features_));
    return z;
}

ConditionalStats conditional_stats(const CorrelationModel& model,
                                   std::span<const Point> points, int i,
                                   std::span<const int> cond_set,
                                   const Eigen::VectorXd& z_cond) {
    if (cond_set.empty()) return {0.0, 1.0};
    if (z_cond.size() != long(cond_set.size()))
        throw ParameterError("conditional_stats: value/index length mismatch");
    std::vector<Point> cond;
    cond.reserve(cond_set.size());
    for (int j : cond_set) {
        if (j == i)
            throw ParameterError("conditional_stats: conditioning set contains i");
        cond.push_back(points[j]);
    }
    Eigen::MatrixXd gamma_mat = corr_matrix(model, cond);
    Eigen::VectorXd gamma(cond.size());
    for (size_t k = 0; k < cond.size(); ++k) {
        double r = dist(points[i], cond[k]);
        if (r == 0.0)
            throw DegenerateConfigError(
                "conditional_stats: conditioning point coincides with target");
        gamma(k) = eval_rho(model, r);
    }
    for (double ridge : kRidges) {
        Eigen::MatrixXd work = gamma_mat;
        if (ridge > 0.0) work.diagonal().array() += ridge;
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() != Eigen::Success) continue;
        Eigen::VectorXd w = llt.solve(gamma);
        ConditionalStats st;
        st.mu = w.dot(z_cond);
        st.tau_sq = 1.0 - gamma.dot(w);
        st.tau_sq = std::min(1.0, std::max(st.tau_sq, 1e-15));
        return st;
    }
    throw IllConditionedError(
        "conditional_stats: conditioning matrix not factorizable; min "
        "eigenvalue estimate " +
        std::to_string(min_eigenvalue(gamma_mat)));
}

} // namespace sigspec
