#include "sqngp/oracle.hpp"

#include "sqngp/gaussian.hpp"

#include <cmath>

namespace sqngp {

AnalyticOracle::AnalyticOracle(Eigen::Index n, CostFn f, GradFn grad, HessFn hess, NoiseModel noise)
    : n_(n), f_(std::move(f)), grad_(std::move(grad)), hess_(std::move(hess)), noise_(std::move(noise)) {
    if (noise_.cost_var < 0.0) throw Error("AnalyticOracle: cost variance must be >= 0");
    grad_factor_ = noise_.grad_cov ? covariance_factor(*noise_.grad_cov) : Matrix::Zero(n_, n_);
    if (grad_factor_.rows() != n_) throw Error("AnalyticOracle: gradient covariance has wrong size");
}

double AnalyticOracle::cost(const Vector& x, RandomStream& stream) const {
    double val = f_(x) + noise_.bias;
    if (noise_.cost_var > 0.0) val += std::sqrt(noise_.cost_var) * stream.normal();
    return val;
}

Vector AnalyticOracle::grad(const Vector& x, RandomStream& stream) const {
    Vector g = grad_(x);
    if (!grad_factor_.isZero(0.0)) g += draw_gaussian(grad_factor_, stream);
    return g;
}

std::optional<Matrix> AnalyticOracle::exact_hess(const Vector& x) const {
    if (!hess_) return std::nullopt;
    return hess_(x);
}

AnalyticOracle quadratic_oracle(const Matrix& a, NoiseModel noise) {
    return AnalyticOracle(
        a.rows(), [a](const Vector& x) { return 0.5 * x.dot(a * x); }, [a](const Vector& x) -> Vector { return a * x; },
        [a](const Vector&) { return a; }, std::move(noise));
}

ScaledOracle::ScaledOracle(std::shared_ptr<const NoisyOracle> inner, Vector unit)
    : inner_(std::move(inner)), unit_(std::move(unit)) {
    if (!inner_) throw Error("ScaledOracle: null inner oracle");
    if (unit_.size() != inner_->dim()) throw Error("ScaledOracle: unit vector has the wrong length");
    if (!(unit_.array() > 0.0).all() || !unit_.allFinite()) throw Error("ScaledOracle: units must be positive");
}

double ScaledOracle::cost(const Vector& z, RandomStream& stream) const { return inner_->cost(to_inner(z), stream); }

Vector ScaledOracle::grad(const Vector& z, RandomStream& stream) const {
    return unit_.cwiseProduct(inner_->grad(to_inner(z), stream));
}

std::optional<double> ScaledOracle::exact_cost(const Vector& z) const { return inner_->exact_cost(to_inner(z)); }

std::optional<Vector> ScaledOracle::exact_grad(const Vector& z) const {
    auto g = inner_->exact_grad(to_inner(z));
    if (g) *g = unit_.cwiseProduct(*g);
    return g;
}

std::optional<Matrix> ScaledOracle::exact_hess(const Vector& z) const {
    auto h = inner_->exact_hess(to_inner(z));
    if (h) *h = unit_.asDiagonal() * *h * unit_.asDiagonal();
    return h;
}

NoiseModel ScaledOracle::noise() const {
    NoiseModel out = inner_->noise();
    if (out.grad_cov) out.grad_cov = Matrix(unit_.asDiagonal() * *out.grad_cov * unit_.asDiagonal());
    return out;
}

Matrix estimate_gradient_noise(const NoisyOracle& oracle, const Vector& x, int draws, RandomStream& stream) {
    if (draws < 2) throw Error("estimate_gradient_noise: need at least two draws");
    Matrix samples(oracle.dim(), draws);
    for (int i = 0; i < draws; ++i) samples.col(i) = oracle.grad(x, stream);
    const Vector mean = samples.rowwise().mean();
    const Matrix centered = samples.colwise() - mean;
    return centered * centered.transpose() / static_cast<double>(draws - 1);
}

}  // namespace sqngp
