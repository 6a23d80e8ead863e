#pragma once

#include "sqngp/random.hpp"
#include "sqngp/types.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace sqngp {

/// Noise on oracle outputs: f_hat = f + e with E[e] = bias, Var[e] =
/// cost_var; g = grad f + v with v ~ N(0, grad_cov).
struct NoiseModel {
    double bias = 0.0;
    double cost_var = 0.0;
    std::optional<Matrix> grad_cov;  // unknown for particle-filter oracles
};

/// Noisy evaluations of an objective to be minimized. Implementations are
/// immutable; all randomness comes from the caller's stream, so concurrent
/// use with distinct streams is safe.
class NoisyOracle {
public:
    virtual ~NoisyOracle() = default;

    virtual Eigen::Index dim() const = 0;
    virtual double cost(const Vector& x, RandomStream& stream) const = 0;
    virtual Vector grad(const Vector& x, RandomStream& stream) const = 0;

    virtual std::optional<double> exact_cost(const Vector&) const { return std::nullopt; }
    virtual std::optional<Vector> exact_grad(const Vector&) const { return std::nullopt; }
    virtual std::optional<Matrix> exact_hess(const Vector&) const { return std::nullopt; }

    virtual NoiseModel noise() const { return {}; }
};

/// Closed-form objective plus additive Gaussian noise.
class AnalyticOracle final : public NoisyOracle {
public:
    using CostFn = std::function<double(const Vector&)>;
    using GradFn = std::function<Vector(const Vector&)>;
    using HessFn = std::function<Matrix(const Vector&)>;

    AnalyticOracle(Eigen::Index n, CostFn f, GradFn grad, HessFn hess, NoiseModel noise);

    Eigen::Index dim() const override { return n_; }
    double cost(const Vector& x, RandomStream& stream) const override;
    Vector grad(const Vector& x, RandomStream& stream) const override;

    std::optional<double> exact_cost(const Vector& x) const override { return f_(x); }
    std::optional<Vector> exact_grad(const Vector& x) const override { return grad_(x); }
    std::optional<Matrix> exact_hess(const Vector& x) const override;

    NoiseModel noise() const override { return noise_; }

private:
    Eigen::Index n_;
    CostFn f_;
    GradFn grad_;
    HessFn hess_;
    NoiseModel noise_;
    Matrix grad_factor_;
};

/// f(x) = 1/2 x^T A x with the given noise.
AnalyticOracle quadratic_oracle(const Matrix& a, NoiseModel noise);

/// The inner objective seen in coordinates z with x = unit .* z. Gradients,
/// Hessians and the declared gradient covariance are transformed to match.
class ScaledOracle final : public NoisyOracle {
public:
    ScaledOracle(std::shared_ptr<const NoisyOracle> inner, Vector unit);
    Eigen::Index dim() const override { return unit_.size(); }
    double cost(const Vector& z, RandomStream& stream) const override;
    Vector grad(const Vector& z, RandomStream& stream) const override;
    std::optional<double> exact_cost(const Vector& z) const override;
    std::optional<Vector> exact_grad(const Vector& z) const override;
    std::optional<Matrix> exact_hess(const Vector& z) const override;
    NoiseModel noise() const override;

    Vector to_inner(const Vector& z) const { return unit_.cwiseProduct(z); }
    Vector from_inner(const Vector& x) const { return x.cwiseQuotient(unit_); }
    const Vector& unit() const { return unit_; }

private:
    std::shared_ptr<const NoisyOracle> inner_;
    Vector unit_;
};

/// Sample covariance of `draws` gradient evaluations at x.
Matrix estimate_gradient_noise(const NoisyOracle& oracle, const Vector& x, int draws, RandomStream& stream);

}  // namespace sqngp
