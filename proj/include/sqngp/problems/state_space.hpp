#pragma once

#include "sqngp/types.hpp"

namespace sqngp::problems {

/// Log-scale floor for variance parameters: exp(-30).
constexpr double kLogVarFloor = -30.0;

/// exp(max(log_var, floor)); the derivative w.r.t. log_var is zero below the floor.
double var_from_log(double log_var);
double dvar_dlog(double log_var);

/// Scalar nonlinear state-space model in unconstrained coordinates theta:
///   x_0 ~ N(m0, P0)
///   x_t = f(x_{t-1}, t-1; theta) + N(0, q(theta))
///   y_t = h(x_t; theta) + N(0, r(theta)),   t = 1..N
class ScalarStateSpaceModel {
public:
    virtual ~ScalarStateSpaceModel() = default;

    virtual Eigen::Index num_params() const = 0;
    virtual double initial_mean() const = 0;
    virtual double initial_var() const = 0;

    virtual double transition_mean(double x_prev, long t_prev, const Vector& theta) const = 0;
    /// d f / d theta written into out (length num_params()).
    virtual void transition_mean_grad(double x_prev, long t_prev, const Vector& theta, Eigen::Ref<Vector> out) const = 0;
    virtual double process_var(const Vector& theta) const = 0;
    virtual void process_var_grad(const Vector& theta, Eigen::Ref<Vector> out) const = 0;

    virtual double observation_mean(double x, const Vector& theta) const = 0;
    virtual void observation_mean_grad(double x, const Vector& theta, Eigen::Ref<Vector> out) const = 0;
    virtual double measurement_var(const Vector& theta) const = 0;
    virtual void measurement_var_grad(const Vector& theta, Eigen::Ref<Vector> out) const = 0;
};

}  // namespace sqngp::problems
