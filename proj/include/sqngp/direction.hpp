#pragma once

#include "sqngp/random.hpp"
#include "sqngp/types.hpp"

namespace sqngp {

/// p = -(H + lambda I)^{-1} g with lambda = epsilon - min(0, eta), where eta
/// is the smallest eigenvalue of H.
struct DirectionResult {
    Vector p;
    double lambda = 0.0;
    double eta = 0.0;
    Matrix b;  // (H + lambda I)^{-1}
};

/// Upper bound c_bar = gamma / (gamma + beta) on the Armijo constant when
/// the gradient carries noise with covariance R.
struct ArmijoBound {
    double gamma = 0.0;  // grad^T B grad
    double beta = 0.0;   // tr(B R)
    double c_bar = 0.0;
};

constexpr double kDefaultEpsilon = 1e-4;

DirectionResult regularized_direction(const Matrix& h, const Vector& g, double epsilon = kDefaultEpsilon);

/// Throws when grad_true is zero (bound undefined at a stationary point).
ArmijoBound armijo_c_bound(const Vector& grad_true, const Matrix& b, const Matrix& r);

struct DescentSample {
    double mean = 0.0;
    double std_error = 0.0;
    double expected = 0.0;  // -grad^T B grad
};

/// Monte Carlo average of (-B (grad + v))^T grad with v ~ N(0, R).
DescentSample expected_descent_check(const Matrix& b, const Vector& grad_true, const Matrix& r, long draws,
                                     RandomStream& stream);

}  // namespace sqngp
