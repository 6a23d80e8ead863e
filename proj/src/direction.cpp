#include "sqngp/direction.hpp"

#include "sqngp/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace sqngp {

DirectionResult regularized_direction(const Matrix& h, const Vector& g, double epsilon) {
    if (!(epsilon > 0.0)) throw Error("regularized_direction: epsilon must be positive");
    if (h.rows() != h.cols() || h.rows() != g.size()) throw Error("regularized_direction: dimension mismatch");
    if (!h.allFinite()) throw Error("regularized_direction: Hessian estimate is not finite");
    const Matrix sym = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success) throw Error("regularized_direction: eigendecomposition failed");

    DirectionResult out;
    out.eta = eig.eigenvalues().minCoeff();
    out.lambda = epsilon - std::min(0.0, out.eta);
    const Vector inv = (eig.eigenvalues().array() + out.lambda).inverse();
    const Matrix& q = eig.eigenvectors();
    out.b = q * inv.asDiagonal() * q.transpose();
    out.b = 0.5 * (out.b + out.b.transpose()).eval();
    out.p = -(q * (inv.asDiagonal() * (q.transpose() * g)));
    return out;
}

ArmijoBound armijo_c_bound(const Vector& grad_true, const Matrix& b, const Matrix& r) {
    if (grad_true.isZero(0.0)) throw Error("armijo_c_bound: bound undefined at stationary point");
    ArmijoBound bound;
    bound.gamma = grad_true.dot(b * grad_true);
    bound.beta = (b * r).trace();
    bound.c_bar = bound.gamma / (bound.gamma + bound.beta);
    return bound;
}

DescentSample expected_descent_check(const Matrix& b, const Vector& grad_true, const Matrix& r, long draws,
                                     RandomStream& stream) {
    if (draws < 1) throw Error("expected_descent_check: draws must be >= 1");
    const Matrix chol = covariance_factor(r);
    const Vector bgrad = b * grad_true;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long i = 0; i < draws; ++i) {
        const Vector v = draw_gaussian(chol, stream);
        // p^T grad = -(grad + v)^T B grad
        const double val = -(grad_true + v).dot(bgrad);
        sum += val;
        sum_sq += val * val;
    }
    DescentSample out;
    out.mean = sum / static_cast<double>(draws);
    const double var = draws > 1 ? (sum_sq - draws * out.mean * out.mean) / static_cast<double>(draws - 1) : 0.0;
    out.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(draws));
    out.expected = -grad_true.dot(bgrad);
    return out;
}

}  // namespace sqngp
