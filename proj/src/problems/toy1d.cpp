#include "sqngp/problems/toy1d.hpp"

#include <cmath>

namespace sqngp::problems {

double toy1d_f(double x) { return 4.0 * (x - 6.0) * (x - 6.0) + std::exp(1.2 * x - 5.0) + 10.0 - 10.0 * std::sin(1.2 * x); }

double toy1d_grad(double x) { return 8.0 * (x - 6.0) + 1.2 * std::exp(1.2 * x - 5.0) - 12.0 * std::cos(1.2 * x); }

double toy1d_hess(double x) { return 8.0 + 1.44 * std::exp(1.2 * x - 5.0) + 14.4 * std::sin(1.2 * x); }

AnalyticOracle toy1d_oracle(NoiseModel noise) {
    return AnalyticOracle(
        1, [](const Vector& x) { return toy1d_f(x(0)); },
        [](const Vector& x) { return Vector::Constant(1, toy1d_grad(x(0))); },
        [](const Vector& x) { return Matrix::Constant(1, 1, toy1d_hess(x(0))); }, std::move(noise));
}

}  // namespace sqngp::problems
