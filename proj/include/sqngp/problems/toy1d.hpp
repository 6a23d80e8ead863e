#pragma once

#include "sqngp/oracle.hpp"

namespace sqngp::problems {

// f(x) = 4(x - 6)^2 + exp(1.2x - 5) + 10 - 10 sin(1.2x)
double toy1d_f(double x);
double toy1d_grad(double x);
double toy1d_hess(double x);

/// One-dimensional oracle over toy1d_* with the given additive noise.
AnalyticOracle toy1d_oracle(NoiseModel noise);

}  // namespace sqngp::problems
