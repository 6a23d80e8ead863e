#pragma once

#include "sqngp/random.hpp"
#include "sqngp/types.hpp"

namespace sqngp {

/// F with F F^T == cov for a symmetric positive semidefinite cov.
Matrix covariance_factor(const Matrix& cov);

/// One draw from N(0, F F^T).
Vector draw_gaussian(const Matrix& factor, RandomStream& stream);

}  // namespace sqngp
