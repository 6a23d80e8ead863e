#pragma once

#include <vector>

namespace sqngp {

/// Gauss-Legendre rule mapped to the unit interval [0, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes by Newton iteration on P_n; weights sum to 1. Requires count >= 1.
GaussLegendre gauss_legendre_unit(int count);

}  // namespace sqngp
