#include "sqngp/quadrature.hpp"

#include "sqngp/types.hpp"

#include <cmath>
#include <numbers>

namespace sqngp {

GaussLegendre gauss_legendre_unit(int count) {
    if (count < 1) throw Error("gauss_legendre_unit: need at least one node");
    GaussLegendre rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 1; j <= count; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            dp = count * (z * p1 - p2) / (z * z - 1.0);
            const double z_old = z;
            z = z_old - p1 / dp;
            if (std::abs(z - z_old) < 1e-15) break;
        }
        if (count == 1) dp = 1.0;  // P_1 = z, root at 0
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1, 1] -> [0, 1]
        rule.nodes[i] = 0.5 * (1.0 - z);
        rule.nodes[count - 1 - i] = 0.5 * (1.0 + z);
        rule.weights[i] = 0.5 * w;
        rule.weights[count - 1 - i] = 0.5 * w;
    }
    return rule;
}

}  // namespace sqngp
