#include "sqngp/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sqngp {

void LineSearchConfig::validate() const {
    if (!(c > 0.0 && c < 1.0)) throw Error("line search: c must lie in (0, 1)");
    if (!(rho > 0.0 && rho < 1.0)) throw Error("line search: rho must lie in (0, 1)");
    if (!(xi >= 1.0)) throw Error("line search: xi must be >= 1");
    if (tau <= 0) throw Error("line search: tau must be a positive integer");
}

double schedule_initial(long k, double xi) {
    if (k < 1) throw Error("schedule_initial: k must be >= 1");
    return std::min(1.0, xi / static_cast<double>(k));
}

long backtrack_budget(long k, long tau) { return std::max(0L, tau - k); }

LineSearchResult stochastic_backtrack(long k, const Vector& x, const Vector& p, const Vector& g, double f_hat_x,
                                      const NoisyOracle& oracle, const LineSearchConfig& cfg, RandomStream& stream) {
    cfg.validate();
    if (!p.allFinite()) throw Error("stochastic_backtrack: search direction is not finite");

    LineSearchResult res;
    res.alpha = schedule_initial(k, cfg.xi);
    const long budget = backtrack_budget(k, cfg.tau);
    const double slope = g.dot(p);

    for (long i = 1; i <= budget; ++i) {
        double f_new = std::numeric_limits<double>::infinity();
        try {
            f_new = oracle.cost(x + res.alpha * p, stream);
        } catch (const std::exception&) {
            // treated as a failed test
        }
        ++res.trials;
        if (std::isfinite(f_new) && f_new <= f_hat_x + cfg.c * res.alpha * slope) {
            res.satisfied = true;
            break;
        }
        res.alpha *= cfg.rho;
    }
    return res;
}

ArmijoResidual armijo_residual(const NoisyOracle& oracle, const Vector& x, const Matrix& b, double c, double alpha,
                               long draws, RandomStream& stream) {
    if (draws < 2) throw Error("armijo_residual: need at least two draws");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long i = 0; i < draws; ++i) {
        const Vector g = oracle.grad(x, stream);
        const Vector p = -b * g;
        const double val = oracle.cost(x + alpha * p, stream) - oracle.cost(x, stream) - c * alpha * g.dot(p);
        sum += val;
        sum_sq += val * val;
    }
    ArmijoResidual out;
    out.draws = draws;
    out.mean = sum / static_cast<double>(draws);
    const double var = (sum_sq - draws * out.mean * out.mean) / static_cast<double>(draws - 1);
    out.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(draws));
    return out;
}

}  // namespace sqngp
