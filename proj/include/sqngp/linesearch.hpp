#pragma once

#include "sqngp/oracle.hpp"
#include "sqngp/random.hpp"
#include "sqngp/types.hpp"

namespace sqngp {

struct LineSearchConfig {
    double c = 1e-4;    // Armijo constant, (0, 1)
    double rho = 0.5;   // backtracking factor, (0, 1)
    double xi = 10.0;   // initial step is min(1, xi / k), xi >= 1
    long tau = 100;     // at most max(0, tau - k) reductions at iteration k

    void validate() const;
};

struct LineSearchResult {
    double alpha = 0.0;
    int trials = 0;          // noisy cost evaluations at candidate points
    bool satisfied = false;  // an evaluated candidate passed the noisy Armijo test
};

/// min(1, xi / k) for k >= 1.
double schedule_initial(long k, double xi);

/// Backtracking budget max(0, tau - k).
long backtrack_budget(long k, long tau);

/// Stochastic backtracking on the noisy cost. f_hat_x is the cost already
/// observed at x and g the gradient already observed there; both are reused
/// across all trials. Every candidate cost is a fresh draw from `stream`. A
/// candidate whose cost is non-finite (or whose evaluation throws) counts as
/// a failed test.
LineSearchResult stochastic_backtrack(long k, const Vector& x, const Vector& p, const Vector& g, double f_hat_x,
                                      const NoisyOracle& oracle, const LineSearchConfig& cfg, RandomStream& stream);

struct ArmijoResidual {
    double mean = 0.0;
    double std_error = 0.0;
    long draws = 0;
};

/// Monte Carlo estimate of E[f_hat(x + alpha p) - f_hat(x) - c alpha g^T p]
/// with g a fresh noisy gradient at x and p = -B g for every draw.
ArmijoResidual armijo_residual(const NoisyOracle& oracle, const Vector& x, const Matrix& b, double c, double alpha,
                               long draws, RandomStream& stream);

}  // namespace sqngp
