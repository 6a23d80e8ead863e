#pragma once

#include "sqngp/direction.hpp"
#include "sqngp/gp_hessian.hpp"
#include "sqngp/linesearch.hpp"
#include "sqngp/oracle.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sqngp {

/// Hyperparameters of the Hessian GP. Without a custom prior the kernel is
/// M = m I, V = diag(v) and the prior mean is vech(diag(h0)); scalar forms
/// broadcast to every coordinate.
struct GPConfig {
    double m = 10.0;
    double v = 1.0;
    double h0 = 1.0;
    Vector v_diag;   // overrides v when non-empty
    Vector h0_diag;  // overrides h0 when non-empty
    MeasurementMode mode = MeasurementMode::Full;
    int quad_nodes = 16;
    std::optional<GPPrior> custom_prior;

    GPPrior make_prior(Eigen::Index n) const;
};

struct OptimizerConfig {
    long k_max = 300;
    double epsilon = kDefaultEpsilon;
    int memory_p = 9;
    GPConfig gp;
    std::optional<Matrix> grad_cov;  // falls back to the oracle's declared R
    LineSearchConfig ls;
    std::uint64_t seed = 0;
};

enum class RunStatus { Ok, NonFiniteGradient };

struct IterationRow {
    long k = 0;
    Vector x;
    double fhat = 0.0;
    double gnorm = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
    int ls_trials = 0;
    bool satisfied = false;
    bool fallback = false;  // GP failed; scaled gradient step used
};

struct RunRecord {
    std::vector<IterationRow> rows;
    Vector x_final;
    RunStatus status = RunStatus::Ok;
    std::string message;
    int fallbacks = 0;
};

/// Called at every iteration after the GP window has been updated and
/// before the direction is computed.
using IterationObserver = std::function<void(long k, const HessianGP& gp)>;

/// Stochastic quasi-Newton loop. At iteration k the direction uses only
/// pairs with index <= k-2, so it never depends on the gradient drawn at k.
RunRecord run(const NoisyOracle& oracle, const Vector& x0, const OptimizerConfig& cfg,
              const IterationObserver& observer = {});

/// Header then one row per iteration:
/// k,x0..x{n-1},fhat,gnorm,alpha,lambda,ls_trials,satisfied
void write_trace_csv(std::ostream& out, const RunRecord& record);

}  // namespace sqngp
