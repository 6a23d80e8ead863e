#pragma once

// Desk-scale experiment drivers behind the command-line tool. Each driver
// returns its results in memory and, when `out_dir` is set, writes CSV files
// plus a summary.json into that directory.

#include "sqngp/optimizer.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sqngp::experiments {

enum class Kind { GPDemo, Run1D, RunLGSS, RunNLToy, ArmijoCheck };

Kind parse_kind(std::string_view name);
std::string to_string(Kind kind);

/// Hessian GP fitted to noisy gradients of the 1-D test function.
struct GPDemoSettings {
    int observations = 12;  // pairs; iterates are evenly spaced on [lo, hi]
    double lo = -5.0;
    double hi = 7.0;
    double grad_noise_var = 100.0;
    double m = 1000.0;
    double v = 0.2;
    double mu = 100.0;
    double grid_lo = -15.0;
    double grid_hi = 8.0;
    int grid_points = 461;
    double rmse_lo = -4.0;  // region used for the posterior/prior RMSE ratio
    double rmse_hi = 6.0;
    double far_field = -12.0;  // prior-recovery check applies for x <= far_field
};

struct Toy1DSettings {
    double x0_lo = -5.0;  // replicate starts are uniform on [x0_lo, x0_hi]
    double x0_hi = 7.0;
    double cost_var = 1.0;
    double grad_var = 100.0;
};

struct LGSSSettings {
    long series_length = 100;
    double a_max = 0.95;  // random stable start: a ~ U(-a_max, a_max)
    double c_lo = 0.5, c_hi = 2.0;
    double q_lo = 0.05, q_hi = 1.0;
    double r_lo = 0.1, r_hi = 1.0;
};

struct NLToySettings {
    long series_length = 100;
    /// Optimization runs in z = theta ./ unit, theta = (a, b, c, d, log q, log r).
    Vector unit = (Vector(6) << 0.05, 2.5, 0.8, 0.005, 1.0, 1.0).finished();
    /// The true q is 0, so its start cannot be drawn relative to the truth;
    /// q0 ~ U(q_ref / 2, 3 q_ref / 2) instead.
    double q_ref = 1.0;
    int noise_draws = 30;  // gradient draws used to estimate R at the start
};

/// Quadratic test problem for the stochastic Armijo bound.
struct ArmijoSettings {
    Matrix a = (Matrix(2, 2) << 3.0, 0.5, 0.5, 1.0).finished();
    Matrix b = (Matrix(2, 2) << 0.6, 0.1, 0.1, 0.9).finished();
    Matrix r = (Matrix(2, 2) << 0.8, 0.2, 0.2, 0.4).finished();
    Vector x = (Vector(2) << 1.0, -1.0).finished();
    double bias = 2.0;
    double cost_var = 1e-8;
    long draws = 100000;
    double step_factor = 1e-3;  // alpha = step_factor |x| / |B grad f(x)|
    double se_band = 4.0;
};

struct ExperimentConfig {
    Kind kind = Kind::GPDemo;
    std::uint64_t seed = 1;
    int runs = 1;
    int particles = 50;
    int threads = 0;  // 0: hardware concurrency
    std::string out_dir;
    OptimizerConfig optimizer;
    GPDemoSettings gp_demo;
    Toy1DSettings toy1d;
    LGSSSettings lgss;
    NLToySettings nltoy;
    ArmijoSettings armijo;
};

/// Defaults for one experiment (the values used by the shipped configs).
ExperimentConfig default_config(Kind kind);

/// Overlays a JSON document on `cfg`. Unknown keys are rejected so typos do
/// not silently fall back to defaults.
void apply_json(ExperimentConfig& cfg, const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// The effective configuration as pretty-printed JSON.
std::string config_json(const ExperimentConfig& cfg);

struct GPDemoRow {
    double x = 0.0;
    double true_hess = 0.0;
    double post_mean = 0.0;
    double post_std = 0.0;
};

struct GPDemoResult {
    std::vector<double> iterates;
    std::vector<GPDemoRow> rows;
    double rmse_posterior = 0.0;
    double rmse_prior = 0.0;
    double far_field_max_dev = 0.0;
    double min_std = 0.0;
};

struct Replicate {
    int run = 0;
    Vector start;     // natural parameters (or x0 for the 1-D problem)
    Vector estimate;  // natural parameters at the final iterate
    RunStatus status = RunStatus::Ok;
    std::string message;
    bool failed = false;  // exception outside the optimizer (data, setup)
    int fallbacks = 0;
    long iterations = 0;
    std::vector<double> fhat_tail;  // f-hat over the last 100 iterations
};

struct MonteCarloResult {
    std::vector<Replicate> replicates;
    std::vector<std::string> estimate_names;
    std::map<std::string, double> stats;
};

struct ArmijoReport {
    double gamma = 0.0;
    double beta = 0.0;
    double c_bar = 0.0;
    double c_bar_noiseless = 0.0;
    double alpha = 0.0;
    ArmijoResidual below;  // at 0.9 c_bar
    ArmijoResidual above;  // at 2 c_bar
    bool pass_below = false;
    bool pass_above = false;
};

GPDemoResult gp_demo(const ExperimentConfig& cfg);
MonteCarloResult run_1d(const ExperimentConfig& cfg);
MonteCarloResult run_lgss(const ExperimentConfig& cfg);
MonteCarloResult run_nltoy(const ExperimentConfig& cfg);
ArmijoReport armijo_check(const ExperimentConfig& cfg);

/// Dispatches on cfg.kind and returns a short human-readable report.
std::string run_experiment(const ExperimentConfig& cfg);

double median(std::vector<double> values);

}  // namespace sqngp::experiments
