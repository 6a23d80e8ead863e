// Command-line front end for the experiment drivers.

#include "sqngp/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace ex = sqngp::experiments;

namespace {

constexpr const char* kSchemas = R"(Output files (written under --out):
  summary.json               experiment name, effective config, summary statistics
  gp-demo:
    gp_demo.csv              x,true_hess,post_mean,post_std
    gp_demo_iterates.csv     k,x,grad
  run-1d / run-lgss / run-nltoy:
    replicates.csv           run,status,fallbacks,iterations,start_<p>...,est_<p>...
    traces/run_NNN.csv       k,x0..x{n-1},fhat,gnorm,alpha,lambda,ls_trials,satisfied
  armijo-check:
    armijo.csv               c_factor,c,alpha,draws,mean,std_error,pass
Trace coordinates: run-1d uses x; run-lgss uses (a, c, log q, log r);
run-nltoy uses (a, b, c, d, log q, log r).
)";

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<long> iters;
    std::optional<int> particles;
    std::optional<int> threads;
    std::optional<std::string> out;
    std::optional<std::string> mode;
    bool print_config = false;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "JSON config file (see configs/)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--mode", o.mode, "GP measurement model")->check(CLI::IsMember({"full", "simplified"}));
    sub->add_flag("--print-config", o.print_config, "print the effective config and exit");
}

void add_runs(CLI::App* sub, Overrides& o) {
    sub->add_option("--runs", o.runs, "number of replicates")->check(CLI::PositiveNumber);
    sub->add_option("--iters", o.iters, "optimizer iterations per replicate")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", o.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
}

ex::ExperimentConfig resolve(ex::Kind kind, const Overrides& o) {
    ex::ExperimentConfig cfg = ex::default_config(kind);
    if (!o.config.empty()) {
        cfg = ex::load_config(o.config);
        if (cfg.kind != kind)
            throw sqngp::Error("config '" + o.config + "' is for " + ex::to_string(cfg.kind) + ", not " +
                               ex::to_string(kind));
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.runs) cfg.runs = *o.runs;
    if (o.iters) cfg.optimizer.k_max = *o.iters;
    if (o.particles) cfg.particles = *o.particles;
    if (o.threads) cfg.threads = *o.threads;
    if (o.out) cfg.out_dir = *o.out;
    if (o.mode) cfg.optimizer.gp.mode = sqngp::parse_mode(*o.mode);
    if (cfg.particles < 2) throw sqngp::Error("--particles must be >= 2");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic quasi-Newton optimization with a Gaussian-process Hessian model"};
    app.footer(kSchemas);
    app.require_subcommand(1);

    Overrides o;
    std::vector<std::pair<CLI::App*, ex::Kind>> subs;

    auto* demo = app.add_subcommand("gp-demo", "fit the Hessian GP to noisy gradients of the 1-D test function");
    add_common(demo, o);
    subs.emplace_back(demo, ex::Kind::GPDemo);

    auto* r1d = app.add_subcommand("run-1d", "optimize the noisy 1-D test function");
    add_common(r1d, o);
    add_runs(r1d, o);
    subs.emplace_back(r1d, ex::Kind::Run1D);

    auto* lgss = app.add_subcommand("run-lgss", "maximum likelihood for the linear Gaussian state-space model");
    add_common(lgss, o);
    add_runs(lgss, o);
    subs.emplace_back(lgss, ex::Kind::RunLGSS);

    auto* nl = app.add_subcommand("run-nltoy", "maximum likelihood for the nonlinear benchmark via a particle filter");
    add_common(nl, o);
    add_runs(nl, o);
    nl->add_option("--particles", o.particles, "particles per filter run");
    subs.emplace_back(nl, ex::Kind::RunNLToy);

    auto* arm = app.add_subcommand("armijo-check", "Monte Carlo check of the stochastic Armijo bound");
    add_common(arm, o);
    subs.emplace_back(arm, ex::Kind::ArmijoCheck);

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& [sub, kind] : subs) {
            if (!sub->parsed()) continue;
            const ex::ExperimentConfig cfg = resolve(kind, o);
            if (o.print_config) {
                std::cout << ex::config_json(cfg) << '\n';
                return 0;
            }
            std::cout << ex::run_experiment(cfg);
            if (!cfg.out_dir.empty()) std::cout << "wrote " << cfg.out_dir << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
