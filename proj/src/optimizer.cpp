#include "sqngp/optimizer.hpp"

#include "sqngp/csv.hpp"
#include "sqngp/direction.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace sqngp {

GPPrior GPConfig::make_prior(Eigen::Index n) const {
    if (custom_prior) return *custom_prior;
    const Vector vd = v_diag.size() > 0 ? v_diag : Vector::Constant(n, v);
    const Vector hd = h0_diag.size() > 0 ? h0_diag : Vector::Constant(n, h0);
    if (vd.size() != n || hd.size() != n) throw Error("GPConfig: diagonal hyperparameters have the wrong length");
    const Eigen::Index dh = sym_size(n);
    const Vector mean = vech(Matrix(hd.asDiagonal())).data;
    return GPPrior{[mean](const Vector&) { return mean; },
                   SEKernel(m * Matrix::Identity(dh, dh), Matrix(vd.asDiagonal()))};
}

namespace {

double prior_curvature(const GPPrior& prior, const Vector& x) {
    return unvech(prior.mean(x)).diagonal().mean();
}

}  // namespace

RunRecord run(const NoisyOracle& oracle, const Vector& x0, const OptimizerConfig& cfg,
              const IterationObserver& observer) {
    cfg.ls.validate();
    const Eigen::Index n = oracle.dim();
    if (x0.size() != n) throw Error("run: initial point has the wrong dimension");

    Matrix r;
    if (cfg.grad_cov) {
        r = *cfg.grad_cov;
    } else if (auto declared = oracle.noise().grad_cov) {
        r = *declared;
    } else {
        throw Error("run: gradient noise covariance is neither configured nor declared by the oracle");
    }

    GPPrior prior = cfg.gp.make_prior(n);
    HessianGP gp(prior, r, cfg.memory_p, cfg.gp.mode, cfg.gp.quad_nodes);

    RandomStream master(cfg.seed);
    RandomStream grad_stream = master.spawn("gradient");
    RandomStream cost_stream = master.spawn("cost");

    RunRecord rec;
    Vector x = x0;
    Vector x_prev;
    Vector g_prev;
    std::optional<ObservationPair> pending;

    for (long k = 0; k < cfg.k_max; ++k) {
        Vector g;
        try {
            g = oracle.grad(x, grad_stream);
        } catch (const std::exception& e) {
            rec.status = RunStatus::NonFiniteGradient;
            rec.message = "gradient evaluation failed at k=" + std::to_string(k) + ": " + e.what();
            break;
        }
        if (!g.allFinite()) {
            rec.status = RunStatus::NonFiniteGradient;
            rec.message = "non-finite gradient at k=" + std::to_string(k);
            break;
        }

        // pair k-1 involves g_k, so it only enters the GP one iteration later
        if (k > 0) {
            if (pending) gp.push_observation(std::move(*pending));
            pending = ObservationPair::make(k - 1, x_prev, x, g - g_prev);
        }
        if (observer) observer(k, gp);

        IterationRow row;
        row.k = k;
        row.x = x;
        row.gnorm = g.norm();

        Vector p;
        try {
            const DirectionResult dir = regularized_direction(gp.hessian_mean(x), g, cfg.epsilon);
            if (!dir.p.allFinite()) throw Error("run: direction is not finite");
            p = dir.p;
            row.lambda = dir.lambda;
        } catch (const Error&) {
            const double h0 = std::max(prior_curvature(prior, x), cfg.epsilon);
            p = -g / h0;
            row.fallback = true;
            ++rec.fallbacks;
        }

        double fhat = std::numeric_limits<double>::infinity();
        try {
            fhat = oracle.cost(x, cost_stream);
        } catch (const std::exception&) {
        }
        row.fhat = fhat;

        const LineSearchResult ls =
            stochastic_backtrack(std::max(k, 1L), x, p, g, fhat, oracle, cfg.ls, cost_stream);
        row.alpha = ls.alpha;
        row.ls_trials = ls.trials;
        row.satisfied = ls.satisfied;
        rec.rows.push_back(std::move(row));

        x_prev = x;
        g_prev = std::move(g);
        x = x + ls.alpha * p;
    }
    rec.x_final = x;
    return rec;
}

void write_trace_csv(std::ostream& out, const RunRecord& record) {
    const Eigen::Index n = record.x_final.size();
    CsvWriter csv(out);
    std::vector<std::string> header{"k"};
    for (Eigen::Index i = 0; i < n; ++i) header.push_back("x" + std::to_string(i));
    for (const char* col : {"fhat", "gnorm", "alpha", "lambda", "ls_trials", "satisfied"}) header.emplace_back(col);
    csv.row(header);
    for (const IterationRow& r : record.rows) {
        csv.field(r.k);
        for (Eigen::Index i = 0; i < n; ++i) csv.field(r.x(i));
        csv.field(r.fhat);
        csv.field(r.gnorm);
        csv.field(r.alpha);
        csv.field(r.lambda);
        csv.field(static_cast<long>(r.ls_trials));
        csv.field(static_cast<long>(r.satisfied ? 1 : 0));
        csv.end_row();
    }
}

}  // namespace sqngp
