#include "sqngp/problems/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sqngp::problems {

namespace {

void resample(const std::vector<double>& w, std::vector<int>& ancestors, Resampling scheme, RandomStream& stream) {
    const auto m = static_cast<int>(w.size());
    std::vector<double> cum(m);
    std::partial_sum(w.begin(), w.end(), cum.begin());
    cum.back() = 1.0;
    auto pick = [&](double u) {
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        return static_cast<int>(std::min<std::ptrdiff_t>(it - cum.begin(), m - 1));
    };
    if (scheme == Resampling::Systematic) {
        const double u0 = stream.uniform() / m;
        for (int i = 0; i < m; ++i) ancestors[i] = pick(u0 + static_cast<double>(i) / m);
    } else {
        for (int i = 0; i < m; ++i) ancestors[i] = pick(stream.uniform());
    }
}

}  // namespace

ParticleFilterEstimate bootstrap_pf(const ScalarStateSpaceModel& model, const Vector& theta, const Vector& y,
                                    int particles, RandomStream& stream, const ParticleFilterOptions& opts) {
    if (particles < 2) throw Error("bootstrap_pf: need at least 2 particles");
    if (theta.size() != model.num_params()) throw Error("bootstrap_pf: theta has the wrong length");
    const int m = particles;
    const Eigen::Index np = model.num_params();
    const double q = model.process_var(theta);
    const double r = model.measurement_var(theta);
    if (!(r > 0.0)) throw Error("bootstrap_pf: measurement variance must be positive");
    const double sq = std::sqrt(q);
    const double log2pi = std::log(2.0 * std::numbers::pi);

    Vector dq(np), dr(np), dmean(np), dobs(np);
    model.process_var_grad(theta, dq);
    model.measurement_var_grad(theta, dr);

    std::vector<double> x(m), x_prev(m), logw(m), w(m, 1.0 / m);
    std::vector<int> anc(m);
    Matrix alpha, alpha_prev;
    if (opts.compute_score) alpha = Matrix::Zero(np, m);

    for (int i = 0; i < m; ++i) x[i] = model.initial_mean() + std::sqrt(model.initial_var()) * stream.normal();

    ParticleFilterEstimate est;
    est.particles = m;
    est.ess.reserve(static_cast<std::size_t>(y.size()));

    for (Eigen::Index t = 1; t <= y.size(); ++t) {
        if (t > 1) {
            resample(w, anc, opts.resampling, stream);
        } else {
            std::iota(anc.begin(), anc.end(), 0);
        }
        x_prev.swap(x);
        if (opts.compute_score) alpha_prev.swap(alpha);
        if (opts.compute_score) alpha.resize(np, m);

        const double yt = y(t - 1);
        double max_logw = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double xp = x_prev[anc[i]];
            const double mean = model.transition_mean(xp, t - 1, theta);
            const double noise = sq * stream.normal();
            x[i] = mean + noise;
            const double obs = model.observation_mean(x[i], theta);
            const double innov = yt - obs;
            logw[i] = -0.5 * (log2pi + std::log(r) + innov * innov / r);
            if (std::isfinite(logw[i])) max_logw = std::max(max_logw, logw[i]);

            if (opts.compute_score) {
                // d/dtheta [log N(x_t; f, q) + log N(y_t; h, r)]
                model.transition_mean_grad(xp, t - 1, theta, dmean);
                model.observation_mean_grad(x[i], theta, dobs);
                auto col = alpha.col(i);
                col = alpha_prev.col(anc[i]) + (innov / r) * dobs - 0.5 * (1.0 / r - innov * innov / (r * r)) * dr;
                if (q > 0.0) col += (noise / q) * dmean - 0.5 * (1.0 / q - noise * noise / (q * q)) * dq;
            }
        }
        if (!std::isfinite(max_logw)) throw Error("particle degeneracy");

        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            w[i] = std::isfinite(logw[i]) ? std::exp(logw[i] - max_logw) : 0.0;
            sum += w[i];
        }
        if (!(sum > 0.0) || !std::isfinite(sum)) throw Error("particle degeneracy");
        double sum_sq = 0.0;
        for (int i = 0; i < m; ++i) {
            w[i] /= sum;
            sum_sq += w[i] * w[i];
        }
        est.ess.push_back(1.0 / sum_sq);
        est.loglik += max_logw + std::log(sum / m);
    }

    if (opts.compute_score) {
        est.score = Vector::Zero(np);
        for (int i = 0; i < m; ++i) est.score += w[i] * alpha.col(i);
    }
    return est;
}

ParticleFilterOracle::ParticleFilterOracle(std::shared_ptr<const ScalarStateSpaceModel> model, Vector y,
                                           int particles, ParticleFilterOptions opts)
    : model_(std::move(model)), y_(std::move(y)), particles_(particles), opts_(opts) {
    if (particles_ < 2) throw Error("ParticleFilterOracle: need at least 2 particles");
}

double ParticleFilterOracle::cost(const Vector& theta, RandomStream& stream) const {
    ParticleFilterOptions o = opts_;
    o.compute_score = false;
    try {
        return -bootstrap_pf(*model_, theta, y_, particles_, stream, o).loglik;
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

Vector ParticleFilterOracle::grad(const Vector& theta, RandomStream& stream) const {
    ParticleFilterOptions o = opts_;
    o.compute_score = true;
    return -bootstrap_pf(*model_, theta, y_, particles_, stream, o).score;
}

}  // namespace sqngp::problems
