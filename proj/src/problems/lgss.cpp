#include "sqngp/problems/lgss.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace sqngp::problems {

Vector LGSSParams::to_theta() const {
    Vector th(4);
    th << a, c, std::log(q), std::log(r);
    return th;
}

LGSSParams LGSSParams::from_theta(const Vector& theta) {
    if (theta.size() != 4) throw Error("LGSSParams: theta must have 4 entries");
    return {theta(0), theta(1), var_from_log(theta(2)), var_from_log(theta(3))};
}

double LGSSParams::stationary_output_var() const {
    if (std::abs(a) >= 1.0) return std::numeric_limits<double>::infinity();
    return c * c * q / (1.0 - a * a) + r;
}

double LGSSStateSpace::transition_mean(double x_prev, long, const Vector& theta) const { return theta(0) * x_prev; }

void LGSSStateSpace::transition_mean_grad(double x_prev, long, const Vector&, Eigen::Ref<Vector> out) const {
    out.setZero();
    out(0) = x_prev;
}

double LGSSStateSpace::process_var(const Vector& theta) const { return var_from_log(theta(2)); }

void LGSSStateSpace::process_var_grad(const Vector& theta, Eigen::Ref<Vector> out) const {
    out.setZero();
    out(2) = dvar_dlog(theta(2));
}

double LGSSStateSpace::observation_mean(double x, const Vector& theta) const { return theta(1) * x; }

void LGSSStateSpace::observation_mean_grad(double x, const Vector&, Eigen::Ref<Vector> out) const {
    out.setZero();
    out(1) = x;
}

double LGSSStateSpace::measurement_var(const Vector& theta) const { return var_from_log(theta(3)); }

void LGSSStateSpace::measurement_var_grad(const Vector& theta, Eigen::Ref<Vector> out) const {
    out.setZero();
    out(3) = dvar_dlog(theta(3));
}

KalmanResult kalman_loglik_grad(const LGSSModel& model, const Vector& theta, const Vector& y) {
    if (theta.size() != 4) throw Error("kalman_loglik_grad: theta must have 4 entries");
    const double a = theta(0);
    const double c = theta(1);
    const double q = var_from_log(theta(2));
    const double r = var_from_log(theta(3));
    // tangent directions of (a, c, q, r) w.r.t. each coordinate of theta
    const double da[4] = {1, 0, 0, 0};
    const double dc[4] = {0, 1, 0, 0};
    const double dq[4] = {0, 0, dvar_dlog(theta(2)), 0};
    const double dr[4] = {0, 0, 0, dvar_dlog(theta(3))};

    double m = model.m0;
    double p = model.p0;
    double dm[4] = {0, 0, 0, 0};
    double dp[4] = {0, 0, 0, 0};

    KalmanResult out;
    out.grad = Vector::Zero(4);
    const double log2pi = std::log(2.0 * std::numbers::pi);

    for (Eigen::Index t = 0; t < y.size(); ++t) {
        const double mp = a * m;
        const double pp = a * a * p + q;
        const double e = y(t) - c * mp;
        const double s = c * c * pp + r;
        if (!(s > 0.0)) throw Error("kalman_loglik_grad: non-positive innovation variance");
        const double k = pp * c / s;
        out.loglik += -0.5 * (log2pi + std::log(s) + e * e / s);

        for (int j = 0; j < 4; ++j) {
            const double dmp = da[j] * m + a * dm[j];
            const double dpp = 2.0 * a * da[j] * p + a * a * dp[j] + dq[j];
            const double de = -dc[j] * mp - c * dmp;
            const double ds = 2.0 * c * dc[j] * pp + c * c * dpp + dr[j];
            out.grad(j) += -0.5 * (ds / s + 2.0 * e * de / s - e * e * ds / (s * s));
            const double dk = (dpp * c + pp * dc[j]) / s - pp * c * ds / (s * s);
            dm[j] = dmp + dk * e + k * de;
            dp[j] = -(dk * c + k * dc[j]) * pp + (1.0 - k * c) * dpp;
        }
        m = mp + k * e;
        p = (1.0 - k * c) * pp;
    }
    return out;
}

Vector simulate_lgss(const LGSSModel& model, const LGSSParams& params, long n, RandomStream& stream) {
    if (params.q < 0.0 || params.r < 0.0) throw Error("simulate_lgss: variances must be >= 0");
    Vector y(n);
    double x = model.m0 + std::sqrt(model.p0) * stream.normal();
    for (long t = 0; t < n; ++t) {
        x = params.a * x + std::sqrt(params.q) * stream.normal();
        y(t) = params.c * x + std::sqrt(params.r) * stream.normal();
    }
    return y;
}

AnalyticOracle lgss_noisy_oracle(const LGSSModel& model, Vector y, double cost_var, double grad_var) {
    NoiseModel noise;
    noise.cost_var = cost_var;
    noise.grad_cov = grad_var * Matrix::Identity(4, 4);
    auto data = std::make_shared<const Vector>(std::move(y));
    return AnalyticOracle(
        4, [model, data](const Vector& th) { return -kalman_loglik_grad(model, th, *data).loglik; },
        [model, data](const Vector& th) -> Vector { return -kalman_loglik_grad(model, th, *data).grad; }, {},
        std::move(noise));
}

}  // namespace sqngp::problems
