#include "sqngp/problems/nlbench.hpp"

#include <cmath>

namespace sqngp::problems {

Vector NLBenchParams::to_theta() const {
    Vector th(6);
    th << a, b, c, d, std::max(std::log(q), kLogVarFloor), std::max(std::log(r), kLogVarFloor);
    return th;
}

NLBenchParams NLBenchParams::from_theta(const Vector& theta) {
    if (theta.size() != 6) throw Error("NLBenchParams: theta must have 6 entries");
    return {theta(0), theta(1), theta(2), theta(3), var_from_log(theta(4)), var_from_log(theta(5))};
}

Vector NLBenchParams::natural() const {
    Vector v(6);
    v << a, b, c, d, q, r;
    return v;
}

double NLBenchStateSpace::transition_mean(double x, long t_prev, const Vector& th) const {
    return th(0) * x + th(1) * x / (1.0 + x * x) + th(2) * std::cos(1.2 * static_cast<double>(t_prev));
}

void NLBenchStateSpace::transition_mean_grad(double x, long t_prev, const Vector&, Eigen::Ref<Vector> out) const {
    out.setZero();
    out(0) = x;
    out(1) = x / (1.0 + x * x);
    out(2) = std::cos(1.2 * static_cast<double>(t_prev));
}

double NLBenchStateSpace::process_var(const Vector& th) const { return var_from_log(th(4)); }

void NLBenchStateSpace::process_var_grad(const Vector& th, Eigen::Ref<Vector> out) const {
    out.setZero();
    out(4) = dvar_dlog(th(4));
}

double NLBenchStateSpace::observation_mean(double x, const Vector& th) const { return th(3) * x * x; }

void NLBenchStateSpace::observation_mean_grad(double x, const Vector&, Eigen::Ref<Vector> out) const {
    out.setZero();
    out(3) = x * x;
}

double NLBenchStateSpace::measurement_var(const Vector& th) const { return var_from_log(th(5)); }

void NLBenchStateSpace::measurement_var_grad(const Vector& th, Eigen::Ref<Vector> out) const {
    out.setZero();
    out(5) = dvar_dlog(th(5));
}

Vector simulate_nlbench(const NLBenchModel& model, const NLBenchParams& p, long n, RandomStream& stream) {
    if (p.q < 0.0 || p.r < 0.0) throw Error("simulate_nlbench: variances must be >= 0");
    Vector y(n);
    double x = model.m0 + std::sqrt(model.p0) * stream.normal();
    for (long t = 1; t <= n; ++t) {
        x = p.a * x + p.b * x / (1.0 + x * x) + p.c * std::cos(1.2 * static_cast<double>(t - 1)) +
            std::sqrt(p.q) * stream.normal();
        y(t - 1) = p.d * x * x + std::sqrt(p.r) * stream.normal();
    }
    return y;
}

}  // namespace sqngp::problems
