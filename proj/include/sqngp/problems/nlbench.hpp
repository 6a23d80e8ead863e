#pragma once

// Nonlinear benchmark
//   x_t = a x_{t-1} + b x_{t-1} / (1 + x_{t-1}^2) + c cos(1.2 (t-1)) + v_t
//   y_t = d x_t^2 + e_t,   v ~ N(0, q), e ~ N(0, r).
// Unconstrained coordinates: theta = (a, b, c, d, log q, log r).

#include "sqngp/problems/state_space.hpp"
#include "sqngp/random.hpp"

namespace sqngp::problems {

struct NLBenchParams {
    double a = 0.5;
    double b = 25.0;
    double c = 8.0;
    double d = 0.05;
    double q = 0.0;
    double r = 0.1;

    Vector to_theta() const;  // log q, log r are floored at kLogVarFloor
    static NLBenchParams from_theta(const Vector& theta);
    Vector natural() const;  // (a, b, c, d, q, r)
};

struct NLBenchModel {
    double m0 = 0.0;
    double p0 = 1.0;
};

class NLBenchStateSpace final : public ScalarStateSpaceModel {
public:
    explicit NLBenchStateSpace(NLBenchModel model) : model_(model) {}

    Eigen::Index num_params() const override { return 6; }
    double initial_mean() const override { return model_.m0; }
    double initial_var() const override { return model_.p0; }
    double transition_mean(double x_prev, long t_prev, const Vector& theta) const override;
    void transition_mean_grad(double x_prev, long t_prev, const Vector& theta, Eigen::Ref<Vector> out) const override;
    double process_var(const Vector& theta) const override;
    void process_var_grad(const Vector& theta, Eigen::Ref<Vector> out) const override;
    double observation_mean(double x, const Vector& theta) const override;
    void observation_mean_grad(double x, const Vector& theta, Eigen::Ref<Vector> out) const override;
    double measurement_var(const Vector& theta) const override;
    void measurement_var_grad(const Vector& theta, Eigen::Ref<Vector> out) const override;

private:
    NLBenchModel model_;
};

Vector simulate_nlbench(const NLBenchModel& model, const NLBenchParams& params, long n, RandomStream& stream);

}  // namespace sqngp::problems
