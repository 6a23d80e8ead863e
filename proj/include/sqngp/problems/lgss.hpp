#pragma once

// Scalar linear Gaussian state-space model
//   x_t = a x_{t-1} + v_t,  y_t = c x_t + e_t,  v ~ N(0, q), e ~ N(0, r).
// Unconstrained coordinates: theta = (a, c, log q, log r).

#include "sqngp/oracle.hpp"
#include "sqngp/problems/state_space.hpp"
#include "sqngp/random.hpp"

namespace sqngp::problems {

struct LGSSParams {
    double a = 0.9;
    double c = 1.0;
    double q = 0.1;
    double r = 0.5;

    Vector to_theta() const;
    static LGSSParams from_theta(const Vector& theta);
    /// c^2 q / (1 - a^2) + r; infinite when |a| >= 1.
    double stationary_output_var() const;
};

struct LGSSModel {
    double m0 = 0.0;  // x_0 prior mean
    double p0 = 1.0;  // x_0 prior variance
};

class LGSSStateSpace final : public ScalarStateSpaceModel {
public:
    explicit LGSSStateSpace(LGSSModel model) : model_(model) {}

    Eigen::Index num_params() const override { return 4; }
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
    LGSSModel model_;
};

struct KalmanResult {
    double loglik = 0.0;
    Vector grad;  // d loglik / d theta, theta = (a, c, log q, log r)
};

/// Exact log-likelihood by the prediction-error decomposition, with its
/// gradient from forward sensitivity recursions of the filter.
KalmanResult kalman_loglik_grad(const LGSSModel& model, const Vector& theta, const Vector& y);

/// y_1..y_N. Zero variances give noise-free trajectories.
Vector simulate_lgss(const LGSSModel& model, const LGSSParams& params, long n, RandomStream& stream);

/// Negative log-likelihood with injected N(0, cost_var) cost noise and
/// N(0, grad_var I) gradient noise (both 1 by default).
AnalyticOracle lgss_noisy_oracle(const LGSSModel& model, Vector y, double cost_var = 1.0, double grad_var = 1.0);

}  // namespace sqngp::problems
