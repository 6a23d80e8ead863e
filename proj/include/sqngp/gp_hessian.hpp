#pragma once

// Gaussian-process model of the half-vectorized Hessian h(x) = vech(∇²f(x)),
// conditioned on noisy gradient differences y_k = g_{k+1} - g_k.
//
// Measurement model for a pair k with segment r_k(t) = x_k + t s_k:
//   FULL:        y_k = Dbar_k ∫_0^1 h(r_k(t)) dt + w_k
//   SIMPLIFIED:  y_k = Dbar_k h(x_k) + w_k
// with w_k = v_k - v_{k+1}, so neighbouring pairs share noise (cov -R) and
// each pair carries 2R.

#include "sqngp/quadrature.hpp"
#include "sqngp/symtools.hpp"
#include "sqngp/types.hpp"

#include <deque>
#include <functional>

namespace sqngp {

enum class MeasurementMode { Full, Simplified };

MeasurementMode parse_mode(const std::string& name);
std::string to_string(MeasurementMode mode);

/// kappa(x, x') = M exp(-1/2 (x - x')^T V (x - x')).
class SEKernel {
public:
    /// Throws unless M and V are symmetric positive definite.
    SEKernel(Matrix output_cov, Matrix inv_length);

    const Matrix& output_cov() const { return m_; }
    const Matrix& inv_length() const { return v_; }
    Eigen::Index input_dim() const { return v_.rows(); }
    Eigen::Index output_dim() const { return m_.rows(); }

    /// The scalar factor exp(-1/2 d^T V d).
    double correlation(const Vector& x, const Vector& xp) const;

private:
    Matrix m_;
    Matrix v_;
};

struct GPPrior {
    std::function<Vector(const Vector&)> mean;
    SEKernel kernel;

    /// M = m I, V = v I, mean = vech(h0 I).
    static GPPrior isotropic(Eigen::Index n, double m, double v, double h0);
};

struct ObservationPair {
    long index = 0;
    Vector x_start;
    Vector x_end;
    Vector s;  // x_end - x_start
    Vector y;  // g(x_end) - g(x_start)

    static ObservationPair make(long index, Vector x_start, Vector x_end, Vector y);
};

struct HessianPosterior {
    Vector phi;
    Matrix sigma;
};

Matrix kernel_eval(const SEKernel& kernel, const Vector& x, const Vector& xp);

/// ∫_0^1 kappa(x, r_j(t)) dt by Gauss-Legendre.
Matrix kernel_line_integral_cross(const SEKernel& kernel, const Vector& x, const ObservationPair& pair,
                                  const GaussLegendre& rule);

/// ∫_0^1 ∫_0^1 kappa(r_i(tau), r_j(t)) dtau dt by a tensor-product rule.
Matrix kernel_line_integral_double(const SEKernel& kernel, const ObservationPair& pi, const ObservationPair& pj,
                                   const GaussLegendre& rule);

/// R * delta(i, j): 2R on the diagonal, -R for neighbours, zero otherwise.
Matrix noise_block(const Matrix& r, long i, long j);

class HessianGP {
public:
    HessianGP(GPPrior prior, Matrix noise_cov, int memory_p, MeasurementMode mode, int quad_nodes = 16);

    Eigen::Index dim() const { return n_; }
    Eigen::Index sym_dim() const { return sym_size(n_); }
    int memory() const { return memory_p_; }
    MeasurementMode mode() const { return mode_; }
    int quad_nodes() const { return static_cast<int>(rule_.nodes.size()); }
    const GPPrior& prior() const { return prior_; }
    const Matrix& noise_cov() const { return r_; }
    const DuplicationMatrix& duplication() const { return dup_; }
    const std::deque<ObservationPair>& window() const { return window_; }

    /// Appends a pair; evicts the oldest once more than p+1 are held.
    /// Throws if the index does not follow the last one.
    void push_observation(ObservationPair pair);
    void clear() { window_.clear(); }

    /// E[y_i] under the prior.
    Vector measurement_mean(const ObservationPair& pair) const;

    /// K_{x,j}: covariance of h(x) with y_j, shape d_h x n.
    Matrix cross_covariance(const Vector& x, const ObservationPair& pair) const;

    /// Covariance of the stacked window measurements (no jitter).
    Matrix build_gram() const;

    /// Returns the prior at x when the window is empty. Throws Error("gram
    /// matrix not PD") when factorization fails even with jitter.
    HessianPosterior posterior(const Vector& x) const;

    Matrix hessian_mean(const Vector& x) const;

private:
    Matrix gram_block(const ObservationPair& pi, const ObservationPair& pj) const;

    GPPrior prior_;
    Matrix r_;
    int memory_p_;
    MeasurementMode mode_;
    GaussLegendre rule_;
    Eigen::Index n_;
    DuplicationMatrix dup_;
    std::deque<ObservationPair> window_;
};

}  // namespace sqngp
