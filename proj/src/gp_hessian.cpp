#include "sqngp/gp_hessian.hpp"

#include <cmath>
#include <utility>

namespace sqngp {

namespace {

bool is_spd(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) return false;
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) return false;
    Eigen::LLT<Matrix> llt(a);
    return llt.info() == Eigen::Success;
}

bool is_zero(const Vector& v) { return (v.array() == 0.0).all(); }

// ∫_0^1 k(x, r(t)) dt for the scalar correlation k.
double cross_integral(const SEKernel& kernel, const Vector& x, const ObservationPair& pair,
                      const GaussLegendre& rule) {
    if (is_zero(pair.s)) return kernel.correlation(x, pair.x_start);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        acc += rule.weights[q] * kernel.correlation(x, pair.x_start + rule.nodes[q] * pair.s);
    return acc;
}

double double_integral(const SEKernel& kernel, const ObservationPair& pi, const ObservationPair& pj,
                       const GaussLegendre& rule) {
    if (is_zero(pi.s)) return cross_integral(kernel, pi.x_start, pj, rule);
    if (is_zero(pj.s)) return cross_integral(kernel, pj.x_start, pi, rule);
    const Matrix& v = kernel.inv_length();
    const std::size_t q = rule.nodes.size();
    // d(tau, t) = (x_i - x_j) + tau s_i - t s_j; expand the quadratic form once
    const Vector d0 = pi.x_start - pj.x_start;
    const Vector vd0 = v * d0;
    const Vector vsi = v * pi.s;
    const Vector vsj = v * pj.s;
    const double c00 = d0.dot(vd0);
    const double c0i = 2.0 * pi.s.dot(vd0);
    const double c0j = -2.0 * pj.s.dot(vd0);
    const double cii = pi.s.dot(vsi);
    const double cjj = pj.s.dot(vsj);
    const double cij = -2.0 * pi.s.dot(vsj);
    double acc = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
        const double tau = rule.nodes[a];
        double inner = 0.0;
        for (std::size_t b = 0; b < q; ++b) {
            const double t = rule.nodes[b];
            const double quad = c00 + c0i * tau + c0j * t + cii * tau * tau + cjj * t * t + cij * tau * t;
            inner += rule.weights[b] * std::exp(-0.5 * quad);
        }
        acc += rule.weights[a] * inner;
    }
    return acc;
}

}  // namespace

MeasurementMode parse_mode(const std::string& name) {
    if (name == "full") return MeasurementMode::Full;
    if (name == "simplified") return MeasurementMode::Simplified;
    throw Error("unknown measurement mode '" + name + "' (expected full|simplified)");
}

std::string to_string(MeasurementMode mode) { return mode == MeasurementMode::Full ? "full" : "simplified"; }

SEKernel::SEKernel(Matrix output_cov, Matrix inv_length) : m_(std::move(output_cov)), v_(std::move(inv_length)) {
    if (!is_spd(m_)) throw Error("SEKernel: output covariance M must be symmetric positive definite");
    if (!is_spd(v_)) throw Error("SEKernel: inverse length scale V must be symmetric positive definite");
    if (sqngp::sym_dim(m_.rows()) != v_.rows())
        throw Error("SEKernel: M must be n(n+1)/2 square for an n x n matrix V");
}

double SEKernel::correlation(const Vector& x, const Vector& xp) const {
    const Vector d = x - xp;
    return std::exp(-0.5 * d.dot(v_ * d));
}

GPPrior GPPrior::isotropic(Eigen::Index n, double m, double v, double h0) {
    const Eigen::Index dh = sym_size(n);
    Vector mean = vech(h0 * Matrix::Identity(n, n)).data;
    return GPPrior{[mean](const Vector&) { return mean; },
                   SEKernel(m * Matrix::Identity(dh, dh), v * Matrix::Identity(n, n))};
}

ObservationPair ObservationPair::make(long index, Vector x_start, Vector x_end, Vector y) {
    if (x_start.size() != x_end.size() || y.size() != x_start.size())
        throw Error("ObservationPair: dimension mismatch");
    ObservationPair pair;
    pair.index = index;
    pair.s = x_end - x_start;
    pair.x_start = std::move(x_start);
    pair.x_end = std::move(x_end);
    pair.y = std::move(y);
    return pair;
}

Matrix kernel_eval(const SEKernel& kernel, const Vector& x, const Vector& xp) {
    return kernel.output_cov() * kernel.correlation(x, xp);
}

Matrix kernel_line_integral_cross(const SEKernel& kernel, const Vector& x, const ObservationPair& pair,
                                  const GaussLegendre& rule) {
    return kernel.output_cov() * cross_integral(kernel, x, pair, rule);
}

Matrix kernel_line_integral_double(const SEKernel& kernel, const ObservationPair& pi, const ObservationPair& pj,
                                   const GaussLegendre& rule) {
    return kernel.output_cov() * double_integral(kernel, pi, pj, rule);
}

Matrix noise_block(const Matrix& r, long i, long j) {
    const long gap = i > j ? i - j : j - i;
    if (gap == 0) return 2.0 * r;
    if (gap == 1) return -r;
    return Matrix::Zero(r.rows(), r.cols());
}

HessianGP::HessianGP(GPPrior prior, Matrix noise_cov, int memory_p, MeasurementMode mode, int quad_nodes)
    : prior_(std::move(prior)),
      r_(std::move(noise_cov)),
      memory_p_(memory_p),
      mode_(mode),
      rule_(gauss_legendre_unit(quad_nodes)),
      n_(prior_.kernel.input_dim()),
      dup_(duplication_matrix(n_)) {
    if (memory_p_ < 0) throw Error("HessianGP: memory length p must be >= 0");
    if (quad_nodes < 2) throw Error("HessianGP: need at least 2 quadrature nodes");
    if (r_.rows() != n_ || !is_spd(r_)) throw Error("HessianGP: noise covariance R must be n x n and positive definite");
}

void HessianGP::push_observation(ObservationPair pair) {
    if (pair.s.size() != n_) throw Error("push_observation: dimension mismatch");
    if (!window_.empty() && pair.index != window_.back().index + 1)
        throw Error("push_observation: observation indices must be consecutive");
    window_.push_back(std::move(pair));
    while (window_.size() > static_cast<std::size_t>(memory_p_) + 1) window_.pop_front();
}

Vector HessianGP::measurement_mean(const ObservationPair& pair) const {
    const Matrix db = dbar(pair.s, dup_);
    if (mode_ == MeasurementMode::Simplified || is_zero(pair.s)) return db * prior_.mean(pair.x_start);
    Vector acc = Vector::Zero(sym_dim());
    for (std::size_t q = 0; q < rule_.nodes.size(); ++q)
        acc += rule_.weights[q] * prior_.mean(pair.x_start + rule_.nodes[q] * pair.s);
    return db * acc;
}

Matrix HessianGP::cross_covariance(const Vector& x, const ObservationPair& pair) const {
    const double k = mode_ == MeasurementMode::Simplified ? prior_.kernel.correlation(x, pair.x_start)
                                                          : cross_integral(prior_.kernel, x, pair, rule_);
    return k * prior_.kernel.output_cov() * dbar(pair.s, dup_).transpose();
}

Matrix HessianGP::gram_block(const ObservationPair& pi, const ObservationPair& pj) const {
    const double k = mode_ == MeasurementMode::Simplified ? prior_.kernel.correlation(pi.x_start, pj.x_start)
                                                          : double_integral(prior_.kernel, pi, pj, rule_);
    return k * dbar(pi.s, dup_) * prior_.kernel.output_cov() * dbar(pj.s, dup_).transpose() +
           noise_block(r_, pi.index, pj.index);
}

Matrix HessianGP::build_gram() const {
    if (window_.empty()) throw Error("build_gram: window is empty");
    const auto w = static_cast<Eigen::Index>(window_.size());
    Matrix k(n_ * w, n_ * w);
    for (Eigen::Index i = 0; i < w; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const Matrix block = gram_block(window_[i], window_[j]);
            k.block(i * n_, j * n_, n_, n_) = block;
            if (i != j) k.block(j * n_, i * n_, n_, n_) = block.transpose();
        }
    return k;
}

HessianPosterior HessianGP::posterior(const Vector& x) const {
    if (x.size() != n_) throw Error("posterior: dimension mismatch");
    HessianPosterior post{prior_.mean(x), prior_.kernel.output_cov()};
    if (window_.empty()) return post;

    const auto w = static_cast<Eigen::Index>(window_.size());
    Matrix gram = build_gram();
    Vector resid(n_ * w);
    Matrix kx(sym_dim(), n_ * w);
    for (Eigen::Index j = 0; j < w; ++j) {
        resid.segment(j * n_, n_) = window_[j].y - measurement_mean(window_[j]);
        kx.middleCols(j * n_, n_) = cross_covariance(x, window_[j]);
    }

    // Plain factorization first; jitter only when it fails or is numerically singular.
    const double mean_diag = gram.diagonal().mean();
    Eigen::LLT<Matrix> llt;
    bool ok = false;
    for (double jitter : {0.0, 1e-10, 1e-6}) {
        Matrix g = gram;
        g.diagonal().array() += jitter * mean_diag;
        llt.compute(g);
        if (llt.info() != Eigen::Success) continue;
        const Vector piv = llt.matrixLLT().diagonal();
        if (piv.minCoeff() > 0.0 && (piv.minCoeff() / piv.maxCoeff()) > 1e-7) {
            ok = true;
            break;
        }
        if (jitter > 0.0 && piv.minCoeff() > 0.0) {
            ok = true;
            break;
        }
    }
    if (!ok) throw Error("gram matrix not PD");

    post.phi += kx * llt.solve(resid);
    const Matrix half = llt.matrixL().solve(kx.transpose());
    post.sigma -= half.transpose() * half;
    post.sigma = 0.5 * (post.sigma + post.sigma.transpose()).eval();
    return post;
}

Matrix HessianGP::hessian_mean(const Vector& x) const { return unvech(posterior(x).phi); }

}  // namespace sqngp
