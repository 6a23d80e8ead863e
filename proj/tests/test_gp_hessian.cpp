#include <doctest.h>

#include "gp_oracle.hpp"
#include "sqngp/gp_hessian.hpp"
#include "sqngp/random.hpp"

#include <cmath>

using namespace sqngp;

namespace {

Vector vec1(double a) { return Vector::Constant(1, a); }
Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

Matrix random_spd(Eigen::Index n, RandomStream& rng, double floor) {
    Matrix b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
    return b * b.transpose() + floor * Matrix::Identity(n, n);
}

Vector random_vector(Eigen::Index n, RandomStream& rng, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

// Midpoint-rule reference for the line integrals, independent of Gauss-Legendre.
double midpoint_cross(const SEKernel& k, const Vector& x, const ObservationPair& p, int steps) {
    double acc = 0.0;
    for (int i = 0; i < steps; ++i) acc += k.correlation(x, p.x_start + ((i + 0.5) / steps) * p.s);
    return acc / steps;
}

double midpoint_double(const SEKernel& k, const ObservationPair& a, const ObservationPair& b, int steps) {
    double acc = 0.0;
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j)
            acc += k.correlation(a.x_start + ((i + 0.5) / steps) * a.s, b.x_start + ((j + 0.5) / steps) * b.s);
    return acc / (static_cast<double>(steps) * steps);
}

GPPrior scalar_prior(double m, double v, double h0) { return GPPrior::isotropic(1, m, v, h0); }

}  // namespace

TEST_CASE("SE kernel evaluation") {
    const SEKernel k(Matrix::Constant(1, 1, 1000.0), Matrix::Constant(1, 1, 0.2));
    CHECK(kernel_eval(k, vec1(0.3), vec1(0.3))(0, 0) == 1000.0);
    CHECK(kernel_eval(k, vec1(1.0), vec1(0.0))(0, 0) == doctest::Approx(904.83741803595957).epsilon(1e-14));
    CHECK(kernel_eval(k, vec1(100.0), vec1(0.0))(0, 0) < 1e-200);
    CHECK(kernel_eval(k, vec1(2.0), vec1(-1.0)) == kernel_eval(k, vec1(-1.0), vec1(2.0)));

    CHECK_THROWS_AS(SEKernel(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0)), Error);
    CHECK_THROWS_AS(SEKernel(Matrix::Identity(3, 3), Matrix::Identity(3, 3)), Error);
}

TEST_CASE("cross line integral") {
    const SEKernel k(Matrix::Identity(1, 1), Matrix::Identity(1, 1));
    const GaussLegendre g16 = gauss_legendre_unit(16);

    const auto degenerate = ObservationPair::make(0, vec1(0.7), vec1(0.7), vec1(0.0));
    CHECK(kernel_line_integral_cross(k, vec1(0.2), degenerate, g16) == kernel_eval(k, vec1(0.2), vec1(0.7)));

    // mpmath: ∫_0^1 exp(-t^2/2) dt
    const auto unit = ObservationPair::make(0, vec1(0.0), vec1(1.0), vec1(0.0));
    CHECK(std::abs(kernel_line_integral_cross(k, vec1(0.0), unit, g16)(0, 0) - 0.85562439189214880) < 1e-14);

    const auto seg = ObservationPair::make(0, vec1(-0.5), vec1(1.5), vec1(0.0));
    const double a16 = kernel_line_integral_cross(k, vec1(0.3), seg, g16)(0, 0);
    const double a32 = kernel_line_integral_cross(k, vec1(0.3), seg, gauss_legendre_unit(32))(0, 0);
    CHECK(std::abs(a16 - a32) < 1e-10);
    CHECK(std::abs(a32 - midpoint_cross(k, vec1(0.3), seg, 20000)) < 1e-8);
}

TEST_CASE("double line integral") {
    const SEKernel k(Matrix::Identity(1, 1), Matrix::Identity(1, 1));
    const GaussLegendre g16 = gauss_legendre_unit(16);

    const auto pt = ObservationPair::make(0, vec1(0.4), vec1(0.4), vec1(0.0));
    CHECK(kernel_line_integral_double(k, pt, pt, g16)(0, 0) == 1.0);

    // closed form 2[∫_0^1 e^{-u^2/2} du - (1 - e^{-1/2})], confirmed by mpmath 2-D quadrature
    const auto unit = ObservationPair::make(0, vec1(0.0), vec1(1.0), vec1(0.0));
    CHECK(std::abs(kernel_line_integral_double(k, unit, unit, g16)(0, 0) - 0.92431010320956445) < 1e-13);

    RandomStream rng(5);
    const SEKernel k2(random_spd(3, rng, 0.5), random_spd(2, rng, 0.3));
    const auto pa = ObservationPair::make(0, vec2(0.1, -0.3), vec2(0.8, 0.2), vec2(0, 0));
    const auto pb = ObservationPair::make(1, vec2(-0.4, 0.5), vec2(0.3, -0.1), vec2(0, 0));
    const Matrix ab = kernel_line_integral_double(k2, pa, pb, g16);
    const Matrix ba = kernel_line_integral_double(k2, pb, pa, g16);
    CHECK((ab - ba.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    const double ref = midpoint_double(k2, pa, pb, 600);
    CHECK(std::abs(ab(0, 0) / k2.output_cov()(0, 0) - ref) < 1e-6);
}

TEST_CASE("noise block follows the differenced-noise structure") {
    const Matrix r = (Matrix(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
    CHECK(noise_block(r, 4, 4) == 2.0 * r);
    CHECK(noise_block(r, 4, 5) == -r);
    CHECK(noise_block(r, 5, 4) == -r);
    CHECK(noise_block(r, 3, 5).isZero(0.0));
}

TEST_CASE("measurement mean") {
    RandomStream rng(8);
    for (auto mode : {MeasurementMode::Simplified, MeasurementMode::Full}) {
        const HessianGP gp(GPPrior::isotropic(3, 2.0, 1.0, 4.5), Matrix::Identity(3, 3), 3, mode);
        const Vector xs = random_vector(3, rng);
        const Vector s = random_vector(3, rng);
        const auto pair = ObservationPair::make(0, xs, xs + s, Vector::Zero(3));
        CHECK((gp.measurement_mean(pair) - 4.5 * s).norm() < 1e-13);

        const HessianGP zero(GPPrior::isotropic(3, 2.0, 1.0, 0.0), Matrix::Identity(3, 3), 3, mode);
        CHECK(zero.measurement_mean(pair).isZero(0.0));
        const auto still = ObservationPair::make(0, xs, xs, Vector::Zero(3));
        CHECK(gp.measurement_mean(still).isZero(0.0));
    }

    // non-constant mean: FULL averages along the segment, SIMPLIFIED uses the start
    GPPrior lin = scalar_prior(1.0, 1.0, 0.0);
    lin.mean = [](const Vector& x) { return Vector::Constant(1, 3.0 * x(0)); };
    const auto pair = ObservationPair::make(0, vec1(1.0), vec1(3.0), vec1(0.0));
    const HessianGP full(lin, Matrix::Identity(1, 1), 1, MeasurementMode::Full);
    const HessianGP simp(lin, Matrix::Identity(1, 1), 1, MeasurementMode::Simplified);
    CHECK(full.measurement_mean(pair)(0) == doctest::Approx(2.0 * 3.0 * 2.0).epsilon(1e-14));
    CHECK(simp.measurement_mean(pair)(0) == doctest::Approx(2.0 * 3.0 * 1.0).epsilon(1e-14));
}

TEST_CASE("gram matrix") {
    SUBCASE("single scalar pair, SIMPLIFIED") {
        HessianGP gp(scalar_prior(7.0, 1.0, 1.0), Matrix::Constant(1, 1, 0.3), 2, MeasurementMode::Simplified);
        gp.push_observation(ObservationPair::make(0, vec1(0.0), vec1(1.5), vec1(1.0)));
        CHECK(gp.build_gram()(0, 0) == doctest::Approx(1.5 * 1.5 * 7.0 + 2 * 0.3).epsilon(1e-15));
    }
    SUBCASE("neighbouring pairs share -R") {
        HessianGP gp(scalar_prior(7.0, 1.0, 1.0), Matrix::Constant(1, 1, 0.3), 2, MeasurementMode::Simplified);
        gp.push_observation(ObservationPair::make(0, vec1(0.0), vec1(1.0), vec1(1.0)));
        gp.push_observation(ObservationPair::make(1, vec1(1.0), vec1(3.0), vec1(1.0)));
        const Matrix k = gp.build_gram();
        CHECK(k(0, 1) == doctest::Approx(1.0 * 2.0 * 7.0 * std::exp(-0.5) - 0.3).epsilon(1e-14));
        CHECK(k(1, 0) == k(0, 1));
        gp.push_observation(ObservationPair::make(2, vec1(3.0), vec1(3.5), vec1(1.0)));
        CHECK(gp.build_gram()(0, 2) == doctest::Approx(1.0 * 0.5 * 7.0 * std::exp(-4.5)).epsilon(1e-14));
    }
    SUBCASE("FULL equals SIMPLIFIED on degenerate segments") {
        RandomStream rng(2);
        HessianGP full(GPPrior::isotropic(2, 3.0, 0.5, 1.0), Matrix::Identity(2, 2), 4, MeasurementMode::Full);
        HessianGP simp(GPPrior::isotropic(2, 3.0, 0.5, 1.0), Matrix::Identity(2, 2), 4, MeasurementMode::Simplified);
        for (long i = 0; i < 4; ++i) {
            const Vector xs = random_vector(2, rng);
            const auto p = ObservationPair::make(i, xs, xs, random_vector(2, rng));
            full.push_observation(p);
            simp.push_observation(p);
        }
        CHECK(full.build_gram() == simp.build_gram());
        const Vector x = random_vector(2, rng);
        CHECK(full.posterior(x).phi == simp.posterior(x).phi);
        CHECK(full.posterior(x).sigma == simp.posterior(x).sigma);
    }
    SUBCASE("FULL gram matches a midpoint-rule reference") {
        RandomStream rng(4);
        HessianGP gp(GPPrior::isotropic(2, 3.0, 0.7, 1.0), Matrix::Identity(2, 2), 2, MeasurementMode::Full);
        Vector x = random_vector(2, rng);
        for (long i = 0; i < 2; ++i) {
            const Vector nx = x + random_vector(2, rng);
            gp.push_observation(ObservationPair::make(i, x, nx, random_vector(2, rng)));
            x = nx;
        }
        const auto& w = gp.window();
        const Matrix block = gp.build_gram().block(0, 2, 2, 2);
        const Matrix ref = midpoint_double(gp.prior().kernel, w[0], w[1], 600) *
                               dbar(w[0].s, gp.duplication()) * gp.prior().kernel.output_cov() *
                               dbar(w[1].s, gp.duplication()).transpose() -
                           Matrix::Identity(2, 2);
        CHECK((block - ref).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("window bookkeeping") {
    HessianGP gp(scalar_prior(1.0, 1.0, 1.0), Matrix::Identity(1, 1), 2, MeasurementMode::Simplified);
    for (long i = 0; i < 5; ++i) gp.push_observation(ObservationPair::make(i, vec1(i), vec1(i + 1.0), vec1(1.0)));
    REQUIRE(gp.window().size() == 3);
    CHECK(gp.window().front().index == 2);
    CHECK(gp.window().back().index == 4);
    CHECK(gp.build_gram().rows() == 3);
    CHECK(gp.build_gram()(0, 0) == doctest::Approx(1.0 + 2.0));
    CHECK_THROWS_WITH_AS(gp.push_observation(ObservationPair::make(6, vec1(0), vec1(1), vec1(1))),
                         "push_observation: observation indices must be consecutive", Error);
    CHECK_THROWS_AS(HessianGP(scalar_prior(1, 1, 1), Matrix::Constant(1, 1, -1.0), 1, MeasurementMode::Full), Error);
}

TEST_CASE("posterior basics") {
    SUBCASE("empty window returns the prior") {
        const HessianGP gp(GPPrior::isotropic(2, 5.0, 1.0, 3.0), Matrix::Identity(2, 2), 3, MeasurementMode::Full);
        const auto post = gp.posterior(vec2(0.3, -1.0));
        CHECK(post.phi == vech(3.0 * Matrix::Identity(2, 2)).data);
        CHECK(post.sigma == 5.0 * Matrix::Identity(3, 3));
        CHECK(gp.hessian_mean(vec2(0, 0)) == 3.0 * Matrix::Identity(2, 2));
    }
    SUBCASE("scalar noiseless observation pins the Hessian") {
        // closed form: phi = h0 + (s^2 M)/(s^2 M + 2R) (y/s - h0)
        const double h = 6.0, s = 0.8, m = 50.0, r = 1e-12;
        HessianGP gp(scalar_prior(m, 1.0, 1.0), Matrix::Constant(1, 1, r), 0, MeasurementMode::Simplified);
        gp.push_observation(ObservationPair::make(0, vec1(2.0), vec1(2.0 + s), vec1(h * s)));
        const double expected = 1.0 + (s * s * m) / (s * s * m + 2 * r) * (h - 1.0);
        CHECK(gp.posterior(vec1(2.0)).phi(0) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(std::abs(gp.posterior(vec1(2.0)).phi(0) - h) < 1e-9);
    }
}

TEST_CASE("property: SIMPLIFIED posterior equals brute-force joint-Gaussian conditioning") {
    RandomStream rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        const Eigen::Index dh = sym_size(n);
        const int w = 1 + static_cast<int>(rng.uniform() * 4.0);
        const Matrix m = random_spd(dh, rng, 0.5);
        const Matrix v = random_spd(n, rng, 0.2);
        const Matrix r = 0.1 * random_spd(n, rng, 0.3);
        const Vector c0 = random_vector(dh, rng, 0.0, 2.0);
        const Matrix c1 = Matrix::Random(dh, n) * 0.3;
        GPPrior prior{[c0, c1](const Vector& x) -> Vector { return c0 + c1 * x; }, SEKernel(m, v)};

        HessianGP gp(prior, r, w - 1, MeasurementMode::Simplified);
        std::vector<ObservationPair> pairs;
        Vector x = random_vector(n, rng);
        for (int i = 0; i < w; ++i) {
            const Vector nx = x + random_vector(n, rng);
            pairs.push_back(ObservationPair::make(100 + i, x, nx, random_vector(n, rng, -3.0, 3.0)));
            gp.push_observation(pairs.back());
            x = nx;
        }
        const Vector at = random_vector(n, rng, -2.0, 2.0);
        const auto post = gp.posterior(at);
        const auto ref = testing::brute_force_simplified(prior, r, pairs, at);
        CHECK((post.phi - ref.phi).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((post.sigma - ref.sigma).cwiseAbs().maxCoeff() < 1e-10);

        // posterior never exceeds prior; posterior covariance is PSD
        Eigen::SelfAdjointEigenSolver<Matrix> shrink(prior.kernel.output_cov() - post.sigma);
        CHECK(shrink.eigenvalues().minCoeff() >= -1e-8 * m.trace());
        Eigen::SelfAdjointEigenSolver<Matrix> psd(post.sigma);
        CHECK(psd.eigenvalues().minCoeff() >= -1e-8 * post.sigma.trace());
        const Matrix hm = gp.hessian_mean(at);
        CHECK(hm == hm.transpose());
    }
}

TEST_CASE("quadrature convergence of FULL-mode gram entries") {
    RandomStream rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 1 + trial % 3;
        const double v = 0.8;
        HessianGP g16(GPPrior::isotropic(n, 4.0, v, 1.0), Matrix::Identity(n, n), 3, MeasurementMode::Full, 16);
        HessianGP g32(GPPrior::isotropic(n, 4.0, v, 1.0), Matrix::Identity(n, n), 3, MeasurementMode::Full, 32);
        Vector x = random_vector(n, rng);
        for (long i = 0; i < 4; ++i) {
            Vector s = random_vector(n, rng);
            s *= rng.uniform(0.1, 5.0) / (s.norm() * std::sqrt(v));  // ||s|| ||V||^{1/2} <= 5
            const auto p = ObservationPair::make(i, x, x + s, random_vector(n, rng));
            g16.push_observation(p);
            g32.push_observation(p);
            x += s;
        }
        CHECK((g16.build_gram() - g32.build_gram()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("noiseless quadratic: three independent secant pairs recover a 2x2 Hessian") {
    const Matrix a = (Matrix(2, 2) << 3.0, -1.2, -1.2, 2.0).finished();
    for (auto mode : {MeasurementMode::Simplified, MeasurementMode::Full}) {
        HessianGP gp(GPPrior::isotropic(2, 100.0, 1e-8, 1.0), 1e-12 * Matrix::Identity(2, 2), 2, mode);
        const std::vector<Vector> steps{vec2(0.5, 0.0), vec2(0.0, 0.4), vec2(0.3, -0.3)};
        Vector x = vec2(0.1, 0.2);
        long k = 0;
        for (const Vector& s : steps) {
            gp.push_observation(ObservationPair::make(k++, x, x + s, a * s));
            x += s;
        }
        const Matrix h = gp.hessian_mean(x);
        CHECK((h - a).norm() / a.norm() < 1e-6);
    }
}
