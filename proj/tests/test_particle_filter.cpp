#include <doctest.h>

#include "sqngp/problems/lgss.hpp"
#include "sqngp/problems/nlbench.hpp"
#include "sqngp/problems/particle_filter.hpp"

#include <cmath>
#include <limits>

using namespace sqngp;
using namespace sqngp::problems;

namespace {

struct Moments {
    double mean = 0, var = 0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
    return m;
}

}  // namespace

TEST_CASE("particle count precondition") {
    const LGSSStateSpace model(LGSSModel{});
    RandomStream rng(1);
    CHECK_THROWS_AS(bootstrap_pf(model, LGSSParams{}.to_theta(), Vector::Zero(5), 1, rng), Error);
}

TEST_CASE("fixed stream gives bit-identical estimates") {
    const NLBenchStateSpace model(NLBenchModel{});
    RandomStream sim(2);
    const Vector y = simulate_nlbench(NLBenchModel{}, NLBenchParams{}, 50, sim);
    for (auto rs : {Resampling::Multinomial, Resampling::Systematic}) {
        RandomStream r1(3), r2(3);
        ParticleFilterOptions opts{rs, true};
        const auto a = bootstrap_pf(model, NLBenchParams{}.to_theta(), y, 50, r1, opts);
        const auto b = bootstrap_pf(model, NLBenchParams{}.to_theta(), y, 50, r2, opts);
        CHECK(a.loglik == b.loglik);
        CHECK(a.score == b.score);
        CHECK(a.ess == b.ess);
        CHECK(a.ess.size() == 50);
    }
}

TEST_CASE("likelihood estimate is unbiased on the linear-Gaussian model") {
    const LGSSModel lm;
    const LGSSStateSpace model(lm);
    RandomStream rng(4);
    const Vector y = simulate_lgss(lm, LGSSParams{}, 50, rng);
    const Vector theta = LGSSParams{}.to_theta();
    const double exact = kalman_loglik_grad(lm, theta, y).loglik;
    std::vector<double> ratio;
    for (int i = 0; i < 500; ++i)
        ratio.push_back(std::exp(bootstrap_pf(model, theta, y, 50, rng, {Resampling::Multinomial, false}).loglik - exact));
    const auto m = moments(ratio);
    CHECK(std::abs(m.mean - 1.0) < 3.0 * std::sqrt(m.var / 500.0));
}

TEST_CASE("more particles reduce the log-likelihood variance") {
    const NLBenchStateSpace model(NLBenchModel{});
    RandomStream rng(5);
    const Vector y = simulate_nlbench(NLBenchModel{}, NLBenchParams{}, 100, rng);
    const Vector theta = NLBenchParams{}.to_theta();
    std::vector<double> small, large;
    for (int i = 0; i < 100; ++i) {
        small.push_back(bootstrap_pf(model, theta, y, 50, rng, {Resampling::Multinomial, false}).loglik);
        large.push_back(bootstrap_pf(model, theta, y, 500, rng, {Resampling::Multinomial, false}).loglik);
    }
    CHECK(moments(large).var < moments(small).var);
}

TEST_CASE("score estimate tracks the Kalman gradient") {
    const LGSSModel lm;
    const LGSSStateSpace model(lm);
    RandomStream rng(6);
    const Vector y = simulate_lgss(lm, LGSSParams{}, 30, rng);
    Vector theta = LGSSParams{}.to_theta();
    theta(0) = 0.6;
    const Vector exact = kalman_loglik_grad(lm, theta, y).grad;
    Vector sum = Vector::Zero(4);
    Vector sum_sq = Vector::Zero(4);
    const int runs = 200;
    for (int i = 0; i < runs; ++i) {
        const Vector s = bootstrap_pf(model, theta, y, 500, rng).score;
        sum += s;
        sum_sq += s.cwiseProduct(s);
    }
    const Vector mean = sum / runs;
    const Vector se = ((sum_sq / runs - mean.cwiseProduct(mean)) / runs).cwiseSqrt();
    // path degeneracy biases the estimator; require agreement in sign and rough size
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(std::abs(mean(i) - exact(i)) < std::max(0.25 * std::abs(exact(i)), 4.0 * se(i) + 0.5));
    }
}

TEST_CASE("score near zero at the truth on average") {
    const NLBenchModel nm;
    auto model = std::make_shared<NLBenchStateSpace>(nm);
    RandomStream rng(7);
    const Vector y = simulate_nlbench(nm, NLBenchParams{}, 100, rng);
    NLBenchParams truth;
    truth.q = 0.01;  // keep log q away from the floor so its score is informative
    const Vector theta = truth.to_theta();
    Vector sum = Vector::Zero(6);
    Vector sum_sq = Vector::Zero(6);
    const int runs = 200;
    for (int i = 0; i < runs; ++i) {
        const Vector s = bootstrap_pf(*model, theta, y, 50, rng).score;
        sum += s;
        sum_sq += s.cwiseProduct(s);
    }
    const Vector mean = sum / runs;
    const Vector sd = (sum_sq / runs - mean.cwiseProduct(mean)).cwiseSqrt();
    // soft check: the average score is small compared with the single-run spread
    CHECK(mean.allFinite());
    CHECK(sd.allFinite());
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(std::abs(mean(i)) < 1.5 * sd(i));
}

TEST_CASE("oracle wraps the filter in the minimization convention") {
    const LGSSModel lm;
    auto model = std::make_shared<LGSSStateSpace>(lm);
    RandomStream sim(8);
    const Vector y = simulate_lgss(lm, LGSSParams{}, 20, sim);
    const ParticleFilterOracle oracle(model, y, 100);
    const Vector theta = LGSSParams{}.to_theta();
    RandomStream r1(9), r2(9);
    CHECK(oracle.cost(theta, r1) == -bootstrap_pf(*model, theta, y, 100, r2, {Resampling::Multinomial, false}).loglik);
    RandomStream r3(10), r4(10);
    CHECK(oracle.grad(theta, r3) == -bootstrap_pf(*model, theta, y, 100, r4).score);
    CHECK(oracle.dim() == 4);
}

TEST_CASE("degeneracy: cost becomes infinite, gradient throws") {
    const NLBenchModel nm;
    auto model = std::make_shared<NLBenchStateSpace>(nm);
    // log-weights are normalized by their maximum, so only an observation
    // without any finite weight can exhaust the particle set
    Vector y = Vector::Constant(5, 1.0);
    y(3) = std::numeric_limits<double>::quiet_NaN();
    const NLBenchParams p;
    const ParticleFilterOracle oracle(model, y, 10);
    RandomStream rng(11);
    CHECK(std::isinf(oracle.cost(p.to_theta(), rng)));
    CHECK_THROWS_WITH_AS(oracle.grad(p.to_theta(), rng), "particle degeneracy", Error);
}
