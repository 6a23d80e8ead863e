#pragma once

#include "sqngp/oracle.hpp"
#include "sqngp/problems/state_space.hpp"
#include "sqngp/random.hpp"

#include <memory>
#include <vector>

namespace sqngp::problems {

enum class Resampling { Multinomial, Systematic };

struct ParticleFilterOptions {
    Resampling resampling = Resampling::Multinomial;
    bool compute_score = true;
};

struct ParticleFilterEstimate {
    double loglik = 0.0;
    Vector score;  // empty unless requested
    int particles = 0;
    std::vector<double> ess;  // effective sample size after weighting, per step
};

/// Bootstrap particle filter: proposes from the dynamics, resamples every
/// step, and returns the log of the (unbiased) likelihood estimate. The
/// score is the Fisher-identity estimate obtained by carrying, for every
/// particle, the summed log-density gradients along its ancestral path.
/// Throws Error("particle degeneracy") when all weights vanish at some t.
ParticleFilterEstimate bootstrap_pf(const ScalarStateSpaceModel& model, const Vector& theta, const Vector& y,
                                    int particles, RandomStream& stream, const ParticleFilterOptions& opts = {});

/// Negative log-likelihood estimate and negative score from independent
/// particle-filter runs. Degeneracy makes cost() return +inf and grad() throw.
class ParticleFilterOracle final : public NoisyOracle {
public:
    ParticleFilterOracle(std::shared_ptr<const ScalarStateSpaceModel> model, Vector y, int particles,
                         ParticleFilterOptions opts = {});

    Eigen::Index dim() const override { return model_->num_params(); }
    double cost(const Vector& theta, RandomStream& stream) const override;
    Vector grad(const Vector& theta, RandomStream& stream) const override;

private:
    std::shared_ptr<const ScalarStateSpaceModel> model_;
    Vector y_;
    int particles_;
    ParticleFilterOptions opts_;
};

}  // namespace sqngp::problems
