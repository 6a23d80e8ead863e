#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sqngp {

/// A reproducible random stream. Child streams are derived from the parent
/// seed and a name, so each consumer (gradient noise, cost noise, particle
/// filter, replicate) gets an independent sequence that does not shift when
/// another consumer draws more or fewer numbers.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    RandomStream spawn(std::string_view name) const;
    RandomStream spawn(std::uint64_t index) const;

    double normal();
    double uniform();  // [0, 1)
    double uniform(double lo, double hi);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace sqngp
