#pragma once

#include <cstdint>
#include <random>

namespace learnrk {

/// Deterministic uniform source. std::mt19937_64 has a portable bit stream,
/// but std::uniform_real_distribution does not, so the mapping from raw bits
/// to doubles is done here: the top 53 bits give a value in [0, 1).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace learnrk
