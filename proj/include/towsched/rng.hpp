#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace towsched {

// Seeded generator with stdlib-independent draw semantics, so identical
// seeds give identical runs on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    int below(int n) {
        if (n <= 1) return 0;
        return static_cast<int>(uniform01() * n);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// Roulette-wheel draw with probability weight[i] / sum(weights).
inline int weighted_index(std::span<const double> weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace towsched
