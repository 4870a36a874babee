#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Library-wide error type; thrown with row/column context where available.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Counter-based RNG used everywhere randomness is needed. A thin wrapper
// around mt19937_64 with a uniform double helper that does not depend on
// std::uniform_real_distribution (whose output is implementation-defined),
// so results are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is irrelevant at the sizes used here (n <= a few thousand)
        return engine_() % n;
    }

private:
    std::mt19937_64 engine_;
};

// SplitMix64 step; used to derive independent stream seeds from a base seed
// plus structural coordinates (grid position, repetition, model index).
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix_seed(base);
    s = mix_seed(s ^ (a + 0x100000001b3ULL));
    s = mix_seed(s ^ (b + 0x100000001b5ULL));
    s = mix_seed(s ^ (c + 0x100000001bdULL));
    return s;
}

}  // namespace mfs
