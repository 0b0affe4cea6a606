#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace siopt {

// xoshiro256++ seeded through splitmix64. All stochastic code in the
// library draws from this generator so runs are reproducible across
// compilers and standard-library versions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1]; never returns 0 so U^{-1/a} is always finite.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        // Box-Muller; the spare is discarded so every call costs exactly
        // two uniform draws, which keeps replay counts predictable.
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    bool fair_sign_positive() { return (next_u64() >> 63) == 0; }

    // index in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    std::uint64_t seed() const { return seed_; }

    // Counter-based stream derivation: stream i of a generator with seed s
    // is seeded by splitmix64(s + (i+1)*GOLDEN). Derived streams depend
    // only on (seed, i), never on how much the parent has been consumed,
    // so adding a stream never perturbs existing ones.
    Rng split(std::uint64_t stream) const {
        std::uint64_t sm = seed_ + (stream + 1) * 0x9E3779B97F4A7C15ULL;
        return Rng(splitmix64(sm));
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

// Gaussian vector normalized to unit Euclidean length.
inline std::vector<double> random_unit_vector(int dim, Rng& rng) {
    std::vector<double> v(dim);
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            norm_sq += x * x;
        }
    } while (norm_sq < 1e-24);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;
    return v;
}

}  // namespace siopt
