#pragma once

#include <array>
#include <cstdint>

namespace repayrisk::rng {

// splitmix64 finalizer; used to derive stream states from (seed, stream, index).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with all samplers implemented in-house so that streams are
// bit-identical across platforms and standard-library versions.
class Engine {
  public:
    explicit Engine(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            word = mix64(sm);
        }
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

    // Uniform strictly inside (0, 1): (k + 1/2) * 2^-52 for k in [0, 2^52).
    // In antithetic mode every uniform is mirrored to 1 - u (all derived
    // samplers stay exact; rejection steps simply consume mirrored draws).
    double uniform01() {
        const double u = (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
        return antithetic_ ? 1.0 - u : u;
    }

    void set_antithetic(bool on) { antithetic_ = on; }

    double exponential(double rate);
    double normal();
    double gamma(double shape, double scale);
    std::uint64_t poisson(double mean);

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
    bool antithetic_ = false;
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace repayrisk::rng
