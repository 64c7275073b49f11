#ifndef DRK_RNG_HPP
#define DRK_RNG_HPP

#include <cstdint>

namespace drk::rng {

/**
 * xoshiro256++ with splitmix64 seeding. The standard library engines are
 * avoided on purpose: the distributions attached to them are not specified
 * bit-for-bit, so results would drift across standard libraries. Everything
 * here is fixed arithmetic and reproduces exactly on any conforming
 * compiler.
 *
 * Stream layout: a run is seeded once from the user seed, then each
 * replication takes its own engine advanced by r jump() calls. jump() skips
 * 2^128 draws, so replication streams never overlap.
 */
class Engine {
  public:
    explicit Engine(std::uint64_t seed) {
        // splitmix64 expansion of the single word seed into four state words
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
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

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Uniform integer in [0, bound); Lemire's multiply-and-reject method.
    std::uint32_t below(std::uint32_t bound) {
        std::uint64_t m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(next_u64())) * bound;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < bound) {
            std::uint32_t floor = (0u - bound) % bound;
            while (lo < floor) {
                m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(next_u64())) * bound;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    /// Advance by 2^128 steps.
    void jump() {
        static constexpr std::uint64_t table[] = {
            0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
            0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
        std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
        for (std::uint64_t word : table)
            for (int bit = 0; bit < 64; ++bit) {
                if (word & (1ULL << bit)) {
                    s0 ^= state_[0];
                    s1 ^= state_[1];
                    s2 ^= state_[2];
                    s3 ^= state_[3];
                }
                next_u64();
            }
        state_[0] = s0;
        state_[1] = s1;
        state_[2] = s2;
        state_[3] = s3;
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace drk::rng

#endif
