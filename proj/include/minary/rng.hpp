#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace minary {

// splitmix64; used for state expansion and replica seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with a fixed, platform-independent mapping to doubles and
// bounded integers. Identical seeds give identical streams everywhere, which
// is the contract the whole test substrate stands on.
//
// Draw order per simulation step:
//   1. the active set, via partial Fisher-Yates (one bounded draw per swap;
//      bounded draws use bitmask rejection and may consume several words),
//   2. one signal per active dimension in ascending dimension order
//      (point-mass signals consume no draws).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
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

    // Uniform double in [0,1), 53 mantissa bits.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Bitmask rejection: exactly uniform.
    std::uint64_t bounded(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t mask = mask_for(n - 1);
        std::uint64_t x;
        do {
            x = next_u64() & mask;
        } while (x >= n);
        return x;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t mask_for(std::uint64_t v) {
        std::uint64_t m = v;
        m |= m >> 1;
        m |= m >> 2;
        m |= m >> 4;
        m |= m >> 8;
        m |= m >> 16;
        m |= m >> 32;
        return m;
    }

    std::array<std::uint64_t, 4> state_;
};

// Uniform k-subset of {0,...,m-1}: partial Fisher-Yates, then sort.
// Each ordered k-prefix is equally likely, so each subset has probability
// 1 / C(m,k); the uniformity is chi^2-tested rather than assumed.
std::vector<int> sample_k_subset(Rng& rng, int m, int k);

// Replica-seed derivation: splitmix64 finalizer over the counter
// master_seed + (replica+1)*gamma. The finalizer is a bijection and gamma is
// odd, so distinct replicas can never collide for a fixed master seed.
inline std::uint64_t derive_replica_seed(std::uint64_t master_seed, std::uint64_t replica) {
    std::uint64_t z = master_seed + (replica + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace minary
