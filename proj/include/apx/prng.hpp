#ifndef APX_PRNG_HPP
#define APX_PRNG_HPP

#include <cstdint>
#include <random>

#include "apx/bits.hpp"

namespace apx {

// Single seeded randomness stream. All bounded draws go through rejection
// sampling so the emitted sequence is identical across platforms.
class Prng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/v1";

    explicit Prng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    int bit() { return static_cast<int>(next_u64() >> 63); }

    // Uniform in [0, bound).
    uint64_t below(uint64_t bound) {
        if (bound == 0) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    Bits bits(std::size_t n) {
        Bits b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<uint8_t>(bit());
        return b;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace apx

#endif
