#ifndef MATR_RANDOM_HPP
#define MATR_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace matr {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/*
 * Seeded generator handed explicitly through every API that draws
 * randomness. The uniform/normal transforms are hand-rolled on top of
 * mt19937_64 so that identical seeds give bit-identical streams across
 * standard library implementations.
 */
class RandomSource {
public:
    explicit RandomSource(uint64_t seed) : engine_(seed), seed_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive integer range
    int64_t uniform_int(int64_t lo, int64_t hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int64_t>(engine_() % span);
    }

    // Box-Muller, one value per call (the paired value is discarded to
    // keep the stream position independent of call parity)
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // independent child stream, deterministic in (seed, tag, index)
    RandomSource child(uint64_t tag, uint64_t index) const {
        return RandomSource(splitmix64(splitmix64(seed_ ^ tag) + index));
    }

    uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    uint64_t seed_;
};

} // namespace matr

#endif
