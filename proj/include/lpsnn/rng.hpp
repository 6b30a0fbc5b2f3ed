#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace lpsnn {

// splitmix64 step; used to derive independent sub-seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic seed derivation: mix_seed(base, a, b, ...) is a pure hash of
// its arguments. Every stochastic stage (weight init, each presentation's
// encoding, shuffles) gets its own derived seed so results do not depend on
// evaluation order or thread count.
template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t base, Rest... rest) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    ((s ^= splitmix64(s) + static_cast<std::uint64_t>(rest)), ...);
    return splitmix64(s);
}

// mt19937_64 with distribution helpers written out explicitly. The standard
// pins the engine's output sequence but not the library distributions, so the
// helpers here are what make runs bit-reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling over the top multiple of n.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace lpsnn
