#pragma once
// Seeded randomness. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; the derived draws below are implemented here rather
// than with <random> distributions, whose algorithms vary between standard
// libraries, so a seed reproduces the same data on every platform.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace stackreg {

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0) noexcept {
    return mix64(mix64(mix64(seed) ^ (a + 0x632be59bd9b4e019ULL)) ^ (b + 0x85157af5ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
    std::size_t below(std::size_t n);

    /// Standard normal via the Marsaglia polar method.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::span<T> v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace stackreg
