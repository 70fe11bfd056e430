#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qcpd {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

/// Child seed for `index` under `parent`. Depends only on the two values,
/// so trials can be scheduled on any thread in any order.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                                  std::uint64_t index) noexcept {
    return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

[[nodiscard]] constexpr std::uint64_t
derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = parent;
    for (std::uint64_t p : path) {
        s = derive_seed(s, p);
    }
    return s;
}

/// Random stream owned by a single trial. Uniform variates are built from
/// the raw 64-bit output of mt19937_64 (whose sequence the standard pins
/// down), so draws are identical across standard library implementations.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
    }

    /// Uniform integer on [lo, hi], unbiased by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo);
        if (span == UINT64_MAX) {
            return static_cast<std::int64_t>(engine_());
        }
        const std::uint64_t range = span + 1;
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
        std::uint64_t draw = engine_();
        while (draw >= limit) {
            draw = engine_();
        }
        return lo + static_cast<std::int64_t>(draw % range);
    }

    /// True with probability p.
    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64 &engine() noexcept { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

} // namespace qcpd
