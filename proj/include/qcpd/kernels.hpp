#pragma once

/**
 * @file
 * Data-parallel kernels over hypothesis vectors (priors, path weights).
 *
 * Every variant reduces in the same canonical order: four interleaved lane
 * accumulators, lane j holding the elements with index = j (mod 4) in
 * increasing order, combined as (lane0 + lane1) + (lane2 + lane3). Scaling
 * and division are elementwise. The SIMD variants therefore return results
 * bitwise identical to the scalar reference, which keeps simulations
 * reproducible regardless of the host CPU.
 */

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace qcpd::kernels {

struct KernelTable {
    std::string_view name;
    /// Canonical-order sum.
    double (*sum)(const double *x, std::size_t n);
    /// Maximum of x[0..n); 0 for n == 0. Inputs must not contain NaN.
    double (*max_or_zero)(const double *x, std::size_t n);
    /// Smallest index attaining the maximum; requires n >= 1.
    std::size_t (*argmax)(const double *x, std::size_t n);
    /// x[i] *= (i < split ? head : tail); returns the canonical sum of the
    /// scaled vector.
    double (*scale_split)(double *x, std::size_t n, std::size_t split,
                          double head, double tail);
    /// x[i] /= divisor
    void (*divide)(double *x, std::size_t n, double divisor);
};

[[nodiscard]] const KernelTable &scalar();
/// nullptr when not compiled in or not supported by the running CPU.
[[nodiscard]] const KernelTable *avx2();
[[nodiscard]] const KernelTable *neon();

/// Every variant usable on this machine, scalar first.
[[nodiscard]] std::vector<const KernelTable *> available();

/// Kernel table used by the library. Chosen once: the QCPD_KERNEL
/// environment variable ("scalar", "avx2", "neon") wins if that variant is
/// available, otherwise the widest supported variant.
[[nodiscard]] const KernelTable &active();

/// Overrides the active table; pass nullptr to restore automatic
/// selection. Not thread-safe against concurrent kernel use.
void set_active(const KernelTable *table);

// Convenience wrappers over the active table.
inline double sum(std::span<const double> x) {
    return active().sum(x.data(), x.size());
}
inline double max_or_zero(std::span<const double> x) {
    return active().max_or_zero(x.data(), x.size());
}
inline std::size_t argmax(std::span<const double> x) {
    return active().argmax(x.data(), x.size());
}
inline double scale_split(std::span<double> x, std::size_t split, double head,
                          double tail) {
    return active().scale_split(x.data(), x.size(), split, head, tail);
}
inline void divide(std::span<double> x, double divisor) {
    active().divide(x.data(), x.size(), divisor);
}

namespace detail {
// Per-variant entry points, exposed for the dispatcher.
const KernelTable &scalar_table();
#if defined(QCPD_HAVE_AVX2)
const KernelTable &avx2_table();
#endif
#if defined(QCPD_HAVE_NEON)
const KernelTable &neon_table();
#endif
} // namespace detail

} // namespace qcpd::kernels
