// AArch64 variant. Two float64x2 accumulators hold canonical lanes {0, 1}
// and {2, 3}.
#include "qcpd/kernels.hpp"

#include <arm_neon.h>

#include <cstddef>

namespace qcpd::kernels::detail {

namespace {

constexpr std::size_t kWidth = 4;

inline double combine_lanes(float64x2_t lo, float64x2_t hi) {
    return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
           (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
}

double sum_neon(const double *x, std::size_t n) {
    float64x2_t lo = vdupq_n_f64(0.0);
    float64x2_t hi = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        lo = vaddq_f64(lo, vld1q_f64(x + i));
        hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
    }
    double pad[kWidth] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; i + j < n; ++j) {
        pad[j] = x[i + j];
    }
    if (i < n) {
        lo = vaddq_f64(lo, vld1q_f64(pad));
        hi = vaddq_f64(hi, vld1q_f64(pad + 2));
    }
    return combine_lanes(lo, hi);
}

double max_neon(const double *x, std::size_t n) {
    if (n == 0) {
        return 0.0;
    }
    float64x2_t best = vdupq_n_f64(x[0]);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        best = vmaxq_f64(best, vld1q_f64(x + i));
    }
    double result = vmaxvq_f64(best);
    for (; i < n; ++i) {
        result = x[i] > result ? x[i] : result;
    }
    return result;
}

std::size_t argmax_neon(const double *x, std::size_t n) {
    const double target = max_neon(x, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == target) {
            return i;
        }
    }
    return 0;
}

double scale_split_neon(double *x, std::size_t n, std::size_t split,
                        double head, double tail) {
    float64x2_t lo = vdupq_n_f64(0.0);
    float64x2_t hi = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        double f[kWidth];
        for (std::size_t j = 0; j < kWidth; ++j) {
            f[j] = (i + j < split) ? head : tail;
        }
        const float64x2_t a = vmulq_f64(vld1q_f64(x + i), vld1q_f64(f));
        const float64x2_t b = vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(f + 2));
        vst1q_f64(x + i, a);
        vst1q_f64(x + i + 2, b);
        lo = vaddq_f64(lo, a);
        hi = vaddq_f64(hi, b);
    }
    if (i < n) {
        double pad[kWidth] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t j = 0; i + j < n; ++j) {
            x[i + j] *= (i + j < split) ? head : tail;
            pad[j] = x[i + j];
        }
        lo = vaddq_f64(lo, vld1q_f64(pad));
        hi = vaddq_f64(hi, vld1q_f64(pad + 2));
    }
    return combine_lanes(lo, hi);
}

void divide_neon(double *x, std::size_t n, double divisor) {
    const float64x2_t d = vdupq_n_f64(divisor);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(x + i, vdivq_f64(vld1q_f64(x + i), d));
    }
    for (; i < n; ++i) {
        x[i] /= divisor;
    }
}

} // namespace

const KernelTable &neon_table() {
    static const KernelTable table{"neon",      sum_neon,
                                   max_neon,    argmax_neon,
                                   scale_split_neon, divide_neon};
    return table;
}

} // namespace qcpd::kernels::detail
