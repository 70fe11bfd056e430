// Compiled with -mavx2; only reached after the dispatcher has confirmed
// AVX2 support at runtime.
#include "qcpd/kernels.hpp"

#include <immintrin.h>

#include <cstddef>

namespace qcpd::kernels::detail {

namespace {

constexpr std::size_t kWidth = 4;

inline double combine_lanes(__m256d acc) {
    alignas(32) double lane[kWidth];
    _mm256_store_pd(lane, acc);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

// Loads x[i..n) into the low lanes, zero-filling the rest.
inline __m256d load_tail(const double *x, std::size_t i, std::size_t n) {
    alignas(32) double pad[kWidth] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; i + j < n; ++j) {
        pad[j] = x[i + j];
    }
    return _mm256_load_pd(pad);
}

double sum_avx2(const double *x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    }
    if (i < n) {
        acc = _mm256_add_pd(acc, load_tail(x, i, n));
    }
    return combine_lanes(acc);
}

double max_avx2(const double *x, std::size_t n) {
    if (n == 0) {
        return 0.0;
    }
    __m256d best = _mm256_set1_pd(x[0]);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        best = _mm256_max_pd(best, _mm256_loadu_pd(x + i));
    }
    alignas(32) double lane[kWidth];
    _mm256_store_pd(lane, best);
    double result = lane[0];
    for (std::size_t j = 1; j < kWidth; ++j) {
        result = lane[j] > result ? lane[j] : result;
    }
    for (; i < n; ++i) {
        result = x[i] > result ? x[i] : result;
    }
    return result;
}

std::size_t argmax_avx2(const double *x, std::size_t n) {
    const double target = max_avx2(x, n);
    const __m256d wanted = _mm256_set1_pd(target);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        const int mask = _mm256_movemask_pd(
            _mm256_cmp_pd(_mm256_loadu_pd(x + i), wanted, _CMP_EQ_OQ));
        if (mask != 0) {
            return i + static_cast<std::size_t>(__builtin_ctz(
                           static_cast<unsigned>(mask)));
        }
    }
    for (; i < n; ++i) {
        if (x[i] == target) {
            return i;
        }
    }
    return 0;
}

double scale_split_avx2(double *x, std::size_t n, std::size_t split,
                        double head, double tail) {
    const __m256d head_v = _mm256_set1_pd(head);
    const __m256d tail_v = _mm256_set1_pd(tail);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        __m256d factor;
        if (i + kWidth <= split) {
            factor = head_v;
        } else if (i >= split) {
            factor = tail_v;
        } else {
            alignas(32) double f[kWidth];
            for (std::size_t j = 0; j < kWidth; ++j) {
                f[j] = (i + j < split) ? head : tail;
            }
            factor = _mm256_load_pd(f);
        }
        const __m256d scaled = _mm256_mul_pd(_mm256_loadu_pd(x + i), factor);
        _mm256_storeu_pd(x + i, scaled);
        acc = _mm256_add_pd(acc, scaled);
    }
    if (i < n) {
        alignas(32) double pad[kWidth] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t j = 0; i + j < n; ++j) {
            x[i + j] *= (i + j < split) ? head : tail;
            pad[j] = x[i + j];
        }
        acc = _mm256_add_pd(acc, _mm256_load_pd(pad));
    }
    return combine_lanes(acc);
}

void divide_avx2(double *x, std::size_t n, double divisor) {
    const __m256d d = _mm256_set1_pd(divisor);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        _mm256_storeu_pd(x + i, _mm256_div_pd(_mm256_loadu_pd(x + i), d));
    }
    for (; i < n; ++i) {
        x[i] /= divisor;
    }
}

} // namespace

const KernelTable &avx2_table() {
    static const KernelTable table{"avx2",      sum_avx2,
                                   max_avx2,    argmax_avx2,
                                   scale_split_avx2, divide_avx2};
    return table;
}

} // namespace qcpd::kernels::detail
