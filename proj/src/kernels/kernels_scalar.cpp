#include "qcpd/kernels.hpp"

#include <cstddef>

namespace qcpd::kernels::detail {

namespace {

double sum_scalar(const double *x, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        lane[i & 3U] += x[i];
    }
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double max_scalar(const double *x, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || x[i] > best) {
            best = x[i];
        }
    }
    return best;
}

std::size_t argmax_scalar(const double *x, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] > x[best]) {
            best = i;
        }
    }
    return best;
}

double scale_split_scalar(double *x, std::size_t n, std::size_t split,
                          double head, double tail) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        x[i] *= (i < split) ? head : tail;
        lane[i & 3U] += x[i];
    }
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void divide_scalar(double *x, std::size_t n, double divisor) {
    for (std::size_t i = 0; i < n; ++i) {
        x[i] /= divisor;
    }
}

} // namespace

const KernelTable &scalar_table() {
    static const KernelTable table{"scalar",      sum_scalar,
                                   max_scalar,    argmax_scalar,
                                   scale_split_scalar, divide_scalar};
    return table;
}

} // namespace qcpd::kernels::detail
