#include "qcpd/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qcpd/errors.hpp"

namespace qcpd {

namespace {

void check_overlap(double c_squared) {
    if (!(c_squared >= 0.0 && c_squared <= 1.0)) {
        throw DomainError("overlap c^2 must lie in [0, 1], got " +
                          std::to_string(c_squared));
    }
}

QubitState canonical_sign(QubitState v) {
    if (v.amp_h < 0.0 || (v.amp_h == 0.0 && v.amp_v < 0.0)) {
        v.amp_h = -v.amp_h;
        v.amp_v = -v.amp_v;
    }
    return v;
}

} // namespace

Operator2 Operator2::symmetric_product(const Operator2 &o) const noexcept {
    const double p00 = m00 * o.m00 + m01 * o.m01;
    const double p01 = m00 * o.m01 + m01 * o.m11;
    const double p10 = m01 * o.m00 + m11 * o.m01;
    const double p11 = m01 * o.m01 + m11 * o.m11;
    return {p00, 0.5 * (p01 + p10), p11};
}

double Operator2::max_abs_diff(const Operator2 &o) const noexcept {
    return std::max({std::abs(m00 - o.m00), std::abs(m01 - o.m01),
                     std::abs(m11 - o.m11)});
}

QubitState make_mutated_state(double c_squared) {
    check_overlap(c_squared);
    return {std::sqrt(c_squared), std::sqrt(1.0 - c_squared)};
}

std::array<EigenPair, 2> eigen_sym2(const Operator2 &op) {
    const double mean = 0.5 * (op.m00 + op.m11);
    const double half_gap = 0.5 * (op.m00 - op.m11);
    const double radius = std::hypot(half_gap, op.m01);
    if (radius == 0.0) {
        return {EigenPair{mean, QubitState::horizontal()},
                EigenPair{mean, QubitState::vertical()}};
    }
    // Rotation angle that diagonalizes the matrix; the leading eigenvector
    // is (cos, sin).
    const double theta = 0.5 * std::atan2(op.m01, half_gap);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {EigenPair{mean + radius, canonical_sign({c, s})},
            EigenPair{mean - radius, canonical_sign({-s, c})}};
}

Operator2 helstrom_matrix(double p_h, double p_phi, double c_squared) {
    const QubitState phi = make_mutated_state(c_squared);
    return p_h * Operator2::outer(QubitState::horizontal()) -
           p_phi * Operator2::outer(phi);
}

BinaryMeasurement helstrom_measurement(double p_h, double p_phi,
                                       double c_squared) {
    if (!(p_h >= 0.0 && p_phi >= 0.0)) {
        throw DomainError("hypothesis weights must be non-negative");
    }
    if (p_h + p_phi == 0.0) {
        throw DegenerateInputError(
            "Helstrom measurement needs at least one positive weight");
    }
    const auto pairs = eigen_sym2(helstrom_matrix(p_h, p_phi, c_squared));
    // Closed-form eigenvalues carry absolute error of a few ulps of the
    // weights, so an exact zero (p_h = 0 or c^2 = 1 with equal weights)
    // can come out as +-1e-17.
    const double zero_band =
        64.0 * std::numeric_limits<double>::epsilon() * (p_h + p_phi);
    const auto non_negative = [&](double v) { return v >= -zero_band; };

    const bool first = non_negative(pairs[0].value);
    const bool second = non_negative(pairs[1].value);
    if (first && second) {
        return {Operator2::identity(), Operator2::zero()};
    }
    if (!first && !second) {
        return {Operator2::zero(), Operator2::identity()};
    }
    // Descending order: only the leading eigenvalue can be non-negative.
    return {Operator2::outer(pairs[0].vector),
            Operator2::outer(pairs[1].vector)};
}

OutcomeProbabilities outcome_probabilities(const QubitState &state,
                                           const BinaryMeasurement &meas) {
    const double p0 = std::clamp(meas.pi_0.expectation(state), 0.0, 1.0);
    const double p1 = std::clamp(meas.pi_1.expectation(state), 0.0, 1.0);
    return {p0, p1};
}

} // namespace qcpd
