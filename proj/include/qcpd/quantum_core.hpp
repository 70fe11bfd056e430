#pragma once

/**
 * @file
 * Real two-dimensional linear algebra for polarization qubits: pure states
 * in the span of |H> and |V>, symmetric 2x2 operators, their closed-form
 * eigendecomposition, and the weighted Helstrom measurement that separates
 * |H> from a mutated state |phi> = c|H> + s|V>.
 */

#include <array>

namespace qcpd {

/// Pure state with real amplitudes on |H> and |V>.
struct QubitState {
    double amp_h{1.0};
    double amp_v{0.0};

    static constexpr QubitState horizontal() noexcept { return {1.0, 0.0}; }
    static constexpr QubitState vertical() noexcept { return {0.0, 1.0}; }

    [[nodiscard]] double norm_squared() const noexcept {
        return amp_h * amp_h + amp_v * amp_v;
    }
    [[nodiscard]] double dot(const QubitState &other) const noexcept {
        return amp_h * other.amp_h + amp_v * other.amp_v;
    }
    /// Unit vector orthogonal to this one, rotated by +90 degrees.
    [[nodiscard]] QubitState orthogonal() const noexcept {
        return {-amp_v, amp_h};
    }

    friend bool operator==(const QubitState &, const QubitState &) = default;
};

/// Symmetric real 2x2 matrix [[m00, m01], [m01, m11]].
struct Operator2 {
    double m00{0.0};
    double m01{0.0};
    double m11{0.0};

    static constexpr Operator2 identity() noexcept { return {1.0, 0.0, 1.0}; }
    static constexpr Operator2 zero() noexcept { return {0.0, 0.0, 0.0}; }
    /// |v><v|
    static constexpr Operator2 outer(const QubitState &v) noexcept {
        return {v.amp_h * v.amp_h, v.amp_h * v.amp_v, v.amp_v * v.amp_v};
    }

    [[nodiscard]] double trace() const noexcept { return m00 + m11; }
    /// <v|M|v>
    [[nodiscard]] double expectation(const QubitState &v) const noexcept {
        return m00 * v.amp_h * v.amp_h + 2.0 * m01 * v.amp_h * v.amp_v +
               m11 * v.amp_v * v.amp_v;
    }
    /// Product with another symmetric operator. The result is symmetric
    /// only when the operands commute; the off-diagonal entries are
    /// averaged, so use this for projector checks, not general algebra.
    [[nodiscard]] Operator2 symmetric_product(const Operator2 &o) const noexcept;
    /// Largest absolute entry of (*this - o).
    [[nodiscard]] double max_abs_diff(const Operator2 &o) const noexcept;

    friend Operator2 operator+(const Operator2 &a, const Operator2 &b) noexcept {
        return {a.m00 + b.m00, a.m01 + b.m01, a.m11 + b.m11};
    }
    friend Operator2 operator-(const Operator2 &a, const Operator2 &b) noexcept {
        return {a.m00 - b.m00, a.m01 - b.m01, a.m11 - b.m11};
    }
    friend Operator2 operator*(double s, const Operator2 &a) noexcept {
        return {s * a.m00, s * a.m01, s * a.m11};
    }
    friend bool operator==(const Operator2 &, const Operator2 &) = default;
};

struct EigenPair {
    double value;
    QubitState vector;
};

/// Two-outcome projective measurement. Outcome 0 is the |H>-like
/// projector, outcome 1 the |phi>-like one.
struct BinaryMeasurement {
    Operator2 pi_0;
    Operator2 pi_1;

    /// {|H><H|, |V><V|}
    static constexpr BinaryMeasurement computational() noexcept {
        return {Operator2::outer(QubitState::horizontal()),
                Operator2::outer(QubitState::vertical())};
    }

    friend bool operator==(const BinaryMeasurement &,
                           const BinaryMeasurement &) = default;
};

enum class Outcome : unsigned char { zero = 0, one = 1 };

[[nodiscard]] constexpr int to_int(Outcome o) noexcept {
    return static_cast<int>(o);
}

struct OutcomeProbabilities {
    double p0;
    double p1;

    [[nodiscard]] double of(Outcome o) const noexcept {
        return o == Outcome::zero ? p0 : p1;
    }
};

/// |phi> = sqrt(c2)|H> + sqrt(1 - c2)|V>. Throws DomainError unless
/// 0 <= c_squared <= 1.
[[nodiscard]] QubitState make_mutated_state(double c_squared);

/// Closed-form eigendecomposition, eigenvalues in descending order.
/// Eigenvectors are orthonormal with their first nonzero component
/// positive.
[[nodiscard]] std::array<EigenPair, 2> eigen_sym2(const Operator2 &op);

/// Gamma = p_h |H><H| - p_phi |phi><phi|.
[[nodiscard]] Operator2 helstrom_matrix(double p_h, double p_phi,
                                        double c_squared);

/// Projects onto the non-negative (outcome 0) and negative (outcome 1)
/// parts of the spectrum of the Helstrom matrix. Eigenvalues within a
/// relative round-off band of zero count as zero and go to outcome 0.
/// Throws DegenerateInputError when p_h and p_phi are both zero and
/// DomainError for negative weights or c_squared outside [0, 1].
[[nodiscard]] BinaryMeasurement helstrom_measurement(double p_h, double p_phi,
                                                     double c_squared);

/// Born rule.
[[nodiscard]] OutcomeProbabilities
outcome_probabilities(const QubitState &state, const BinaryMeasurement &meas);

} // namespace qcpd
