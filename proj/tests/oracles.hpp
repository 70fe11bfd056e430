#pragma once

// Reference computations that share no code with the library: a general
// eigensolver for Helstrom projectors and brute-force enumeration of
// outcome strings. Used only to freeze and cross-check expected values.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

struct Projectors {
    Eigen::Matrix2d p0;
    Eigen::Matrix2d p1;
};

inline Eigen::Vector2d mutated(double c2) {
    return {std::sqrt(c2), std::sqrt(1.0 - c2)};
}

inline Eigen::Matrix2d helstrom_gamma(double ph, double pphi, double c2) {
    const Eigen::Vector2d h(1.0, 0.0);
    const Eigen::Vector2d phi = mutated(c2);
    return ph * h * h.transpose() - pphi * phi * phi.transpose();
}

inline Projectors helstrom(double ph, double pphi, double c2) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
        helstrom_gamma(ph, pphi, c2));
    Projectors out{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
    const double tol = 1e-13 * (ph + pphi);
    for (int i = 0; i < 2; ++i) {
        const Eigen::Vector2d v = es.eigenvectors().col(i);
        if (es.eigenvalues()(i) >= -tol) {
            out.p0 += v * v.transpose();
        } else {
            out.p1 += v * v.transpose();
        }
    }
    return out;
}

/// P(guess = k | k) for the adaptive Bayesian strategy, all k, by explicit
/// enumeration of the 2^n outcome strings.
inline std::vector<double> bi_success_by_enumeration(int n, double c2) {
    const Eigen::Vector2d h(1.0, 0.0);
    const Eigen::Vector2d phi = mutated(c2);
    std::vector<double> success(static_cast<std::size_t>(n), 0.0);
    for (std::uint32_t path = 0; path < (1U << n); ++path) {
        std::vector<double> eta(static_cast<std::size_t>(n), 1.0 / n);
        std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
        bool possible = true;
        for (int s = 1; s <= n && possible; ++s) {
            double ph = 0.0;
            double pphi = 0.0;
            for (int k = 1; k <= n; ++k) {
                double &slot = k > s ? ph : pphi;
                slot = std::max(slot, eta[static_cast<std::size_t>(k - 1)]);
            }
            const Projectors m = helstrom(ph, pphi, c2);
            const bool one = ((path >> (s - 1)) & 1U) != 0;
            const Eigen::Matrix2d &p = one ? m.p1 : m.p0;
            const double like_h = h.dot(p * h);
            const double like_phi = phi.dot(p * phi);
            double evidence = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double like = k <= s ? like_phi : like_h;
                weight[static_cast<std::size_t>(k - 1)] *= like;
                evidence += like * eta[static_cast<std::size_t>(k - 1)];
            }
            if (evidence <= 0.0) {
                possible = false;
                break;
            }
            for (int k = 1; k <= n; ++k) {
                const double like = k <= s ? like_phi : like_h;
                eta[static_cast<std::size_t>(k - 1)] *= like / evidence;
            }
        }
        if (!possible) {
            continue;
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < eta.size(); ++i) {
            if (eta[i] > eta[best] + 1e-15) {
                best = i;
            }
        }
        success[best] += weight[best];
    }
    return success;
}

/// P(success | k) for the basic local strategy that guesses the first "1"
/// position, or `no_click_guess` when no "1" occurs, by enumeration of all
/// outcome strings.
inline double bl_success_by_enumeration(int n, double c2, int k,
                                        int no_click_guess) {
    double total = 0.0;
    for (std::uint32_t path = 0; path < (1U << n); ++path) {
        double p = 1.0;
        int first = 0;
        for (int s = 1; s <= n; ++s) {
            const bool one = ((path >> (s - 1)) & 1U) != 0;
            const double p_one = s < k ? 0.0 : 1.0 - c2;
            p *= one ? p_one : 1.0 - p_one;
            if (one && first == 0) {
                first = s;
            }
        }
        const int guess = first > 0 ? first : no_click_guess;
        if (guess == k) {
            total += p;
        }
    }
    return total;
}

/// sqrt of a symmetric PSD matrix by Denman-Beavers iteration, independent
/// of any eigendecomposition.
inline Eigen::MatrixXd sqrtm_denman_beavers(const Eigen::MatrixXd &a) {
    Eigen::MatrixXd y = a;
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    for (int it = 0; it < 100; ++it) {
        const Eigen::MatrixXd y_next = 0.5 * (y + z.inverse());
        const Eigen::MatrixXd z_next = 0.5 * (z + y.inverse());
        const double change = (y_next - y).norm();
        y = y_next;
        z = z_next;
        if (change < 1e-15) {
            break;
        }
    }
    return y;
}

} // namespace oracle
