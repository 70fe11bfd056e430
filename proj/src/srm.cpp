#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "qcpd/errors.hpp"
#include "qcpd/strategies.hpp"

namespace qcpd {

std::vector<double> change_point_gram(int n, double c_squared) {
    if (n < 1) {
        throw DomainError("sequence length n must be >= 1");
    }
    if (!(c_squared >= 0.0 && c_squared <= 1.0)) {
        throw DomainError("overlap c^2 must lie in [0, 1]");
    }
    const auto size = static_cast<std::size_t>(n);
    const double c = std::sqrt(c_squared);
    // <Psi_k|Psi_l> = c^|k - l|: the states differ on |k - l| photons.
    std::vector<double> powers(size, 1.0);
    for (std::size_t d = 1; d < size; ++d) {
        powers[d] = powers[d - 1] * c;
    }
    std::vector<double> gram(size * size);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            gram[i * size + j] = powers[i > j ? i - j : j - i];
        }
    }
    return gram;
}

std::vector<double> srm_conditional_success(int n, double c_squared) {
    const std::vector<double> gram = change_point_gram(n, c_squared);
    const Eigen::Map<const Eigen::MatrixXd> g(gram.data(), n, n);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition of the Gram matrix failed");
    }
    const Eigen::VectorXd &values = solver.eigenvalues();
    const Eigen::MatrixXd &vectors = solver.eigenvectors();
    // G is positive semidefinite; round-off leaves its null space at
    // +-1e-15, whose square roots would otherwise leak into the diagonal.
    const double floor = 1e-12 * std::max(1.0, values.maxCoeff());
    Eigen::VectorXd roots(n);
    for (int j = 0; j < n; ++j) {
        roots(j) = values(j) > floor ? std::sqrt(values(j)) : 0.0;
    }
    std::vector<double> per_k(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double diag = vectors.row(k).cwiseAbs2().dot(roots);
        per_k[static_cast<std::size_t>(k)] = diag * diag;
    }
    return per_k;
}

double srm_optimal_probability(int n, double c_squared) {
    const std::vector<double> per_k = srm_conditional_success(n, c_squared);
    double total = 0.0;
    for (double p : per_k) {
        total += p;
    }
    return total / static_cast<double>(n);
}

} // namespace qcpd
