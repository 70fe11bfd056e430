#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qcpd/errors.hpp"
#include "qcpd/quantum_core.hpp"

using namespace qcpd;

namespace {

bool near(const Operator2 &a, const Eigen::Matrix2d &b, double tol) {
    return std::abs(a.m00 - b(0, 0)) <= tol && std::abs(a.m01 - b(0, 1)) <= tol &&
           std::abs(a.m01 - b(1, 0)) <= tol && std::abs(a.m11 - b(1, 1)) <= tol;
}

Operator2 reconstruct(const std::array<EigenPair, 2> &pairs) {
    return pairs[0].value * Operator2::outer(pairs[0].vector) +
           pairs[1].value * Operator2::outer(pairs[1].vector);
}

} // namespace

TEST_CASE("make_mutated_state") {
    CHECK(make_mutated_state(0.0) == QubitState{0.0, 1.0});
    CHECK(make_mutated_state(1.0) == QubitState{1.0, 0.0});
    const QubitState phi = make_mutated_state(0.604);
    CHECK(phi.amp_h == doctest::Approx(std::sqrt(0.604)).epsilon(1e-15));
    CHECK(phi.amp_v == doctest::Approx(std::sqrt(0.396)).epsilon(1e-15));
    CHECK(std::abs(phi.norm_squared() - 1.0) < 1e-12);

    CHECK_THROWS_AS((void)make_mutated_state(-0.01), DomainError);
    CHECK_THROWS_AS((void)make_mutated_state(1.01), DomainError);
    CHECK_THROWS_AS((void)make_mutated_state(std::nan("")), DomainError);
}

TEST_CASE("eigen_sym2 on fixed matrices") {
    SUBCASE("diagonal") {
        const auto p = eigen_sym2({1.0, 0.0, 0.0});
        CHECK(p[0].value == 1.0);
        CHECK(p[0].vector == QubitState{1.0, 0.0});
        CHECK(p[1].value == 0.0);
        CHECK(p[1].vector == QubitState{0.0, 1.0});
    }
    SUBCASE("swap") {
        const auto p = eigen_sym2({0.0, 1.0, 0.0});
        const double r = 1.0 / std::sqrt(2.0);
        CHECK(p[0].value == doctest::Approx(1.0));
        CHECK(p[0].vector.amp_h == doctest::Approx(r));
        CHECK(p[0].vector.amp_v == doctest::Approx(r));
        CHECK(p[1].value == doctest::Approx(-1.0));
        CHECK(p[1].vector.amp_h == doctest::Approx(r));
        CHECK(p[1].vector.amp_v == doctest::Approx(-r));
    }
    SUBCASE("equal-weight Helstrom matrix matches a general eigensolver") {
        const Operator2 gamma = helstrom_matrix(0.5, 0.5, 0.5);
        const auto p = eigen_sym2(gamma);
        CHECK(std::abs(p[0].value + p[1].value) < 1e-15); // traceless
        CHECK(p[0].value > 0.0);

        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
            oracle::helstrom_gamma(0.5, 0.5, 0.5));
        // Eigen sorts ascending.
        CHECK(p[0].value == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-13));
        CHECK(p[1].value == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-13));
        for (int i = 0; i < 2; ++i) {
            const Eigen::Vector2d ref = es.eigenvectors().col(1 - i);
            const double overlap = std::abs(p[static_cast<std::size_t>(i)].vector.amp_h * ref(0) +
                                            p[static_cast<std::size_t>(i)].vector.amp_v * ref(1));
            CHECK(overlap == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    SUBCASE("zero matrix") {
        const auto p = eigen_sym2(Operator2::zero());
        CHECK(p[0].value == 0.0);
        CHECK(p[1].value == 0.0);
        CHECK(p[0].vector.dot(p[1].vector) == 0.0);
    }
}

TEST_CASE("eigen_sym2 properties on random symmetric matrices") {
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 10000; ++i) {
        const Operator2 op{u(gen), u(gen), u(gen)};
        const auto p = eigen_sym2(op);
        REQUIRE(p[0].value >= p[1].value);
        REQUIRE(std::abs(p[0].vector.norm_squared() - 1.0) < 1e-12);
        REQUIRE(std::abs(p[1].vector.norm_squared() - 1.0) < 1e-12);
        REQUIRE(std::abs(p[0].vector.dot(p[1].vector)) < 1e-12);
        REQUIRE(reconstruct(p).max_abs_diff(op) < 1e-10);
        for (const auto &pair : p) {
            const QubitState &v = pair.vector;
            REQUIRE((v.amp_h > 0.0 || (v.amp_h == 0.0 && v.amp_v > 0.0)));
        }
    }
}

TEST_CASE("helstrom_measurement fixed cases") {
    SUBCASE("orthogonal states give the computational basis") {
        const auto m = helstrom_measurement(0.5, 0.5, 0.0);
        CHECK(m.pi_0.max_abs_diff(Operator2::outer(QubitState::horizontal())) < 1e-15);
        CHECK(m.pi_1.max_abs_diff(Operator2::outer(QubitState::vertical())) < 1e-15);
    }
    SUBCASE("no future hypotheses: zero eigenvalue goes to outcome 0") {
        for (double c2 : {0.0, 0.1, 0.604, 0.99}) {
            const QubitState phi = make_mutated_state(c2);
            const auto m = helstrom_measurement(0.0, 0.3, c2);
            CHECK(m.pi_1.max_abs_diff(Operator2::outer(phi)) < 1e-12);
            CHECK(m.pi_0.max_abs_diff(Operator2::outer(phi.orthogonal())) < 1e-12);
        }
    }
    SUBCASE("identical states and equal weights") {
        const auto m = helstrom_measurement(0.25, 0.25, 1.0);
        CHECK(m.pi_0 == Operator2::identity());
        CHECK(m.pi_1 == Operator2::zero());
    }
    SUBCASE("equal weights at c2 = 0.5 match the eigensolver oracle") {
        const auto m = helstrom_measurement(0.5, 0.5, 0.5);
        const auto ref = oracle::helstrom(0.5, 0.5, 0.5);
        CHECK(near(m.pi_0, ref.p0, 1e-12));
        CHECK(near(m.pi_1, ref.p1, 1e-12));
        CHECK((m.pi_0 + m.pi_1).max_abs_diff(Operator2::identity()) < 1e-12);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS((void)helstrom_measurement(0.0, 0.0, 0.5), DegenerateInputError);
        CHECK_THROWS_AS((void)helstrom_measurement(-0.1, 0.5, 0.5), DomainError);
        CHECK_THROWS_AS((void)helstrom_measurement(0.5, 0.5, 1.5), DomainError);
    }
}

TEST_CASE("helstrom_measurement is invariant under joint scaling of the weights") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double ph = u(gen);
        const double pphi = u(gen);
        const double c2 = u(gen);
        const double scale = 0.01 + 10.0 * u(gen);
        const auto a = helstrom_measurement(ph, pphi, c2);
        const auto b = helstrom_measurement(scale * ph, scale * pphi, c2);
        REQUIRE(a.pi_0.max_abs_diff(b.pi_0) < 1e-10);
    }
}

TEST_CASE("outcome_probabilities") {
    const auto comp = BinaryMeasurement::computational();
    const auto h = outcome_probabilities(QubitState::horizontal(), comp);
    CHECK(h.p0 == 1.0);
    CHECK(h.p1 == 0.0);

    const auto phi = outcome_probabilities(make_mutated_state(0.604), comp);
    CHECK(phi.p0 == doctest::Approx(0.604).epsilon(1e-14));
    CHECK(phi.p1 == doctest::Approx(0.396).epsilon(1e-14));

    // Equal-prior Helstrom: P(0 | phi) = (1 - sqrt(1 - c2)) / 2.
    const auto m = helstrom_measurement(0.5, 0.5, 0.5);
    const auto p = outcome_probabilities(make_mutated_state(0.5), m);
    const auto ref = oracle::helstrom(0.5, 0.5, 0.5);
    const Eigen::Vector2d v = oracle::mutated(0.5);
    CHECK(p.p0 == doctest::Approx(v.dot(ref.p0 * v)).epsilon(1e-12));
    CHECK(p.p0 == doctest::Approx((1.0 - std::sqrt(0.5)) / 2.0).epsilon(1e-12));
    CHECK(std::abs(p.p0 + p.p1 - 1.0) < 1e-12);
}

TEST_CASE("property suite: completeness, idempotence, closure, trace") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        // Include the boundaries the agent actually visits.
        const double ph = (i % 17 == 0) ? 0.0 : u(gen);
        const double pphi = (i % 23 == 0 && ph > 0.0) ? 0.0 : u(gen);
        const double c2 = (i % 29 == 0) ? 1.0 : (i % 31 == 0 ? 0.0 : u(gen));
        const auto m = helstrom_measurement(ph, pphi, c2);
        REQUIRE((m.pi_0 + m.pi_1).max_abs_diff(Operator2::identity()) < 1e-10);
        REQUIRE(m.pi_0.symmetric_product(m.pi_0).max_abs_diff(m.pi_0) < 1e-10);
        REQUIRE(m.pi_1.symmetric_product(m.pi_1).max_abs_diff(m.pi_1) < 1e-10);
        REQUIRE(std::abs(helstrom_matrix(ph, pphi, c2).trace() - (ph - pphi)) < 1e-12);

        const double angle = 6.283185307179586 * u(gen);
        const QubitState psi{std::cos(angle), std::sin(angle)};
        const auto p = outcome_probabilities(psi, m);
        REQUIRE(p.p0 >= 0.0);
        REQUIRE(p.p1 >= 0.0);
        REQUIRE(std::abs(p.p0 + p.p1 - 1.0) < 1e-12);
    }
}
