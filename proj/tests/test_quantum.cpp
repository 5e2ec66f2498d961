#include "doctest.h"

#include "qps/quantum.hpp"

#include <cmath>

using namespace qps;
using namespace qps::quantum;

namespace {

Matrix rank_one(const Vector& pi) {
    Matrix p(pi.size(), pi.size());
    for (Eigen::Index j = 0; j < pi.size(); ++j) {
        p.col(j) = pi;
    }
    return p;
}

// Random ergodic time-reversible chain: column-normalize a random symmetric
// positive matrix. The stationary distribution is proportional to the column
// sums of the symmetric matrix, and detailed balance holds by construction.
Matrix random_reversible_chain(int n, Rng& rng) {
    Matrix s(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            s(i, j) = s(j, i) = 0.1 + rng.uniform();
        }
    }
    Matrix p(n, n);
    for (int j = 0; j < n; ++j) {
        p.col(j) = s.col(j) / s.col(j).sum();
    }
    return p;
}

Vector random_distribution(int n, Rng& rng) {
    Vector p(n);
    for (int i = 0; i < n; ++i) {
        p(i) = 0.01 + rng.uniform();
    }
    return p / p.sum();
}

} // namespace

TEST_SUITE("quantum") {

TEST_CASE("controlization angle examples") {
    SUBCASE("uniform pair gives pi/2") {
        Vector p(2);
        p << 0.5, 0.5;
        const AngleTree tree = controlization_angles(p);
        CHECK(tree.angle(1, 0) == doctest::Approx(M_PI / 2).epsilon(1e-14));
    }
    SUBCASE("four-clip worked example") {
        Vector p(4);
        p << 0.4, 0.1, 0.3, 0.2;
        const AngleTree tree = controlization_angles(p);
        CHECK(tree.angle(1, 0) == doctest::Approx(M_PI / 2).epsilon(1e-12));
        CHECK(tree.angle(2, 0) == doctest::Approx(0.92730).epsilon(1e-5));
        CHECK(tree.angle(2, 1) == doctest::Approx(1.36944).epsilon(1e-5));
        CHECK((tree.reconstruct() - p).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("deterministic distribution gives zero angles") {
        Vector p(2);
        p << 1.0, 0.0;
        const AngleTree tree = controlization_angles(p);
        CHECK(tree.angle(1, 0) == 0.0);
        CHECK(equal_up_to_phase(probability_unitary(tree), CMatrix::Identity(2, 2), 1e-14));
    }
    SUBCASE("non-power-of-two length is rejected") {
        CHECK_THROWS_AS(controlization_angles(Vector::Constant(3, 1.0 / 3.0)), LengthNotPowerOfTwo);
    }
}

TEST_CASE("probability unitary first column is sqrt(p)") {
    SUBCASE("uniform four-clip distribution") {
        const CMatrix u = probability_unitary(Vector(Vector::Constant(4, 0.25)));
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(u(i, 0) - Complex(0.5, 0.0)) < 1e-14);
        }
    }
    SUBCASE("point distribution maps to e1") {
        Vector p = Vector::Zero(8);
        p(0) = 1.0;
        const CMatrix u = probability_unitary(p);
        CHECK(std::abs(u(0, 0) - Complex(1.0, 0.0)) < 1e-14);
    }
    SUBCASE("random distributions, N in {2,4,8,16}") {
        Rng rng(99);
        for (int n : {2, 4, 8, 16}) {
            for (int rep = 0; rep < 25; ++rep) {
                const Vector p = random_distribution(n, rng);
                const CMatrix u = probability_unitary(p);
                CHECK(unitarity_defect(u) < 1e-12);
                for (int i = 0; i < n; ++i) {
                    CHECK(std::abs(u(i, 0) - Complex(std::sqrt(p(i)), 0.0)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("coherent control block structure") {
    SUBCASE("two identity branches give the identity") {
        const CMatrix u = coherent_ctrl({CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)});
        CHECK((u - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("identity and X give a controlled NOT") {
        CMatrix x(2, 2);
        x << 0, 1, 1, 0;
        const CMatrix u = coherent_ctrl({CMatrix::Identity(2, 2), x});
        CMatrix cnot = CMatrix::Zero(4, 4);
        cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
        CHECK((u - cnot).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("direct-sum of two Y rotations") {
        const double t2 = 0.9273, t3 = 1.3694;
        const CMatrix u = coherent_ctrl({rotation_y(t2), rotation_y(t3)});
        CMatrix expected = CMatrix::Zero(4, 4);
        expected.topLeftCorner(2, 2) = rotation_y(t2);
        expected.bottomRightCorner(2, 2) = rotation_y(t3);
        CHECK((u - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("mismatched branches are rejected") {
        CHECK_THROWS_AS(coherent_ctrl({CMatrix::Identity(2, 2), CMatrix::Identity(4, 4)}),
                        DimensionMismatch);
    }
    SUBCASE("acts on basis states as |j> (x) U_j |psi>") {
        Rng rng(5);
        std::vector<CMatrix> branches;
        for (int j = 0; j < 4; ++j) {
            branches.push_back(probability_unitary(random_distribution(4, rng)));
        }
        const CMatrix u = coherent_ctrl(branches);
        for (int j = 0; j < 4; ++j) {
            for (int rep = 0; rep < 25; ++rep) {
                CVector psi(4);
                for (int i = 0; i < 4; ++i) {
                    psi(i) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
                }
                psi.normalize();
                CVector in = CVector::Zero(16);
                in.segment(4 * j, 4) = psi;
                const CVector out = u * in;
                CVector expected = CVector::Zero(16);
                expected.segment(4 * j, 4) = branches[static_cast<std::size_t>(j)] * psi;
                CHECK((out - expected).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("rank-one one-qubit walk factor is Pauli X") {
    // U_Y(pi/2) D0 U_Y(-pi/2) with D0 = diag(1,-1).
    Vector p(2);
    p << 0.5, 0.5;
    const CMatrix u = probability_unitary(p);
    CMatrix d0 = CMatrix::Identity(2, 2);
    d0(1, 1) = -1.0;
    const CMatrix factor = u * d0 * u.adjoint();
    CMatrix pauli_x(2, 2);
    pauli_x << 0, 1, 1, 0;
    CHECK((factor - pauli_x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("walk operator fixes the coherent stationary state") {
    Rng rng(7);
    for (int n : {2, 4, 8}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Matrix p = random_reversible_chain(n, rng);
            const CMatrix w = build_walk_operator(p);
            const CVector pi_state = stationary_state(p);
            CHECK((w * pi_state - pi_state).norm() < 1e-10);
            CHECK(std::abs((pi_state.adjoint() * w * pi_state)(0) - Complex(1.0, 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("walk operator via explicit time reversal matches the swap construction") {
    Rng rng(13);
    const Matrix p = random_reversible_chain(4, rng);
    const Vector pi = classical::stationary_distribution(p);
    const Matrix p_star = ecm::time_reversed(p, pi);
    const CMatrix w_swap = build_walk_operator(p);
    const CMatrix w_star = build_walk_operator(p, p_star);
    CHECK((w_swap - w_star).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("non-reversible chain without P* is rejected, with P* it works") {
    Matrix p(4, 4);
    p << 0.1, 0.6, 0.1, 0.2,
         0.5, 0.1, 0.2, 0.2,
         0.2, 0.1, 0.4, 0.3,
         0.2, 0.2, 0.3, 0.3;
    REQUIRE(is_column_stochastic(p, 1e-12));
    CHECK_THROWS_AS(build_walk_operator(p), NotReversible);

    const Vector pi = classical::stationary_distribution(p);
    const Matrix p_star = ecm::time_reversed(p, pi);
    const CMatrix w = build_walk_operator(p, p_star);
    const CVector pi_state = stationary_state(p);
    CHECK((w * pi_state - pi_state).norm() < 1e-10);
}

TEST_CASE("reflections are involutions") {
    Rng rng(19);
    const Matrix p = random_reversible_chain(4, rng);
    const quantum::PaddedChain chain = pad_chain(p);
    const CMatrix u_p = diffusion_operator(chain.p);
    CVector d0(chain.dim() * chain.dim());
    for (Eigen::Index i = 0; i < chain.dim(); ++i) {
        for (Eigen::Index j = 0; j < chain.dim(); ++j) {
            d0(i * chain.dim() + j) = j == 0 ? 1.0 : -1.0;
        }
    }
    const CMatrix ref_a = u_p * d0.asDiagonal() * u_p.adjoint();
    CHECK((ref_a * ref_a - CMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("stationary state of a rank-one chain is a product state") {
    Vector pi(2);
    pi << 0.5, 0.5;
    const CVector state = stationary_state(rank_one(pi));
    CVector column(2);
    column << std::sqrt(0.5), std::sqrt(0.5);
    CVector expected(4);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            expected(i * 2 + j) = column(i) * column(j);
        }
    }
    CHECK((state - expected).norm() < 1e-14);
}

TEST_CASE("stationary state of a point distribution") {
    Vector pi(4);
    pi << 1.0, 0.0, 0.0, 0.0;
    const CVector state = stationary_state(rank_one(pi));
    // |c_1> (x) U_1|0> with U_1|0> = e_1.
    CHECK(std::abs(state(0) - Complex(1.0, 0.0)) < 1e-14);
    CHECK(state.tail(15).norm() < 1e-14);
}

TEST_CASE("rank-one U D0 U-dagger equals the ideal reflection exactly") {
    Rng rng(37);
    for (int n : {4, 8}) {
        const Vector pi = random_distribution(n, rng);
        const Vector padded = pad_distribution(pi);
        const CMatrix u = probability_unitary(padded);
        CMatrix d0 = -CMatrix::Identity(padded.size(), padded.size());
        d0(0, 0) = 1.0;
        const CMatrix reflection = u * d0 * u.adjoint();
        CVector sqrt_pi(padded.size());
        for (Eigen::Index i = 0; i < padded.size(); ++i) {
            sqrt_pi(i) = std::sqrt(padded(i));
        }
        const CMatrix ideal =
            2.0 * sqrt_pi * sqrt_pi.adjoint() - CMatrix::Identity(padded.size(), padded.size());
        CHECK((reflection - ideal).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("aro fixes the ancilla-zero stationary state") {
    Rng rng(41);
    const Matrix p = random_reversible_chain(4, rng);
    const CMatrix w = build_walk_operator(p);
    const CVector pi_state = stationary_state(p);
    for (int n : {0, 1, 2}) {
        const CMatrix reflector = aro(w, n);
        const Eigen::Index blocks = Eigen::Index{1} << (n + 1);
        CVector in = CVector::Zero(blocks * 16);
        in.head(16) = pi_state;
        const CVector out = reflector * in;
        CHECK((out - in).norm() < 1e-10);
    }
}

TEST_CASE("aro of a Hermitian walk operator reduces to one application of W") {
    Vector pi(2);
    pi << 0.3, 0.7;
    const CMatrix w = build_walk_operator(rank_one(pi));
    CHECK((w - w.adjoint()).cwiseAbs().maxCoeff() < 1e-12); // rank-one W is Hermitian
    const CMatrix reflector = aro(w, 0);
    // Ancilla-zero block equals W itself; the reflection is exact.
    CHECK((reflector.topLeftCorner(4, 4) - w).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(reflector.bottomLeftCorner(4, 4).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("aro error against the ideal reflection decreases with more ancillas") {
    Rng rng(43);
    const Matrix p = random_reversible_chain(4, rng);
    const CMatrix w = build_walk_operator(p);
    const CVector pi_state = stationary_state(p);
    const CMatrix ideal = 2.0 * pi_state * pi_state.adjoint() - CMatrix::Identity(16, 16);

    std::vector<double> errors;
    for (int n : {2, 4, 6}) {
        const CMatrix reflector = aro(w, n);
        const Eigen::Index blocks = Eigen::Index{1} << (n + 1);
        // Restriction to the ancilla-zero subspace: worst column error over
        // basis states of the register space.
        double worst = 0.0;
        for (Eigen::Index col = 0; col < 16; ++col) {
            CVector in = CVector::Zero(blocks * 16);
            in(col) = 1.0;
            const CVector out = reflector * in;
            worst = std::max(worst, (out.head(16) - ideal.col(col)).norm());
        }
        errors.push_back(worst);
    }
    CHECK(errors[1] < errors[0]);
    CHECK(errors[2] < errors[1]);
}

TEST_CASE("ref_actions examples") {
    SUBCASE("two-qubit reflection over {|00>,|01>}") {
        const CMatrix r = ref_actions(4, {0, 1});
        CVector expected(4);
        expected << 1, 1, -1, -1;
        CHECK((r - CMatrix(expected.asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("all states give the identity") {
        const CMatrix r = ref_actions(4, {0, 1, 2, 3});
        CHECK((r - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("empty targets are rejected") {
        CHECK_THROWS_AS(ref_actions(4, {}), EmptyTargets);
    }
}

TEST_CASE("rank-one attempt distribution: forced m=1 at epsilon=1/4 always succeeds") {
    Vector pi(3);
    pi << 0.125, 0.125, 0.75;
    ecm::FlagSet flags = ecm::flag_update(ecm::FlagSet({1, 2, 3}), 3, false);
    const Vector dist = rank_one_attempt_distribution(pi, flags, 1);
    // sin(theta) = sqrt(0.25) = 0.5, so sin^2(3 theta) = 1: the flagged
    // actions carry the full probability, split as the tailed distribution.
    CHECK(dist(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dist(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dist(2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rank-one deliberation with m_eps=0 reproduces classical sampling") {
    Vector pi(3);
    pi << 0.045, 0.005, 0.95;
    ecm::FlagSet flags = ecm::flag_update(ecm::FlagSet({1, 2, 3}), 3, false);

    Rng rng(55);
    const int n = 10000;
    Vector counts = Vector::Zero(3);
    double mean_steps = 0.0;
    for (int i = 0; i < n; ++i) {
        const WalkOutcome outcome = rank_one_deliberate(pi, flags, 0, rng);
        counts(outcome.action - 1) += 1.0;
        mean_steps += static_cast<double>(outcome.steps);
    }
    mean_steps /= n;
    // N_U counts one preparation of U|0> per attempt when m_eps = 0, so the
    // mean matches the classical 1/eps sampling cost.
    const double sigma_mean = std::sqrt((1 - 0.05) / (0.05 * 0.05 * n));
    CHECK(std::abs(mean_steps - 20.0) < 3 * sigma_mean);
    const Vector tail = classical::tailed_distribution(pi, {1, 2});
    CHECK(total_variation(counts / n, tail) <= 0.02);
}

TEST_CASE("rank-one deliberation output ratio approaches 9 (Fig. 11 point)") {
    Vector pi(3);
    pi << 0.045, 0.005, 0.95;
    ecm::FlagSet flags = ecm::flag_update(ecm::FlagSet({1, 2, 3}), 3, false);
    Rng rng(61);
    const int n = 10000;
    long n1 = 0, n2 = 0;
    for (int i = 0; i < n; ++i) {
        const int action = rank_one_deliberate(pi, flags, m_eps_for(0.05), rng).action;
        action == 1 ? ++n1 : ++n2;
    }
    const double p1 = static_cast<double>(n1) / n;
    CHECK(std::abs(p1 - 0.9) < 3 * std::sqrt(0.9 * 0.1 / n));
    CHECK(std::abs(static_cast<double>(n1) / static_cast<double>(n2) - 9.0) < 1.0);
}

TEST_CASE("grover deliberation preserves relative weights (tailed output)") {
    Rng rng(67);
    // Reversible 4-state chain with actions 1 and 2 flagged.
    const Matrix p = random_reversible_chain(4, rng);
    const Vector pi = classical::stationary_distribution(p);
    ecm::FlagSet flags = ecm::flag_update(ecm::FlagSet({1, 2, 3, 4}), 3, false);
    flags = ecm::flag_update(flags, 4, false);
    REQUIRE(flags.flagged() == std::set<int>{1, 2});

    const int n = 4000;
    Vector counts = Vector::Zero(4);
    for (int i = 0; i < n; ++i) {
        counts(grover_deliberate(p, flags, 1, rng).action - 1) += 1.0;
    }
    const Vector tail = classical::tailed_distribution(pi, {1, 2});
    CHECK(total_variation(counts / n, tail) <= 0.03);
}

TEST_CASE("grover deliberation on a rank-one chain matches the fast path") {
    Vector pi(4);
    pi << 0.1, 0.15, 0.35, 0.4;
    const Matrix p = rank_one(pi);
    ecm::FlagSet flags = ecm::flag_update(ecm::FlagSet({1, 2, 3, 4}), 3, false);
    flags = ecm::flag_update(flags, 4, false);

    Rng rng(71);
    const int n = 4000;
    long general_first = 0, fast_first = 0;
    for (int i = 0; i < n; ++i) {
        if (grover_deliberate(p, flags, 0, rng).action == 1) {
            ++general_first;
        }
        if (rank_one_deliberate(pi, flags, m_eps_for(0.25), rng).action == 1) {
            ++fast_first;
        }
    }
    const double expected = 0.1 / 0.25;
    const double sigma = std::sqrt(expected * (1 - expected) / n);
    CHECK(std::abs(general_first / static_cast<double>(n) - expected) < 3 * sigma);
    CHECK(std::abs(fast_first / static_cast<double>(n) - expected) < 3 * sigma);
}

TEST_CASE("deliberation with full flagged mass succeeds in the first attempt") {
    Vector pi(3);
    pi << 0.5, 0.3, 0.2;
    ecm::FlagSet flags({1, 2, 3});
    Rng rng(73);
    for (int i = 0; i < 500; ++i) {
        const WalkOutcome outcome = rank_one_deliberate(pi, flags, m_eps_for(1.0), rng);
        CHECK(outcome.steps <= 2 * m_eps_for(1.0) + 1); // single attempt
    }
}

TEST_CASE("a zero-iteration attempt hits a flagged action with probability epsilon") {
    Vector pi(3);
    pi << 0.6, 0.3, 0.1;
    ecm::FlagSet flags = ecm::flag_update(ecm::FlagSet({1, 2, 3}), 3, false);
    const Vector dist = rank_one_attempt_distribution(pi, flags, 0);
    CHECK(dist(0) + dist(1) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("deliberation parameter helpers") {
    CHECK(m_eps_for(0.05) == 5);
    CHECK(m_eps_for(0.25) == 2);
    CHECK(m_eps_for(1.0) == 1);
    CHECK(default_ancilla_count(1.0) == 1);
    CHECK(default_ancilla_count(0.25) == 1);
    CHECK(default_ancilla_count(0.01) == 4);
}

TEST_CASE("padding duplicates the last clip and decodes back") {
    Vector pi(3);
    pi << 0.045, 0.005, 0.95;
    const Vector padded = pad_distribution(pi);
    REQUIRE(padded.size() == 4);
    CHECK(padded(2) == doctest::Approx(0.475));
    CHECK(padded(3) == doctest::Approx(0.475));

    const quantum::PaddedChain chain = pad_chain(rank_one(pi));
    CHECK(chain.decode(0) == 1);
    CHECK(chain.decode(2) == 3);
    CHECK(chain.decode(3) == 3);
    CHECK(chain.states_of(3) == std::vector<Eigen::Index>{2, 3});
    CHECK(is_column_stochastic(chain.p, 1e-12));

    const Vector stat = classical::stationary_distribution(chain.p);
    CHECK((stat - padded).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("empty flagged mass is rejected") {
    Vector pi(3);
    pi << 0.5, 0.5, 0.0;
    ecm::FlagSet flags = ecm::flag_update(ecm::FlagSet({1, 2, 3}), 1, false);
    flags = ecm::flag_update(flags, 2, false);
    REQUIRE(flags.flagged() == std::set<int>{3});
    Rng rng(79);
    CHECK_THROWS_AS(rank_one_deliberate(pi, flags, 2, rng), EmptyTail);
}

} // TEST_SUITE
