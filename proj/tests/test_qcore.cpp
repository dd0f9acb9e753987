#include "siq/qcore.hpp"
#include "siq/rng.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <random>

using namespace siq;

namespace {

ComplexMatrix4 random_hermitian(Rng &rng, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix4 a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = cplx(g(rng), g(rng));
    return 0.5 * (a + a.adjoint());
}

ComplexMatrix4 random_density(Rng &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix4 a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = cplx(g(rng), g(rng));
    ComplexMatrix4 rho = a * a.adjoint();
    return rho / rho.trace();
}

}  // namespace

TEST(SpinOperators, Algebra) {
    const auto &s = spin_operators();
    EXPECT_NEAR(std::abs(s.sz.trace()), 0.0, 1e-15);
    const Matrix2c comm = s.sx * s.sy - s.sy * s.sx;
    EXPECT_LT((comm - cplx(0, 1) * s.sz).norm(), 1e-15);
    const auto e = eig_hermitian(s.sl_dot_sr);
    EXPECT_NEAR(e.values[0], -0.75, 1e-12);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(e.values[k], 0.25, 1e-12);
    for (const auto *m : {&s.sx_l, &s.sy_l, &s.sz_l, &s.sx_r, &s.sy_r, &s.sz_r, &s.sl_dot_sr}) {
        EXPECT_LT(hermiticity_error(*m), 1e-15);
    }
}

TEST(SpinOperators, BasisOrderLeftMajor) {
    const auto &s = spin_operators();
    // |ud>: left up (+1/2), right down (-1/2).
    EXPECT_NEAR(s.sz_l(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(s.sz_r(1, 1).real(), -0.5, 1e-15);
    EXPECT_EQ(basis_index(Spin::Down, Spin::Up), 2);
    EXPECT_EQ(spin_of(2, Qubit::Left), Spin::Down);
    EXPECT_EQ(spin_of(2, Qubit::Right), Spin::Up);
}

TEST(Expm, ZeroAndDiagonal) {
    EXPECT_LT((expm_skew_hermitian(ComplexMatrix4::Zero(), 1.0) - ComplexMatrix4::Identity()).norm(), 1e-15);
    ComplexMatrix4 h = ComplexMatrix4::Zero();
    const double d[] = {1e6, -3e6, 2.5e6, 0.1e6};
    for (int k = 0; k < 4; ++k) h(k, k) = d[k];
    const double dt = 1.7e-7;
    const auto u = expm_skew_hermitian(h, dt);
    for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(u(k, k) - std::polar(1.0, -kTwoPi * d[k] * dt)), 1e-12);
}

TEST(Expm, MatchesScalingAndSquaringOracle) {
    auto rng = make_rng(1, 0, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix4 h = random_hermitian(rng, 1e6);
        const double dt = 1e-7;
        const ComplexMatrix4 gen = cplx(0, -kTwoPi * dt) * h;
        // Two half steps of Eigen's Pade exponential as an independent route.
        const ComplexMatrix4 half = (0.5 * gen).exp();
        EXPECT_LT((expm_skew_hermitian(h, dt) - half * half).norm(), 1e-9);
    }
}

TEST(Expm, RejectsNonHermitian) {
    ComplexMatrix4 h = ComplexMatrix4::Zero();
    h(0, 1) = 1.0;
    EXPECT_THROW(expm_skew_hermitian(h, 1.0), std::invalid_argument);
    EXPECT_THROW(eig_hermitian(h), std::invalid_argument);
}

TEST(Property, PropagatorsUnitaryAndNormPreserving) {
    auto rng = make_rng(2, 0, 0);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto h = random_hermitian(rng, 1e7);
        const auto u = expm_skew_hermitian(h, 3e-6);
        EXPECT_LT(unitarity_error(u), 1e-10);
        Vector4c v;
        for (int k = 0; k < 4; ++k) v[k] = cplx(g(rng), g(rng));
        v.normalize();
        EXPECT_NEAR((u * v).norm(), 1.0, 1e-10);
    }
}

TEST(Eig, DiagonalSortedAndTrace) {
    ComplexMatrix4 h = ComplexMatrix4::Zero();
    h(0, 0) = 3;
    h(1, 1) = -1;
    h(2, 2) = 2;
    h(3, 3) = 0;
    const auto e = eig_hermitian(h);
    EXPECT_DOUBLE_EQ(e.values[0], -1);
    EXPECT_DOUBLE_EQ(e.values[3], 3);
    auto rng = make_rng(3, 0, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = random_hermitian(rng, 1.0);
        const auto r = eig_hermitian(m);
        EXPECT_NEAR(r.values.sum(), m.trace().real(), 1e-9);
        for (int k = 0; k < 4; ++k) {
            EXPECT_LT((m * r.vectors.col(k) - r.values[k] * r.vectors.col(k)).norm(), 1e-9 * m.norm());
        }
        for (int k = 0; k < 3; ++k) EXPECT_LE(r.values[k], r.values[k + 1]);
    }
}

TEST(Eig, ExchangeBlockSplitting) {
    const double J = 20e6, dB = 200e6;
    ComplexMatrix4 h = ComplexMatrix4::Zero();
    h(1, 1) = dB / 2 - J / 2;
    h(2, 2) = -dB / 2 - J / 2;
    h(1, 2) = h(2, 1) = J / 2;
    const auto e = eig_hermitian(h);
    // Two zero eigenvalues from the empty parallel block; the block splits by sqrt(J^2 + dB^2).
    EXPECT_NEAR(e.values[3] - e.values[0], std::sqrt(J * J + dB * dB), 1e-6);
}

TEST(Pauli, LabelsAndExpectations) {
    const auto all = PauliLabel::all();
    for (int i = 0; i < 16; ++i) {
        EXPECT_EQ(all[i].index(), i);
        EXPECT_EQ(PauliLabel::parse(all[i].name()), all[i]);
    }
    EXPECT_THROW(PauliLabel::parse("XQ"), std::invalid_argument);
    const auto dd = DensityMatrix::pure(TwoQubitState::basis(BasisState::DownDown));
    EXPECT_NEAR(pauli_expectation(dd, PauliLabel::parse("ZZ")), 1.0, 1e-15);
    EXPECT_NEAR(pauli_expectation(dd, PauliLabel::parse("ZI")), -1.0, 1e-15);
    const auto mixed = DensityMatrix::maximally_mixed();
    for (int i = 1; i < 16; ++i) EXPECT_NEAR(pauli_expectation(mixed, PauliLabel::from_index(i)), 0.0, 1e-15);
}

TEST(Pauli, BellXYByContraction) {
    Vector4c v = Vector4c::Zero();
    v[3] = 1 / std::sqrt(2.0);
    v[0] = cplx(0, -1 / std::sqrt(2.0));
    const auto rho = DensityMatrix::pure(TwoQubitState(v));
    // Brute-force sum over indices of conj(v_a) (Y (x) X)_ab v_b.
    const Matrix2c y = pauli_matrix(Pauli::Y), x = pauli_matrix(Pauli::X);
    cplx acc = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) acc += std::conj(v[a]) * y(a >> 1, b >> 1) * x(a & 1, b & 1) * v[b];
    EXPECT_NEAR(pauli_expectation(rho, PauliLabel::parse("YX")), acc.real(), 1e-12);
    EXPECT_NEAR(std::abs(acc.real()), 1.0, 1e-12);
}

TEST(Property, PauliVectorIsInformationallyComplete) {
    auto rng = make_rng(4, 0, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rho = random_density(rng);
        std::array<double, 16> e;
        for (int i = 0; i < 16; ++i) e[i] = pauli_expectation(rho, PauliLabel::from_index(i));
        EXPECT_LT((density_from_paulis(e) - rho).norm(), 1e-10);
    }
}

TEST(States, NormalizationEnforced) {
    Vector4c v = Vector4c::Zero();
    v[0] = 1.1;
    EXPECT_THROW(TwoQubitState{v}, std::invalid_argument);
    EXPECT_NO_THROW(TwoQubitState::normalized(v));
    EXPECT_THROW(TwoQubitState::normalized(Vector4c::Zero()), std::invalid_argument);
    const auto s = TwoQubitState::product(Vector2c(1, 0), Vector2c(0, 1));
    EXPECT_NEAR(s.populations()[1], 1.0, 1e-15);
    EXPECT_NEAR(s.p_up(Qubit::Left), 1.0, 1e-15);
    EXPECT_NEAR(s.p_up(Qubit::Right), 0.0, 1e-15);
    EXPECT_EQ(parse_basis_state("du"), BasisState::DownUp);
    EXPECT_THROW(parse_basis_state("xx"), std::invalid_argument);
}

TEST(DensityMatrix, ProjectionIdempotentAndTracePreserving) {
    auto rng = make_rng(5, 0, 0);
    std::normal_distribution<double> g(0.0, 0.3);
    for (int trial = 0; trial < 100; ++trial) {
        ComplexMatrix4 rho = random_density(rng);
        // Push it off the physical set while keeping Hermiticity and trace.
        ComplexMatrix4 d = random_hermitian(rng, 0.3);
        d -= d.trace() / 4.0 * ComplexMatrix4::Identity();
        const DensityMatrix m(rho + d);
        const auto p1 = m.project_physical();
        const auto p2 = p1.project_physical();
        EXPECT_NEAR(p1.matrix().trace().real(), 1.0, 1e-12);
        EXPECT_GE(p1.min_eigenvalue(), -1e-10);
        EXPECT_LT((p1.matrix() - p2.matrix()).norm(), 1e-10);
    }
}

TEST(WrapPhase, Range) {
    EXPECT_NEAR(wrap_phase(kTwoPi), 0.0, 1e-15);
    EXPECT_NEAR(wrap_phase(-kTwoPi / 2), kTwoPi / 2, 1e-15);
    EXPECT_NEAR(wrap_phase(3 * kTwoPi + 0.25), 0.25, 1e-12);
}
