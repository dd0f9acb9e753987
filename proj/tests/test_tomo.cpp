#include "siq/rng.hpp"
#include "siq/tomo.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace siq;

namespace {

std::vector<TomographyRecord> exact_records(const ComplexMatrix4 &rho) {
    std::vector<TomographyRecord> out;
    for (const auto &s : measurement_settings()) out.push_back(simulate_record(rho, s));
    return out;
}

ComplexMatrix4 bell_rho() {
    const auto v = bell_target().amplitudes();
    return v * v.adjoint();
}

ComplexMatrix4 random_density(Rng &rng, int rank) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::Matrix<cplx, 4, Eigen::Dynamic> a(4, rank);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < rank; ++j) a(i, j) = cplx(g(rng), g(rng));
    ComplexMatrix4 rho = a * a.adjoint();
    return rho / rho.trace();
}

}  // namespace

TEST(Plan, CoversEveryLabelOnce) {
    const auto plan = tomography_plan();
    ASSERT_EQ(plan.size(), 15u);
    std::set<int> seen;
    for (const auto &a : plan) EXPECT_TRUE(seen.insert(a.label.index()).second) << a.label.name();
    EXPECT_EQ(seen.count(0), 0u);
    EXPECT_EQ(measurement_settings().size(), 9u);
    for (const auto &a : plan) {
        if (a.label.name() == "ZZ") {
            EXPECT_EQ(a.setting, (MeasurementSetting{Prerotation::I, Prerotation::I}));
        }
        if (a.label.name() == "YX") {
            EXPECT_EQ(a.setting, (MeasurementSetting{Prerotation::X90, Prerotation::Y90}));
        }
    }
}

TEST(Prerotation, MeasuredObservables) {
    // Heisenberg picture: R^dagger Z R = sign * P.
    for (const auto r : {Prerotation::I, Prerotation::X90, Prerotation::Y90, Prerotation::X180}) {
        const auto [pauli, sign] = measured_observable(r);
        const Matrix2c R = prerotation_matrix(r);
        EXPECT_LT((R.adjoint() * pauli_matrix(Pauli::Z) * R - double(sign) * pauli_matrix(pauli)).norm(), 1e-12)
            << to_string(r);
    }
}

TEST(Reconstruct, BasisAndBell) {
    const auto dd = DensityMatrix::pure(TwoQubitState::basis(BasisState::DownDown)).matrix();
    EXPECT_LT((reconstruct(exact_records(dd)).raw - dd).norm(), 1e-10);
    const auto rec = reconstruct(exact_records(bell_rho()));
    EXPECT_NEAR(fidelity(rec.projected, bell_target()), 1.0, 1e-10);
    EXPECT_NEAR(fidelity(DensityMatrix::maximally_mixed(), bell_target()), 0.5, 1e-12);
}

TEST(Property, ReconstructionRoundtrip) {
    auto rng = make_rng(31, 0, 0);
    for (int i = 0; i < 100; ++i) {
        const auto rho = random_density(rng, 1 + i % 4);
        EXPECT_LT((reconstruct(exact_records(rho)).raw - rho).norm(), 1e-9);
    }
}

TEST(Reconstruct, MissingSettingsNamed) {
    auto recs = exact_records(bell_rho());
    recs.erase(recs.begin());  // drops (X90, X90): YY
    try {
        reconstruct(recs);
        FAIL() << "expected an error";
    } catch (const std::invalid_argument &e) {
        EXPECT_NE(std::string(e.what()).find("YY"), std::string::npos);
    }
    auto bad = exact_records(bell_rho());
    bad[0].probabilities[0] += 0.1;
    EXPECT_THROW(reconstruct(bad), std::invalid_argument);
}

TEST(Visibility, ScalesPauliVector) {
    auto rng = make_rng(32, 0, 0);
    VisibilityModel v;
    v.V_L = 0.76;
    v.V_R = 0.70;
    for (int i = 0; i < 20; ++i) {
        const auto rho = random_density(rng, 1);
        auto recs = exact_records(rho);
        for (auto &r : recs) r.probabilities = apply_visibility(r.probabilities, v);
        const auto rec = reconstruct(recs);
        for (int k = 1; k < 16; ++k) {
            const auto l = PauliLabel::from_index(k);
            const double scale = (l.left != Pauli::I ? v.V_L : 1.0) * (l.right != Pauli::I ? v.V_R : 1.0);
            EXPECT_NEAR(rec.paulis[k], scale * pauli_expectation(rho, l), 1e-10) << l.name();
        }
        EXPECT_TRUE(DensityMatrix(rec.raw).is_physical());
    }
}

TEST(Visibility, LimitsAndBellCoherence) {
    const auto rho = bell_rho();
    const auto same = reconstruct(exact_records(rho));
    EXPECT_LT((same.raw - rho).norm(), 1e-10);
    VisibilityModel zero;
    zero.V_L = zero.V_R = 0;
    auto recs = exact_records(rho);
    for (auto &r : recs) r.probabilities = apply_visibility(r.probabilities, zero);
    EXPECT_LT((reconstruct(recs).raw - ComplexMatrix4::Identity() / 4.0).norm(), 1e-12);
    VisibilityModel v;
    v.V_L = 0.76;
    v.V_R = 0.70;
    recs = exact_records(rho);
    for (auto &r : recs) r.probabilities = apply_visibility(r.probabilities, v);
    const auto rec = reconstruct(recs);
    EXPECT_NEAR(std::abs(rec.raw(0, 3)), 0.76 * 0.70 / 2, 1e-10);
    EXPECT_NEAR(fidelity(rec.raw, bell_target()), 0.805, 0.005);
}

TEST(Property, FidelityMonotoneInVisibility) {
    const auto rho = bell_rho();
    double prev = 2;
    for (double vl = 1.0; vl >= 0; vl -= 0.1) {
        VisibilityModel v;
        v.V_L = vl;
        v.V_R = 0.8;
        auto recs = exact_records(rho);
        for (auto &r : recs) r.probabilities = apply_visibility(r.probabilities, v);
        const double f = fidelity(reconstruct(recs).raw, bell_target());
        EXPECT_LE(f, prev + 1e-12);
        prev = f;
    }
}

TEST(Visibility, AsymmetricConfusion) {
    VisibilityModel v;
    v.asymmetric_L = std::array<double, 2>{0.9, 0.8};
    v.asymmetric_R = std::array<double, 2>{1.0, 1.0};
    const auto out = apply_visibility({0, 0, 0, 1}, v);  // true |dd>
    EXPECT_NEAR(out[3], 0.8, 1e-15);
    EXPECT_NEAR(out[1], 0.2, 1e-15);
    VisibilityModel bad;
    bad.V_L = 1.2;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Bell, Pipeline) {
    const DeviceParams p;
    const auto ideal = bell_experiment(p, VisibilityModel{}, NoiseConfig{});
    EXPECT_NEAR(ideal.fidelity_raw, 1.0, 1e-6);
    VisibilityModel v;
    v.V_L = 0.76;
    v.V_R = 0.70;
    const auto vis = bell_experiment(p, v, NoiseConfig{});
    EXPECT_NEAR(vis.fidelity_raw, 0.805, 0.01);
    EXPECT_NEAR(vis.fidelity_projected, 0.805, 0.01);
    const auto noisy = bell_experiment(p, v, NoiseConfig::from_t2_star(p, 200, 3));
    EXPECT_LT(noisy.fidelity_projected, vis.fidelity_projected);
}
