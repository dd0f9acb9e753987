#include "siq/clifford.hpp"
#include "siq/rb.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace siq;

TEST(Clifford, GroupStructure) {
    const auto &g = CliffordGroup::instance();
    ASSERT_EQ(g.size(), 24);
    EXPECT_TRUE(equal_up_to_phase(g[g.identity()].matrix, Matrix2c::Identity()));
    for (int a = 0; a < 24; ++a) {
        for (int b = 0; b < 24; ++b) {
            const Matrix2c prod = g[b].matrix * g[a].matrix;
            const int c = g.find(prod);
            ASSERT_GE(c, 0) << "closure";
            EXPECT_EQ(c, g.compose(a, b));
        }
        EXPECT_EQ(g.compose(a, g.inverse(a)), g.identity());
        // Distinct up to phase.
        for (int b = 0; b < a; ++b) EXPECT_FALSE(equal_up_to_phase(g[a].matrix, g[b].matrix));
    }
}

TEST(Clifford, CompiledPulsesRealizeTheElement) {
    const DeviceParams p;
    const auto &g = CliffordGroup::instance();
    for (int i = 0; i < 24; ++i) {
        for (const auto q : {Qubit::Left, Qubit::Right}) {
            const auto segs = compile_clifford(p, q, g[i], p.rabi_frequency);
            const ComplexMatrix4 U = propagator(segs, p);
            EXPECT_GT(gate_fidelity(U, embed(g[i].matrix, q)), 1 - 1e-9) << i;
        }
    }
}

TEST(RB, NoiselessIsPerfect) {
    const DeviceParams p;
    const auto r = run_rb(p, Qubit::Left, {1, 5, 20, 50}, 10, RbErrorModel::none());
    for (const double v : r.data.column("p_up").values) EXPECT_NEAR(v, 1.0, 1e-9);
    ASSERT_TRUE(r.fit.has_value());
    EXPECT_NEAR(r.fit->p_c, 1.0, 1e-6);
}

TEST(RB, DepolarizingMatchesChannelOracle) {
    const DeviceParams p;
    const std::vector<int> n{1, 10, 30, 100, 300};
    for (const double rate : {0.002, 0.01}) {
        const auto r = run_rb(p, Qubit::Right, n, 8, RbErrorModel::depolarizing(rate));
        for (std::size_t i = 0; i < n.size(); ++i) {
            EXPECT_NEAR(r.data.at("p_up", i), rb_depolarizing_survival(rate, n[i]), 1e-9);
        }
        ASSERT_TRUE(r.fit.has_value());
        EXPECT_NEAR(r.fit->F_c, 1 - rate / 2, 1e-8);
    }
}

TEST(RB, DephasingLowersFidelity) {
    const DeviceParams p;
    RbOptions o;
    o.seed = 4;
    const auto r = run_rb(p, Qubit::Left, {1, 10, 25, 50, 100, 200}, 20, RbErrorModel::dephasing(187.6e3, 10), o);
    ASSERT_TRUE(r.fit.has_value());
    EXPECT_LT(r.fit->F_c, 1.0);
    EXPECT_GT(r.fit->F_c, 0.98);
    // Same seed, same numbers.
    const auto again = run_rb(p, Qubit::Left, {1, 10, 25, 50, 100, 200}, 20, RbErrorModel::dephasing(187.6e3, 10), o);
    EXPECT_EQ(r.data.to_csv(), again.data.to_csv());
}

TEST(RB, Validation) {
    const DeviceParams p;
    EXPECT_THROW(run_rb(p, Qubit::Left, {1, 2}, 0, RbErrorModel::none()), std::invalid_argument);
    EXPECT_THROW(RbErrorModel::depolarizing(1.5).validate(), std::invalid_argument);
    EXPECT_THROW(RbErrorModel::dephasing(-1).validate(), std::invalid_argument);
}

TEST(RB, FitFailureKeepsRawData) {
    const DeviceParams p;
    // A single length cannot constrain a three-parameter decay.
    const auto r = run_rb(p, Qubit::Left, {5}, 3, RbErrorModel::depolarizing(0.01));
    EXPECT_FALSE(r.fit.has_value());
    EXPECT_EQ(r.data.column("p_up").values.size(), 1u);
    EXPECT_FALSE(r.data.warnings().empty());
}
