#include "siq/pulses.hpp"
#include "siq/rng.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace siq;

namespace {
constexpr double kPi = kTwoPi / 2;

double overlap(const TwoQubitState &a, const TwoQubitState &b) {
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}
}  // namespace

TEST(Evolve, EmptySequenceIsIdentity) {
    const DeviceParams p;
    PulseSequence s;
    s.initial_state = TwoQubitState::basis(BasisState::UpDown);
    EXPECT_NEAR(overlap(evolve(s, p), s.initial_state), 1.0, 1e-15);
}

TEST(Evolve, ResonantPiPulse) {
    const DeviceParams p;
    for (const auto q : {Qubit::Left, Qubit::Right}) {
        PulseSequence s;
        s.add(MicrowaveBurst{q, 1 / (2 * p.rabi_frequency), frame_frequency(p, q), p.rabi_frequency, -kPi / 2});
        const auto out = evolve(s, p);
        EXPECT_NEAR(out.p_up(q), 1.0, 1e-6);
        EXPECT_NEAR(out.p_up(q == Qubit::Left ? Qubit::Right : Qubit::Left), 0.0, 1e-12);
    }
}

TEST(RotatingFrame, ResonantDriveIsPureTransverse) {
    const DeviceParams p;
    const MicrowaveBurst b{Qubit::Left, 1e-6, frame_frequency(p, Qubit::Left), 4.8e6, -kPi / 2};
    const auto h = rotating_frame_hamiltonian(p, b, 3.3e-7);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(h(k, k)), 0.0, 1e-6);
    // Left-flip elements |uX> <-> |dX> carry f_R/2.
    EXPECT_NEAR(std::abs(h(0, 2)), 2.4e6, 1e-6);
    EXPECT_NEAR(std::abs(h(1, 3)), 2.4e6, 1e-6);
    EXPECT_NEAR(std::abs(h(0, 1)), 0.0, 1e-9);
    const auto idle = rotating_frame_hamiltonian(p, Idle{1e-6}, 0.0);
    EXPECT_LT(idle.norm(), 1e-6);
}

TEST(RotatingFrame, DetunedRabiFrequency) {
    const DeviceParams p;
    const double fr = 4.8e6, det = 4.8e6;
    double best = 0;
    for (int i = 0; i <= 400; ++i) {
        PulseSequence s;
        s.add(MicrowaveBurst{Qubit::Left, i * 1e-9, frame_frequency(p, Qubit::Left) + det, fr, -kPi / 2});
        best = std::max(best, evolve(s, p).p_up(Qubit::Left));
    }
    EXPECT_NEAR(best, 0.5, 1e-3);
}

TEST(Integrators, ExactMatchesMidpoint) {
    const DeviceParams p;
    auto rng = make_rng(21, 0, 0);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 10; ++trial) {
        PulseSequence s;
        s.initial_state = TwoQubitState::basis(static_cast<BasisState>(trial % 4));
        const double J = 10e6 * u(rng);
        const auto f = transition_frequencies(p, J);
        s.add(CompositeSegment{300e-9 * u(rng),
                               MicrowaveBurst{Qubit::Left, 0, f.f_L_up + 1e6 * (u(rng) - 0.5), 3e6, kTwoPi * u(rng)},
                               J});
        s.add(MicrowaveBurst{Qubit::Right, 80e-9, frame_frequency(p, Qubit::Right), 4.8e6, -kPi / 2});
        s.add(DcExchange{100e-9, J, std::nullopt});
        const auto a = evolve(s, p, {1e-9, Integrator::Exact});
        const auto b = evolve(s, p, {2e-10, Integrator::Midpoint});
        EXPECT_GT(overlap(a, b), 1 - 1e-8);
    }
}

TEST(Integrators, MidpointConvergesQuadratically) {
    const DeviceParams p;
    PulseSequence s;
    s.add(CompositeSegment{400e-9, MicrowaveBurst{Qubit::Left, 0, transition_frequencies(p, 5e6).f_L_up + 2e6, 4e6, 0.3},
                           5e6});
    const auto exact = evolve(s, p, {1e-9, Integrator::Exact});
    auto err = [&](double dt) { return (evolve(s, p, {dt, Integrator::Midpoint}).amplitudes() - exact.amplitudes()).norm(); };
    // Steps below the integrator's own accuracy cap, so dt_max is binding.
    const double e1 = err(4e-11), e2 = err(2e-11), e3 = err(1e-11);
    EXPECT_NEAR(e1 / e2, 4.0, 0.5);
    EXPECT_NEAR(e2 / e3, 4.0, 0.5);
}

TEST(Integrators, LabFrameAgreesWithRwa) {
    DeviceParams p;
    p.E_Z = 14e9;
    PulseSequence s;
    s.add(MicrowaveBurst{Qubit::Left, 70e-9, frame_frequency(p, Qubit::Left), 4.8e6, -kPi / 2});
    s.add(Idle{20e-9});
    s.add(MicrowaveBurst{Qubit::Right, 40e-9, frame_frequency(p, Qubit::Right) + 0.5e6, 4.8e6, 0.0});
    const auto rwa = evolve(s, p);
    const auto lab = evolve(s, p, {1e-9, Integrator::LabFrame});
    EXPECT_GT(overlap(rwa, lab), 0.999);
    PulseSequence bad;
    bad.add(DcExchange{10e-9, 1e6, std::nullopt});
    EXPECT_THROW(evolve(bad, p, {1e-9, Integrator::LabFrame}), std::invalid_argument);
}

TEST(Property, PropagatorUnitary) {
    const DeviceParams p;
    const auto cal = calibrate_cnot(p);
    EXPECT_LT(unitarity_error(propagator(cnot_sequence(p, cal).segments, p)), 1e-9);
    std::vector<PulseSegment> segs{CompositeSegment{123e-9, MicrowaveBurst{Qubit::Right, 0, 14.1e9, 2e6, 1.0}, 3e6},
                                   DcExchange{50e-9, std::nullopt, 0.405}, Idle{10e-9}, VirtualZ{Qubit::Left, 0.7}};
    EXPECT_LT(unitarity_error(propagator(segs, p)), 1e-9);
    EXPECT_LT(unitarity_error(propagator(segs, p, {5e-10, Integrator::Midpoint})), 1e-9);
}

TEST(Cnot, TruthTableAndGateFidelity) {
    const DeviceParams p;
    const auto cal = calibrate_cnot(p);
    EXPECT_NEAR(cal.tau_dc, 204e-9, 1e-15);
    const auto U = propagator(cnot_sequence(p, cal).segments, p);
    EXPECT_GT(gate_fidelity(U, ideal_cnot()), 0.999);
    const int target_of[] = {2, 1, 0, 3};  // uu <-> du, ud and dd unchanged
    for (int b = 0; b < 4; ++b) EXPECT_GT(std::norm(U(target_of[b], b)), 0.99);
}

TEST(Cnot, PaperTimingGivesConditionalFlip) {
    // 130 ns burst at 1/(2*130 ns) inside a 204 ns exchange window, no calibration.
    const DeviceParams p;
    const double J = 1 / 204e-9;
    const auto seq = cnot_sequence(p, J, 130e-9, 204e-9, {0.0, 0.0});
    PulseSequence s;
    s.initial_state = TwoQubitState::basis(BasisState::DownUp);
    s.append(seq);
    EXPECT_GT(evolve(s, p).p_up(Qubit::Left), 0.99);
    EXPECT_THROW(cnot_sequence(p, J, 300e-9, 204e-9, {0.0, 0.0}), std::invalid_argument);
}

TEST(Cnot, CompositeInputDownUpFlips) {
    const DeviceParams p;
    const auto cal = calibrate_cnot(p);
    PulseSequence s;
    s.initial_state = TwoQubitState::basis(BasisState::DownUp);
    s.append(cnot_sequence(p, cal));
    EXPECT_GT(evolve(s, p).p_up(Qubit::Left), 0.99);
}

TEST(ConditionalPhase, AnalyticAndEvolved) {
    const DeviceParams p;
    const double J = 1 / 204e-9;
    EXPECT_NEAR(conditional_phase(p, J, 1 / J), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(conditional_phase(p, J, 0.5 / J)), kPi, 1e-12);
    for (const double frac : {0.1, 0.25, 0.5, 0.8, 1.0, 2.0}) {
        const double a = conditional_phase(p, J, frac / J);
        const double e = conditional_phase_evolved(p, J, frac / J);
        EXPECT_NEAR(wrap_phase(a - e), 0.0, 1e-6) << frac;
    }
}

TEST(Noise, ZeroSigmaEqualsEvolve) {
    const DeviceParams p;
    PulseSequence s;
    s.add(rotation_burst(p, Qubit::Left, kPi / 2, 0, p.rabi_frequency)).add(Idle{1e-6});
    NoiseConfig n;
    n.n_samples = 7;
    const auto pop = evolve_ensemble(s, p, n);
    const auto ref = evolve(s, p).populations();
    for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(pop[k], ref[k]);
}

TEST(Noise, SeedDeterministicAndSeedSensitive) {
    const DeviceParams p;
    PulseSequence s;
    s.add(rotation_burst(p, Qubit::Left, kPi / 2, 0, p.rabi_frequency)).add(Idle{1e-6});
    s.add(rotation_burst(p, Qubit::Left, kPi / 2, 0, p.rabi_frequency));
    const auto a = evolve_ensemble(s, p, NoiseConfig::from_t2_star(p, 64, 5));
    const auto b = evolve_ensemble(s, p, NoiseConfig::from_t2_star(p, 64, 5));
    const auto c = evolve_ensemble(s, p, NoiseConfig::from_t2_star(p, 64, 6));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Noise, Validation) {
    NoiseConfig n;
    n.n_samples = 0;
    EXPECT_THROW(n.validate(), std::invalid_argument);
    n.n_samples = 1;
    n.sigma_f_L = -1;
    EXPECT_THROW(n.validate(), std::invalid_argument);
}

TEST(Sequence, ValidationAndDuration) {
    PulseSequence s;
    s.add(Idle{1e-6}).add(VirtualZ{Qubit::Left, 1.0}).add(DcExchange{2e-7, 1e6, std::nullopt});
    EXPECT_NEAR(s.total_duration(), 1.2e-6, 1e-18);
    EXPECT_NO_THROW(s.validate());
    s.add(Idle{-1});
    EXPECT_THROW(s.validate(), std::invalid_argument);
    PulseSequence t;
    t.add(DcExchange{1e-7, 1e6, 0.4});
    EXPECT_THROW(t.validate(), std::invalid_argument);
    PulseSequence u;
    u.add(DcExchange{1e-7, std::nullopt, std::nullopt});
    EXPECT_THROW(u.validate(), std::invalid_argument);
}

TEST(VirtualZ, MatchesRz) {
    // A frame update ahead of a pulse acts as Rz(phi) applied first.
    const DeviceParams p;
    const double phi = 0.9;
    PulseSequence a;
    a.add(VirtualZ{Qubit::Left, phi});
    a.add(rotation_burst(p, Qubit::Left, kPi / 2, 0, p.rabi_frequency));
    const ComplexMatrix4 ua = propagator(a.segments, p);
    const Matrix2c rz{{std::polar(1.0, -phi / 2), 0}, {0, std::polar(1.0, phi / 2)}};
    const Matrix2c x90 = (Matrix2c() << 1, cplx(0, -1), cplx(0, -1), 1).finished() / std::sqrt(2.0);
    const ComplexMatrix4 ub = embed(x90 * rz, Qubit::Left);
    EXPECT_GT(gate_fidelity(ua, ub), 1 - 1e-9);
}

TEST(RotationBurst, AxisConvention) {
    const DeviceParams p;
    // Rx(pi/2)|d> = (|d> - i|u>)/sqrt2, Ry(pi/2)|d> = (|d> - |u>)/sqrt2.
    PulseSequence s;
    s.add(rotation_burst(p, Qubit::Right, kPi / 2, 0.0, p.rabi_frequency));
    const auto out = evolve(s, p);
    EXPECT_NEAR(std::arg(out[2] / out[3]), -kPi / 2, 1e-9);
    PulseSequence y;
    y.add(rotation_burst(p, Qubit::Right, kPi / 2, kPi / 2, p.rabi_frequency));
    const auto oy = evolve(y, p);
    EXPECT_NEAR(std::abs(std::arg(oy[2] / oy[3])), kPi, 1e-9);
    const auto neg = rotation_burst(p, Qubit::Right, -kPi / 2, 0.0, p.rabi_frequency);
    EXPECT_GT(neg.duration, 0);
}
