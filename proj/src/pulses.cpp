#include "siq/pulses.hpp"

#include "siq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace siq {

namespace {

constexpr double kPi = kTwoPi / 2;

// One segment reduced to what the integrators need.
struct Piece {
    double duration = 0;
    double J = 0;
    bool driven = false;
    Qubit target = Qubit::Left;
    double f_d = 0;
    double f_R = 0;
    double phase = 0;
};

Piece resolve(const PulseSegment &seg, const DeviceParams &p) {
    Piece out;
    auto set_drive = [&](const MicrowaveBurst &b) {
        out.driven = b.rabi_amplitude > 0;
        out.target = b.target;
        out.f_d = b.frequency;
        out.f_R = b.rabi_amplitude;
        out.phase = b.phase;
    };
    std::visit(
        [&](const auto &s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MicrowaveBurst>) {
                out.duration = s.duration;
                set_drive(s);
            } else if constexpr (std::is_same_v<T, DcExchange>) {
                out.duration = s.duration;
                out.J = s.J ? *s.J : exchange_vs_vm(p.exchange_fit, *s.V_M);
            } else if constexpr (std::is_same_v<T, Idle>) {
                out.duration = s.duration;
            } else if constexpr (std::is_same_v<T, CompositeSegment>) {
                out.duration = s.duration;
                out.J = s.J.value_or(0.0);
                if (s.microwave) set_drive(*s.microwave);
            }
        },
        seg);
    return out;
}

// Rotating-frame energies (Hz) of the labeled eigenstates, the mixing angle,
// and the frame detuning of the drive.
struct LevelData {
    Eigen::Vector4d d;
    double cos_theta = 1;
};

LevelData level_data(const DeviceParams &p, double J, const FrequencyOffsets &off) {
    // Offsets relative to each frame; B1 shifts exist only while exchange is on.
    const double aL = (J > 0 ? p.B1_zL : 0.0) + off.left;
    const double aR = (J > 0 ? p.B1_zR : 0.0) + off.right;
    const double delta = p.dE_Z + aR - aL;
    const double R = std::hypot(J, delta);
    LevelData out;
    out.d << 0.5 * (aL + aR), 0.5 * (-J - R + p.dE_Z), 0.5 * (-J + R - p.dE_Z), -0.5 * (aL + aR);
    out.cos_theta = std::cos(0.5 * std::atan2(J, delta));
    return out;
}

ComplexMatrix4 raising(Qubit target, double c) {
    ComplexMatrix4 m = ComplexMatrix4::Zero();
    if (target == Qubit::Left) {
        m(0, 2) = c;
        m(1, 3) = c;
    } else {
        m(0, 1) = c;
        m(2, 3) = c;
    }
    return m;
}

ComplexMatrix4 drive_term(const ComplexMatrix4 &m_plus, double f_R, double beta) {
    const cplx e = std::polar(1.0, -beta);
    const ComplexMatrix4 a = e * m_plus;
    return (f_R / cplx(0, 2)) * (a - a.adjoint());
}

Eigen::Vector4d sz_diag(Qubit q) {
    Eigen::Vector4d v;
    for (int k = 0; k < 4; ++k) v[k] = sz_of(k, q);
    return v;
}

ComplexMatrix4 diag_phase(const Eigen::Vector4d &freqs, double t) {
    Vector4c ph;
    for (int k = 0; k < 4; ++k) ph[k] = std::polar(1.0, -kTwoPi * std::fmod(freqs[k] * t, 1.0));
    return ph.asDiagonal();
}

int substeps(double duration, double dt_cap) {
    if (duration <= 0) return 0;
    return std::max(1, static_cast<int>(std::ceil(duration / dt_cap - 1e-9)));
}

ComplexMatrix4 piece_exact(const Piece &pc, const LevelData &lv, double frame_target, double phase) {
    if (!pc.driven) return diag_phase(lv.d, pc.duration);
    // Static in the frame co-rotating with the drive.
    const double delta_d = pc.f_d - frame_target;
    const Eigen::Vector4d g = delta_d * sz_diag(pc.target);
    ComplexMatrix4 K = ComplexMatrix4::Zero();
    K.diagonal() = (lv.d - g).cast<cplx>();
    K += drive_term(raising(pc.target, lv.cos_theta), pc.f_R, phase);
    return diag_phase(g, pc.duration) * expm_skew_hermitian(K, pc.duration);
}

ComplexMatrix4 piece_midpoint(const Piece &pc, const LevelData &lv, double frame_target, double phase,
                              double dt_max) {
    if (!pc.driven) return diag_phase(lv.d, pc.duration);
    const double delta_d = pc.f_d - frame_target;
    const double scale = lv.d.cwiseAbs().maxCoeff() + pc.f_R + std::abs(delta_d);
    const int n = substeps(pc.duration, std::min(dt_max, 1.0 / (50.0 * scale)));
    const double dt = pc.duration / n;
    const ComplexMatrix4 m_plus = raising(pc.target, lv.cos_theta);
    ComplexMatrix4 U = ComplexMatrix4::Identity();
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) * dt;
        ComplexMatrix4 H = drive_term(m_plus, pc.f_R, phase + kTwoPi * delta_d * s);
        H.diagonal() += lv.d.cast<cplx>();
        U = expm_skew_hermitian(H, dt) * U;
    }
    return U;
}

// Lab-frame propagator of a J = 0 piece starting at t0, mapped back into the
// rotating frames.
ComplexMatrix4 piece_lab(const Piece &pc, const DeviceParams &p, const FrequencyOffsets &off, double t0,
                         double phase, double dt_max) {
    if (pc.J != 0) throw std::invalid_argument("lab-frame integration supports J = 0 only");
    const double zL = p.E_Z - p.dE_Z / 2 + off.left;
    const double zR = p.E_Z + p.dE_Z / 2 + off.right;
    const Eigen::Vector4d h0 = zL * sz_diag(Qubit::Left) + zR * sz_diag(Qubit::Right);
    const Eigen::Vector4d frame = frame_frequency(p, Qubit::Left) * sz_diag(Qubit::Left) +
                                  frame_frequency(p, Qubit::Right) * sz_diag(Qubit::Right);
    // U_rot(t0 -> t1) = R(t1) U_lab R(t0)^dagger with R(t) = exp(+i 2 pi H_frame t).
    auto frame_rot = [&](double t) { return diag_phase(-frame, t); };
    if (!pc.driven) return frame_rot(t0 + pc.duration) * diag_phase(h0, pc.duration) * frame_rot(t0).adjoint();

    const auto &ops = spin_operators();
    const ComplexMatrix4 sy = pc.target == Qubit::Left ? ops.sy_l : ops.sy_r;
    const double delta_d = pc.f_d - frame_frequency(p, pc.target);
    const double phi_lab = phase - kTwoPi * delta_d * t0;
    const int n = substeps(pc.duration, std::min(dt_max, 1.0 / (50.0 * p.E_Z)));
    const double dt = pc.duration / n;
    ComplexMatrix4 U = ComplexMatrix4::Identity();
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (i + 0.5) * dt;
        const double cycles = std::fmod(pc.f_d * t, 1.0);
        ComplexMatrix4 H = (2 * pc.f_R * std::cos(kTwoPi * cycles + phi_lab)) * sy;
        H.diagonal() += h0.cast<cplx>();
        U = expm_skew_hermitian(H, dt) * U;
    }
    return frame_rot(t0 + pc.duration) * U * frame_rot(t0).adjoint();
}

ComplexMatrix4 rz_both(const std::array<double, 2> &angles) {
    Vector4c ph;
    for (int k = 0; k < 4; ++k) {
        const double a = angles[0] * sz_of(k, Qubit::Left) + angles[1] * sz_of(k, Qubit::Right);
        ph[k] = std::polar(1.0, -a);
    }
    return ph.asDiagonal();
}

}  // namespace

// --- sequence bookkeeping ---------------------------------------------------------

double duration_of(const PulseSegment &seg) {
    return std::visit(
        [](const auto &s) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, VirtualZ>) {
                return 0.0;
            } else {
                return s.duration;
            }
        },
        seg);
}

double PulseSequence::total_duration() const {
    double t = 0;
    for (const auto &s : segments) t += duration_of(s);
    return t;
}

PulseSequence &PulseSequence::append(const PulseSequence &other) {
    segments.insert(segments.end(), other.segments.begin(), other.segments.end());
    return *this;
}

void PulseSequence::validate() const {
    auto check_burst = [](const MicrowaveBurst &b) {
        if (!(b.rabi_amplitude >= 0)) throw std::invalid_argument("burst: rabi_amplitude must be >= 0");
        if (!(b.frequency >= 0)) throw std::invalid_argument("burst: frequency must be >= 0");
        if (!std::isfinite(b.phase)) throw std::invalid_argument("burst: phase must be finite");
    };
    for (const auto &seg : segments) {
        if (!(duration_of(seg) >= 0) || !std::isfinite(duration_of(seg))) {
            throw std::invalid_argument("segment duration must be finite and >= 0");
        }
        std::visit(
            [&](const auto &s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, MicrowaveBurst>) {
                    check_burst(s);
                } else if constexpr (std::is_same_v<T, DcExchange>) {
                    if (s.J.has_value() == s.V_M.has_value()) {
                        throw std::invalid_argument("exchange segment needs exactly one of J and V_M");
                    }
                    if (s.J && !(*s.J >= 0)) throw std::invalid_argument("exchange J must be >= 0");
                } else if constexpr (std::is_same_v<T, CompositeSegment>) {
                    if (s.microwave) check_burst(*s.microwave);
                    if (s.J && !(*s.J >= 0)) throw std::invalid_argument("composite J must be >= 0");
                } else if constexpr (std::is_same_v<T, VirtualZ>) {
                    if (!std::isfinite(s.angle)) throw std::invalid_argument("virtual Z angle must be finite");
                }
            },
            seg);
    }
}

void NoiseConfig::validate() const {
    if (!(sigma_f_L >= 0) || !(sigma_f_R >= 0)) throw std::invalid_argument("noise: sigmas must be >= 0");
    if (n_samples < 1) throw std::invalid_argument("noise: n_samples must be >= 1");
}

NoiseConfig NoiseConfig::from_t2_star(const DeviceParams &p, int n_samples, std::uint64_t seed) {
    const double k = std::sqrt(2.0) / kTwoPi;
    return {k / p.T2_star_L, k / p.T2_star_R, n_samples, seed};
}

FrequencyOffsets NoiseConfig::sample(int i) const {
    if (sigma_f_L == 0 && sigma_f_R == 0) return {};
    auto rng = make_rng(seed, stream::kQuasiStatic, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> g(0.0, 1.0);
    const double l = g(rng);
    const double r = g(rng);
    return {sigma_f_L * l, sigma_f_R * r};
}

double frame_frequency(const DeviceParams &p, Qubit q) {
    return q == Qubit::Left ? p.E_Z - p.dE_Z / 2 : p.E_Z + p.dE_Z / 2;
}

// --- evolution ------------------------------------------------------------------------

ComplexMatrix4 rotating_frame_hamiltonian(const DeviceParams &p, const PulseSegment &seg, double s,
                                          const FrequencyOffsets &offsets) {
    if (std::holds_alternative<VirtualZ>(seg)) return ComplexMatrix4::Zero();
    const Piece pc = resolve(seg, p);
    const LevelData lv = level_data(p, pc.J, offsets);
    ComplexMatrix4 H = ComplexMatrix4::Zero();
    H.diagonal() = lv.d.cast<cplx>();
    if (pc.driven) {
        const double beta = pc.phase + kTwoPi * (pc.f_d - frame_frequency(p, pc.target)) * s;
        H += drive_term(raising(pc.target, lv.cos_theta), pc.f_R, beta);
    }
    return H;
}

ComplexMatrix4 propagator(const std::vector<PulseSegment> &segments, const DeviceParams &p,
                          const EvolveOptions &opts, const FrequencyOffsets &offsets) {
    if (!(opts.dt_max > 0)) throw std::invalid_argument("evolve: dt_max must be > 0");
    std::array<double, 2> zphase{0.0, 0.0};
    ComplexMatrix4 U = ComplexMatrix4::Identity();
    double t = 0;
    for (const auto &seg : segments) {
        if (const auto *vz = std::get_if<VirtualZ>(&seg)) {
            zphase[vz->target == Qubit::Left ? 0 : 1] += vz->angle;
            continue;
        }
        const Piece pc = resolve(seg, p);
        if (pc.duration <= 0) continue;
        const double phase = pc.phase - zphase[pc.target == Qubit::Left ? 0 : 1];
        ComplexMatrix4 step;
        if (opts.integrator == Integrator::LabFrame) {
            step = piece_lab(pc, p, offsets, t, phase, opts.dt_max);
        } else {
            const LevelData lv = level_data(p, pc.J, offsets);
            const double frame = frame_frequency(p, pc.target);
            step = opts.integrator == Integrator::Exact ? piece_exact(pc, lv, frame, phase)
                                                        : piece_midpoint(pc, lv, frame, phase, opts.dt_max);
        }
        U = step * U;
        t += pc.duration;
    }
    return rz_both(zphase) * U;
}

TwoQubitState evolve(const PulseSequence &seq, const DeviceParams &p, const EvolveOptions &opts,
                     const FrequencyOffsets &offsets) {
    seq.validate();
    const Vector4c out = propagator(seq.segments, p, opts, offsets) * seq.initial_state.amplitudes();
    // Absorb the rounding drift of long products before re-validating the norm.
    return TwoQubitState::normalized(out);
}

std::array<double, 4> evolve_ensemble(const PulseSequence &seq, const DeviceParams &p, const NoiseConfig &noise,
                                      const EvolveOptions &opts) {
    noise.validate();
    seq.validate();
    const int n = noise.n_samples;
    std::vector<std::array<double, 4>> per_sample(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) per_sample[i] = evolve(seq, p, opts, noise.sample(i)).populations();
    std::array<double, 4> mean{};
    for (const auto &s : per_sample) {
        for (int k = 0; k < 4; ++k) mean[k] += s[k];
    }
    for (auto &m : mean) m /= n;
    return mean;
}

std::vector<double> ensemble_p_up(const std::vector<PulseSequence> &sequences, Qubit target, const DeviceParams &p,
                                  const NoiseConfig &noise, const EvolveOptions &opts) {
    noise.validate();
    for (const auto &s : sequences) s.validate();
    const int n = noise.n_samples;
    const std::size_t m = sequences.size();
    std::vector<double> per_sample(static_cast<std::size_t>(n) * m);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const auto off = noise.sample(i);
        for (std::size_t k = 0; k < m; ++k) per_sample[i * m + k] = evolve(sequences[k], p, opts, off).p_up(target);
    }
    std::vector<double> mean(m, 0.0);
    for (int i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) mean[k] += per_sample[i * m + k];
    }
    for (auto &v : mean) v /= n;
    return mean;
}

// --- CNOT ---------------------------------------------------------------------------------

ComplexMatrix4 ideal_cnot() {
    ComplexMatrix4 c = ComplexMatrix4::Zero();
    c(0, 2) = 1;
    c(2, 0) = 1;
    c(1, 1) = 1;
    c(3, 3) = 1;
    return c;
}

double gate_fidelity(const ComplexMatrix4 &U, const ComplexMatrix4 &V) {
    return std::norm((V.adjoint() * U).trace() / 4.0);
}

PulseSequence cnot_sequence(const DeviceParams &p, const CnotCalibration &cal) {
    if (!(cal.tau_p <= cal.tau_dc)) throw std::invalid_argument("cnot_sequence: tau_p must not exceed tau_dc");
    const double pad = 0.5 * (cal.tau_dc - cal.tau_p);
    (void)p;
    PulseSequence seq;
    MicrowaveBurst burst{Qubit::Left, cal.tau_p, cal.drive_frequency, cal.rabi_amplitude, cal.burst_phase};
    seq.add(DcExchange{pad, cal.J_on, std::nullopt});
    seq.add(CompositeSegment{cal.tau_p, burst, cal.J_on});
    seq.add(DcExchange{cal.tau_dc - cal.tau_p - pad, cal.J_on, std::nullopt});
    seq.add(VirtualZ{Qubit::Left, cal.z_left});
    seq.add(VirtualZ{Qubit::Right, cal.z_right});
    return seq;
}

PulseSequence cnot_sequence(const DeviceParams &p, double J_on, double tau_p, double tau_dc,
                            std::pair<double, double> phase_correction) {
    CnotCalibration cal;
    cal.J_on = J_on;
    cal.tau_p = tau_p;
    cal.tau_dc = tau_dc;
    cal.rabi_amplitude = 1.0 / (2 * tau_p * std::cos(mixing_angle(p, J_on)));
    cal.drive_frequency = transition_frequencies(p, J_on).f_L_up;
    cal.burst_phase = -kPi / 2;
    cal.z_left = phase_correction.first;
    cal.z_right = phase_correction.second;
    return cnot_sequence(p, cal);
}

CnotCalibration calibrate_cnot(const DeviceParams &p, double J_on) {
    if (!(J_on > 0)) throw std::invalid_argument("calibrate_cnot: J_on must be > 0");
    CnotCalibration cal;
    cal.J_on = J_on;
    cal.tau_dc = 1.0 / J_on;
    cal.tau_p = std::sqrt(3.0) / (2 * J_on);
    cal.rabi_amplitude = 1.0 / (2 * cal.tau_p * std::cos(mixing_angle(p, J_on)));
    cal.drive_frequency = transition_frequencies(p, J_on).f_L_up;
    cal.burst_phase = -kPi / 2;

    auto gate = [&] { return propagator(cnot_sequence(p, cal).segments, p); };
    // The burst phase moves arg U(0,2) - arg U(2,0) by -2 dphi and leaves the
    // idle branch alone; choose it so the gate is a CNOT up to local Z.
    ComplexMatrix4 U = gate();
    const double r = wrap_phase(std::arg(U(1, 1)) - std::arg(U(3, 3)) - std::arg(U(0, 2)) + std::arg(U(2, 0)));
    cal.burst_phase = wrap_phase(cal.burst_phase - r / 2);
    U = gate();
    const double alpha = std::arg(U(3, 3) / U(1, 1));
    const double beta = std::arg(U(1, 1) / U(0, 2));
    cal.z_left = -alpha;
    cal.z_right = -beta;
    return cal;
}

double conditional_phase(const DeviceParams &p, double J_on, double tau_dc) {
    (void)p;
    return wrap_phase(kTwoPi * J_on * tau_dc);
}

double conditional_phase_evolved(const DeviceParams &p, double J_on, double tau_dc) {
    PulseSequence seq;
    Vector2c plus;
    plus << 1.0, 1.0;
    seq.initial_state = TwoQubitState::product(plus, plus);
    seq.add(DcExchange{tau_dc, J_on, std::nullopt});
    const auto psi = evolve(seq, p);
    return wrap_phase(std::arg(psi[1] / psi[3]) - std::arg(psi[0] / psi[2]));
}

MicrowaveBurst rotation_burst(const DeviceParams &p, Qubit target, double angle, double axis_phase,
                              double rabi_amplitude) {
    if (!(rabi_amplitude > 0)) throw std::invalid_argument("rotation_burst: rabi_amplitude must be > 0");
    if (angle < 0) {
        angle = -angle;
        axis_phase += kPi;
    }
    return {target, angle / (kTwoPi * rabi_amplitude), frame_frequency(p, target), rabi_amplitude,
            axis_phase - kPi / 2};
}

}  // namespace siq
