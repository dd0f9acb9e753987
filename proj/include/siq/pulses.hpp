#pragma once

// Pulse sequences and their time evolution.
//
// Frames. Each spin has its own rotating frame at its J = 0 Zeeman frequency,
// F_L = E_Z - dE_Z/2 and F_R = E_Z + dE_Z/2. States returned by evolve() are
// expressed in these frames, so an undriven spin at J = 0 does not precess.
//
// Exchange. Exchange pulses are switched adiabatically with respect to the
// dE_Z gap: while J > 0 the amplitudes live on the dressed eigenstates, which
// are labeled by the bare state they connect to, and return to the bare basis
// when J goes back to zero. The pulse-induced z-field shifts B1_zL/B1_zR apply
// only while J > 0.
//
// Drive. A burst on `target` at frequency f_d with Rabi frequency f_R and phase
// phi contributes, in the rotating-wave approximation,
//   H_d = (f_R / 2i) [exp(-i beta) M+ - h.c.],  beta(s) = 2 pi (f_d - F_t) s + phi,
// where M+ is the target raising operator restricted to transitions that flip
// only the target label (matrix elements cos(theta) of the dressed states) and
// s is the time since the burst started. phi = -pi/2 rotates about +x, phi = 0
// about +y. Crosstalk onto the other spin is not modeled.

#include "siq/device.hpp"
#include "siq/qcore.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace siq {

struct MicrowaveBurst {
    Qubit target = Qubit::Left;
    double duration = 0;
    double frequency = 0;       // Hz, lab frame
    double rabi_amplitude = 0;  // Hz
    double phase = 0;           // rad
};

/// Square exchange pulse given either as J (Hz) or as a gate voltage V_M
/// (volts, mapped through the device exchange law).
struct DcExchange {
    double duration = 0;
    std::optional<double> J;
    std::optional<double> V_M;
};

struct Idle {
    double duration = 0;
};

/// Simultaneous drive and exchange. The burst's own duration is ignored; it
/// lasts for the whole segment.
struct CompositeSegment {
    double duration = 0;
    std::optional<MicrowaveBurst> microwave;
    std::optional<double> J;
};

/// Zero-duration frame change equivalent to Rz(angle) = exp(-i angle S_z) on
/// the target. Implemented by shifting later drive phases by -angle.
struct VirtualZ {
    Qubit target = Qubit::Left;
    double angle = 0;
};

using PulseSegment = std::variant<MicrowaveBurst, DcExchange, Idle, CompositeSegment, VirtualZ>;

double duration_of(const PulseSegment &seg);

struct PulseSequence {
    TwoQubitState initial_state = TwoQubitState::basis(BasisState::DownDown);
    std::vector<PulseSegment> segments;

    double total_duration() const;
    /// Throws std::invalid_argument on negative durations or amplitudes, or on
    /// a DcExchange with neither/both of J and V_M set.
    void validate() const;

    PulseSequence &add(PulseSegment seg) {
        segments.push_back(std::move(seg));
        return *this;
    }
    PulseSequence &append(const PulseSequence &other);
};

/// Quasi-static frequency offsets of the two spins for one noise realization.
struct FrequencyOffsets {
    double left = 0;
    double right = 0;
};

struct NoiseConfig {
    double sigma_f_L = 0;  // Hz
    double sigma_f_R = 0;  // Hz
    int n_samples = 1;
    std::uint64_t seed = 0;

    void validate() const;
    /// sigma_f = sqrt(2) / (2 pi T2*), giving a Gaussian Ramsey envelope
    /// exp(-(t/T2*)^2).
    static NoiseConfig from_t2_star(const DeviceParams &p, int n_samples, std::uint64_t seed);
    /// Offsets of sample i, drawn from its own (seed, i) stream.
    FrequencyOffsets sample(int i) const;
};

enum class Integrator {
    /// Exact exponential of each constant-drive piece in the drive's
    /// co-rotating frame.
    Exact,
    /// Piecewise-constant Hamiltonian evaluated at sub-step midpoints.
    Midpoint,
    /// No rotating-wave approximation; full Zeeman Hamiltonian with a linearly
    /// polarized drive. Validation only, requires J = 0 throughout.
    LabFrame,
};

struct EvolveOptions {
    double dt_max = 1e-9;
    Integrator integrator = Integrator::Exact;
};

/// Rotating-frame Hamiltonian (Hz) of `seg` at time s after the segment start,
/// in the labeled eigenbasis of the exchange term.
ComplexMatrix4 rotating_frame_hamiltonian(const DeviceParams &p, const PulseSegment &seg, double s,
                                          const FrequencyOffsets &offsets = {});

TwoQubitState evolve(const PulseSequence &seq, const DeviceParams &p, const EvolveOptions &opts = {},
                     const FrequencyOffsets &offsets = {});

/// Propagator of the segment list (columns = evolved basis states).
ComplexMatrix4 propagator(const std::vector<PulseSegment> &segments, const DeviceParams &p,
                          const EvolveOptions &opts = {}, const FrequencyOffsets &offsets = {});

/// Mean populations over noise.n_samples realizations. Bitwise reproducible
/// for a given seed regardless of thread count.
std::array<double, 4> evolve_ensemble(const PulseSequence &seq, const DeviceParams &p, const NoiseConfig &noise,
                                      const EvolveOptions &opts = {});

/// Ensemble of sweeps: for each sweep point k, the mean over the noise
/// realizations of P_up(target) after sequences[k]. Realization i uses the
/// same offsets for every point.
std::vector<double> ensemble_p_up(const std::vector<PulseSequence> &sequences, Qubit target,
                                  const DeviceParams &p, const NoiseConfig &noise, const EvolveOptions &opts = {});

// --- CNOT ---------------------------------------------------------------------

/// Resonant CNOT: right spin is the control, left spin the target, driven on
/// f_L|up while exchange is on.
struct CnotCalibration {
    double J_on = 0;
    double tau_dc = 0;
    double tau_p = 0;
    double rabi_amplitude = 0;
    double drive_frequency = 0;
    double burst_phase = 0;
    /// Virtual-Z angles applied after the gate.
    double z_left = 0;
    double z_right = 0;
};

inline constexpr double kCnotExchange = 1.0 / 204e-9;

/// tau_dc = 1/J; tau_p = sqrt(3)/(2 J) so the off-resonant f_L|down line
/// (detuned by J) completes a full generalized Rabi cycle; the burst phase and
/// the two virtual-Z corrections are solved from the noiseless propagator.
CnotCalibration calibrate_cnot(const DeviceParams &p, double J_on = kCnotExchange);

/// Exchange at J_on for tau_dc with a burst at f_L|up of length tau_p centered
/// in the window, followed by the virtual-Z corrections.
PulseSequence cnot_sequence(const DeviceParams &p, const CnotCalibration &cal);
/// Uncalibrated variant: Rabi amplitude 1/(2 tau_p cos theta), burst phase
/// -pi/2 (x rotation), and the given (left, right) virtual-Z corrections.
PulseSequence cnot_sequence(const DeviceParams &p, double J_on, double tau_p, double tau_dc,
                            std::pair<double, double> phase_correction);

/// CNOT with the right spin as control, in the {uu, ud, du, dd} basis.
ComplexMatrix4 ideal_cnot();
/// |tr(V^dagger U) / 4|^2.
double gate_fidelity(const ComplexMatrix4 &U, const ComplexMatrix4 &V);

/// Differential phase 2 pi J tau_dc between the control-down and control-up
/// branches of the target coherence, wrapped into (-pi, pi].
double conditional_phase(const DeviceParams &p, double J_on, double tau_dc);
/// Same quantity measured by evolving superposition inputs through a bare
/// exchange pulse.
double conditional_phase_evolved(const DeviceParams &p, double J_on, double tau_dc);

// --- helpers ------------------------------------------------------------------

/// Burst resonant with `target` at J = 0 for a rotation of `angle` about the
/// equatorial axis at `axis_phase` (0 = x, pi/2 = y).
MicrowaveBurst rotation_burst(const DeviceParams &p, Qubit target, double angle, double axis_phase,
                              double rabi_amplitude);

/// Rotating-frame frequency of each spin.
double frame_frequency(const DeviceParams &p, Qubit q);

}  // namespace siq
