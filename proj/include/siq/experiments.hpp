#pragma once

// Measurement protocols as sweeps over the pulse engine. Every driver starts
// from an ideal |dd> and returns an ExperimentResult whose metadata carries
// the protocol name, seed, device hash, parameters and summary statistics.

#include "siq/device.hpp"
#include "siq/pulses.hpp"
#include "siq/result.hpp"

#include <cstdint>
#include <vector>

namespace siq {

std::vector<double> linspace(double a, double b, int n);

/// Fills protocol-independent metadata.
void stamp_metadata(ExperimentResult &r, const DeviceParams &p, std::uint64_t seed, const nlohmann::json &params);

struct DriveOptions {
    /// 0 selects DeviceParams::rabi_frequency.
    double rabi_amplitude = 0;
    NoiseConfig noise{};
    EvolveOptions evolve{};
};

/// P_up(target) over (drive frequency, burst length) at J = 0. Summary:
/// rabi_frequency_fit from the column closest to resonance.
ExperimentResult rabi_chevron(const DeviceParams &p, Qubit target, const std::vector<double> &freq_sweep,
                              const std::vector<double> &time_sweep, const DriveOptions &opts = {});

/// pi/2_x - tau - pi/2_x. Summary: T2_star_fit (Gaussian envelope).
ExperimentResult ramsey(const DeviceParams &p, Qubit target, const std::vector<double> &delay_sweep,
                        const DriveOptions &opts = {});

/// pi/2_x - tau/2 - pi_x - tau/2 - pi/2_(-x); P_up = 1 at zero delay.
/// Summary: min_p_up, mean_p_up.
ExperimentResult hahn_echo(const DeviceParams &p, Qubit target, const std::vector<double> &total_delay_sweep,
                           const DriveOptions &opts = {});

struct SpectroscopyOptions {
    double probe_rabi = 50e3;
    /// Probe length; 0 selects 10 T2*_L.
    double probe_duration = 0;
    /// Right-qubit Rabi frequency; 0 selects DeviceParams::rabi_frequency.
    double control_rabi = 0;
};

/// Right spin driven for tau_R at J = 0, then a weak probe on the left spin at
/// f_p with exchange J(V_M) on. A probe within one linewidth of a branch
/// saturates that branch's population (P_up = 1/2). Summary: J_configured,
/// J_extracted, branch_down, branch_up, linewidth.
ExperimentResult exchange_spectroscopy(const DeviceParams &p, double V_M, const std::vector<double> &tau_R_sweep,
                                       const std::vector<double> &probe_freq_sweep,
                                       const SpectroscopyOptions &opts = {});

struct EchoPhaseOptions {
    /// Length of each echo half; must cover every tau_dc.
    double half_period = 2e-6;
    DriveOptions drive{};
};

/// Hahn echo on `target` with an exchange pulse of length tau_dc at the start
/// of the first half, the other spin prepared in `other`. Two final-pulse
/// quadratures give the accumulated phase; its slope is the signed frequency
/// shift (summary: frequency, frequency_stderr).
ExperimentResult echo_exchange_phase(const DeviceParams &p, Qubit target, double J_on,
                                     const std::vector<double> &tau_dc_sweep, Spin other,
                                     const EchoPhaseOptions &opts = {});

struct EchoSplitting {
    ExperimentResult up, down;
    double splitting = 0;
    double splitting_stderr = 0;
};
EchoSplitting echo_exchange_splitting(const DeviceParams &p, Qubit target, double J_on,
                                      const std::vector<double> &tau_dc_sweep, const EchoPhaseOptions &opts = {});

struct CnotScanOptions {
    double tau_dc = 1e-6;
    double rabi_amplitude = 1.0 / (2 * 130e-9);
    DriveOptions drive{};
};

/// P_up of both spins vs burst length tau_p, burst at f_L|up centered in an
/// exchange window of length tau_dc. Summary: max_p_up_left, min_p_up_left,
/// pi_time_left (first interior maximum above 1/2, NaN if none).
ExperimentResult cnot_calibration(const DeviceParams &p, double J_on, const std::vector<double> &tau_p_sweep,
                                  BasisState input, const CnotScanOptions &opts = {});

/// Prepares |d> (x) Rx(theta)|d> and applies the calibrated CNOT. Summary:
/// max_abs_difference of the two P_up curves, bell_fidelity at theta = pi/2
/// (noiseless, squared-root overlap convention).
ExperimentResult cnot_superposition_scan(const DeviceParams &p, const std::vector<double> &theta_sweep,
                                         const CnotCalibration &cal, const DriveOptions &opts = {});

/// Pulses that take |dd> to the given basis state (pi pulses at J = 0).
std::vector<PulseSegment> prepare_basis_state(const DeviceParams &p, BasisState s, double rabi_amplitude);

}  // namespace siq
