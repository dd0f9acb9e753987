#pragma once

// Static model of the two-electron double dot: Hamiltonian, eigenenergies,
// ESR transition frequencies and the exchange law J(V_M).
//
// Hamiltonian (Hz):
//   H = J (S_L . S_R - 1/4) + E_zL S_zL + E_zR S_zR
//   E_zL = E_Z - dE_Z/2 + B1_zL,  E_zR = E_Z + dE_Z/2 + B1_zR
// The right dot sits at the higher Zeeman frequency.

#include "siq/config.hpp"
#include "siq/qcore.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace siq {

/// J(V) = c (V_M0 - V)/(V - V_M1)^2 exp(-sqrt(|V - V_M0| / V_on)).
/// Voltages in volts; c in Hz*V so J comes out in Hz.
struct ExchangeFitParams {
    double c = 0;
    double V_M0 = 0;
    double V_M1 = 0;
    double V_on = 0;

    void validate() const;
};

/// Shipped exchange law: J(390 mV) = 0.3 MHz, J(410 mV) = 10 MHz.
ExchangeFitParams default_exchange_fit();
/// The printed parameter set read as millivolts (V_M0 = 412.8 mV,
/// V_M1 = 451.8 mV, V_on = 0.559 mV) with c = 16000 MHz*mV. Useful for the
/// curve shape only; the absolute scale of c is not interpretable.
ExchangeFitParams printed_exchange_fit();

struct DeviceParams {
    double E_Z = 14e9;
    double dE_Z = 200e6;
    double B1_zL = 0;
    double B1_zR = 0;
    double E_CL = 1.4508e12;  // 6 meV
    double E_CR = 1.4508e12;
    double T1 = 22e-3;
    double T2_star_L = 1.2e-6;
    double T2_star_R = 1.4e-6;
    double T2_echo_L = 22e-6;
    double T2_echo_R = 80e-6;
    /// Default single-qubit Rabi frequency for the experiment drivers.
    double rabi_frequency = 4.8e6;
    ExchangeFitParams exchange_fit = default_exchange_fit();

    /// Throws ConfigError on non-physical values.
    void validate() const;
    /// FNV-1a over the canonical text form; stable across runs and platforms.
    std::uint64_t hash() const;

    double zeeman_left() const { return E_Z - dE_Z / 2 + B1_zL; }
    double zeeman_right() const { return E_Z + dE_Z / 2 + B1_zR; }
    double t2_star(Qubit q) const { return q == Qubit::Left ? T2_star_L : T2_star_R; }

    /// Reads keys E_Z, dE_Z, B1_zL, B1_zR, E_CL, E_CR, T1, T2_star_L,
    /// T2_star_R, T2_echo_L, T2_echo_R, rabi_frequency, exchange_c,
    /// exchange_V_M0, exchange_V_M1, exchange_V_on. Missing keys keep their
    /// defaults; unknown keys are an error.
    static DeviceParams from_config(const KeyValueConfig &cfg);
    static DeviceParams load(const std::string &path);
    /// Canonical key = value text, round-trips through from_config.
    std::string to_config_text() const;
};

/// Returns a message if dE_Z < 5 J (the model assumes dE_Z >> J).
std::optional<std::string> regime_warning(const DeviceParams &p, double J);

/// Hamiltonian at exchange J (Hz, >= 0). B1 shifts are taken from `p` as is.
ComplexMatrix4 build_static_hamiltonian(const DeviceParams &p, double J);

struct EnergyLevels {
    double e_uu = 0, e_ud = 0, e_du = 0, e_dd = 0;
    double sum() const { return e_uu + e_ud + e_du + e_dd; }
    double operator[](int basis) const;
};

/// Thrown when an eigenvector has no dominant basis component (J >~ dE_Z).
class LabelingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Numerical eigenvalues labeled by their dominant basis state. Throws
/// LabelingError if any dominant weight is below 0.75.
EnergyLevels energy_levels(const DeviceParams &p, double J);
/// Closed forms. Parallel states: +-(E_Z + S) with S = (B1_zL + B1_zR)/2.
/// Antiparallel: (-J -+ R)/2 with R = sqrt(J^2 + (dE_Z + B1_zR - B1_zL)^2);
/// the lower one is the dressed |ud>.
EnergyLevels energy_levels_analytic(const DeviceParams &p, double J);

/// Dressed antiparallel eigenvectors: |ud~> = cos(th)|ud> - sin(th)|du>,
/// |du~> = sin(th)|ud> + cos(th)|du>, tan(2 th) = J / Delta.
double mixing_angle(const DeviceParams &p, double J);

struct TransitionFrequencies {
    double f_L_down = 0;  // left spin flip, right spin down
    double f_L_up = 0;    // left spin flip, right spin up
    double f_R_down = 0;  // right spin flip, left spin down
    double f_R_up = 0;    // right spin flip, left spin up
};

/// From the numerical eigenvalues.
TransitionFrequencies transition_frequencies(const DeviceParams &p, double J);
TransitionFrequencies transition_frequencies_analytic(const DeviceParams &p, double J);

/// Frequency of the `target` transition when the other spin is `other`.
double transition_frequency(const TransitionFrequencies &f, Qubit target, Spin other);

/// J = 2 t_c^2 (E_CL + E_CR) / ((E_CL + eps)(E_CR - eps)), all in Hz.
/// Throws std::domain_error if |eps| >= min(E_C); logs a warning when
/// t_c > 0.1 min(E_C).
double exchange_from_detuning(double E_CL, double E_CR, double t_c, double eps);

/// Throws std::domain_error at V = V_M1 or for V > V_M0 (negative J).
double exchange_vs_vm(const ExchangeFitParams &fit, double V_M);

struct ExchangeSample {
    double V_M = 0;  // volts
    double J = 0;    // Hz
};

struct ExchangeLawFit {
    ExchangeFitParams params;
    /// Norm of the log-J residual vector.
    double residual_norm = 0;
    int iterations = 0;
};

/// Least-squares fit in log J. Requires >= 4 samples with J > 0 spanning at
/// least two decades; throws std::invalid_argument otherwise and FitError if
/// the optimizer does not converge.
ExchangeLawFit fit_exchange_law(std::span<const ExchangeSample> samples);

}  // namespace siq
