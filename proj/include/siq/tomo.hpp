#pragma once

// Two-qubit state tomography from single-qubit pre-rotations followed by a
// joint Z-basis measurement.
//
// Pre-rotation -> measured single-spin observable:
//   I -> Z,  X90 -> +Y,  Y90 -> -X,  X180 -> -Z
//
// Fidelity follows the square-root convention F = sqrt(<psi|rho|psi>).

#include "siq/device.hpp"
#include "siq/pulses.hpp"
#include "siq/qcore.hpp"

#include <array>
#include <optional>
#include <vector>

namespace siq {

enum class Prerotation { I, X90, Y90, X180 };

struct MeasurementSetting {
    Prerotation left = Prerotation::I;
    Prerotation right = Prerotation::I;
    friend bool operator==(const MeasurementSetting &, const MeasurementSetting &) = default;
};

std::string to_string(Prerotation r);

/// Observable measured after a pre-rotation and its sign.
std::pair<Pauli, int> measured_observable(Prerotation r);

/// The 9 settings {X90, Y90, I} x {X90, Y90, I}.
std::vector<MeasurementSetting> measurement_settings();

struct LabelAssignment {
    PauliLabel label;
    MeasurementSetting setting;
    /// Expectation of `label` = sign * <s_L s_R> (or <s_L>, <s_R>) of the setting.
    int sign = 1;
};

/// One setting per non-identity Pauli label (15 entries).
std::vector<LabelAssignment> tomography_plan();

struct TomographyRecord {
    MeasurementSetting setting;
    /// Outcome probabilities in basis order {uu, ud, du, dd}.
    std::array<double, 4> probabilities{};
};

/// Ideal pre-rotation followed by a Z measurement of rho.
TomographyRecord simulate_record(const ComplexMatrix4 &rho, const MeasurementSetting &setting);
Matrix2c prerotation_matrix(Prerotation r);

struct Reconstruction {
    std::array<double, 16> paulis{};  // indexed by PauliLabel::index(), II = 1
    ComplexMatrix4 raw = ComplexMatrix4::Identity() / 4.0;  // linear inversion, may be unphysical
    DensityMatrix projected = DensityMatrix::maximally_mixed();  // eigenvalues clipped and renormalized
};

/// Linear inversion then physicality projection. Throws std::invalid_argument
/// naming the missing labels if the records do not cover the plan, or if a
/// record's probabilities do not sum to 1.
Reconstruction reconstruct(const std::vector<TomographyRecord> &records);

/// sqrt(<psi|rho|psi>); negative overlaps of unphysical inputs clamp to 0.
double fidelity(const ComplexMatrix4 &rho, const TwoQubitState &target);
inline double fidelity(const DensityMatrix &rho, const TwoQubitState &target) {
    return fidelity(rho.matrix(), target);
}

struct VisibilityModel {
    double V_L = 1;
    double V_R = 1;
    /// Optional per-dot (F_up, F_down); overrides the symmetric V when set.
    std::optional<std::array<double, 2>> asymmetric_L;
    std::optional<std::array<double, 2>> asymmetric_R;
    void validate() const;
};

/// Passes outcome probabilities through a per-qubit confusion matrix. In the
/// symmetric model F_up = F_down = (1 + V)/2, which scales single-spin Pauli
/// expectations by V and two-spin correlators by V_L V_R.
std::array<double, 4> apply_visibility(const std::array<double, 4> &probabilities, const VisibilityModel &model);

/// (|dd> - i|uu>)/sqrt(2).
TwoQubitState bell_target();

struct BellResult {
    Reconstruction reconstruction;
    std::vector<TomographyRecord> records;
    double fidelity_raw = 0;
    double fidelity_projected = 0;
};

/// pi/2_x on the right spin, calibrated CNOT, the 9 pre-rotation settings
/// (pulses at J = 0), readout visibility, reconstruction, fidelity against
/// bell_target().
BellResult bell_experiment(const DeviceParams &p, const VisibilityModel &visibility, const NoiseConfig &noise,
                           const std::optional<CnotCalibration> &cal = std::nullopt);

}  // namespace siq
