#pragma once

// Single-qubit Clifford randomized benchmarking on one spin of the pair.

#include "siq/device.hpp"
#include "siq/result.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace siq {

struct RbErrorModel {
    enum class Kind { None, Depolarizing, QuasiStaticDephasing };
    Kind kind = Kind::None;
    /// Depolarizing probability per Clifford: rho -> (1 - r) rho + r I/2 on the target.
    double r = 0;
    /// Quasi-static detuning spread of the target (Hz).
    double sigma_f = 0;
    /// Noise realizations averaged per sequence (dephasing model only).
    int n_noise_samples = 20;

    static RbErrorModel none() { return {}; }
    static RbErrorModel depolarizing(double r) { return {Kind::Depolarizing, r, 0, 1}; }
    static RbErrorModel dephasing(double sigma_f, int n_noise_samples = 20) {
        return {Kind::QuasiStaticDephasing, 0, sigma_f, n_noise_samples};
    }
    void validate() const;
};

struct RbFit {
    double A = 0, B = 0;
    double p_c = 0, p_c_stderr = 0;
    double F_c = 0, F_c_stderr = 0;
};

struct RbResult {
    /// Columns p_up (mean over sequences) and p_up_sem.
    ExperimentResult data;
    /// Empty when the decay fit failed; the raw data are still returned.
    std::optional<RbFit> fit;
};

struct RbOptions {
    std::uint64_t seed = 1;
    /// 0 selects DeviceParams::rabi_frequency.
    double rabi_amplitude = 0;
};

/// Each sequence: N random Cliffords plus a recovery element chosen so that the
/// ideal final state of the target is |up> (initial |dd>). Fits
/// P_up = A p_c^N + B and reports F_c = (1 + p_c)/2.
RbResult run_rb(const DeviceParams &p, Qubit target, const std::vector<int> &n_cliffords_list, int n_sequences,
                const RbErrorModel &model, const RbOptions &opts = {});

/// Survival after N Cliffords and the recovery (N + 1 channel uses) under the
/// depolarizing model: 1/2 + (1/2)(1 - r)^(N + 1).
double rb_depolarizing_survival(double r, int n_cliffords);

}  // namespace siq
