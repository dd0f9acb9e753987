#pragma once

// Monte Carlo of energy-selective single-shot spin readout: a spin-up electron
// tunnels out of the dot after tau_off ~ Exp(gamma_off_up), producing a current
// blip until a spin-down electron tunnels back in after tau_on ~ Exp(gamma_on).
// Traces are sampled, optionally given white + 1/f noise, low-pass filtered,
// and scored by their peak-to-peak current.

#include "siq/config.hpp"
#include "siq/qcore.hpp"
#include "siq/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace siq {

struct NoiseSpectrumConfig {
    /// One-sided white level, current^2/Hz.
    double white_density = 0;
    /// A in S(f) = A / f, current^2 (i.e. current^2/Hz at 1 Hz).
    double one_over_f_amplitude = 0;
    std::uint64_t seed = 0;
};

struct ReadoutParams {
    double gamma_off_up = 2e3;  // 1/s
    double gamma_on = 5e3;      // 1/s
    double T1 = 22e-3;          // s
    double T_read = 5e-3;       // s
    double sample_rate = 50e3;  // 1/s
    double blip_amplitude = 1.0;
    NoiseSpectrumConfig noise{};
    /// Single-pole low-pass cutoff (Hz); <= 0 disables the filter.
    double filter_cutoff = 1e3;
    double T_e = 0.15;  // K
    /// Energy (Hz) between the spin-down level and the reservoir Fermi level
    /// during loading. With the Fermi level centered between the two spin
    /// levels this is half the Zeeman splitting.
    double E_thermal = 7e9;

    /// Throws ConfigError on non-positive rates/times or sample_rate < 20 f_c.
    void validate() const;
    std::size_t n_samples() const;

    /// Keys (all optional): readout_gamma_off, readout_gamma_on, readout_T1,
    /// readout_T_read, readout_sample_rate, readout_blip_amplitude,
    /// readout_white_density, readout_one_over_f, readout_filter_cutoff,
    /// readout_T_e, readout_E_thermal. Other keys are ignored.
    static ReadoutParams from_config(const KeyValueConfig &cfg);
    static const std::vector<std::string> &config_keys();
};

struct TunnelEvents {
    double t_out = 0;  // tunnel-out time after the window opens
    double t_in = 0;   // tunnel-in time
};

struct ReadoutTrace {
    std::vector<double> samples;
    Spin truth = Spin::Down;
    /// Present for spin-up traces that did not relax, whether or not the blip
    /// falls inside the window.
    std::optional<TunnelEvents> events;
    bool relaxed = false;
};

/// Fermi occupation 1/(1 + exp(h E_thermal / (k_B T_e))).
double misinit_probability(const ReadoutParams &rp);

ReadoutTrace generate_trace(const ReadoutParams &rp, Spin spin, Rng &rng);
Spin apply_thermal_misinit(const ReadoutParams &rp, Spin intended, Rng &rng);

/// Gaussian noise with one-sided PSD white + A/f synthesized in the frequency
/// domain (DC bin zero). Returns n samples at `sample_rate`.
std::vector<double> synthesize_noise(const NoiseSpectrumConfig &cfg, std::size_t n, double sample_rate, Rng &rng);
ReadoutTrace add_noise(const ReadoutTrace &trace, const NoiseSpectrumConfig &cfg, double sample_rate, Rng &rng);

/// y[0] = x[0], y[n] = y[n-1] + a (x[n] - y[n-1]), a = 1 - exp(-2 pi f_c / f_s).
std::vector<double> low_pass(const std::vector<double> &x, double cutoff, double sample_rate);
/// Peak-to-peak current of the filtered trace.
double filter_and_score(const ReadoutTrace &trace, const ReadoutParams &rp);

struct FidelityCurve {
    std::vector<double> thresholds;
    std::vector<double> F_up;    // P(score > I_th | up)
    std::vector<double> F_down;  // P(score <= I_th | down)
    std::vector<double> visibility;
    std::size_t best_index = 0;
    double best_visibility() const { return visibility.at(best_index); }
    double best_threshold() const { return thresholds.at(best_index); }
};

FidelityCurve fidelity_curve(const std::vector<double> &up_scores, const std::vector<double> &down_scores,
                             const std::vector<double> &thresholds);

struct DotReadout {
    FidelityCurve curve;
    std::vector<double> up_scores, down_scores;
    /// Fraction of intended-down shots loaded as up.
    double misinit_fraction = 0;
    /// Fraction of intended-up shots lost to relaxation (before or during the read).
    double relaxation_fraction = 0;
};

struct ReadoutSweep {
    DotReadout left, right;
};

/// n_traces of each intended spin per dot. The right dot is read second and
/// its spin-up survives the wait with probability exp(-partner_delay/T1).
/// Thresholds default to 401 points on [0, 2 blip_amplitude].
ReadoutSweep fidelity_sweep(const ReadoutParams &rp, int n_traces, double sequential_partner_delay,
                            std::uint64_t seed, std::vector<double> thresholds = {});

/// Zero-noise, unfiltered F_up at threshold 0+: survival times detection.
double analytic_f_up_zero_threshold(const ReadoutParams &rp);

struct ReadoutCalibration {
    double white_density = 0;
    ReadoutSweep sweep;
    double target_left = 0, target_right = 0;
};

/// Bisects the white-noise level so the left dot's best visibility hits
/// target_left; the right dot is then simulated with the same noise.
ReadoutCalibration calibrate_readout_noise(ReadoutParams rp, int n_traces, double sequential_partner_delay,
                                           std::uint64_t seed, double target_left = 0.85,
                                           double target_right = 0.78);

inline constexpr double kDefaultPartnerDelay = 1.7e-3;

}  // namespace siq
