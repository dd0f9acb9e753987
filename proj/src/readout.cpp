#include "siq/readout.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace siq {

namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kBoltzmann = 1.380649e-23;

struct KeyRef {
    const char *key;
    double ReadoutParams::*ptr;
};

constexpr KeyRef kKeys[] = {
    {"readout_gamma_off", &ReadoutParams::gamma_off_up},
    {"readout_gamma_on", &ReadoutParams::gamma_on},
    {"readout_T1", &ReadoutParams::T1},
    {"readout_T_read", &ReadoutParams::T_read},
    {"readout_sample_rate", &ReadoutParams::sample_rate},
    {"readout_blip_amplitude", &ReadoutParams::blip_amplitude},
    {"readout_filter_cutoff", &ReadoutParams::filter_cutoff},
    {"readout_T_e", &ReadoutParams::T_e},
    {"readout_E_thermal", &ReadoutParams::E_thermal},
};

}  // namespace

void ReadoutParams::validate() const {
    auto positive = [](double v, const char *what) {
        if (!(v > 0) || !std::isfinite(v)) throw ConfigError(std::string("readout: ") + what + " must be > 0");
    };
    positive(gamma_off_up, "gamma_off_up");
    positive(gamma_on, "gamma_on");
    positive(T1, "T1");
    positive(T_read, "T_read");
    positive(sample_rate, "sample_rate");
    positive(blip_amplitude, "blip_amplitude");
    if (!(T_e >= 0)) throw ConfigError("readout: T_e must be >= 0");
    if (!(E_thermal > 0)) throw ConfigError("readout: E_thermal must be > 0");
    if (!(noise.white_density >= 0) || !(noise.one_over_f_amplitude >= 0)) {
        throw ConfigError("readout: noise densities must be >= 0");
    }
    if (filter_cutoff > 0 && sample_rate < 20 * filter_cutoff) {
        throw ConfigError("readout: sample_rate must be at least 20x the filter cutoff");
    }
    if (n_samples() < 2) throw ConfigError("readout: window holds fewer than two samples");
}

std::size_t ReadoutParams::n_samples() const {
    return static_cast<std::size_t>(std::llround(T_read * sample_rate));
}

const std::vector<std::string> &ReadoutParams::config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto &r : kKeys) k.push_back(r.key);
        k.push_back("readout_white_density");
        k.push_back("readout_one_over_f");
        return k;
    }();
    return keys;
}

ReadoutParams ReadoutParams::from_config(const KeyValueConfig &cfg) {
    ReadoutParams rp;
    for (const auto &k : kKeys) {
        if (auto v = cfg.get_double(k.key)) rp.*k.ptr = *v;
    }
    if (auto v = cfg.get_double("readout_white_density")) rp.noise.white_density = *v;
    if (auto v = cfg.get_double("readout_one_over_f")) rp.noise.one_over_f_amplitude = *v;
    rp.validate();
    return rp;
}

double misinit_probability(const ReadoutParams &rp) {
    if (rp.T_e <= 0) return 0.0;
    const double x = kPlanck * rp.E_thermal / (kBoltzmann * rp.T_e);
    return 1.0 / (1.0 + std::exp(x));
}

Spin apply_thermal_misinit(const ReadoutParams &rp, Spin intended, Rng &rng) {
    if (intended == Spin::Up) return Spin::Up;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < misinit_probability(rp) ? Spin::Up : Spin::Down;
}

ReadoutTrace generate_trace(const ReadoutParams &rp, Spin spin, Rng &rng) {
    ReadoutTrace tr;
    tr.truth = spin;
    const std::size_t n = rp.n_samples();
    tr.samples.assign(n, 0.0);
    if (spin == Spin::Down) return tr;

    std::exponential_distribution<double> t_off(rp.gamma_off_up), t_on(rp.gamma_on);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double tau_off = t_off(rng);
    if (u(rng) < 1.0 - std::exp(-tau_off / rp.T1)) {
        tr.relaxed = true;
        return tr;
    }
    const double t_in = tau_off + t_on(rng);
    tr.events = TunnelEvents{tau_off, t_in};

    // Each sample is the blip averaged over its bin.
    const double dt = 1.0 / rp.sample_rate;
    if (tau_off >= rp.T_read) return tr;
    const std::size_t first = static_cast<std::size_t>(tau_off / dt);
    for (std::size_t i = first; i < n; ++i) {
        const double a = i * dt, b = (i + 1) * dt;
        if (a >= t_in) break;
        const double overlap = std::min(b, t_in) - std::max(a, tau_off);
        if (overlap > 0) tr.samples[i] = rp.blip_amplitude * overlap / dt;
    }
    return tr;
}

std::vector<double> synthesize_noise(const NoiseSpectrumConfig &cfg, std::size_t n, double sample_rate, Rng &rng) {
    std::vector<double> out(n, 0.0);
    if ((cfg.white_density == 0 && cfg.one_over_f_amplitude == 0) || n < 2) return out;
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> spec(n, 0.0);
    const double N = static_cast<double>(n);
    auto psd = [&](std::size_t k) {
        const double f = k * sample_rate / N;
        return cfg.white_density + cfg.one_over_f_amplitude / f;
    };
    // E|X_k|^2 = S(f_k) f_s N / 2 so that the variance is the integral of S.
    for (std::size_t k = 1; 2 * k < n; ++k) {
        const double s = std::sqrt(psd(k) * sample_rate * N / 4);
        const double re = g(rng), im = g(rng);
        spec[k] = {s * re, s * im};
        spec[n - k] = std::conj(spec[k]);
    }
    if (n % 2 == 0) spec[n / 2] = std::sqrt(psd(n / 2) * sample_rate * N) * g(rng);
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> time;
    fft.inv(time, spec);
    for (std::size_t i = 0; i < n; ++i) out[i] = time[i].real();
    return out;
}

ReadoutTrace add_noise(const ReadoutTrace &trace, const NoiseSpectrumConfig &cfg, double sample_rate, Rng &rng) {
    ReadoutTrace out = trace;
    const auto noise = synthesize_noise(cfg, trace.samples.size(), sample_rate, rng);
    for (std::size_t i = 0; i < noise.size(); ++i) out.samples[i] += noise[i];
    return out;
}

std::vector<double> low_pass(const std::vector<double> &x, double cutoff, double sample_rate) {
    if (cutoff <= 0 || x.empty()) return x;
    const double a = 1.0 - std::exp(-kTwoPi * cutoff / sample_rate);
    std::vector<double> y(x.size());
    y[0] = x[0];
    for (std::size_t i = 1; i < x.size(); ++i) y[i] = y[i - 1] + a * (x[i] - y[i - 1]);
    return y;
}

double filter_and_score(const ReadoutTrace &trace, const ReadoutParams &rp) {
    if (trace.samples.empty()) return 0.0;
    const auto y = low_pass(trace.samples, rp.filter_cutoff, rp.sample_rate);
    const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
    return *mx - *mn;
}

FidelityCurve fidelity_curve(const std::vector<double> &up_scores, const std::vector<double> &down_scores,
                             const std::vector<double> &thresholds) {
    if (up_scores.empty() || down_scores.empty()) throw std::invalid_argument("fidelity_curve: empty score set");
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw std::invalid_argument("fidelity_curve: thresholds must be ascending");
    }
    std::vector<double> up = up_scores, down = down_scores;
    std::sort(up.begin(), up.end());
    std::sort(down.begin(), down.end());
    FidelityCurve c;
    c.thresholds = thresholds;
    for (const double th : thresholds) {
        const auto n_up_le = std::upper_bound(up.begin(), up.end(), th) - up.begin();
        const auto n_down_le = std::upper_bound(down.begin(), down.end(), th) - down.begin();
        const double fu = 1.0 - static_cast<double>(n_up_le) / up.size();
        const double fd = static_cast<double>(n_down_le) / down.size();
        c.F_up.push_back(fu);
        c.F_down.push_back(fd);
        c.visibility.push_back(fu + fd - 1.0);
    }
    c.best_index = static_cast<std::size_t>(std::max_element(c.visibility.begin(), c.visibility.end()) -
                                            c.visibility.begin());
    return c;
}

namespace {

DotReadout simulate_dot(const ReadoutParams &rp, int n_traces, double extra_delay, std::uint64_t seed, int dot,
                        const std::vector<double> &thresholds) {
    const int total = 2 * n_traces;
    std::vector<double> scores(total);
    std::vector<char> misinit(total, 0), lost(total, 0);
    const std::uint64_t noise_seed = derive_seed(seed, stream::kReadoutNoise, rp.noise.seed);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < total; ++i) {
        const bool want_up = i < n_traces;
        const std::uint64_t index = static_cast<std::uint64_t>(dot) * total + i;
        auto rng = make_rng(seed, stream::kReadoutTrace, index);
        Spin actual = apply_thermal_misinit(rp, want_up ? Spin::Up : Spin::Down, rng);
        if (!want_up && actual == Spin::Up) misinit[i] = 1;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (actual == Spin::Up && extra_delay > 0 && u(rng) >= std::exp(-extra_delay / rp.T1)) {
            actual = Spin::Down;
            lost[i] = 1;
        }
        auto tr = generate_trace(rp, actual, rng);
        if (tr.relaxed) lost[i] = 1;
        auto noise_rng = make_rng(noise_seed, stream::kReadoutNoise, index);
        tr = add_noise(tr, rp.noise, rp.sample_rate, noise_rng);
        scores[i] = filter_and_score(tr, rp);
    }
    DotReadout out;
    out.up_scores.assign(scores.begin(), scores.begin() + n_traces);
    out.down_scores.assign(scores.begin() + n_traces, scores.end());
    int n_mis = 0, n_lost = 0;
    for (int i = 0; i < n_traces; ++i) n_lost += lost[i];
    for (int i = n_traces; i < total; ++i) n_mis += misinit[i];
    out.misinit_fraction = static_cast<double>(n_mis) / n_traces;
    out.relaxation_fraction = static_cast<double>(n_lost) / n_traces;
    out.curve = fidelity_curve(out.up_scores, out.down_scores, thresholds);
    return out;
}

std::vector<double> default_thresholds(const ReadoutParams &rp) {
    std::vector<double> th(401);
    for (int i = 0; i < 401; ++i) th[i] = 2.0 * rp.blip_amplitude * i / 400;
    return th;
}

}  // namespace

ReadoutSweep fidelity_sweep(const ReadoutParams &rp, int n_traces, double sequential_partner_delay,
                            std::uint64_t seed, std::vector<double> thresholds) {
    rp.validate();
    if (n_traces < 1) throw std::invalid_argument("fidelity_sweep: n_traces must be >= 1");
    if (!(sequential_partner_delay >= 0)) throw std::invalid_argument("fidelity_sweep: delay must be >= 0");
    if (thresholds.empty()) thresholds = default_thresholds(rp);
    return {simulate_dot(rp, n_traces, 0.0, seed, 0, thresholds),
            simulate_dot(rp, n_traces, sequential_partner_delay, seed, 1, thresholds)};
}

double analytic_f_up_zero_threshold(const ReadoutParams &rp) {
    const double g = rp.gamma_off_up + 1.0 / rp.T1;
    return rp.gamma_off_up / g * (1.0 - std::exp(-g * rp.T_read));
}

ReadoutCalibration calibrate_readout_noise(ReadoutParams rp, int n_traces, double sequential_partner_delay,
                                           std::uint64_t seed, double target_left, double target_right) {
    rp.validate();
    const auto th = default_thresholds(rp);
    auto left_visibility = [&](double log_s) {
        ReadoutParams q = rp;
        q.noise.white_density = std::pow(10.0, log_s);
        return simulate_dot(q, n_traces, 0.0, seed, 0, th).curve.best_visibility();
    };
    // Visibility falls monotonically with the noise level.
    double lo = -12, hi = 0;
    if (left_visibility(lo) > target_left) {
        for (int it = 0; it < 40 && hi - lo > 1e-3; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double v = left_visibility(mid);
            (v > target_left ? lo : hi) = mid;
        }
    } else {
        hi = lo;
    }
    ReadoutCalibration out;
    rp.noise.white_density = std::pow(10.0, 0.5 * (lo + hi));
    out.white_density = rp.noise.white_density;
    out.sweep = fidelity_sweep(rp, n_traces, sequential_partner_delay, seed, th);
    out.target_left = target_left;
    out.target_right = target_right;
    return out;
}

}  // namespace siq
