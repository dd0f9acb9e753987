#include "siq/experiments.hpp"

#include "siq/fit.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace siq {

namespace {

constexpr double kPi = kTwoPi / 2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rabi_of(const DeviceParams &p, const DriveOptions &o) {
    return o.rabi_amplitude > 0 ? o.rabi_amplitude : p.rabi_frequency;
}

nlohmann::json noise_json(const NoiseConfig &n) {
    return {{"sigma_f_L", n.sigma_f_L}, {"sigma_f_R", n.sigma_f_R}, {"n_samples", n.n_samples}};
}

std::vector<double> p_up_of(const std::vector<PulseSequence> &seqs, Qubit q, const DeviceParams &p,
                            const DriveOptions &o) {
    return ensemble_p_up(seqs, q, p, o.noise, o.evolve);
}

}  // namespace

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

void stamp_metadata(ExperimentResult &r, const DeviceParams &p, std::uint64_t seed, const nlohmann::json &params) {
    auto &m = r.metadata();
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(p.hash()));
    m["seed"] = seed;
    m["device_hash"] = hash;
    nlohmann::json dev = nlohmann::json::object();
    std::istringstream in(p.to_config_text());
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) dev[line.substr(0, eq)] = std::stod(line.substr(eq + 3));
    }
    m["device"] = dev;
    m["params"] = params;
}

std::vector<PulseSegment> prepare_basis_state(const DeviceParams &p, BasisState s, double rabi_amplitude) {
    std::vector<PulseSegment> out;
    const int idx = static_cast<int>(s);
    for (const Qubit q : {Qubit::Left, Qubit::Right}) {
        if (spin_of(idx, q) == Spin::Up) out.push_back(rotation_burst(p, q, kPi, 0.0, rabi_amplitude));
    }
    return out;
}

// --- single-qubit protocols -------------------------------------------------------------

ExperimentResult rabi_chevron(const DeviceParams &p, Qubit target, const std::vector<double> &freq_sweep,
                              const std::vector<double> &time_sweep, const DriveOptions &opts) {
    const double rabi = rabi_of(p, opts);
    std::vector<PulseSequence> seqs;
    for (const double f : freq_sweep) {
        for (const double t : time_sweep) {
            PulseSequence s;
            s.add(MicrowaveBurst{target, t, f, rabi, -kPi / 2});
            seqs.push_back(std::move(s));
        }
    }
    ExperimentResult r("rabi_chevron", {{"drive_frequency", "Hz", freq_sweep}, {"burst_time", "s", time_sweep}});
    r.add_column("p_up", "", p_up_of(seqs, target, p, opts), true);
    stamp_metadata(r, p, opts.noise.seed,
                   {{"target", std::string(to_string(target))}, {"rabi_amplitude", rabi}, {"noise", noise_json(opts.noise)}});

    const double f0 = frame_frequency(p, target);
    std::size_t best = 0;
    for (std::size_t i = 0; i < freq_sweep.size(); ++i) {
        if (std::abs(freq_sweep[i] - f0) < std::abs(freq_sweep[best] - f0)) best = i;
    }
    r.set_summary("resonance_column_frequency", freq_sweep[best]);
    if (time_sweep.size() >= 5) {
        std::vector<double> col(time_sweep.size());
        for (std::size_t j = 0; j < col.size(); ++j) col[j] = r.at("p_up", best, j);
        try {
            const auto fit = fit_sinusoid(time_sweep, col);
            r.set_summary("rabi_frequency_fit", fit.frequency);
            r.set_summary("rabi_frequency_stderr", fit.frequency_stderr);
        } catch (const FitError &e) {
            r.add_warning(std::string("Rabi fit failed: ") + e.what());
        }
    }
    return r;
}

ExperimentResult ramsey(const DeviceParams &p, Qubit target, const std::vector<double> &delay_sweep,
                        const DriveOptions &opts) {
    const double rabi = rabi_of(p, opts);
    const auto half = rotation_burst(p, target, kPi / 2, 0.0, rabi);
    std::vector<PulseSequence> seqs;
    for (const double tau : delay_sweep) {
        PulseSequence s;
        s.add(half).add(Idle{tau}).add(half);
        seqs.push_back(std::move(s));
    }
    ExperimentResult r("ramsey", {{"delay", "s", delay_sweep}});
    r.add_column("p_up", "", p_up_of(seqs, target, p, opts), true);
    stamp_metadata(r, p, opts.noise.seed,
                   {{"target", std::string(to_string(target))}, {"rabi_amplitude", rabi}, {"noise", noise_json(opts.noise)}});
    // A finite pi/2 pulse of length t accumulates detuning phase like a free
    // delay of 2t/pi, so the fit uses the effective precession time.
    const double t_offset = 4 * half.duration / kPi;
    r.set_summary("effective_delay_offset", t_offset);
    if (delay_sweep.size() >= 4) {
        try {
            std::vector<double> t_eff;
            for (const double tau : delay_sweep) t_eff.push_back(tau + t_offset);
            const auto fit = fit_gaussian_decay(t_eff, r.column("p_up").values);
            r.set_summary("T2_star_fit", fit.T);
            r.set_summary("T2_star_stderr", fit.T_stderr);
        } catch (const FitError &e) {
            r.add_warning(std::string("Ramsey fit failed: ") + e.what());
        }
    }
    r.set_summary("T2_star_configured", p.t2_star(target));
    return r;
}

ExperimentResult hahn_echo(const DeviceParams &p, Qubit target, const std::vector<double> &total_delay_sweep,
                           const DriveOptions &opts) {
    const double rabi = rabi_of(p, opts);
    const auto x90 = rotation_burst(p, target, kPi / 2, 0.0, rabi);
    const auto x180 = rotation_burst(p, target, kPi, 0.0, rabi);
    const auto mx90 = rotation_burst(p, target, kPi / 2, kPi, rabi);
    std::vector<PulseSequence> seqs;
    for (const double tau : total_delay_sweep) {
        PulseSequence s;
        s.add(x90).add(Idle{tau / 2}).add(x180).add(Idle{tau / 2}).add(mx90);
        seqs.push_back(std::move(s));
    }
    ExperimentResult r("hahn_echo", {{"total_delay", "s", total_delay_sweep}});
    r.add_column("p_up", "", p_up_of(seqs, target, p, opts), true);
    stamp_metadata(r, p, opts.noise.seed,
                   {{"target", std::string(to_string(target))}, {"rabi_amplitude", rabi}, {"noise", noise_json(opts.noise)}});
    const auto &v = r.column("p_up").values;
    r.set_summary("min_p_up", *std::min_element(v.begin(), v.end()));
    double mean = 0;
    for (const double x : v) mean += x;
    r.set_summary("mean_p_up", mean / v.size());
    return r;
}

// --- exchange -----------------------------------------------------------------------------------

ExperimentResult exchange_spectroscopy(const DeviceParams &p, double V_M, const std::vector<double> &tau_R_sweep,
                                       const std::vector<double> &probe_freq_sweep, const SpectroscopyOptions &opts) {
    const double J = exchange_vs_vm(p.exchange_fit, V_M);
    const double tau_L = opts.probe_duration > 0 ? opts.probe_duration : 10 * p.T2_star_L;
    const double control_rabi = opts.control_rabi > 0 ? opts.control_rabi : p.rabi_frequency;
    const double linewidth = std::max(1.0 / (kPi * tau_L), opts.probe_rabi);
    const auto f = transition_frequencies(p, J);

    ExperimentResult r("exchange_spectroscopy", {{"tau_R", "s", tau_R_sweep}, {"probe_frequency", "Hz", probe_freq_sweep}});
    if (opts.probe_rabi > J / 5) {
        r.add_warning("probe Rabi frequency exceeds J/5; the two branches blur together");
        spdlog::warn("exchange_spectroscopy: probe Rabi {:.3g} Hz > J/5 = {:.3g} Hz", opts.probe_rabi, J / 5);
    }
    if (auto w = regime_warning(p, J)) r.add_warning(*w);

    // Control-spin population after its Rabi drive.
    std::vector<double> p_ctrl(tau_R_sweep.size());
    for (std::size_t i = 0; i < tau_R_sweep.size(); ++i) {
        PulseSequence s;
        s.add(MicrowaveBurst{Qubit::Right, tau_R_sweep[i], frame_frequency(p, Qubit::Right), control_rabi, -kPi / 2});
        p_ctrl[i] = evolve(s, p).p_up(Qubit::Right);
    }
    auto response = [&](double fp, double branch) { return std::abs(fp - branch) < linewidth ? 0.5 : 0.0; };
    std::vector<double> data;
    data.reserve(tau_R_sweep.size() * probe_freq_sweep.size());
    for (std::size_t i = 0; i < tau_R_sweep.size(); ++i) {
        for (const double fp : probe_freq_sweep) {
            data.push_back(p_ctrl[i] * response(fp, f.f_L_up) + (1 - p_ctrl[i]) * response(fp, f.f_L_down));
        }
    }
    r.add_column("p_up_left", "", data, true);
    stamp_metadata(r, p, 0,
                   {{"V_M", V_M}, {"probe_rabi", opts.probe_rabi}, {"probe_duration", tau_L},
                    {"control_rabi", control_rabi}});

    // Branch centers from the rows where the control is most down / most up.
    auto center = [&](std::size_t row) {
        int lo = -1, hi = -1;
        for (std::size_t j = 0; j < probe_freq_sweep.size(); ++j) {
            if (r.at("p_up_left", row, j) > 0.25) {
                if (lo < 0) lo = static_cast<int>(j);
                hi = static_cast<int>(j);
            }
        }
        return lo < 0 ? kNaN : 0.5 * (probe_freq_sweep[lo] + probe_freq_sweep[hi]);
    };
    const auto [mn, mx] = std::minmax_element(p_ctrl.begin(), p_ctrl.end());
    const double c_down = center(static_cast<std::size_t>(mn - p_ctrl.begin()));
    const double c_up = *mx > 0.5 ? center(static_cast<std::size_t>(mx - p_ctrl.begin())) : kNaN;
    r.set_summary("J_configured", J);
    r.set_summary("branch_down", f.f_L_down);
    r.set_summary("branch_up", f.f_L_up);
    r.set_summary("branch_splitting", f.f_L_up - f.f_L_down);
    r.set_summary("linewidth", linewidth);
    r.set_summary("J_extracted", c_up - c_down);
    if (!std::isfinite(c_up - c_down)) r.add_warning("could not locate both branches in the probe sweep");
    return r;
}

ExperimentResult echo_exchange_phase(const DeviceParams &p, Qubit target, double J_on,
                                     const std::vector<double> &tau_dc_sweep, Spin other, const EchoPhaseOptions &opts) {
    if (tau_dc_sweep.empty()) throw std::invalid_argument("echo_exchange_phase: empty sweep");
    const double tmax = *std::max_element(tau_dc_sweep.begin(), tau_dc_sweep.end());
    if (tmax > opts.half_period) throw std::invalid_argument("echo_exchange_phase: tau_dc exceeds the echo half period");
    const double rabi = rabi_of(p, opts.drive);
    const Qubit ctrl = target == Qubit::Left ? Qubit::Right : Qubit::Left;
    const auto x90 = rotation_burst(p, target, kPi / 2, 0.0, rabi);
    const auto x180 = rotation_burst(p, target, kPi, 0.0, rabi);
    const auto final_x = rotation_burst(p, target, kPi / 2, kPi, rabi);
    const auto final_y = rotation_burst(p, target, kPi / 2, kPi / 2, rabi);

    std::vector<PulseSequence> seqs_x, seqs_y;
    for (const double tau : tau_dc_sweep) {
        PulseSequence s;
        if (other == Spin::Up) s.add(rotation_burst(p, ctrl, kPi, 0.0, rabi));
        s.add(x90).add(DcExchange{tau, J_on, std::nullopt}).add(Idle{opts.half_period - tau});
        s.add(x180).add(Idle{opts.half_period});
        PulseSequence sy = s;
        seqs_x.push_back(s.add(final_x));
        seqs_y.push_back(sy.add(final_y));
    }
    const auto px = p_up_of(seqs_x, target, p, opts.drive);
    const auto py = p_up_of(seqs_y, target, p, opts.drive);
    std::vector<double> phase(px.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
        phase[i] = std::atan2(2 * py[i] - 1, 2 * px[i] - 1);
        if (i > 0) phase[i] = phase[i - 1] + wrap_phase(phase[i] - phase[i - 1]);
    }

    ExperimentResult r("echo_exchange_phase", {{"tau_dc", "s", tau_dc_sweep}});
    r.add_column("p_up", "", px, true);
    r.add_column("p_up_quadrature", "", py, true);
    r.add_column("phase", "rad", phase, false);
    stamp_metadata(r, p, opts.drive.noise.seed,
                   {{"target", std::string(to_string(target))}, {"J_on", J_on},
                    {"other_state", other == Spin::Up ? "up" : "down"}, {"half_period", opts.half_period},
                    {"noise", noise_json(opts.drive.noise)}});
    if (auto w = regime_warning(p, J_on)) r.add_warning(*w);
    if (tau_dc_sweep.size() >= 2) {
        const auto lf = linear_fit(tau_dc_sweep, phase);
        r.set_summary("frequency", lf.slope / kTwoPi);
        r.set_summary("frequency_stderr", lf.slope_stderr / kTwoPi);
    }
    return r;
}

EchoSplitting echo_exchange_splitting(const DeviceParams &p, Qubit target, double J_on,
                                      const std::vector<double> &tau_dc_sweep, const EchoPhaseOptions &opts) {
    EchoSplitting out{echo_exchange_phase(p, target, J_on, tau_dc_sweep, Spin::Up, opts),
                      echo_exchange_phase(p, target, J_on, tau_dc_sweep, Spin::Down, opts)};
    out.splitting = out.up.summary("frequency") - out.down.summary("frequency");
    out.splitting_stderr = std::hypot(out.up.summary("frequency_stderr"), out.down.summary("frequency_stderr"));
    return out;
}

// --- CNOT ------------------------------------------------------------------------------------------

ExperimentResult cnot_calibration(const DeviceParams &p, double J_on, const std::vector<double> &tau_p_sweep,
                                  BasisState input, const CnotScanOptions &opts) {
    const double prep_rabi = rabi_of(p, opts.drive);
    const auto prep = prepare_basis_state(p, input, prep_rabi);
    const double f_drive = transition_frequencies(p, J_on).f_L_up;
    std::vector<double> pl, pr;
    for (const double tp : tau_p_sweep) {
        if (tp > opts.tau_dc) throw std::invalid_argument("cnot_calibration: tau_p exceeds tau_dc");
        PulseSequence s;
        for (const auto &seg : prep) s.add(seg);
        const double pad = 0.5 * (opts.tau_dc - tp);
        s.add(DcExchange{pad, J_on, std::nullopt});
        s.add(CompositeSegment{tp, MicrowaveBurst{Qubit::Left, tp, f_drive, opts.rabi_amplitude, -kPi / 2}, J_on});
        s.add(DcExchange{opts.tau_dc - tp - pad, J_on, std::nullopt});
        const auto pop = evolve_ensemble(s, p, opts.drive.noise, opts.drive.evolve);
        pl.push_back(pop[0] + pop[1]);
        pr.push_back(pop[0] + pop[2]);
    }
    ExperimentResult r("cnot_calibration", {{"tau_p", "s", tau_p_sweep}});
    r.add_column("p_up_left", "", pl, true);
    r.add_column("p_up_right", "", pr, true);
    stamp_metadata(r, p, opts.drive.noise.seed,
                   {{"J_on", J_on}, {"input", to_string(input)}, {"tau_dc", opts.tau_dc},
                    {"rabi_amplitude", opts.rabi_amplitude}, {"drive_frequency", f_drive},
                    {"noise", noise_json(opts.drive.noise)}});
    if (auto w = regime_warning(p, J_on)) r.add_warning(*w);
    r.set_summary("max_p_up_left", *std::max_element(pl.begin(), pl.end()));
    r.set_summary("min_p_up_left", *std::min_element(pl.begin(), pl.end()));
    double pi_time = kNaN;
    for (std::size_t i = 1; i + 1 < pl.size(); ++i) {
        if (pl[i] > 0.5 && pl[i] >= pl[i - 1] && pl[i] >= pl[i + 1]) {
            pi_time = tau_p_sweep[i];
            break;
        }
    }
    r.set_summary("pi_time_left", pi_time);
    return r;
}

ExperimentResult cnot_superposition_scan(const DeviceParams &p, const std::vector<double> &theta_sweep,
                                         const CnotCalibration &cal, const DriveOptions &opts) {
    const double rabi = rabi_of(p, opts);
    const auto gate = cnot_sequence(p, cal);
    auto build = [&](double theta) {
        PulseSequence s;
        s.add(rotation_burst(p, Qubit::Right, theta, 0.0, rabi));
        return s.append(gate);
    };
    std::vector<double> pl, pr;
    for (const double th : theta_sweep) {
        const auto pop = evolve_ensemble(build(th), p, opts.noise, opts.evolve);
        pl.push_back(pop[0] + pop[1]);
        pr.push_back(pop[0] + pop[2]);
    }
    ExperimentResult r("cnot_superposition_scan", {{"theta_R", "rad", theta_sweep}});
    r.add_column("p_up_left", "", pl, true);
    r.add_column("p_up_right", "", pr, true);
    stamp_metadata(r, p, opts.noise.seed,
                   {{"J_on", cal.J_on}, {"tau_p", cal.tau_p}, {"tau_dc", cal.tau_dc},
                    {"cnot_rabi", cal.rabi_amplitude}, {"noise", noise_json(opts.noise)}});
    double worst = 0;
    for (std::size_t i = 0; i < pl.size(); ++i) worst = std::max(worst, std::abs(pl[i] - pr[i]));
    r.set_summary("max_abs_difference", worst);

    Vector4c bell = Vector4c::Zero();
    bell[3] = 1 / std::sqrt(2.0);
    bell[0] = cplx(0, -1 / std::sqrt(2.0));
    const auto psi = evolve(build(kPi / 2), p);
    r.set_summary("bell_fidelity", std::abs(bell.dot(psi.amplitudes())));
    return r;
}

}  // namespace siq
