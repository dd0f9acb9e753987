// siqsim: command-line driver for the two-spin simulator.
//
// Precedence for device parameters: built-in defaults < --device file <
// --set KEY=VALUE flags. Keys starting with "readout_" configure the readout
// Monte Carlo and are ignored by the device model.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage, 3 configuration error,
// 4 parameter out of range.

#include "siq/acceptance.hpp"
#include "siq/config.hpp"
#include "siq/device.hpp"
#include "siq/experiments.hpp"
#include "siq/fit.hpp"
#include "siq/rb.hpp"
#include "siq/readout.hpp"
#include "siq/rng.hpp"
#include "siq/tomo.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace siq;

namespace {

constexpr double kPi = kTwoPi / 2;

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kConfig = 3, kRange = 4 };

struct Global {
    std::string device_file;
    std::vector<std::string> overrides;
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir;
    bool quiet = false;
};

/// Everything a subcommand needs after configuration has been resolved.
struct Context {
    DeviceParams device;
    KeyValueConfig readout_keys;
    std::uint64_t seed = kDefaultSeed;
};

/// A subcommand returns its files as (name, csv, json) triples plus a one-line
/// summary; nothing is written until the whole run has succeeded.
struct Output {
    std::string name;
    std::string csv;
    std::string meta;
};
struct RunResult {
    std::vector<Output> files;
    std::string summary;
    bool failed = false;
};

Output from_result(const std::string &name, const ExperimentResult &r) { return {name, r.to_csv(), r.metadata_json()}; }

Qubit parse_qubit(const std::string &s) {
    if (s == "L" || s == "left") return Qubit::Left;
    if (s == "R" || s == "right") return Qubit::Right;
    throw ConfigError("target must be L or R, got '" + s + "'");
}

Context resolve(const Global &g) {
    KeyValueConfig cfg;
    if (!g.device_file.empty()) cfg = KeyValueConfig::load(g.device_file);
    for (const auto &kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    KeyValueConfig dev, ro;
    for (const auto &[k, v] : cfg.entries()) (k.rfind("readout_", 0) == 0 ? ro : dev).set(k, v);
    Context c;
    c.device = DeviceParams::from_config(dev);
    c.readout_keys = ro;
    c.seed = g.seed;
    return c;
}

NoiseConfig noise_for(const Context &c, int samples) {
    if (samples <= 0) return {0, 0, 1, c.seed};
    return NoiseConfig::from_t2_star(c.device, samples, c.seed);
}

std::string summary_line(const ExperimentResult &r, std::initializer_list<const char *> keys) {
    std::ostringstream s;
    s << r.protocol() << ":";
    for (const char *k : keys) {
        s << " " << k << "=";
        if (r.metadata().contains("summary") && r.metadata()["summary"].contains(k)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6g", r.summary(k));
            s << buf;
        } else {
            s << "n/a";
        }
    }
    for (const auto &w : r.warnings()) s << "\nwarning: " << w;
    return s.str();
}

std::vector<int> parse_int_list(const std::string &text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double v = parse_number(item, "list entry");
        if (v < 0 || v != static_cast<int>(v)) throw ConfigError("expected non-negative integers in '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

void require(bool cond, const std::string &msg) {
    if (!cond) throw std::out_of_range(msg);
}

// --- exchange-fit input --------------------------------------------------------

std::vector<ExchangeSample> read_exchange_csv(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open '" + path + "'");
    std::vector<ExchangeSample> out;
    std::string line;
    int n = 0;
    while (std::getline(f, line)) {
        ++n;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected V_M,J");
        // Columns past the second are ignored, so exchange-fit output reads back.
        const auto comma2 = line.find(',', comma + 1);
        const std::string a = line.substr(0, comma), b = line.substr(comma + 1, comma2 == std::string::npos ? std::string::npos : comma2 - comma - 1);
        // Skip a header row.
        if (out.empty() && std::strtod(a.c_str(), nullptr) == 0 && a.find_first_of("0123456789") == std::string::npos) {
            continue;
        }
        out.push_back({parse_number(a, path + ":" + std::to_string(n)), parse_number(b, path + ":" + std::to_string(n))});
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"siqsim: pulse-level simulator of a two-spin silicon quantum processor"};
    app.require_subcommand(1);
    Global g;
    if (const char *env = std::getenv("SIQSIM_OUT")) g.out_dir = env;
    if (g.out_dir.empty()) g.out_dir = ".";
    app.add_option("--device", g.device_file, "key = value device file");
    app.add_option("--set", g.overrides, "override a device or readout key (KEY=VALUE), repeatable");
    app.add_option("--seed", g.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--out", g.out_dir, "output directory (default: $SIQSIM_OUT or .)");
    app.add_flag("-q,--quiet", g.quiet, "suppress warnings on stderr");

    std::function<RunResult(const Context &)> job;
    auto add = [&](const char *name, const char *help) { return app.add_subcommand(name, help); };

    // rabi ---------------------------------------------------------------------
    std::string target = "L";
    int n_freq = 41, n_time = 101, samples = 0;
    double span = 10e6, t_max = 1e-6, rabi = 0;
    {
        auto *s = add("rabi", "Rabi chevron: P_up vs drive detuning and burst length");
        s->add_option("--target", target, "L or R")->capture_default_str();
        s->add_option("--span", span, "detuning span (Hz)")->capture_default_str();
        s->add_option("--n-freq", n_freq)->capture_default_str();
        s->add_option("--t-max", t_max, "longest burst (s)")->capture_default_str();
        s->add_option("--n-time", n_time)->capture_default_str();
        s->add_option("--rabi", rabi, "Rabi frequency (Hz), 0 = device value")->capture_default_str();
        s->add_option("--samples", samples, "quasi-static noise samples, 0 = noiseless")->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                require(n_freq >= 1 && n_time >= 5 && span >= 0 && t_max > 0, "rabi: bad sweep");
                const Qubit q = parse_qubit(target);
                const double f0 = frame_frequency(c.device, q);
                DriveOptions d{rabi, noise_for(c, samples), {}};
                const auto r = rabi_chevron(c.device, q, linspace(f0 - span / 2, f0 + span / 2, n_freq),
                                            linspace(0, t_max, n_time), d);
                return RunResult{{from_result("rabi", r)}, summary_line(r, {"rabi_frequency_fit"})};
            };
        });
    }

    // ramsey -------------------------------------------------------------------
    int n_delay = 81;
    double delay_max = 4e-6;
    int ramsey_samples = 500;
    {
        auto *s = add("ramsey", "Ramsey decay and T2* fit");
        s->add_option("--target", target, "L or R")->capture_default_str();
        s->add_option("--t-max", delay_max, "longest delay (s)")->capture_default_str();
        s->add_option("--n", n_delay)->capture_default_str();
        s->add_option("--rabi", rabi)->capture_default_str();
        s->add_option("--samples", ramsey_samples)->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                require(n_delay >= 4 && delay_max > 0 && ramsey_samples >= 1, "ramsey: bad sweep");
                DriveOptions d{rabi, noise_for(c, ramsey_samples), {}};
                const auto r = ramsey(c.device, parse_qubit(target), linspace(0, delay_max, n_delay), d);
                return RunResult{{from_result("ramsey", r)}, summary_line(r, {"T2_star_fit", "T2_star_configured"})};
            };
        });
    }

    // echo ---------------------------------------------------------------------
    int echo_samples = 200;
    double echo_max = 20e-6;
    {
        auto *s = add("echo", "Hahn echo vs total delay");
        s->add_option("--target", target)->capture_default_str();
        s->add_option("--t-max", echo_max)->capture_default_str();
        s->add_option("--n", n_delay)->capture_default_str();
        s->add_option("--rabi", rabi)->capture_default_str();
        s->add_option("--samples", echo_samples)->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                require(n_delay >= 2 && echo_max > 0, "echo: bad sweep");
                DriveOptions d{rabi, noise_for(c, echo_samples), {}};
                const auto r = hahn_echo(c.device, parse_qubit(target), linspace(0, echo_max, n_delay), d);
                return RunResult{{from_result("echo", r)}, summary_line(r, {"min_p_up", "mean_p_up"})};
            };
        });
    }

    // spectroscopy -------------------------------------------------------------
    double vm = 0.400, probe_rabi = 50e3;
    int n_tau = 41, n_probe = 401;
    {
        auto *s = add("spectroscopy", "ESR spectroscopy of the left spin with exchange on, vs control rotation");
        s->add_option("--vm", vm, "exchange gate voltage (V)")->capture_default_str();
        s->add_option("--probe-rabi", probe_rabi)->capture_default_str();
        s->add_option("--n-tau", n_tau)->capture_default_str();
        s->add_option("--n-freq", n_probe)->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                require(n_tau >= 2 && n_probe >= 3, "spectroscopy: bad sweep");
                const double J = exchange_vs_vm(c.device.exchange_fit, vm);
                const auto f = transition_frequencies(c.device, J);
                const double pad = std::max(J, 1e6);
                SpectroscopyOptions o;
                o.probe_rabi = probe_rabi;
                const auto r = exchange_spectroscopy(c.device, vm, linspace(0, 2 / c.device.rabi_frequency, n_tau),
                                                     linspace(f.f_L_down - pad, f.f_L_up + pad, n_probe), o);
                return RunResult{{from_result("spectroscopy", r)}, summary_line(r, {"J_configured", "J_extracted"})};
            };
        });
    }

    // exchange-fit -------------------------------------------------------------
    std::string fit_input;
    double fit_noise = 0.01, v_lo = 0.355, v_hi = 0.415;
    int fit_points = 61;
    {
        auto *s = add("exchange-fit", "fit the exchange law J(V_M) to a V_M,J CSV or to synthetic data");
        s->add_option("--input", fit_input, "CSV with V_M (V), J (Hz) columns; omitted = synthetic");
        s->add_option("--noise", fit_noise, "relative noise on synthetic J")->capture_default_str();
        s->add_option("--v-min", v_lo)->capture_default_str();
        s->add_option("--v-max", v_hi)->capture_default_str();
        s->add_option("--n", fit_points)->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                std::vector<ExchangeSample> data;
                if (!fit_input.empty()) {
                    data = read_exchange_csv(fit_input);
                } else {
                    require(fit_points >= 4 && v_hi > v_lo && fit_noise >= 0, "exchange-fit: bad synthetic grid");
                    auto rng = make_rng(c.seed, stream::kFitNoise, 0);
                    std::normal_distribution<double> n01(0.0, 1.0);
                    for (const double v : linspace(v_lo, v_hi, fit_points)) {
                        data.push_back({v, exchange_vs_vm(c.device.exchange_fit, v) * (1 + fit_noise * n01(rng))});
                    }
                }
                const auto fit = fit_exchange_law(data);
                std::vector<double> vs, js, jf;
                for (const auto &d : data) {
                    vs.push_back(d.V_M);
                    js.push_back(d.J);
                    jf.push_back(exchange_vs_vm(fit.params, d.V_M));
                }
                ExperimentResult r("exchange_fit", {{"V_M", "V", vs}});
                r.add_column("J_data", "Hz", js, false);
                r.add_column("J_fit", "Hz", jf, false);
                stamp_metadata(r, c.device, c.seed,
                               {{"input", fit_input.empty() ? "synthetic" : fit_input}, {"noise", fit_noise}});
                r.set_summary("c", fit.params.c);
                r.set_summary("V_M0", fit.params.V_M0);
                r.set_summary("V_M1", fit.params.V_M1);
                r.set_summary("V_on", fit.params.V_on);
                r.set_summary("residual_norm", fit.residual_norm);
                return RunResult{{from_result("exchange-fit", r)}, summary_line(r, {"c", "V_M0", "V_M1", "V_on"})};
            };
        });
    }

    // echo-phase ---------------------------------------------------------------
    double echo_J = 1e6, tau_dc_max = 1e-6;
    int n_tau_dc = 41;
    {
        auto *s = add("echo-phase", "exchange-induced phase in a Hahn echo, both states of the other spin");
        s->add_option("--target", target)->capture_default_str();
        s->add_option("--J", echo_J, "exchange during the pulse (Hz)")->capture_default_str();
        s->add_option("--tau-max", tau_dc_max)->capture_default_str();
        s->add_option("--n", n_tau_dc)->capture_default_str();
        s->add_option("--samples", samples)->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                require(echo_J > 0 && tau_dc_max > 0 && n_tau_dc >= 3, "echo-phase: bad sweep");
                EchoPhaseOptions o;
                o.half_period = std::max(o.half_period, tau_dc_max);
                o.drive.noise = noise_for(c, samples);
                const auto taus = linspace(0, tau_dc_max, n_tau_dc);
                const auto e = echo_exchange_splitting(c.device, parse_qubit(target), echo_J, taus, o);
                ExperimentResult r("echo_exchange_phase", {{"tau_dc", "s", taus}});
                r.add_column("phase_other_up", "rad", e.up.column("phase").values, false);
                r.add_column("phase_other_down", "rad", e.down.column("phase").values, false);
                r.add_column("p_up_other_up", "", e.up.column("p_up").values, true);
                r.add_column("p_up_other_down", "", e.down.column("p_up").values, true);
                stamp_metadata(r, c.device, o.drive.noise.seed,
                               {{"target", std::string(to_string(parse_qubit(target)))}, {"J_on", echo_J},
                                {"half_period", o.half_period}});
                r.set_summary("frequency_other_up", e.up.summary("frequency"));
                r.set_summary("frequency_other_down", e.down.summary("frequency"));
                r.set_summary("splitting", e.splitting);
                r.set_summary("splitting_stderr", e.splitting_stderr);
                r.set_summary("J_on", echo_J);
                return RunResult{{from_result("echo-phase", r)}, summary_line(r, {"splitting", "J_on"})};
            };
        });
    }

    // cnot-cal -----------------------------------------------------------------
    std::string input = "du";
    double cal_J = 20e6, tau_p_max = 400e-9;
    CnotScanOptions scan;
    int n_tau_p = 201;
    {
        auto *s = add("cnot-cal", "conditional Rabi oscillation of the left spin inside an exchange window");
        s->add_option("--input", input, "initial basis state uu, ud, du or dd (left spin first)")->capture_default_str();
        s->add_option("--J", cal_J)->capture_default_str();
        s->add_option("--tau-dc", scan.tau_dc)->capture_default_str();
        s->add_option("--rabi", scan.rabi_amplitude)->capture_default_str();
        s->add_option("--tau-max", tau_p_max)->capture_default_str();
        s->add_option("--n", n_tau_p)->capture_default_str();
        s->add_option("--samples", samples)->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                BasisState b;
                try {
                    b = parse_basis_state(input);
                } catch (const std::invalid_argument &e) {
                    throw ConfigError(e.what());
                }
                require(cal_J > 0 && tau_p_max > 0 && tau_p_max <= scan.tau_dc && n_tau_p >= 3,
                        "cnot-cal: need 0 < tau-max <= tau-dc and J > 0");
                scan.drive.noise = noise_for(c, samples);
                const auto r = cnot_calibration(c.device, cal_J, linspace(0, tau_p_max, n_tau_p), b, scan);
                return RunResult{{from_result("cnot-cal", r)},
                                 summary_line(r, {"max_p_up_left", "min_p_up_left", "pi_time_left"})};
            };
        });
    }

    // cnot-scan ----------------------------------------------------------------
    int n_theta = 61;
    {
        auto *s = add("cnot-scan", "calibrated CNOT on |d> x Rx(theta)|d>");
        s->add_option("--n", n_theta)->capture_default_str();
        s->add_option("--samples", samples)->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                require(n_theta >= 2, "cnot-scan: need at least two angles");
                DriveOptions d{0, noise_for(c, samples), {}};
                const auto r = cnot_superposition_scan(c.device, linspace(0, kTwoPi, n_theta), calibrate_cnot(c.device), d);
                return RunResult{{from_result("cnot-scan", r)}, summary_line(r, {"max_abs_difference", "bell_fidelity"})};
            };
        });
    }

    // rb -----------------------------------------------------------------------
    std::string lengths = "1,2,4,8,16,32,64,128,256,512";
    std::string model = "dephasing";
    int n_seq = 30;
    double depol = 0.005, sigma_f = 0;
    {
        auto *s = add("rb", "single-qubit Clifford randomized benchmarking");
        s->add_option("--target", target)->capture_default_str();
        s->add_option("--lengths", lengths, "comma-separated Clifford counts")->capture_default_str();
        s->add_option("--sequences", n_seq)->capture_default_str();
        s->add_option("--model", model, "none, depolarizing or dephasing")->capture_default_str();
        s->add_option("--r", depol, "depolarizing probability per Clifford")->capture_default_str();
        s->add_option("--sigma", sigma_f, "dephasing spread (Hz), 0 = from T2*")->capture_default_str();
        s->add_option("--rabi", rabi)->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                const Qubit q = parse_qubit(target);
                RbErrorModel m;
                if (model == "none") {
                    m = RbErrorModel::none();
                } else if (model == "depolarizing") {
                    m = RbErrorModel::depolarizing(depol);
                } else if (model == "dephasing") {
                    const auto n = NoiseConfig::from_t2_star(c.device, 1, 0);
                    m = RbErrorModel::dephasing(sigma_f > 0 ? sigma_f : (q == Qubit::Left ? n.sigma_f_L : n.sigma_f_R));
                } else {
                    throw ConfigError("unknown RB model '" + model + "'");
                }
                require(n_seq >= 1, "rb: need at least one sequence");
                try {
                    m.validate();
                } catch (const std::invalid_argument &e) {
                    throw std::out_of_range(e.what());
                }
                const auto res = run_rb(c.device, q, parse_int_list(lengths), n_seq, m, {c.seed, rabi});
                return RunResult{{from_result("rb", res.data)}, summary_line(res.data, {"F_c", "F_c_stderr"})};
            };
        });
    }

    // readout-sim --------------------------------------------------------------
    int n_traces = 5000;
    double partner_delay = kDefaultPartnerDelay;
    bool calibrate = false;
    {
        auto *s = add("readout-sim", "single-shot readout Monte Carlo and fidelity vs threshold for both dots");
        s->add_option("--traces", n_traces, "traces per spin per dot")->capture_default_str();
        s->add_option("--delay", partner_delay, "wait before the right dot is read (s)")->capture_default_str();
        s->add_flag("--calibrate", calibrate, "search the white-noise level that gives left visibility 0.85");
        s->callback([&] {
            job = [&](const Context &c) {
                require(n_traces >= 1 && partner_delay >= 0, "readout-sim: bad trace count or delay");
                ReadoutParams rp = ReadoutParams::from_config(c.readout_keys);
                rp.T1 = c.readout_keys.contains("readout_T1") ? rp.T1 : c.device.T1;
                rp.validate();
                ReadoutSweep sw;
                double white = rp.noise.white_density;
                if (calibrate) {
                    auto cal = calibrate_readout_noise(rp, n_traces, partner_delay, c.seed);
                    sw = std::move(cal.sweep);
                    white = cal.white_density;
                } else {
                    sw = fidelity_sweep(rp, n_traces, partner_delay, c.seed);
                }
                ExperimentResult r("readout_sim", {{"threshold", "A", sw.left.curve.thresholds}});
                r.add_column("F_up_left", "", sw.left.curve.F_up, true);
                r.add_column("F_down_left", "", sw.left.curve.F_down, true);
                r.add_column("visibility_left", "", sw.left.curve.visibility, false);
                r.add_column("F_up_right", "", sw.right.curve.F_up, true);
                r.add_column("F_down_right", "", sw.right.curve.F_down, true);
                r.add_column("visibility_right", "", sw.right.curve.visibility, false);
                stamp_metadata(r, c.device, c.seed,
                               {{"traces", n_traces}, {"partner_delay", partner_delay}, {"calibrate", calibrate},
                                {"white_density", white}, {"gamma_off_up", rp.gamma_off_up},
                                {"gamma_on", rp.gamma_on}, {"T1", rp.T1}, {"T_read", rp.T_read},
                                {"sample_rate", rp.sample_rate}, {"filter_cutoff", rp.filter_cutoff},
                                {"T_e", rp.T_e}, {"E_thermal", rp.E_thermal}});
                r.set_summary("best_visibility_left", sw.left.curve.best_visibility());
                r.set_summary("best_visibility_right", sw.right.curve.best_visibility());
                r.set_summary("best_threshold_left", sw.left.curve.best_threshold());
                r.set_summary("misinit_fraction_left", sw.left.misinit_fraction);
                r.set_summary("white_density", white);
                return RunResult{{from_result("readout-sim", r)},
                                 summary_line(r, {"best_visibility_left", "best_visibility_right"})};
            };
        });
    }

    // bell-tomo ----------------------------------------------------------------
    double vl = 1.0, vr = 1.0;
    {
        auto *s = add("bell-tomo", "Bell state preparation, two-qubit tomography and fidelity");
        s->add_option("--vl", vl, "left readout visibility")->capture_default_str();
        s->add_option("--vr", vr, "right readout visibility")->capture_default_str();
        s->add_option("--samples", samples, "quasi-static noise samples, 0 = noiseless")->capture_default_str();
        s->callback([&] {
            job = [&](const Context &c) {
                require(vl >= 0 && vl <= 1 && vr >= 0 && vr <= 1, "bell-tomo: visibilities must lie in [0, 1]");
                VisibilityModel v;
                v.V_L = vl;
                v.V_R = vr;
                const auto res = bell_experiment(c.device, v, noise_for(c, samples));
                static const char *names[] = {"uu", "ud", "du", "dd"};
                std::ostringstream csv;
                csv << "element,real,imag\n";
                const auto &rho = res.reconstruction.raw;
                for (int i = 0; i < 4; ++i) {
                    for (int j = 0; j < 4; ++j) {
                        csv << names[i] << "_" << names[j] << "," << format_csv_number(rho(i, j).real()) << ","
                            << format_csv_number(rho(i, j).imag()) << "\n";
                    }
                }
                ExperimentResult stamp("bell_tomography", {{"element", "", std::vector<double>(16, 0.0)}});
                stamp_metadata(stamp, c.device, c.seed, {{"V_L", vl}, {"V_R", vr}, {"noise_samples", samples}});
                nlohmann::json meta = stamp.metadata();
                std::vector<double> paulis(res.reconstruction.paulis.begin(), res.reconstruction.paulis.end());
                nlohmann::json pj;
                for (int i = 0; i < 16; ++i) pj[PauliLabel::from_index(i).name()] = paulis[i];
                meta["pauli_expectations"] = pj;
                meta["summary"] = {{"fidelity_raw", res.fidelity_raw},
                                   {"fidelity_projected", res.fidelity_projected},
                                   {"visibility_ceiling", std::sqrt((1 + 3 * vl * vr) / 4)}};
                meta["fidelity_convention"] = "sqrt(<psi|rho|psi>)";
                char line[160];
                std::snprintf(line, sizeof line, "bell_tomography: fidelity_raw=%.6g fidelity_projected=%.6g",
                              res.fidelity_raw, res.fidelity_projected);
                return RunResult{{{"bell-tomo", csv.str(), meta.dump(2) + "\n"}}, line};
            };
        });
    }

    // reproduce ----------------------------------------------------------------
    std::vector<int> only;
    {
        auto *s = add("reproduce", "run the reproduction suite and print a pass/fail table");
        s->add_option("--only", only, "criterion ids to run (default all)");
        s->callback([&] {
            job = [&](const Context &c) {
                AcceptanceOptions o;
                o.seed = c.seed;
                const auto results = run_acceptance(o, only);
                std::ostringstream csv, table;
                csv << "id,name,pass,seconds,measured,expected\n";
                nlohmann::json rows = nlohmann::json::array();
                int failed = 0;
                for (const auto &r : results) {
                    table << format_result(r) << "\n";
                    csv << r.id << ",\"" << r.name << "\"," << (r.pass ? 1 : 0) << "," << format_csv_number(r.seconds)
                        << ",\"" << r.measured << "\",\"" << r.expected << "\"\n";
                    rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"measured", r.measured},
                                    {"expected", r.expected}, {"seconds", r.seconds}});
                    failed += !r.pass;
                }
                nlohmann::json meta = {{"protocol", "reproduce"}, {"seed", c.seed}, {"criteria", rows},
                                       {"summary", {{"passed", int(results.size()) - failed}, {"failed", failed}}}};
                table << (results.size() - failed) << "/" << results.size() << " criteria passed";
                return RunResult{{{"reproduce", csv.str(), meta.dump(2) + "\n"}}, table.str(), failed > 0};
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    spdlog::set_level(g.quiet ? spdlog::level::err : spdlog::level::warn);

    try {
        const Context ctx = resolve(g);
        const RunResult res = job(ctx);
        std::filesystem::create_directories(g.out_dir);
        for (const auto &f : res.files) {
            const auto base = std::filesystem::path(g.out_dir) / f.name;
            std::ofstream(base.string() + ".csv", std::ios::binary) << f.csv;
            std::ofstream(base.string() + ".meta.json", std::ios::binary) << f.meta;
        }
        std::cout << res.summary << "\n";
        return res.failed ? kRuntime : kOk;
    } catch (const ConfigError &e) {
        std::cerr << "siqsim: configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::out_of_range &e) {
        std::cerr << "siqsim: parameter out of range: " << e.what() << "\n";
        return kRange;
    } catch (const std::domain_error &e) {
        std::cerr << "siqsim: parameter out of range: " << e.what() << "\n";
        return kRange;
    } catch (const std::invalid_argument &e) {
        std::cerr << "siqsim: invalid parameter: " << e.what() << "\n";
        return kRange;
    } catch (const std::exception &e) {
        std::cerr << "siqsim: " << e.what() << "\n";
        return kRuntime;
    }
}
