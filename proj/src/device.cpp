#include "siq/device.hpp"

#include "siq/fit.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace siq {

void ExchangeFitParams::validate() const {
    if (!(V_on > 0)) throw ConfigError("exchange law: V_on must be > 0");
    if (V_M0 == V_M1) throw ConfigError("exchange law: V_M0 must differ from V_M1");
    if (!std::isfinite(c) || !std::isfinite(V_M0) || !std::isfinite(V_M1)) {
        throw ConfigError("exchange law: non-finite parameter");
    }
}

ExchangeFitParams default_exchange_fit() {
    return {3.239424267078817e8, 0.420, 0.4518, 0.3666387626425283e-3};
}

ExchangeFitParams printed_exchange_fit() { return {1.6e7, 0.4128, 0.4518, 0.559e-3}; }

// --- DeviceParams --------------------------------------------------------------

namespace {

struct Field {
    const char *key;
    double DeviceParams::*ptr;
    bool positive;
};

constexpr Field kFields[] = {
    {"E_Z", &DeviceParams::E_Z, true},
    {"dE_Z", &DeviceParams::dE_Z, true},
    {"B1_zL", &DeviceParams::B1_zL, false},
    {"B1_zR", &DeviceParams::B1_zR, false},
    {"E_CL", &DeviceParams::E_CL, true},
    {"E_CR", &DeviceParams::E_CR, true},
    {"T1", &DeviceParams::T1, true},
    {"T2_star_L", &DeviceParams::T2_star_L, true},
    {"T2_star_R", &DeviceParams::T2_star_R, true},
    {"T2_echo_L", &DeviceParams::T2_echo_L, true},
    {"T2_echo_R", &DeviceParams::T2_echo_R, true},
    {"rabi_frequency", &DeviceParams::rabi_frequency, true},
};

struct ExchangeField {
    const char *key;
    double ExchangeFitParams::*ptr;
};

constexpr ExchangeField kExchangeFields[] = {
    {"exchange_c", &ExchangeFitParams::c},
    {"exchange_V_M0", &ExchangeFitParams::V_M0},
    {"exchange_V_M1", &ExchangeFitParams::V_M1},
    {"exchange_V_on", &ExchangeFitParams::V_on},
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void DeviceParams::validate() const {
    for (const auto &f : kFields) {
        const double v = this->*f.ptr;
        if (!std::isfinite(v)) throw ConfigError(std::string("device: ") + f.key + " is not finite");
        if (f.positive && !(v > 0)) throw ConfigError(std::string("device: ") + f.key + " must be > 0");
    }
    exchange_fit.validate();
}

std::string DeviceParams::to_config_text() const {
    std::ostringstream out;
    for (const auto &f : kFields) out << f.key << " = " << fmt_double(this->*f.ptr) << "\n";
    for (const auto &f : kExchangeFields) out << f.key << " = " << fmt_double(exchange_fit.*f.ptr) << "\n";
    return out.str();
}

std::uint64_t DeviceParams::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : to_config_text()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DeviceParams DeviceParams::from_config(const KeyValueConfig &cfg) {
    std::set<std::string> known;
    for (const auto &f : kFields) known.insert(f.key);
    for (const auto &f : kExchangeFields) known.insert(f.key);
    cfg.require_known(known);

    DeviceParams p;
    for (const auto &f : kFields) {
        if (auto v = cfg.get_double(f.key)) p.*f.ptr = *v;
    }
    for (const auto &f : kExchangeFields) {
        if (auto v = cfg.get_double(f.key)) p.exchange_fit.*f.ptr = *v;
    }
    p.validate();
    return p;
}

DeviceParams DeviceParams::load(const std::string &path) { return from_config(KeyValueConfig::load(path)); }

std::optional<std::string> regime_warning(const DeviceParams &p, double J) {
    if (p.dE_Z < 5 * std::abs(J)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "dE_Z = %.4g Hz is less than 5 J (J = %.4g Hz); dressed-state labels are unreliable",
                      p.dE_Z, J);
        return std::string(buf);
    }
    return std::nullopt;
}

// --- spectrum --------------------------------------------------------------------

ComplexMatrix4 build_static_hamiltonian(const DeviceParams &p, double J) {
    if (J < 0) throw std::invalid_argument("build_static_hamiltonian: J must be >= 0");
    const auto &s = spin_operators();
    return J * (s.sl_dot_sr - 0.25 * ComplexMatrix4::Identity()) + p.zeeman_left() * s.sz_l +
           p.zeeman_right() * s.sz_r;
}

double EnergyLevels::operator[](int basis) const {
    switch (basis) {
        case 0: return e_uu;
        case 1: return e_ud;
        case 2: return e_du;
        case 3: return e_dd;
        default: throw std::out_of_range("EnergyLevels: basis index");
    }
}

EnergyLevels energy_levels(const DeviceParams &p, double J) {
    const auto eig = eig_hermitian(build_static_hamiltonian(p, J));
    std::array<double, 4> e{};
    std::array<bool, 4> taken{};
    for (int k = 0; k < 4; ++k) {
        int best = 0;
        double w = -1;
        for (int b = 0; b < 4; ++b) {
            const double wb = std::norm(eig.vectors(b, k));
            if (wb > w) {
                w = wb;
                best = b;
            }
        }
        if (w < 0.75 || taken[best]) {
            throw LabelingError("energy_levels: eigenstates are too strongly mixed to label (J ~ dE_Z?)");
        }
        taken[best] = true;
        e[best] = eig.values[k];
    }
    return {e[0], e[1], e[2], e[3]};
}

EnergyLevels energy_levels_analytic(const DeviceParams &p, double J) {
    const double S = 0.5 * (p.B1_zL + p.B1_zR);
    const double delta = p.zeeman_right() - p.zeeman_left();
    const double R = std::hypot(J, delta);
    return {p.E_Z + S, 0.5 * (-J - R), 0.5 * (-J + R), -p.E_Z - S};
}

double mixing_angle(const DeviceParams &p, double J) {
    return 0.5 * std::atan2(J, p.zeeman_right() - p.zeeman_left());
}

TransitionFrequencies transition_frequencies(const DeviceParams &p, double J) {
    const auto e = energy_levels(p, J);
    return {std::abs(e.e_ud - e.e_dd), std::abs(e.e_uu - e.e_du), std::abs(e.e_du - e.e_dd),
            std::abs(e.e_uu - e.e_ud)};
}

TransitionFrequencies transition_frequencies_analytic(const DeviceParams &p, double J) {
    const double S = 0.5 * (p.B1_zL + p.B1_zR);
    const double R = std::hypot(J, p.zeeman_right() - p.zeeman_left());
    return {p.E_Z + 0.5 * (-J + 2 * S - R), p.E_Z + 0.5 * (J + 2 * S - R), p.E_Z + 0.5 * (-J + 2 * S + R),
            p.E_Z + 0.5 * (J + 2 * S + R)};
}

double transition_frequency(const TransitionFrequencies &f, Qubit target, Spin other) {
    if (target == Qubit::Left) return other == Spin::Up ? f.f_L_up : f.f_L_down;
    return other == Spin::Up ? f.f_R_up : f.f_R_down;
}

// --- exchange law ------------------------------------------------------------------

double exchange_from_detuning(double E_CL, double E_CR, double t_c, double eps) {
    const double ec = std::min(E_CL, E_CR);
    if (!(ec > 0)) throw std::domain_error("exchange_from_detuning: charging energies must be > 0");
    if (std::abs(eps) >= ec) throw std::domain_error("exchange_from_detuning: |eps| must be below the charging energy");
    const double den = (E_CL + eps) * (E_CR - eps);
    if (!(den > 0)) throw std::domain_error("exchange_from_detuning: non-positive denominator");
    if (std::abs(t_c) > 0.1 * ec) {
        spdlog::warn("exchange_from_detuning: t_c = {:.4g} Hz is not small against E_C = {:.4g} Hz", t_c, ec);
    }
    return 2 * t_c * t_c * (E_CL + E_CR) / den;
}

double exchange_vs_vm(const ExchangeFitParams &fit, double V_M) {
    if (V_M == fit.V_M1) throw std::domain_error("exchange_vs_vm: singular at V_M = V_M1");
    const double num = fit.V_M0 - V_M;
    if (num < 0) throw std::domain_error("exchange_vs_vm: V_M beyond V_M0 gives negative J");
    const double d = V_M - fit.V_M1;
    return fit.c * num / (d * d) * std::exp(-std::sqrt(std::abs(V_M - fit.V_M0) / fit.V_on));
}

ExchangeLawFit fit_exchange_law(std::span<const ExchangeSample> samples) {
    if (samples.size() < 4) throw std::invalid_argument("fit_exchange_law: need at least 4 samples");
    double jmin = INFINITY, jmax = 0, vmax = -INFINITY;
    for (const auto &s : samples) {
        if (!(s.J > 0)) throw std::invalid_argument("fit_exchange_law: all J samples must be > 0");
        jmin = std::min(jmin, s.J);
        jmax = std::max(jmax, s.J);
        vmax = std::max(vmax, s.V_M);
    }
    if (jmax / jmin < 100) throw std::invalid_argument("fit_exchange_law: samples must span at least two decades of J");

    // Work in millivolts so all parameters are O(1..1e3).
    const int n = static_cast<int>(samples.size());
    std::vector<double> v(n), lj(n);
    for (int i = 0; i < n; ++i) {
        v[i] = samples[i].V_M * 1e3;
        lj[i] = std::log(samples[i].J);
    }
    const double vmax_mv = vmax * 1e3;

    // x = (log c, V_M0, V_M1, log V_on); returns false where the model is undefined.
    auto model = [&](const Eigen::VectorXd &x, int i, double &out) {
        const double num = x[1] - v[i];
        const double d = std::abs(v[i] - x[2]);
        if (!(num > 0) || !(d > 0)) return false;
        out = x[0] + std::log(num) - 2 * std::log(d) - std::sqrt(num / std::exp(x[3]));
        return true;
    };
    ResidualFn fn = [&](const Eigen::VectorXd &x, Eigen::VectorXd &r) {
        for (int i = 0; i < n; ++i) {
            double m;
            r[i] = model(x, i, m) ? m - lj[i] : 1e6;
        }
    };

    // Coarse grid over the shape parameters; log c enters linearly and is
    // solved in closed form at each grid point.
    Eigen::VectorXd best(4);
    double best_ssr = INFINITY;
    Eigen::VectorXd x(4);
    for (int a = 0; a < 25; ++a) {
        const double v0 = vmax_mv + 0.5 * std::pow(120.0, a / 24.0);
        for (int b = 0; b < 25; ++b) {
            const double von = 0.05 * std::pow(100.0, b / 24.0);
            for (const double dv1 : {10.0, 30.0, 100.0}) {
                x << 0.0, v0, v0 + dv1, std::log(von);
                double shift = 0;
                bool ok = true;
                for (int i = 0; i < n && ok; ++i) {
                    double m = 0;
                    ok = model(x, i, m);
                    shift += lj[i] - m;
                }
                if (!ok) continue;
                x[0] = shift / n;
                double ssr = 0;
                for (int i = 0; i < n; ++i) {
                    double m = 0;
                    model(x, i, m);
                    ssr += (m - lj[i]) * (m - lj[i]);
                }
                if (ssr < best_ssr) {
                    best_ssr = ssr;
                    best = x;
                }
            }
        }
    }

    LeastSquaresOptions opts;
    opts.max_function_evals = 20000;
    opts.tolerance = 1e-14;
    const auto res = least_squares(fn, best, n, opts);
    auto to_params = [](const Eigen::VectorXd &q) {
        return ExchangeFitParams{std::exp(q[0]) * 1e-3, q[1] * 1e-3, q[2] * 1e-3, std::exp(q[3]) * 1e-3};
    };
    if (!res.converged) {
        const auto bp = to_params(res.params);
        throw FitError("fit_exchange_law: no convergence; best so far c=" + fmt_double(bp.c) +
                           " V_M0=" + fmt_double(bp.V_M0) + " V_M1=" + fmt_double(bp.V_M1) +
                           " V_on=" + fmt_double(bp.V_on),
                       res);
    }
    return {to_params(res.params), res.residual_norm, res.iterations};
}

}  // namespace siq
