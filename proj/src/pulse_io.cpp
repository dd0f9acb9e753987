#include "siq/pulse_io.hpp"

#include "siq/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace siq {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Fields {
  public:
    Fields(std::istringstream &in, std::string where) : where_(std::move(where)) {
        std::string tok;
        while (in >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError(where_ + ": expected key=value, got '" + tok + "'");
            if (!kv_.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second) {
                throw ConfigError(where_ + ": duplicate field '" + tok.substr(0, eq) + "'");
            }
        }
    }
    bool has(const std::string &k) const { return kv_.count(k) != 0; }
    std::string text(const std::string &k) {
        const auto it = kv_.find(k);
        if (it == kv_.end()) throw ConfigError(where_ + ": missing field '" + k + "'");
        used_.insert(k);
        return it->second;
    }
    double number(const std::string &k) { return parse_number(text(k), where_ + ": " + k); }
    std::optional<double> maybe(const std::string &k) {
        if (!has(k)) return std::nullopt;
        return number(k);
    }
    Qubit qubit(const std::string &k) {
        const std::string v = text(k);
        if (v == "L" || v == "left") return Qubit::Left;
        if (v == "R" || v == "right") return Qubit::Right;
        throw ConfigError(where_ + ": target must be L or R, got '" + v + "'");
    }
    void finish() const {
        for (const auto &[k, v] : kv_) {
            if (!used_.count(k)) throw ConfigError(where_ + ": unknown field '" + k + "'");
        }
    }

  private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> used_;
    std::string where_;
};

MicrowaveBurst read_burst(Fields &f, double duration) {
    return {f.qubit("target"), duration, f.number("freq"), f.number("rabi"), f.number("phase")};
}

Vector4c read_amplitudes(const std::string &text, const std::string &where) {
    Vector4c v;
    std::istringstream in(text);
    std::string item;
    int k = 0;
    while (std::getline(in, item, ',')) {
        if (k >= 4) throw ConfigError(where + ": expected 4 amplitudes");
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError(where + ": amplitude '" + item + "' is not re:im");
        v[k++] = cplx(parse_number(item.substr(0, colon), where), parse_number(item.substr(colon + 1), where));
    }
    if (k != 4) throw ConfigError(where + ": expected 4 amplitudes");
    return v;
}

std::string qubit_name(Qubit q) { return q == Qubit::Left ? "L" : "R"; }

std::string burst_fields(const MicrowaveBurst &b) {
    return " target=" + qubit_name(b.target) + " freq=" + num(b.frequency) + " rabi=" + num(b.rabi_amplitude) +
           " phase=" + num(b.phase);
}

}  // namespace

PulseSequence parse_pulse_sequence(const std::string &text) {
    PulseSequence seq;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_init = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        const std::string where = "pulse line " + std::to_string(lineno);
        Fields f(ls, where);
        try {
            if (kind == "init") {
                if (have_init) throw ConfigError(where + ": repeated init");
                have_init = true;
                if (f.has("state")) {
                    seq.initial_state = TwoQubitState::basis(parse_basis_state(f.text("state")));
                } else {
                    const Vector4c v = read_amplitudes(f.text("amplitudes"), where);
                    seq.initial_state = std::abs(v.squaredNorm() - 1.0) < 1e-12 ? TwoQubitState(v)
                                                                                 : TwoQubitState::normalized(v);
                }
            } else if (kind == "burst") {
                const double d = f.number("duration");
                seq.add(read_burst(f, d));
            } else if (kind == "exchange") {
                DcExchange e{f.number("duration"), f.maybe("J"), f.maybe("V_M")};
                seq.add(e);
            } else if (kind == "idle") {
                seq.add(Idle{f.number("duration")});
            } else if (kind == "composite") {
                CompositeSegment c{f.number("duration"), std::nullopt, f.maybe("J")};
                if (f.has("target")) c.microwave = read_burst(f, c.duration);
                seq.add(c);
            } else if (kind == "vz") {
                seq.add(VirtualZ{f.qubit("target"), f.number("angle")});
            } else {
                throw ConfigError(where + ": unknown segment kind '" + kind + "'");
            }
        } catch (const std::invalid_argument &e) {
            throw ConfigError(where + ": " + e.what());
        }
        f.finish();
    }
    try {
        seq.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("pulse sequence: ") + e.what());
    }
    return seq;
}

PulseSequence load_pulse_sequence(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open pulse file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_pulse_sequence(ss.str());
}

std::string format_pulse_sequence(const PulseSequence &seq) {
    std::ostringstream out;
    out << "init amplitudes=";
    for (int k = 0; k < 4; ++k) {
        out << (k ? "," : "") << num(seq.initial_state[k].real()) << ":" << num(seq.initial_state[k].imag());
    }
    out << "\n";
    for (const auto &seg : seq.segments) {
        std::visit(
            [&](const auto &s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, MicrowaveBurst>) {
                    out << "burst duration=" << num(s.duration) << burst_fields(s);
                } else if constexpr (std::is_same_v<T, DcExchange>) {
                    out << "exchange duration=" << num(s.duration);
                    if (s.J) out << " J=" << num(*s.J);
                    if (s.V_M) out << " V_M=" << num(*s.V_M);
                } else if constexpr (std::is_same_v<T, Idle>) {
                    out << "idle duration=" << num(s.duration);
                } else if constexpr (std::is_same_v<T, CompositeSegment>) {
                    out << "composite duration=" << num(s.duration);
                    if (s.J) out << " J=" << num(*s.J);
                    if (s.microwave) out << burst_fields(*s.microwave);
                } else if constexpr (std::is_same_v<T, VirtualZ>) {
                    out << "vz target=" << qubit_name(s.target) << " angle=" << num(s.angle);
                }
            },
            seg);
        out << "\n";
    }
    return out.str();
}

}  // namespace siq
