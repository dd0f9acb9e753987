#include "siq/tomo.hpp"

#include <cmath>
#include <stdexcept>

namespace siq {

namespace {

constexpr double kPi = kTwoPi / 2;

double spin_sign(int basis, Qubit q) { return spin_of(basis, q) == Spin::Up ? 1.0 : -1.0; }

void check_probabilities(const std::array<double, 4> &p) {
    double s = 0;
    for (const double x : p) {
        if (!(x >= -1e-9 && x <= 1 + 1e-9)) throw std::invalid_argument("tomography: probability outside [0, 1]");
        s += x;
    }
    if (std::abs(s - 1) > 1e-9) throw std::invalid_argument("tomography: probabilities do not sum to 1");
}

}  // namespace

std::string to_string(Prerotation r) {
    switch (r) {
        case Prerotation::I: return "I";
        case Prerotation::X90: return "X90";
        case Prerotation::Y90: return "Y90";
        case Prerotation::X180: return "X180";
    }
    return "?";
}

std::pair<Pauli, int> measured_observable(Prerotation r) {
    switch (r) {
        case Prerotation::I: return {Pauli::Z, 1};
        case Prerotation::X90: return {Pauli::Y, 1};
        case Prerotation::Y90: return {Pauli::X, -1};
        case Prerotation::X180: return {Pauli::Z, -1};
    }
    throw std::logic_error("unreachable");
}

Matrix2c prerotation_matrix(Prerotation r) {
    auto rot = [](Pauli axis, double angle) -> Matrix2c {
        return std::cos(angle / 2) * Matrix2c::Identity() - cplx(0, std::sin(angle / 2)) * pauli_matrix(axis);
    };
    switch (r) {
        case Prerotation::I: return Matrix2c::Identity();
        case Prerotation::X90: return rot(Pauli::X, kPi / 2);
        case Prerotation::Y90: return rot(Pauli::Y, kPi / 2);
        case Prerotation::X180: return rot(Pauli::X, kPi);
    }
    throw std::logic_error("unreachable");
}

std::vector<MeasurementSetting> measurement_settings() {
    std::vector<MeasurementSetting> out;
    for (const auto l : {Prerotation::X90, Prerotation::Y90, Prerotation::I}) {
        for (const auto r : {Prerotation::X90, Prerotation::Y90, Prerotation::I}) out.push_back({l, r});
    }
    return out;
}

std::vector<LabelAssignment> tomography_plan() {
    std::vector<LabelAssignment> plan;
    for (const auto &s : measurement_settings()) {
        const auto [pl, sl] = measured_observable(s.left);
        const auto [pr, sr] = measured_observable(s.right);
        // Correlators from every setting; single-spin labels only where the
        // other spin is unrotated, so each label appears once.
        plan.push_back({{pl, pr}, s, sl * sr});
        if (s.right == Prerotation::I) plan.push_back({{pl, Pauli::I}, s, sl});
        if (s.left == Prerotation::I) plan.push_back({{Pauli::I, pr}, s, sr});
    }
    return plan;
}

TomographyRecord simulate_record(const ComplexMatrix4 &rho, const MeasurementSetting &setting) {
    const ComplexMatrix4 U = kron(prerotation_matrix(setting.left), prerotation_matrix(setting.right));
    const ComplexMatrix4 out = U * rho * U.adjoint();
    TomographyRecord rec{setting, {}};
    for (int k = 0; k < 4; ++k) rec.probabilities[k] = out(k, k).real();
    return rec;
}

Reconstruction reconstruct(const std::vector<TomographyRecord> &records) {
    for (const auto &r : records) check_probabilities(r.probabilities);
    Reconstruction out;
    out.paulis.fill(0.0);
    out.paulis[0] = 1.0;
    std::string missing;
    for (const auto &a : tomography_plan()) {
        const TomographyRecord *rec = nullptr;
        for (const auto &r : records) {
            if (r.setting == a.setting) {
                rec = &r;
                break;
            }
        }
        if (!rec) {
            missing += (missing.empty() ? "" : ", ") + a.label.name();
            continue;
        }
        double e = 0;
        for (int k = 0; k < 4; ++k) {
            const double sl = a.label.left == Pauli::I ? 1.0 : spin_sign(k, Qubit::Left);
            const double sr = a.label.right == Pauli::I ? 1.0 : spin_sign(k, Qubit::Right);
            e += sl * sr * rec->probabilities[k];
        }
        out.paulis[a.label.index()] = a.sign * e;
    }
    if (!missing.empty()) throw std::invalid_argument("tomography: no setting covers label(s) " + missing);
    out.raw = density_from_paulis(out.paulis);
    out.projected = DensityMatrix(out.raw).project_physical();
    return out;
}

double fidelity(const ComplexMatrix4 &rho, const TwoQubitState &target) {
    const auto &v = target.amplitudes();
    const double overlap = v.dot(rho * v).real();
    return std::sqrt(std::max(0.0, overlap));
}

void VisibilityModel::validate() const {
    auto in01 = [](double x) { return x >= 0 && x <= 1; };
    if (!in01(V_L) || !in01(V_R)) throw std::invalid_argument("visibility must lie in [0, 1]");
    for (const auto *a : {&asymmetric_L, &asymmetric_R}) {
        if (*a && (!in01((**a)[0]) || !in01((**a)[1]))) {
            throw std::invalid_argument("readout fidelities must lie in [0, 1]");
        }
    }
}

std::array<double, 4> apply_visibility(const std::array<double, 4> &probabilities, const VisibilityModel &model) {
    model.validate();
    check_probabilities(probabilities);
    auto confusion = [](double V, const std::optional<std::array<double, 2>> &asym) {
        const double fu = asym ? (*asym)[0] : 0.5 * (1 + V);
        const double fd = asym ? (*asym)[1] : 0.5 * (1 + V);
        Eigen::Matrix2d c;
        c << fu, 1 - fd, 1 - fu, fd;  // rows: measured up/down, columns: true up/down
        return c;
    };
    const Eigen::Matrix2d cl = confusion(model.V_L, model.asymmetric_L);
    const Eigen::Matrix2d cr = confusion(model.V_R, model.asymmetric_R);
    std::array<double, 4> out{};
    for (int m = 0; m < 4; ++m) {
        for (int t = 0; t < 4; ++t) out[m] += cl(m >> 1, t >> 1) * cr(m & 1, t & 1) * probabilities[t];
    }
    return out;
}

TwoQubitState bell_target() {
    Vector4c v = Vector4c::Zero();
    v[0] = cplx(0, -1 / std::sqrt(2.0));
    v[3] = 1 / std::sqrt(2.0);
    return TwoQubitState::normalized(v);
}

BellResult bell_experiment(const DeviceParams &p, const VisibilityModel &visibility, const NoiseConfig &noise,
                           const std::optional<CnotCalibration> &cal) {
    visibility.validate();
    const CnotCalibration c = cal ? *cal : calibrate_cnot(p);
    const double rabi = p.rabi_frequency;
    PulseSequence prep;
    prep.add(rotation_burst(p, Qubit::Right, kPi / 2, 0.0, rabi));
    prep.append(cnot_sequence(p, c));

    auto pulses = [&](Prerotation r, Qubit q) -> std::optional<MicrowaveBurst> {
        switch (r) {
            case Prerotation::I: return std::nullopt;
            case Prerotation::X90: return rotation_burst(p, q, kPi / 2, 0.0, rabi);
            case Prerotation::Y90: return rotation_burst(p, q, kPi / 2, kPi / 2, rabi);
            case Prerotation::X180: return rotation_burst(p, q, kPi, 0.0, rabi);
        }
        return std::nullopt;
    };

    BellResult out;
    for (const auto &s : measurement_settings()) {
        PulseSequence seq = prep;
        if (auto b = pulses(s.left, Qubit::Left)) seq.add(*b);
        if (auto b = pulses(s.right, Qubit::Right)) seq.add(*b);
        auto pop = evolve_ensemble(seq, p, noise);
        double total = 0;
        for (const double x : pop) total += x;
        for (auto &x : pop) x /= total;
        out.records.push_back({s, apply_visibility(pop, visibility)});
    }
    out.reconstruction = reconstruct(out.records);
    const auto target = bell_target();
    out.fidelity_raw = fidelity(out.reconstruction.raw, target);
    out.fidelity_projected = fidelity(out.reconstruction.projected, target);
    return out;
}

}  // namespace siq
