#include "siq/rb.hpp"

#include "siq/clifford.hpp"
#include "siq/experiments.hpp"
#include "siq/fit.hpp"
#include "siq/pulses.hpp"
#include "siq/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace siq {

void RbErrorModel::validate() const {
    if (!(r >= 0 && r <= 1)) throw std::invalid_argument("RB: depolarizing r must lie in [0, 1]");
    if (!(sigma_f >= 0)) throw std::invalid_argument("RB: sigma_f must be >= 0");
    if (n_noise_samples < 1) throw std::invalid_argument("RB: n_noise_samples must be >= 1");
}

double rb_depolarizing_survival(double r, int n_cliffords) { return 0.5 + 0.5 * std::pow(1 - r, n_cliffords + 1); }

namespace {

// Propagators of all 24 Cliffords for one noise realization.
std::vector<ComplexMatrix4> clifford_unitaries(const DeviceParams &p, Qubit target, double rabi,
                                               const FrequencyOffsets &off) {
    const auto &group = CliffordGroup::instance();
    std::vector<ComplexMatrix4> out;
    out.reserve(group.size());
    for (int i = 0; i < group.size(); ++i) {
        out.push_back(propagator(compile_clifford(p, target, group[i], rabi), p, {}, off));
    }
    return out;
}

ComplexMatrix4 depolarize(const ComplexMatrix4 &rho, Qubit target, double r) {
    ComplexMatrix4 acc = ComplexMatrix4::Zero();
    for (const Pauli pa : {Pauli::X, Pauli::Y, Pauli::Z}) {
        const ComplexMatrix4 P = embed(pauli_matrix(pa), target);
        acc += P * rho * P;
    }
    return (1 - 0.75 * r) * rho + 0.25 * r * acc;
}

}  // namespace

RbResult run_rb(const DeviceParams &p, Qubit target, const std::vector<int> &n_cliffords_list, int n_sequences,
                const RbErrorModel &model, const RbOptions &opts) {
    model.validate();
    if (n_cliffords_list.empty()) throw std::invalid_argument("RB: empty sequence-length list");
    if (n_sequences < 1) throw std::invalid_argument("RB: n_sequences must be >= 1");
    for (const int n : n_cliffords_list) {
        if (n < 0) throw std::invalid_argument("RB: sequence lengths must be >= 0");
    }
    const double rabi = opts.rabi_amplitude > 0 ? opts.rabi_amplitude : p.rabi_frequency;
    const auto &group = CliffordGroup::instance();
    const int x180 = group.find(generator_matrix(CliffordGenerator::Xp90) * generator_matrix(CliffordGenerator::Xp90));

    // Noise realizations are shared by all sequences.
    const bool dephasing = model.kind == RbErrorModel::Kind::QuasiStaticDephasing;
    const int n_real = dephasing ? model.n_noise_samples : 1;
    NoiseConfig noise;
    noise.n_samples = n_real;
    noise.seed = opts.seed;
    (target == Qubit::Left ? noise.sigma_f_L : noise.sigma_f_R) = dephasing ? model.sigma_f : 0.0;
    std::vector<std::vector<ComplexMatrix4>> unitaries(n_real);
    for (int k = 0; k < n_real; ++k) unitaries[k] = clifford_unitaries(p, target, rabi, noise.sample(k));

    const int n_len = static_cast<int>(n_cliffords_list.size());
    const int total = n_len * n_sequences;
    std::vector<double> survival(total);
    const Qubit up_index_qubit = target;
#pragma omp parallel for schedule(dynamic)
    for (int job = 0; job < total; ++job) {
        const int N = n_cliffords_list[job / n_sequences];
        auto rng = make_rng(opts.seed, stream::kRbSequence, static_cast<std::uint64_t>(job));
        std::uniform_int_distribution<int> pick(0, group.size() - 1);
        std::vector<int> seq(N);
        int net = group.identity();
        for (int i = 0; i < N; ++i) {
            seq[i] = pick(rng);
            net = group.compose(net, seq[i]);
        }
        seq.push_back(group.compose(group.inverse(net), x180));

        const ComplexMatrix4 rho0 = DensityMatrix::pure(TwoQubitState::basis(BasisState::DownDown)).matrix();
        double acc = 0;
        for (int k = 0; k < n_real; ++k) {
            ComplexMatrix4 rho = rho0;
            for (const int c : seq) {
                const auto &U = unitaries[k][c];
                rho = U * rho * U.adjoint();
                if (model.kind == RbErrorModel::Kind::Depolarizing) rho = depolarize(rho, target, model.r);
            }
            const double p_up = up_index_qubit == Qubit::Left ? (rho(0, 0) + rho(1, 1)).real()
                                                              : (rho(0, 0) + rho(2, 2)).real();
            acc += p_up;
        }
        survival[job] = acc / n_real;
    }

    std::vector<double> lengths, mean(n_len), sem(n_len);
    for (int l = 0; l < n_len; ++l) {
        lengths.push_back(n_cliffords_list[l]);
        double s = 0, s2 = 0;
        for (int q = 0; q < n_sequences; ++q) {
            const double v = survival[l * n_sequences + q];
            s += v;
            s2 += v * v;
        }
        mean[l] = s / n_sequences;
        const double var = n_sequences > 1 ? std::max(0.0, (s2 - s * s / n_sequences) / (n_sequences - 1)) : 0.0;
        sem[l] = std::sqrt(var / n_sequences);
    }

    RbResult out;
    out.data = ExperimentResult("randomized_benchmarking", {{"n_cliffords", "", lengths}});
    out.data.add_column("p_up", "", mean, true);
    out.data.add_column("p_up_sem", "", sem, false);
    const char *kind = model.kind == RbErrorModel::Kind::None           ? "none"
                       : model.kind == RbErrorModel::Kind::Depolarizing ? "depolarizing"
                                                                        : "quasi_static_dephasing";
    stamp_metadata(out.data, p, opts.seed,
                   {{"target", std::string(to_string(target))}, {"n_sequences", n_sequences}, {"error_model", kind},
                    {"r", model.r}, {"sigma_f", model.sigma_f}, {"n_noise_samples", n_real}, {"rabi_amplitude", rabi}});
    if (n_len < 3) {
        out.data.add_warning("need at least three sequence lengths to fit the decay");
        return out;
    }
    try {
        const auto f = fit_exponential_decay(lengths, mean);
        RbFit fit{f.A, f.B, f.p, f.p_stderr, (1 + f.p) / 2, f.p_stderr / 2};
        out.fit = fit;
        out.data.set_summary("A", fit.A);
        out.data.set_summary("B", fit.B);
        out.data.set_summary("p_c", fit.p_c);
        out.data.set_summary("p_c_stderr", fit.p_c_stderr);
        out.data.set_summary("F_c", fit.F_c);
        out.data.set_summary("F_c_stderr", fit.F_c_stderr);
    } catch (const FitError &e) {
        out.data.add_warning(std::string("decay fit failed: ") + e.what());
    }
    return out;
}

}  // namespace siq
