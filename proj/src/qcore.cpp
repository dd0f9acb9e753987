#include "siq/qcore.hpp"

#include <cmath>
#include <stdexcept>

namespace siq {

namespace {

constexpr double kNormTol = 1e-10;

void require_hermitian(const ComplexMatrix4 &h, const char *what) {
    const double scale = std::max(1.0, h.norm());
    if (hermiticity_error(h) > 1e-9 * scale) {
        throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
    }
}

}  // namespace

std::string to_string(BasisState s) {
    static constexpr const char *names[] = {"uu", "ud", "du", "dd"};
    return names[static_cast<int>(s)];
}

std::string_view to_string(Qubit q) { return q == Qubit::Left ? "left" : "right"; }

BasisState parse_basis_state(std::string_view text) {
    if (text == "uu") return BasisState::UpUp;
    if (text == "ud") return BasisState::UpDown;
    if (text == "du") return BasisState::DownUp;
    if (text == "dd") return BasisState::DownDown;
    throw std::invalid_argument("unknown basis state '" + std::string(text) + "' (expected uu, ud, du or dd)");
}

// --- TwoQubitState -----------------------------------------------------------

TwoQubitState::TwoQubitState(const Vector4c &amplitudes) : amps_(amplitudes) {
    if (std::abs(amps_.squaredNorm() - 1.0) > kNormTol) {
        throw std::invalid_argument("TwoQubitState: amplitudes are not normalized");
    }
}

TwoQubitState TwoQubitState::basis(BasisState s) {
    Vector4c v = Vector4c::Zero();
    v[static_cast<int>(s)] = 1.0;
    return TwoQubitState(v);
}

TwoQubitState TwoQubitState::product(const Vector2c &left, const Vector2c &right) {
    Vector4c v;
    for (int l = 0; l < 2; ++l) {
        for (int r = 0; r < 2; ++r) v[2 * l + r] = left[l] * right[r];
    }
    return normalized(v);
}

TwoQubitState TwoQubitState::normalized(const Vector4c &v) {
    const double n = v.norm();
    if (n == 0.0) throw std::invalid_argument("TwoQubitState: zero vector");
    return TwoQubitState(v / n);
}

std::array<double, 4> TwoQubitState::populations() const {
    return {std::norm(amps_[0]), std::norm(amps_[1]), std::norm(amps_[2]), std::norm(amps_[3])};
}

double TwoQubitState::p_up(Qubit q) const {
    const auto p = populations();
    return q == Qubit::Left ? p[0] + p[1] : p[0] + p[2];
}

// --- DensityMatrix -----------------------------------------------------------

DensityMatrix::DensityMatrix(const ComplexMatrix4 &rho) : rho_(rho) {
    if (hermiticity_error(rho_) > kNormTol) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(rho_.trace() - 1.0) > kNormTol) throw std::invalid_argument("DensityMatrix: trace is not 1");
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
}

DensityMatrix DensityMatrix::pure(const TwoQubitState &psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(ComplexMatrix4::Identity() / 4.0); }

double DensityMatrix::min_eigenvalue() const { return eig_hermitian(rho_).values[0]; }

DensityMatrix DensityMatrix::project_physical() const {
    const auto e = eig_hermitian(rho_);
    Eigen::Vector4d lam = e.values.cwiseMax(0.0);
    lam /= lam.sum();
    ComplexMatrix4 out = e.vectors * lam.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    // Renormalization is exact up to rounding; absorb that into the diagonal.
    out /= out.trace().real();
    return DensityMatrix(out);
}

std::array<double, 4> DensityMatrix::populations() const {
    return {rho_(0, 0).real(), rho_(1, 1).real(), rho_(2, 2).real(), rho_(3, 3).real()};
}

// --- Pauli labels ------------------------------------------------------------

std::string PauliLabel::name() const {
    static constexpr char letters[] = {'I', 'X', 'Y', 'Z'};
    return {letters[static_cast<int>(left)], letters[static_cast<int>(right)]};
}

PauliLabel PauliLabel::parse(std::string_view name) {
    auto one = [&](char c) {
        switch (c) {
            case 'I': return Pauli::I;
            case 'X': return Pauli::X;
            case 'Y': return Pauli::Y;
            case 'Z': return Pauli::Z;
            default: throw std::invalid_argument("bad Pauli label '" + std::string(name) + "'");
        }
    };
    if (name.size() != 2) throw std::invalid_argument("bad Pauli label '" + std::string(name) + "'");
    return {one(name[0]), one(name[1])};
}

std::array<PauliLabel, 16> PauliLabel::all() {
    std::array<PauliLabel, 16> out;
    for (int i = 0; i < 16; ++i) out[i] = from_index(i);
    return out;
}

// --- operators ---------------------------------------------------------------

Matrix2c pauli_matrix(Pauli p) {
    const cplx i(0.0, 1.0);
    Matrix2c m;
    switch (p) {
        case Pauli::I: m << 1, 0, 0, 1; break;
        case Pauli::X: m << 0, 1, 1, 0; break;
        case Pauli::Y: m << 0, -i, i, 0; break;
        case Pauli::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

ComplexMatrix4 kron(const Matrix2c &left, const Matrix2c &right) {
    ComplexMatrix4 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) out(2 * a + c, 2 * b + d) = left(a, b) * right(c, d);
    return out;
}

ComplexMatrix4 pauli_matrix(PauliLabel label) { return kron(pauli_matrix(label.left), pauli_matrix(label.right)); }

ComplexMatrix4 embed(const Matrix2c &op, Qubit q) {
    const Matrix2c id = Matrix2c::Identity();
    return q == Qubit::Left ? kron(op, id) : kron(id, op);
}

const SpinOperators &spin_operators() {
    static const SpinOperators ops = [] {
        SpinOperators s;
        s.sx = 0.5 * pauli_matrix(Pauli::X);
        s.sy = 0.5 * pauli_matrix(Pauli::Y);
        s.sz = 0.5 * pauli_matrix(Pauli::Z);
        s.sx_l = embed(s.sx, Qubit::Left);
        s.sy_l = embed(s.sy, Qubit::Left);
        s.sz_l = embed(s.sz, Qubit::Left);
        s.sx_r = embed(s.sx, Qubit::Right);
        s.sy_r = embed(s.sy, Qubit::Right);
        s.sz_r = embed(s.sz, Qubit::Right);
        s.sl_dot_sr = s.sx_l * s.sx_r + s.sy_l * s.sy_r + s.sz_l * s.sz_r;
        return s;
    }();
    return ops;
}

double hermiticity_error(const ComplexMatrix4 &m) { return (m - m.adjoint()).norm(); }

double unitarity_error(const ComplexMatrix4 &m) {
    return (m.adjoint() * m - ComplexMatrix4::Identity()).norm();
}

HermitianEigen eig_hermitian(const ComplexMatrix4 &h) {
    require_hermitian(h, "eig_hermitian");
    const ComplexMatrix4 sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix4> solver(sym);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix4 expm_skew_hermitian(const ComplexMatrix4 &h, double dt) {
    const auto e = eig_hermitian(h);
    Vector4c phases;
    for (int k = 0; k < 4; ++k) {
        // Reduce the cycle count first; E_Z * t can reach 1e5 cycles.
        const double cycles = std::fmod(e.values[k] * dt, 1.0);
        phases[k] = std::polar(1.0, -kTwoPi * cycles);
    }
    return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

double pauli_expectation(const ComplexMatrix4 &rho, PauliLabel label) {
    return (rho * pauli_matrix(label)).trace().real();
}

ComplexMatrix4 density_from_paulis(const std::array<double, 16> &expectations) {
    ComplexMatrix4 rho = ComplexMatrix4::Zero();
    for (int i = 0; i < 16; ++i) rho += expectations[i] * pauli_matrix(PauliLabel::from_index(i));
    return rho / 4.0;
}

double wrap_phase(double angle) {
    double w = std::remainder(angle, kTwoPi);
    if (w <= -kTwoPi / 2) w += kTwoPi;
    return w;
}

}  // namespace siq
