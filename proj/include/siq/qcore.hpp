#pragma once

// Small dense complex linear algebra for the two-spin Hilbert space.
//
// Conventions used throughout the library:
//   * Basis order {|uu>, |ud>, |du>, |dd>}; the first label is the left spin.
//   * |up> is the +1 eigenstate of Pauli Z (index 0 in single-spin space).
//   * Hamiltonians are stored as frequencies in Hz (E/h) and propagators are
//     exp(-i 2 pi H t) with t in seconds.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>
#include <string_view>

namespace siq {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;
using ComplexMatrix4 = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class Qubit { Left, Right };
enum class Spin { Up, Down };

enum class BasisState : int { UpUp = 0, UpDown = 1, DownUp = 2, DownDown = 3 };

/// Index of the basis state with the given left/right spins.
constexpr int basis_index(Spin left, Spin right) {
    return (left == Spin::Up ? 0 : 2) + (right == Spin::Up ? 0 : 1);
}
constexpr Spin spin_of(int index, Qubit q) {
    const int bit = q == Qubit::Left ? (index >> 1) & 1 : index & 1;
    return bit == 0 ? Spin::Up : Spin::Down;
}
/// +1/2 for up, -1/2 for down.
constexpr double sz_of(int index, Qubit q) { return spin_of(index, q) == Spin::Up ? 0.5 : -0.5; }

std::string to_string(BasisState s);
std::string_view to_string(Qubit q);
/// Parses "uu", "ud", "du", "dd" (left spin first).
BasisState parse_basis_state(std::string_view text);

/// Normalized pure state of the two spins.
class TwoQubitState {
  public:
    /// Throws std::invalid_argument unless sum |a_i|^2 = 1 within 1e-10.
    explicit TwoQubitState(const Vector4c &amplitudes);
    static TwoQubitState basis(BasisState s);
    static TwoQubitState product(const Vector2c &left, const Vector2c &right);
    /// Renormalizes an arbitrary nonzero vector.
    static TwoQubitState normalized(const Vector4c &v);

    const Vector4c &amplitudes() const { return amps_; }
    cplx operator[](int i) const { return amps_[i]; }
    std::array<double, 4> populations() const;
    double p_up(Qubit q) const;

  private:
    Vector4c amps_;
};

/// Hermitian, unit-trace 4x4 operator. Construction validates Hermiticity and
/// trace but not positivity; use project_physical() for that.
class DensityMatrix {
  public:
    explicit DensityMatrix(const ComplexMatrix4 &rho);
    static DensityMatrix pure(const TwoQubitState &psi);
    static DensityMatrix maximally_mixed();

    const ComplexMatrix4 &matrix() const { return rho_; }
    double min_eigenvalue() const;
    bool is_physical(double tol = 1e-10) const { return min_eigenvalue() >= -tol; }
    /// Clips negative eigenvalues to zero and renormalizes the trace.
    DensityMatrix project_physical() const;
    std::array<double, 4> populations() const;

  private:
    ComplexMatrix4 rho_;
};

enum class Pauli { I = 0, X = 1, Y = 2, Z = 3 };

struct PauliLabel {
    Pauli left = Pauli::I;
    Pauli right = Pauli::I;

    /// Two-letter name, left first ("YX" = Y on the left spin, X on the right).
    std::string name() const;
    static PauliLabel parse(std::string_view name);
    /// Index in [0, 16) with left as the major digit.
    int index() const { return 4 * static_cast<int>(left) + static_cast<int>(right); }
    static PauliLabel from_index(int i) { return {static_cast<Pauli>(i / 4), static_cast<Pauli>(i % 4)}; }
    static std::array<PauliLabel, 16> all();

    friend bool operator==(const PauliLabel &, const PauliLabel &) = default;
};

struct SpinOperators {
    Matrix2c sx, sy, sz;                // single spin, eigenvalues +-1/2
    ComplexMatrix4 sx_l, sy_l, sz_l;    // embedded on the left spin
    ComplexMatrix4 sx_r, sy_r, sz_r;    // embedded on the right spin
    ComplexMatrix4 sl_dot_sr;           // S_L . S_R
};
const SpinOperators &spin_operators();

Matrix2c pauli_matrix(Pauli p);
ComplexMatrix4 pauli_matrix(PauliLabel label);
/// Kronecker product with `left` as the major factor.
ComplexMatrix4 kron(const Matrix2c &left, const Matrix2c &right);
/// Embeds a single-spin operator on qubit q.
ComplexMatrix4 embed(const Matrix2c &op, Qubit q);

/// ||M - M^dagger|| (Frobenius).
double hermiticity_error(const ComplexMatrix4 &m);
/// ||M^dagger M - I|| (Frobenius).
double unitarity_error(const ComplexMatrix4 &m);

struct HermitianEigen {
    Eigen::Vector4d values;    // ascending
    ComplexMatrix4 vectors;    // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. Throws std::invalid_argument if
/// ||H - H^dagger|| > 1e-9 * max(1, ||H||).
HermitianEigen eig_hermitian(const ComplexMatrix4 &h);

/// exp(-i 2 pi H dt) for Hermitian H in Hz, built from the eigendecomposition so
/// the result is unitary to machine precision. Same Hermiticity check as
/// eig_hermitian.
ComplexMatrix4 expm_skew_hermitian(const ComplexMatrix4 &h, double dt);

/// tr(rho P), real part (the imaginary part vanishes for Hermitian rho).
double pauli_expectation(const ComplexMatrix4 &rho, PauliLabel label);
inline double pauli_expectation(const DensityMatrix &rho, PauliLabel label) {
    return pauli_expectation(rho.matrix(), label);
}

/// rho = (1/4) sum_P <P> P, indexed by PauliLabel::index().
ComplexMatrix4 density_from_paulis(const std::array<double, 16> &expectations);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

}  // namespace siq
