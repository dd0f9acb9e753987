#pragma once

// The 24-element single-qubit Clifford group, generated by closure from
// {+X90, -X90, +Y90, -Y90}. Elements are compared up to global phase.

#include "siq/device.hpp"
#include "siq/pulses.hpp"
#include "siq/qcore.hpp"

#include <vector>

namespace siq {

enum class CliffordGenerator { Xp90, Xm90, Yp90, Ym90 };

Matrix2c generator_matrix(CliffordGenerator g);

struct Clifford {
    /// Generators in time order (first applied first).
    std::vector<CliffordGenerator> word;
    Matrix2c matrix;
};

class CliffordGroup {
  public:
    static const CliffordGroup &instance();

    int size() const { return static_cast<int>(elements_.size()); }
    const Clifford &operator[](int i) const { return elements_.at(i); }
    /// Index of the element applying `first` and then `second`.
    int compose(int first, int second) const { return table_[first][second]; }
    int inverse(int i) const { return inverse_[i]; }
    int identity() const { return 0; }
    /// Index of the element equal to m up to global phase, or -1.
    int find(const Matrix2c &m) const;

  private:
    CliffordGroup();
    std::vector<Clifford> elements_;
    std::vector<std::vector<int>> table_;
    std::vector<int> inverse_;
};

/// True if a = e^{i phi} b for some phi, within tol.
bool equal_up_to_phase(const Matrix2c &a, const Matrix2c &b, double tol = 1e-9);

/// Bursts realizing a Clifford on `target` at J = 0.
std::vector<PulseSegment> compile_clifford(const DeviceParams &p, Qubit target, const Clifford &c,
                                           double rabi_amplitude);

}  // namespace siq
