#include "siq/clifford.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace siq {

namespace {

Matrix2c rotation(Pauli axis, double angle) {
    return std::cos(angle / 2) * Matrix2c::Identity() - cplx(0, std::sin(angle / 2)) * pauli_matrix(axis);
}

}  // namespace

Matrix2c generator_matrix(CliffordGenerator g) {
    constexpr double q = kTwoPi / 4;
    switch (g) {
        case CliffordGenerator::Xp90: return rotation(Pauli::X, q);
        case CliffordGenerator::Xm90: return rotation(Pauli::X, -q);
        case CliffordGenerator::Yp90: return rotation(Pauli::Y, q);
        case CliffordGenerator::Ym90: return rotation(Pauli::Y, -q);
    }
    throw std::logic_error("unreachable");
}

bool equal_up_to_phase(const Matrix2c &a, const Matrix2c &b, double tol) {
    return std::abs(std::abs((a.adjoint() * b).trace()) / 2.0 - 1.0) < tol;
}

CliffordGroup::CliffordGroup() {
    constexpr CliffordGenerator gens[] = {CliffordGenerator::Xp90, CliffordGenerator::Xm90, CliffordGenerator::Yp90,
                                          CliffordGenerator::Ym90};
    // Breadth-first closure keeps the shortest word for every element.
    elements_.push_back({{}, Matrix2c::Identity()});
    std::deque<int> queue{0};
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        for (const auto g : gens) {
            const Matrix2c m = generator_matrix(g) * elements_[i].matrix;
            if (find(m) >= 0) continue;
            auto word = elements_[i].word;
            word.push_back(g);
            elements_.push_back({std::move(word), m});
            queue.push_back(static_cast<int>(elements_.size()) - 1);
        }
    }
    if (elements_.size() != 24) throw std::logic_error("Clifford closure did not produce 24 elements");

    const int n = size();
    table_.assign(n, std::vector<int>(n, -1));
    inverse_.assign(n, -1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            table_[a][b] = find(elements_[b].matrix * elements_[a].matrix);
            if (table_[a][b] < 0) throw std::logic_error("Clifford group is not closed");
            if (table_[a][b] == 0) inverse_[a] = b;
        }
    }
}

const CliffordGroup &CliffordGroup::instance() {
    static const CliffordGroup group;
    return group;
}

int CliffordGroup::find(const Matrix2c &m) const {
    for (int i = 0; i < size(); ++i) {
        if (equal_up_to_phase(elements_[i].matrix, m, 1e-8)) return i;
    }
    return -1;
}

std::vector<PulseSegment> compile_clifford(const DeviceParams &p, Qubit target, const Clifford &c,
                                           double rabi_amplitude) {
    constexpr double q = kTwoPi / 4;
    std::vector<PulseSegment> out;
    for (const auto g : c.word) {
        switch (g) {
            case CliffordGenerator::Xp90: out.push_back(rotation_burst(p, target, q, 0.0, rabi_amplitude)); break;
            case CliffordGenerator::Xm90: out.push_back(rotation_burst(p, target, -q, 0.0, rabi_amplitude)); break;
            case CliffordGenerator::Yp90: out.push_back(rotation_burst(p, target, q, q, rabi_amplitude)); break;
            case CliffordGenerator::Ym90: out.push_back(rotation_burst(p, target, -q, q, rabi_amplitude)); break;
        }
    }
    return out;
}

}  // namespace siq
