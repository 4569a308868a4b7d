// fixtures.hpp - exact fixture matrices for the qubit counterexample pair
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qcc/witness.hpp"

namespace qcc::fixtures {

namespace detail {

inline HermitianMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows, double scale,
                                   const TensorShape& shape) {
    const int n = static_cast<int>(rows.size());
    CMat m(n, n);
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (double v : r) m(i, j++) = v * scale;
        ++i;
    }
    return HermitianMatrix(m, shape);
}

}  // namespace detail

/// J(Φ₁) of the qubit counterexample: compatible with J(Φ₂) but with no PPT compatibilizer.
inline HermitianMatrix counterexample_choi1() {
    return detail::real_matrix({{6, 0, 0, 2}, {0, 2, 0, 0}, {0, 0, 2, 0}, {2, 0, 0, 6}}, 1.0 / 8, TensorShape{2, 2});
}

inline HermitianMatrix counterexample_choi2() {
    return detail::real_matrix({{5, 0, 0, 3}, {0, 3, 1, 0}, {0, 1, 3, 0}, {3, 0, 0, 5}}, 1.0 / 8, TensorShape{2, 2});
}

/// Compatibilizer of the counterexample pair on X⊗Y₁⊗Y₂.
inline HermitianMatrix counterexample_compatibilizer() {
    return detail::real_matrix({{8, 0, 0, 0, 0, 3, 2, 0},
                                {0, 4, 0, 0, 1, 0, 0, 2},
                                {0, 0, 2, 0, 0, 0, 0, 3},
                                {0, 0, 0, 2, 0, 0, 1, 0},
                                {0, 1, 0, 0, 2, 0, 0, 0},
                                {3, 0, 0, 0, 0, 2, 0, 0},
                                {2, 0, 0, 1, 0, 0, 4, 0},
                                {0, 2, 3, 0, 0, 0, 0, 8}},
                               1.0 / 16, TensorShape{2, 2, 2});
}

/// PPT-mode witness with pairing −1/2 against the counterexample pair.
inline Witness counterexample_witness() {
    return {detail::real_matrix({{-2, 0, 0, 2}, {0, 48, -38, 0}, {0, -38, 48, 0}, {2, 0, 0, -2}}, 1.0, TensorShape{2, 2}),
            detail::real_matrix({{3, 0, 0, -4}, {0, 40, -47, 0}, {0, -47, 40, 0}, {-4, 0, 0, 3}}, 1.0, TensorShape{2, 2}),
            WitnessMode::ppt, std::nullopt};
}

/// (4 ± √3 ± √(10 ± 4√3))/16 with the inner signs tied, ascending; each has multiplicity 2.
inline std::array<double, 4> counterexample_compatibilizer_spectrum() {
    const double r3 = std::sqrt(3.0);
    std::array<double, 4> v{(4 - r3 - std::sqrt(10 - 4 * r3)) / 16, (4 + r3 - std::sqrt(10 + 4 * r3)) / 16,
                            (4 - r3 + std::sqrt(10 - 4 * r3)) / 16, (4 + r3 + std::sqrt(10 + 4 * r3)) / 16};
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace qcc::fixtures
