// analytic.hpp - closed-form compatibility criteria for the qubit channel families
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qcc/jordan.hpp"

namespace qcc {

/// (p, q) for Ξ_{p,q} = (1−p−q)I + pΔ + qΩ.
struct XiParams {
    double p = 0.0;
    double q = 0.0;

    XiParams(double p_, double q_) : p(p_), q(q_) {
        check_unit_interval(p, "p");
        check_unit_interval(q, "q");
        if (p + q > 1.0 + 1e-12) throw DimensionError("XiParams: p + q > 1");
    }
};

/// Tr((Tr_X J)²) ≥ Tr(J²) − 4√det(J) for a qubit channel Choi matrix J.
inline bool qubit_self_compatible(const HermitianMatrix& j) {
    if (j.side() != 4) throw DimensionError("qubit_self_compatible: Choi matrix must be 4x4");
    Channel c(j, 2);
    const CMat& m = c.choi().mat();
    CMat b = detail::partial_trace(m, {2, 2}, {0});
    double lhs = (b * b).trace().real();
    double det = m.determinant().real();
    if (det < 0.0) {
        if (det < -1e-12) throw DimensionError("qubit_self_compatible: negative determinant");
        det = 0.0;
    }
    double rhs = (m * m).trace().real() - 4.0 * std::sqrt(det);
    return lhs >= rhs;
}

/// q ≥ (2 − p − √(1 + 2p(1−p)))/3.
inline double xi_self_threshold(double p) { return (2.0 - p - std::sqrt(1.0 + 2.0 * p * (1.0 - p))) / 3.0; }

inline bool xi_self_compatible(const XiParams& x) { return x.q >= xi_self_threshold(x.p); }

/// q ≥ 2(1−p)/3.
inline double xi_measure_prepare_threshold(double p) { return 2.0 * (1.0 - p) / 3.0; }

inline bool xi_measure_prepare(const XiParams& x) { return x.q >= xi_measure_prepare_threshold(x.p); }

/// q₀ + √(q₀q₁) + q₁ ≥ 1.
inline bool depol_pair_compatible(double q0, double q1) {
    check_unit_interval(q0, "q0");
    check_unit_interval(q1, "q1");
    return q0 + std::sqrt(q0 * q1) + q1 >= 1.0;
}

/// Ξ⁻¹ = (1/(1−p−q))(I − (p/(1−q))Δ − q((1−p−q)/(1−q))Ω) on a qubit.
inline LinearMapRep xi_inverse(const XiParams& x) {
    const double s = 1.0 - x.p - x.q;
    if (s <= 1e-12 || 1.0 - x.q <= 1e-12) throw SingularMapError("xi_inverse: singular parameters", s);
    const LinearMapRep id = identity_channel(2).rep();
    const LinearMapRep de = dephasing_channel(2).rep();
    const LinearMapRep om = depolarizing_channel(2).rep();
    return (1.0 / s) * (id - (x.p / (1.0 - x.q)) * de - (x.q * s / (1.0 - x.q)) * om);
}

/// λ_min(J(f ⊙ g)) ≥ −tol.
inline bool standard_jordan_cp(const LinearMapRep& f, const LinearMapRep& g, double tol = 1e-12) {
    return min_eigenvalue(jordan_channel(f, g).choi()) >= -tol;
}

}  // namespace qcc
