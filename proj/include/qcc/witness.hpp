// witness.hpp - incompatibility certificates and their solver-free verification
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qcc/jordan.hpp"

namespace qcc {

inline constexpr double kWitnessTol = 1e-9;

enum class WitnessMode { plain, ppt };

/// Dual certificate (Z₁ on X⊗Y₁, Z₂ on X⊗Y₂).
///
/// In ppt mode the pairing is taken against the partially transposed Choi
/// matrices. The optional R (PSD, on X⊗Y₁⊗Y₂) relaxes the positivity condition
/// to Tr*Z₁ + Tr*Z₂ − R^{T_X} ⪰ 0; an absent R means R = 0.
struct Witness {
    HermitianMatrix z1;
    HermitianMatrix z2;
    WitnessMode mode = WitnessMode::plain;
    std::optional<HermitianMatrix> r;
};

struct JordanWitness {
    HermitianMatrix w1;   // on X⊗X₁, paired with the X₂-marginal constraint
    HermitianMatrix w2;   // on X⊗X₂, paired with the X₁-marginal constraint
    HermitianMatrix rho;  // PSD on X⊗Y₁⊗Y₂
};

struct WitnessCheck {
    bool valid = false;
    double margin = 0.0;       // pairing value, negative for a valid certificate
    double min_eigenvalue = 0.0;
    double residual = 0.0;     // equality residual (Jordan certificates only)
};

/// Tr*_{Y₂}(Z₁) + Tr*_{Y₁}(Z₂) on X⊗Y₁⊗Y₂.
inline HermitianMatrix adjoint_sum(const HermitianMatrix& z1, const HermitianMatrix& z2, int dx, int d1, int d2) {
    if (z1.side() != dx * d1 || z2.side() != dx * d2) throw DimensionError("adjoint_sum: witness sides mismatch");
    TensorShape full{dx, d1, d2};
    CMat s = detail::partial_trace_adjoint(z1.mat(), full.factors, {2}) +
             detail::partial_trace_adjoint(z2.mat(), full.factors, {1});
    return HermitianMatrix(s, full);
}

/// Verifies a witness against arbitrary targets T₁ on X⊗Y₁ and T₂ on X⊗Y₂.
inline WitnessCheck verify_witness_targets(const Witness& w, const HermitianMatrix& t1, const HermitianMatrix& t2,
                                           int dx, double tol = kWitnessTol) {
    if (t1.side() % dx || t2.side() % dx) throw DimensionError("verify_witness: target side mismatch");
    int d1 = t1.side() / dx, d2 = t2.side() / dx;
    if (w.z1.side() != t1.side() || w.z2.side() != t2.side()) throw DimensionError("verify_witness: witness side mismatch");
    CMat s = adjoint_sum(w.z1, w.z2, dx, d1, d2).mat();
    CMat a = t1.mat(), b = t2.mat();
    if (w.mode == WitnessMode::ppt) {
        a = detail::partial_transpose(a, {dx, d1}, 0);
        b = detail::partial_transpose(b, {dx, d2}, 0);
    }
    WitnessCheck c;
    c.margin = inner(w.z1, HermitianMatrix(a, w.z1.shape())) + inner(w.z2, HermitianMatrix(b, w.z2.shape()));
    double rmin = 0.0;
    if (w.r) {
        if (w.mode != WitnessMode::ppt || w.r->side() != s.rows()) throw DimensionError("verify_witness: misplaced R term");
        rmin = min_eigenvalue(*w.r);
        s -= detail::partial_transpose(w.r->mat(), {dx, d1, d2}, 0);
    }
    c.min_eigenvalue = std::min(min_eigenvalue(s), rmin);
    c.valid = c.min_eigenvalue >= -tol && c.margin <= -tol;
    return c;
}

inline WitnessCheck verify_witness(const Witness& w, const Channel& f, const Channel& g, double tol = kWitnessTol) {
    if (f.d_in() != g.d_in()) throw DimensionError("verify_witness: input dimensions differ");
    return verify_witness_targets(w, f.choi(), g.choi(), f.d_in(), tol);
}

/// Checks (I⊗f*⊗g*)(ρ) = Tr*_{X₂}W₁ + Tr*_{X₁}W₂, ρ ⪰ 0 and ⟨W₁+W₂, J(I)⟩ < 0.
inline WitnessCheck verify_jordan_witness(const JordanWitness& w, const Channel& f, const Channel& g,
                                          double tol = kWitnessTol) {
    if (f.d_in() != g.d_in()) throw DimensionError("verify_jordan_witness: input dimensions differ");
    int d = f.d_in();
    if (w.w1.side() != d * d || w.w2.side() != d * d || w.rho.side() != d * f.d_out() * g.d_out())
        throw DimensionError("verify_jordan_witness: certificate sides mismatch");
    CMat lhs = detail::lift_apply_adjoint(tensor(f, g), d, w.rho.mat());
    CMat rhs = detail::partial_trace_adjoint(w.w1.mat(), {d, d, d}, {2}) +
               detail::partial_trace_adjoint(w.w2.mat(), {d, d, d}, {1});
    WitnessCheck c;
    double scale = std::max({1.0, detail::max_abs(lhs), detail::max_abs(rhs)});
    c.residual = detail::max_abs(lhs - rhs) / scale;
    c.min_eigenvalue = min_eigenvalue(w.rho);
    HermitianMatrix jid = identity_channel(d).choi();
    c.margin = inner(w.w1 + w.w2.reshaped(w.w1.shape()), jid.reshaped(w.w1.shape()));
    c.valid = c.residual <= 10 * tol && c.min_eigenvalue >= -tol && w.rho.trace() > tol && c.margin <= -tol;
    return c;
}

/// Certificate against k-fold self-compatibility: Z_a on X⊗Y paired with the a-th copy.
inline WitnessCheck verify_extension_witness(const std::vector<HermitianMatrix>& zs, const Channel& f,
                                             double tol = kWitnessTol) {
    int k = static_cast<int>(zs.size());
    if (k < 2) throw DimensionError("verify_extension_witness: need at least two copies");
    int dx = f.d_in(), dy = f.d_out();
    std::vector<int> dims{dx};
    for (int a = 0; a < k; ++a) dims.push_back(dy);
    int n = dx * static_cast<int>(std::pow(dy, k));
    CMat s = CMat::Zero(n, n);
    WitnessCheck c;
    for (int a = 0; a < k; ++a) {
        std::vector<int> traced;
        for (int b = 1; b <= k; ++b)
            if (b != a + 1) traced.push_back(b);
        s += detail::partial_trace_adjoint(zs[static_cast<std::size_t>(a)].mat(), dims, traced);
        c.margin += inner(zs[static_cast<std::size_t>(a)], f.choi().reshaped(zs[static_cast<std::size_t>(a)].shape()));
    }
    c.min_eigenvalue = min_eigenvalue(s);
    c.valid = c.min_eigenvalue >= -tol && c.margin <= -tol;
    return c;
}

/// Z₁ = Z₂ = I⊗I − (2/(d+1)) Σ E_ij⊗E_ij, which certifies that Ω_p is not self-compatible for p < d/(2(d+1)).
inline Witness no_broadcast_witness(int d) {
    CMat z = CMat::Identity(d * d, d * d) - (2.0 / (d + 1)) * identity_channel(d).choi().mat();
    HermitianMatrix h(z, TensorShape{d, d});
    return {h, h, WitnessMode::plain, std::nullopt};
}

/// Pairing ⟨Z₁,T₁⟩ + ⟨Z₂,T₂⟩ without the positivity check.
inline double witness_pairing(const Witness& w, const HermitianMatrix& t1, const HermitianMatrix& t2) {
    return inner(w.z1, t1.reshaped(w.z1.shape())) + inner(w.z2, t2.reshaped(w.z2.shape()));
}

}  // namespace qcc
