// jordan.hpp - standard and generalized Jordan products of matrices and maps
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qcc/channels.hpp"

namespace qcc {

/// (AB + BA)/2, plus Tr(XA)·Tr(XB)·I when a traceless anchor X is given.
inline HermitianMatrix jordan_matrix(const HermitianMatrix& a, const HermitianMatrix& b,
                                     const std::optional<HermitianMatrix>& anchor = std::nullopt) {
    if (a.side() != b.side()) throw DimensionError("jordan_matrix: side mismatch");
    CMat out = 0.5 * (a.mat() * b.mat() + b.mat() * a.mat());
    if (anchor) {
        if (anchor->side() != a.side()) throw DimensionError("jordan_matrix: anchor side mismatch");
        if (std::abs(anchor->trace()) > 1e-10) throw DimensionError("jordan_matrix: anchor is not traceless");
        double ta = (anchor->mat() * a.mat()).trace().real();
        double tb = (anchor->mat() * b.mat()).trace().real();
        out += ta * tb * CMat::Identity(a.side(), a.side());
    }
    return HermitianMatrix(out, a.shape());
}

inline constexpr double kJordanExactTol = 1e-8;
inline constexpr double kJordanSolverTol = 1e-7;

/// Hermitian A on X⊗X₁⊗X₂ whose X₁- and X₂-marginals both equal J(I).
class GenJordanOperator {
public:
    explicit GenJordanOperator(const HermitianMatrix& a, double tol = kJordanExactTol) : a_(a) {
        const auto& f = a.shape().factors;
        int d = static_cast<int>(std::lround(std::cbrt(static_cast<double>(a.side()))));
        if (d * d * d != a.side()) throw DimensionError("GenJordanOperator: side is not a cube");
        if (f.size() != 3) a_ = a.reshaped(TensorShape{d, d, d});
        d_ = d;
        CMat jid = identity_channel(d).choi().mat();
        residual_ = std::max(detail::max_abs(detail::partial_trace(a_.mat(), {d, d, d}, {1}) - jid),
                             detail::max_abs(detail::partial_trace(a_.mat(), {d, d, d}, {2}) - jid));
        if (residual_ > tol)
            throw DimensionError("GenJordanOperator: marginal constraint violated by " + std::to_string(residual_));
    }

    const HermitianMatrix& matrix() const { return a_; }
    int dim() const { return d_; }
    double residual() const { return residual_; }

private:
    HermitianMatrix a_;
    int d_ = 1;
    double residual_ = 0.0;
};

/// J(Φ₁⊙Φ₂) = ½ Σ_ij E_ij ⊗ Σ_k (Φ₁(E_ik)⊗Φ₂(E_kj) + Φ₁(E_kj)⊗Φ₂(E_ik)).
inline LinearMapRep jordan_channel(const LinearMapRep& f, const LinearMapRep& g) {
    if (f.d_in() != g.d_in()) throw DimensionError("jordan_channel: input dimensions differ");
    const int d = f.d_in();
    const int dout = f.d_out() * g.d_out();
    CMat j = CMat::Zero(d * dout, d * dout);
    for (int i = 0; i < d; ++i)
        for (int jj = 0; jj < d; ++jj) {
            CMat blk = CMat::Zero(dout, dout);
            for (int k = 0; k < d; ++k)
                blk += detail::kron(f.block(i, k), g.block(k, jj)) + detail::kron(f.block(k, jj), g.block(i, k));
            j.block(i * dout, jj * dout, dout, dout) = 0.5 * blk;
        }
    TensorShape shape = TensorShape{d}.concat(f.out_shape()).concat(g.out_shape());
    return LinearMapRep(HermitianMatrix(j, shape), d);
}

/// A_JP = J(I⊙I).
inline GenJordanOperator a_jp(int d) {
    auto id = identity_channel(d);
    return GenJordanOperator(jordan_channel(id, id).choi());
}

/// A_JP + I⊗X⊗X for a traceless Hermitian anchor X.
inline GenJordanOperator anchored_jordan_operator(const HermitianMatrix& anchor) {
    if (std::abs(anchor.trace()) > 1e-10) throw DimensionError("anchored_jordan_operator: anchor is not traceless");
    int d = anchor.side();
    CMat extra = detail::kron(CMat::Identity(d, d), detail::kron(anchor.mat(), anchor.mat()));
    return GenJordanOperator(HermitianMatrix(a_jp(d).matrix().mat() + extra, TensorShape{d, d, d}));
}

namespace detail {

// (I⊗f⊗g)(A) for arbitrary A on X⊗X₁⊗X₂, applied block by block on X.
inline CMat lift_apply(const LinearMapRep& fg, int d, const CMat& a) {
    const int din = fg.d_in(), dout = fg.d_out();
    CMat out(d * dout, d * dout);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out.block(i * dout, j * dout, dout, dout) = qcc::apply(fg, CMat(a.block(i * din, j * din, din, din)));
    // Hermitian in exact arithmetic; ill-conditioned maps (inverses) amplify the rounding asymmetry.
    return 0.5 * (out + out.adjoint());
}

// (I⊗f*⊗g*)(ρ).
inline CMat lift_apply_adjoint(const LinearMapRep& fg, int d, const CMat& rho) {
    const int din = fg.d_in(), dout = fg.d_out();
    CMat out(d * din, d * din);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out.block(i * din, j * din, din, din) = apply_adjoint(fg, CMat(rho.block(i * dout, j * dout, dout, dout)));
    return out;
}

}  // namespace detail

/// J(f ⊙_A g) = (I⊗f⊗g)(A).
inline LinearMapRep gen_jordan(const LinearMapRep& f, const LinearMapRep& g, const GenJordanOperator& a) {
    if (f.d_in() != g.d_in() || f.d_in() != a.dim()) throw DimensionError("gen_jordan: dimension mismatch");
    int d = a.dim();
    CMat j = detail::lift_apply(tensor(f, g), d, a.matrix().mat());
    TensorShape shape = TensorShape{d}.concat(f.out_shape()).concat(g.out_shape());
    return LinearMapRep(HermitianMatrix(j, shape), d);
}

/// A = J((f⁻¹⊗g⁻¹)∘Φ) for invertible f, g and a compatibilizer Φ of (f, g).
inline GenJordanOperator gen_jordan_from_compatibilizer(const Channel& f, const Channel& g, const Channel& comp,
                                                        double tol = kJordanSolverTol) {
    if (f.d_in() != g.d_in() || comp.d_in() != f.d_in() || comp.d_out() != f.d_out() * g.d_out())
        throw DimensionError("gen_jordan_from_compatibilizer: dimension mismatch");
    LinearMapRep c(comp.choi(), comp.d_in(), f.out_shape().concat(g.out_shape()));
    std::vector<int> dims = c.choi().shape().factors;
    double r1 = detail::max_abs(detail::partial_trace(c.choi().mat(), dims, {2}) - f.choi().mat());
    double r2 = detail::max_abs(detail::partial_trace(c.choi().mat(), dims, {1}) - g.choi().mat());
    if (std::max(r1, r2) > tol) throw DimensionError("gen_jordan_from_compatibilizer: comp is not a compatibilizer");
    LinearMapRep inv = tensor(invert_map(f), invert_map(g));
    int d = f.d_in();
    return GenJordanOperator(compose(inv, c).choi().reshaped(TensorShape{d, d, d}), tol);
}

}  // namespace qcc
