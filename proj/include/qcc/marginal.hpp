// marginal.hpp - reductions between state marginal problems and channel compatibility
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qcc/channels.hpp"

namespace qcc {

inline constexpr double kMarginalTol = 1e-9;

/// ρ₁ on X⊗Y₁ and ρ₂ on X⊗Y₂ sharing the X-marginal σ.
struct StatePair {
    HermitianMatrix rho1;
    HermitianMatrix rho2;
    HermitianMatrix sigma;

    StatePair(HermitianMatrix r1, HermitianMatrix r2, HermitianMatrix s, double tol = kMarginalTol)
        : rho1(std::move(r1)), rho2(std::move(r2)), sigma(std::move(s)) {
        int dx = sigma.side();
        for (auto* r : {&rho1, &rho2}) {
            if (r->side() % dx != 0) throw DimensionError("StatePair: state side not divisible by dim X");
            if (r->shape().size() != 2 || r->shape()[0] != dx) *r = r->reshaped(TensorShape{dx, r->side() / dx});
            check_density(*r, tol);
            if (max_abs_diff(partial_trace(*r, {1}), sigma.reshaped(TensorShape{dx})) > tol)
                throw DimensionError("StatePair: X-marginal differs from sigma");
        }
        check_density(sigma, tol);
    }
};

namespace detail {

// (K⊗I) M (K⊗I) for Hermitian K on the first factor.
inline CMat conjugate_first(const CMat& k, const CMat& m, int rest) {
    CMat kk = kron(k, CMat::Identity(rest, rest));
    return kk * m * kk;
}

inline CMat completion_term(const HermitianMatrix& sigma, int rest) {
    int dx = sigma.side();
    CMat q = CMat::Identity(dx, dx) - support_projector(sigma).mat();
    return kron(q, CMat::Identity(rest, rest)) / static_cast<double>(rest);
}

}  // namespace detail

/// J(Φ_a) = (σ^{-1/2}⊗I)ρ_a(σ^{-1/2}⊗I) + (1/dim Y_a)(I−Π_σ)⊗I.
inline std::pair<Channel, Channel> states_to_channels(const StatePair& sp) {
    CMat s = pinv_sqrt(sp.sigma).mat();
    auto make = [&](const HermitianMatrix& r) {
        int dy = r.side() / sp.sigma.side();
        CMat j = detail::conjugate_first(s, r.mat(), dy) + detail::completion_term(sp.sigma, dy);
        return Channel(HermitianMatrix(j, r.shape()), sp.sigma.side());
    };
    return {make(sp.rho1), make(sp.rho2)};
}

/// ρ = (σ^{1/2}⊗I)J(Φ)(σ^{1/2}⊗I).
inline HermitianMatrix joint_state_from_compatibilizer(const Channel& comp, const HermitianMatrix& sigma) {
    if (sigma.side() != comp.d_in()) throw DimensionError("joint_state_from_compatibilizer: sigma side mismatch");
    check_density(sigma);
    CMat r = detail::conjugate_first(psd_sqrt(sigma).mat(), comp.choi().mat(), comp.d_out());
    return HermitianMatrix(r, comp.choi().shape());
}

/// J(Φ) = (σ^{-1/2}⊗I)ρ(σ^{-1/2}⊗I) + (1/(d₁d₂))(I−Π_σ)⊗I, for ρ with shape [dX, d1, d2].
inline Channel compatibilizer_from_joint_state(const HermitianMatrix& rho, const HermitianMatrix& sigma,
                                               double tol = kMarginalTol) {
    int dx = sigma.side();
    if (rho.side() % dx != 0) throw DimensionError("compatibilizer_from_joint_state: side mismatch");
    check_density(rho, tol);
    check_density(sigma, tol);
    std::vector<int> rest;
    for (int k = 1; k < rho.shape().size(); ++k) rest.push_back(k);
    if (rho.shape()[0] != dx) throw DimensionError("compatibilizer_from_joint_state: first factor must be X");
    if (max_abs_diff(partial_trace(rho, rest), sigma.reshaped(TensorShape{dx})) > tol)
        throw DimensionError("compatibilizer_from_joint_state: X-marginal differs from sigma");
    int dy = rho.side() / dx;
    CMat j = detail::conjugate_first(pinv_sqrt(sigma).mat(), rho.mat(), dy) + detail::completion_term(sigma, dy);
    return Channel(HermitianMatrix(j, rho.shape()), dx);
}

/// Joint POVM {P_ij} with i < m, j < n, stored row-major.
struct JointPovm {
    int m = 0;
    int n = 0;
    std::vector<HermitianMatrix> effects;

    const HermitianMatrix& at(int i, int j) const { return effects.at(static_cast<std::size_t>(i * n + j)); }

    /// Σ_j P_ij (which = 1) or Σ_i P_ij (which = 2).
    std::vector<HermitianMatrix> marginal(int which) const {
        int outer = which == 1 ? m : n, inner_count = which == 1 ? n : m;
        std::vector<HermitianMatrix> out;
        for (int a = 0; a < outer; ++a) {
            CMat s = CMat::Zero(effects.front().side(), effects.front().side());
            for (int b = 0; b < inner_count; ++b) s += (which == 1 ? at(a, b) : at(b, a)).mat();
            out.emplace_back(s, effects.front().shape());
        }
        return out;
    }
};

/// Φ(X) = Σ_ij ⟨P_ij, X⟩ ρ_i ⊗ σ_j.
inline Channel lift_povm_compatibilizer(const JointPovm& p, const std::vector<HermitianMatrix>& preps1,
                                        const std::vector<HermitianMatrix>& preps2) {
    if (static_cast<int>(preps1.size()) != p.m || static_cast<int>(preps2.size()) != p.n)
        throw DimensionError("lift_povm_compatibilizer: preparation count mismatch");
    (void)Povm(p.effects);
    for (const auto& r : preps1) check_density(r);
    for (const auto& r : preps2) check_density(r);
    int d = p.effects.front().side();
    int d1 = preps1.front().side(), d2 = preps2.front().side();
    CMat j = CMat::Zero(d * d1 * d2, d * d1 * d2);
    for (int i = 0; i < p.m; ++i)
        for (int k = 0; k < p.n; ++k)
            j += detail::kron(p.at(i, k).mat().transpose(),
                              detail::kron(preps1[static_cast<std::size_t>(i)].mat(), preps2[static_cast<std::size_t>(k)].mat()));
    return Channel(HermitianMatrix(j, TensorShape{d, d1, d2}), d);
}

namespace detail {

// Adds the completion projector I − ΣΠ_i when the family does not resolve the identity.
inline std::vector<CMat> complete_projectors(const std::vector<HermitianMatrix>& proj, int dim) {
    std::vector<CMat> out;
    CMat sum = CMat::Zero(dim, dim);
    for (const auto& p : proj) {
        if (p.side() != dim) throw DimensionError("projector side mismatch");
        if (max_abs(p.mat() * p.mat() - p.mat()) > 1e-10) throw DimensionError("not an orthogonal projector");
        out.push_back(p.mat());
        sum += p.mat();
    }
    CMat rest = CMat::Identity(dim, dim) - sum;
    if (max_abs(rest * rest - rest) > 1e-10) throw DimensionError("projectors are not mutually orthogonal");
    if (max_abs(rest) > 1e-10) out.push_back(rest);
    return out;
}

}  // namespace detail

/// P_ij = Φ*(Π_i ⊗ Π'_j), padding either family with its completion projector.
inline JointPovm extract_povm_compatibilizer(const Channel& comp, const std::vector<HermitianMatrix>& proj1,
                                             const std::vector<HermitianMatrix>& proj2) {
    if (comp.choi().shape().size() != 3) throw DimensionError("extract_povm_compatibilizer: comp output must be [d1,d2]");
    int d1 = comp.choi().shape()[1], d2 = comp.choi().shape()[2];
    auto p1 = detail::complete_projectors(proj1, d1);
    auto p2 = detail::complete_projectors(proj2, d2);
    JointPovm out;
    out.m = static_cast<int>(p1.size());
    out.n = static_cast<int>(p2.size());
    for (const auto& a : p1)
        for (const auto& b : p2)
            out.effects.emplace_back(apply_adjoint(comp.rep(), detail::kron(a, b)), TensorShape{comp.d_in()});
    return out;
}

/// Branches Φ_i(X) = (I⊗⟨i|) Φ(X) (I⊗|i⟩) of a compatibilizer over Y⊗Z with Z = C^m.
inline std::vector<LinearMapRep> instrument_from_compatibilizer(const Channel& comp, int m) {
    if (m < 1 || comp.d_out() % m != 0) throw DimensionError("instrument_from_compatibilizer: bad outcome count");
    int dy = comp.d_out() / m, d = comp.d_in();
    std::vector<LinearMapRep> out;
    for (int i = 0; i < m; ++i)
        out.push_back(map_from_action(d, TensorShape{dy}, [&](const CMat& e) {
            CMat full = qcc::apply(comp.rep(), e);
            CMat b(dy, dy);
            for (int a = 0; a < dy; ++a)
                for (int c = 0; c < dy; ++c) b(a, c) = full(a * m + i, c * m + i);
            return b;
        }));
    return out;
}

}  // namespace qcc
