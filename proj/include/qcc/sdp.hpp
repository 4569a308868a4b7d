// sdp.hpp - compatibility SDP builders, certificate decoding and three-valued decisions
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qcc/jordan.hpp"
#include "qcc/sdp_solver.hpp"
#include "qcc/witness.hpp"

namespace qcc::sdp {

inline constexpr double kDecisionTol = 1e-7;
inline constexpr int kMaxIpmSide = 256;         // complex side, 512 once realified
inline constexpr int kMaxProjectionSide = 1024;

enum class Status { Feasible, Infeasible, Inconclusive };
enum class SolveMode { projection, interior_point };
enum class ProblemKind { marginal, ppt_marginal, k_extension, jordan, povm };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Feasible: return "Feasible";
        case Status::Infeasible: return "Infeasible";
        default: return "Inconclusive";
    }
}

/// Hermitian-variable SDP in conic form together with what is needed to decode it.
///
/// Marginal-type problems maximize t subject to X − t·I ⪰ 0 on the designated
/// variable X = S + t·I, where S is the first PSD block and t the only free
/// variable. The Jordan problem is stored through its dual, so the conic
/// primal variable there is the density matrix ρ.
struct SdpProblem {
    ProblemKind kind = ProblemKind::marginal;
    ConicForm form;
    TensorShape shape;                     // designated variable (X, or A for jordan)
    std::vector<HermitianMatrix> targets;  // right-hand sides, in constraint-group order
    std::vector<int> group_offsets;        // first row of each constraint group
    int dx = 1;
    int copies = 2;                        // k for extensions; outcome counts packed for povm
    int m_outcomes = 0, n_outcomes = 0;
    // Jordan data.
    std::optional<LinearMapRep> fg;        // f ⊗ g
    RMat null_basis;                       // columns span the valid directions of A
    RMat marginal_matrix;                  // A ↦ (Tr_{X₂}A, Tr_{X₁}A) in svec coordinates
    HermitianMatrix base_operator;         // A_JP
};

struct SdpOutcome {
    Status status = Status::Inconclusive;
    double value = 0.0;       // α: best primal objective t
    double dual_value = 0.0;  // β: dual objective
    std::vector<HermitianMatrix> primal;
    std::vector<HermitianMatrix> dual;
    std::optional<Witness> witness;
    std::optional<JordanWitness> jordan_witness;
    WitnessCheck certificate;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    int iterations = 0;
    int removed_constraints = 0;
    bool converged = false;
    std::string message;
};

namespace detail {

using qcc::detail::smat;
using qcc::detail::svec;

// Matrix of a linear map Herm(n) → R^rows in orthonormal Hermitian coordinates.
inline RMat operator_matrix(int n, int rows, const std::function<RVec(const CMat&)>& op) {
    RMat a(rows, n * n);
    for (int col = 0; col < n * n; ++col) a.col(col) = op(qcc::detail::herm_basis_element(n, col));
    return a;
}

inline RVec stack(const std::vector<RVec>& parts) {
    Eigen::Index n = 0;
    for (const auto& p : parts) n += p.size();
    RVec out(n);
    Eigen::Index o = 0;
    for (const auto& p : parts) {
        out.segment(o, p.size()) = p;
        o += p.size();
    }
    return out;
}

inline CMat group_matrix(const RVec& y, int offset, int side) { return smat(y.data() + offset, side); }

inline void check_ipm_size(const ConicForm& f) {
    int total = 0;
    for (int s : f.block_sides) total += s;
    if (total > kMaxIpmSide) throw DimensionError("SDP exceeds the interior-point size cap");
}

}  // namespace detail

/// max t s.t. Tr_{Y₂}X = T₁, Tr_{Y₁}X = T₂, X ⪰ tI (and X^{T_X} ⪰ tI when ppt).
inline SdpProblem build_marginal(const HermitianMatrix& t1, const HermitianMatrix& t2, int dx, bool ppt = false) {
    if (dx < 1 || t1.side() % dx || t2.side() % dx) throw DimensionError("build_marginal: target sides mismatch");
    const int d1 = t1.side() / dx, d2 = t2.side() / dx, n = dx * d1 * d2;
    const std::vector<int> dims{dx, d1, d2};
    const int r1 = (dx * d1) * (dx * d1), r2 = (dx * d2) * (dx * d2);
    auto marg = [&](const CMat& h) -> RVec {
        return detail::stack({detail::svec(qcc::detail::partial_trace(h, dims, {2})),
                              detail::svec(qcc::detail::partial_trace(h, dims, {1}))});
    };
    SdpProblem p;
    p.kind = ppt ? ProblemKind::ppt_marginal : ProblemKind::marginal;
    p.shape = TensorShape{dx, d1, d2};
    p.dx = dx;
    p.targets = {t1.reshaped(TensorShape{dx, d1}), t2.reshaped(TensorShape{dx, d2})};
    p.group_offsets = {0, r1};
    RMat am = detail::operator_matrix(n, r1 + r2, marg);
    RVec bm = detail::stack({detail::svec(t1.mat()), detail::svec(t2.mat())});
    RVec tcol = marg(CMat::Identity(n, n));
    auto& f = p.form;
    const int nn = n * n;
    if (!ppt) {
        f.block_sides = {n};
        f.A = am;
        f.B = tcol;
        f.b = bm;
    } else {
        f.block_sides = {n, n};
        RMat ptm = detail::operator_matrix(n, nn, [&](const CMat& h) {
            return detail::svec(qcc::detail::partial_transpose(h, dims, 0));
        });
        f.A = RMat::Zero(r1 + r2 + nn, 2 * nn);
        f.A.topLeftCorner(r1 + r2, nn) = am;
        f.A.bottomLeftCorner(nn, nn) = -ptm;
        f.A.bottomRightCorner(nn, nn) = RMat::Identity(nn, nn);
        f.B = RMat::Zero(r1 + r2 + nn, 1);
        f.B.topRows(r1 + r2) = tcol;
        f.b = RVec::Zero(r1 + r2 + nn);
        f.b.head(r1 + r2) = bm;
        p.group_offsets.push_back(r1 + r2);
    }
    f.C = RVec::Zero(f.num_vars());
    f.c = RVec::Constant(1, -1.0);
    detail::check_ipm_size(f);
    return p;
}

inline SdpProblem build_compat(const Channel& f, const Channel& g, bool ppt = false) {
    if (f.d_in() != g.d_in()) throw DimensionError("build_compat: input dimensions differ");
    return build_marginal(f.choi(), g.choi(), f.d_in(), ppt);
}

/// State marginal problem for ρ₁ on X⊗Y₁ and ρ₂ on X⊗Y₂.
inline SdpProblem build_state_marginal(const HermitianMatrix& rho1, const HermitianMatrix& rho2, int dx) {
    return build_marginal(rho1, rho2, dx, false);
}

/// Variable on X⊗Y^{⊗k} whose k single-copy marginals all equal J(f).
inline SdpProblem build_k_extension(const Channel& f, int k, int size_cap = kMaxProjectionSide) {
    if (k < 2) throw DimensionError("build_k_extension: k must be at least 2");
    const int dx = f.d_in(), dy = f.d_out();
    double side_d = dx * std::pow(static_cast<double>(dy), k);
    if (side_d > size_cap) throw DimensionError("build_k_extension: size cap exceeded");
    const int n = static_cast<int>(side_d);
    std::vector<int> dims{dx};
    for (int a = 0; a < k; ++a) dims.push_back(dy);
    const int r = (dx * dy) * (dx * dy);
    auto marg = [&](const CMat& h) -> RVec {
        std::vector<RVec> parts;
        for (int a = 1; a <= k; ++a) {
            std::vector<int> traced;
            for (int b = 1; b <= k; ++b)
                if (b != a) traced.push_back(b);
            parts.push_back(detail::svec(qcc::detail::partial_trace(h, dims, traced)));
        }
        return detail::stack(parts);
    };
    SdpProblem p;
    p.kind = ProblemKind::k_extension;
    p.shape = TensorShape(dims);
    p.dx = dx;
    p.copies = k;
    p.targets.assign(static_cast<std::size_t>(k), f.choi().reshaped(TensorShape{dx, dy}));
    for (int a = 0; a < k; ++a) p.group_offsets.push_back(a * r);
    auto& fm = p.form;
    fm.block_sides = {n};
    fm.A = detail::operator_matrix(n, k * r, marg);
    fm.B = marg(CMat::Identity(n, n));
    RVec bj = detail::svec(f.choi().mat());
    fm.b = detail::stack(std::vector<RVec>(static_cast<std::size_t>(k), bj));
    fm.C = RVec::Zero(fm.num_vars());
    fm.c = RVec::Constant(1, -1.0);
    return p;
}

/// max t s.t. (I⊗f⊗g)(A) ⪰ tI over Hermitian A with Tr_{X₁}A = Tr_{X₂}A = J(I).
///
/// Stored through the dual: min ⟨(I⊗f⊗g)(A_JP), ρ⟩ over density matrices ρ
/// whose image under I⊗f*⊗g* lies in the range of the marginal adjoints.
inline SdpProblem build_jordan_compat(const Channel& f, const Channel& g) {
    if (f.d_in() != g.d_in()) throw DimensionError("build_jordan_compat: input dimensions differ");
    const int d = f.d_in();
    const int na = d * d * d;
    const int ny = d * f.d_out() * g.d_out();
    const std::vector<int> adims{d, d, d};
    const int r = d * d * d * d;
    SdpProblem p;
    p.kind = ProblemKind::jordan;
    p.shape = TensorShape{d, d, d};
    p.dx = d;
    p.fg = tensor(f, g);
    p.base_operator = a_jp(d).matrix();
    p.marginal_matrix = detail::operator_matrix(na, 2 * r, [&](const CMat& h) -> RVec {
        return detail::stack({detail::svec(qcc::detail::partial_trace(h, adims, {2})),
                              detail::svec(qcc::detail::partial_trace(h, adims, {1}))});
    });
    Eigen::BDCSVD<RMat> svd(p.marginal_matrix, Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    auto rank = svd.rank();
    p.null_basis = svd.matrixV().rightCols(na * na - rank);
    const int kdim = static_cast<int>(p.null_basis.cols());
    auto& fm = p.form;
    fm.block_sides = {ny};
    fm.A.resize(kdim + 1, ny * ny);
    for (int k = 0; k < kdim; ++k) {
        CMat nk = detail::smat(RVec(p.null_basis.col(k)), na);
        fm.A.row(k) = -detail::svec(qcc::detail::lift_apply(*p.fg, d, nk)).transpose();
    }
    fm.A.row(kdim) = detail::svec(CMat::Identity(ny, ny)).transpose();
    fm.B = RMat::Zero(kdim + 1, 0);
    fm.b = RVec::Zero(kdim + 1);
    fm.b(kdim) = 1.0;
    fm.C = detail::svec(qcc::detail::lift_apply(*p.fg, d, p.base_operator.mat()));
    fm.c = RVec::Zero(0);
    p.group_offsets = {0, kdim};
    detail::check_ipm_size(fm);
    return p;
}

/// Joint POVM search: max t s.t. Σ_j P_ij = M_i, Σ_i P_ij = N_j, P_ij ⪰ tI.
inline SdpProblem build_povm_compat(const Povm& mv, const Povm& nv) {
    if (mv.dim() != nv.dim()) throw DimensionError("build_povm_compat: POVMs act on different spaces");
    const int d = mv.dim(), m = mv.outcomes(), n = nv.outcomes(), dd = d * d;
    SdpProblem p;
    p.kind = ProblemKind::povm;
    p.shape = TensorShape{d};
    p.dx = d;
    p.m_outcomes = m;
    p.n_outcomes = n;
    for (int i = 0; i < m; ++i) p.targets.push_back(mv[i]);
    for (int j = 0; j < n; ++j) p.targets.push_back(nv[j]);
    auto& f = p.form;
    f.block_sides.assign(static_cast<std::size_t>(m * n), d);
    f.A = RMat::Zero((m + n) * dd, m * n * dd);
    f.B = RMat::Zero((m + n) * dd, 1);
    f.b = RVec::Zero((m + n) * dd);
    RVec id = detail::svec(CMat::Identity(d, d));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            int col = (i * n + j) * dd;
            f.A.block(i * dd, col, dd, dd).setIdentity();
            f.A.block((m + j) * dd, col, dd, dd).setIdentity();
        }
    for (int i = 0; i < m; ++i) {
        f.B.col(0).segment(i * dd, dd) = n * id;
        f.b.segment(i * dd, dd) = detail::svec(mv[i].mat());
        p.group_offsets.push_back(i * dd);
    }
    for (int j = 0; j < n; ++j) {
        f.B.col(0).segment((m + j) * dd, dd) = m * id;
        f.b.segment((m + j) * dd, dd) = detail::svec(nv[j].mat());
        p.group_offsets.push_back((m + j) * dd);
    }
    f.C = RVec::Zero(f.num_vars());
    f.c = RVec::Constant(1, -1.0);
    detail::check_ipm_size(f);
    return p;
}

/// X̄ = (1/d₂)Tr*_{Y₂}T₁ + (1/d₁)Tr*_{Y₁}T₂ − (1/(d₁d₂))·σ⊗I, with σ = Tr_{Y₁}T₁.
inline HermitianMatrix explicit_primal_point(const HermitianMatrix& t1, const HermitianMatrix& t2, int dx) {
    const int d1 = t1.side() / dx, d2 = t2.side() / dx;
    const std::vector<int> dims{dx, d1, d2};
    CMat sigma = qcc::detail::partial_trace(t1.mat(), {dx, d1}, {1});
    CMat x = qcc::detail::partial_trace_adjoint(t1.mat(), dims, {2}) / double(d2) +
             qcc::detail::partial_trace_adjoint(t2.mat(), dims, {1}) / double(d1) -
             qcc::detail::kron(sigma, CMat::Identity(d1 * d2, d1 * d2)) / double(d1 * d2);
    return HermitianMatrix(x, TensorShape(dims));
}

namespace detail {

inline double shift_for(double lmin, double scale) {
    return lmin >= 0.0 ? 0.0 : -lmin + 1e-12 * std::max(1.0, scale);
}

inline void decode_marginal(const SdpProblem& p, const ConicSolution& s, SdpOutcome& out) {
    const int n = p.form.block_sides[0];
    const int dx = p.dx;
    const int d1 = p.shape[1], d2 = p.shape[2];
    const double t = s.u(0);
    CMat x = smat(s.x.data(), n) + t * CMat::Identity(n, n);
    out.primal = {HermitianMatrix(x, p.shape)};
    CMat z1 = -group_matrix(s.y, p.group_offsets[0], dx * d1);
    CMat z2 = -group_matrix(s.y, p.group_offsets[1], dx * d2);
    Witness w{HermitianMatrix(z1, TensorShape{dx, d1}), HermitianMatrix(z2, TensorShape{dx, d2}), WitnessMode::plain,
              std::nullopt};
    if (p.kind == ProblemKind::ppt_marginal) {
        const int nn = n;
        CMat q = -group_matrix(s.y, p.group_offsets[2], nn);
        CMat r = adjoint_sum(w.z1, w.z2, dx, d1, d2).mat() -
                 qcc::detail::partial_transpose(q, {dx, d1, d2}, 0);
        auto er = hermitian_eig(HermitianMatrix(r, p.shape));
        CMat rplus = er.vectors * er.values.cwiseMax(0.0).asDiagonal() * er.vectors.adjoint();
        w.z1 = HermitianMatrix(qcc::detail::partial_transpose(z1, {dx, d1}, 0), w.z1.shape());
        w.z2 = HermitianMatrix(qcc::detail::partial_transpose(z2, {dx, d2}, 0), w.z2.shape());
        w.mode = WitnessMode::ppt;
        if (qcc::detail::max_abs(rplus) > 1e-12 * std::max(1.0, qcc::detail::max_abs(r)))
            w.r = HermitianMatrix(rplus, p.shape);
        CMat qn = adjoint_sum(w.z1, w.z2, dx, d1, d2).mat();
        if (w.r) qn -= qcc::detail::partial_transpose(rplus, {dx, d1, d2}, 0);
        double delta = shift_for(min_eigenvalue(qn), qcc::detail::max_abs(qn));
        w.z1 = w.z1 + delta * HermitianMatrix::identity(w.z1.shape());
        out.dual = {w.z1, w.z2};
        if (w.r) out.dual.push_back(*w.r);
    } else {
        CMat sum = adjoint_sum(w.z1, w.z2, dx, d1, d2).mat();
        double delta = shift_for(min_eigenvalue(sum), qcc::detail::max_abs(sum));
        w.z1 = w.z1 + delta * HermitianMatrix::identity(w.z1.shape());
        out.dual = {w.z1, w.z2};
    }
    out.certificate = verify_witness_targets(w, p.targets[0], p.targets[1], dx);
    out.witness = w;
}

inline void decode_extension(const SdpProblem& p, const ConicSolution& s, SdpOutcome& out) {
    const int n = p.form.block_sides[0];
    const int side = p.targets[0].side();
    CMat x = smat(s.x.data(), n) + s.u(0) * CMat::Identity(n, n);
    out.primal = {HermitianMatrix(x, p.shape)};
    std::vector<HermitianMatrix> zs;
    for (int a = 0; a < p.copies; ++a)
        zs.emplace_back(-group_matrix(s.y, p.group_offsets[static_cast<std::size_t>(a)], side), p.targets[0].shape());
    CMat sum = CMat::Zero(n, n);
    for (int a = 0; a < p.copies; ++a) {
        std::vector<int> traced;
        for (int b = 1; b <= p.copies; ++b)
            if (b != a + 1) traced.push_back(b);
        sum += qcc::detail::partial_trace_adjoint(zs[static_cast<std::size_t>(a)].mat(), p.shape.factors, traced);
    }
    double delta = shift_for(min_eigenvalue(sum), qcc::detail::max_abs(sum));
    zs[0] = zs[0] + delta * HermitianMatrix::identity(zs[0].shape());
    Channel f(p.targets[0], p.dx, 1e-6);
    out.certificate = verify_extension_witness(zs, f);
    out.dual = zs;
}

inline void decode_jordan(const SdpProblem& p, const ConicSolution& s, SdpOutcome& out) {
    const int d = p.dx, na = d * d * d;
    const int kdim = static_cast<int>(p.null_basis.cols());
    const int ny = p.form.block_sides[0];
    RVec z = s.y.head(kdim);
    CMat a = p.base_operator.mat() + smat(RVec(p.null_basis * z), na);
    out.primal = {HermitianMatrix(a, p.shape)};
    out.primal.emplace_back(qcc::detail::lift_apply(*p.fg, d, a), TensorShape{d}.concat(p.fg->out_shape()));
    CMat rho = smat(s.x.data(), ny);
    CMat lstar = qcc::detail::lift_apply_adjoint(*p.fg, d, rho);
    RVec w = p.marginal_matrix.transpose().colPivHouseholderQr().solve(svec(lstar));
    const int r = d * d * d * d;
    JordanWitness jw{HermitianMatrix(smat(w.data(), d * d), TensorShape{d, d}),
                     HermitianMatrix(smat(w.data() + r, d * d), TensorShape{d, d}),
                     HermitianMatrix(rho, TensorShape{d}.concat(p.fg->out_shape()))};
    out.dual = {jw.w1, jw.w2, jw.rho};
    // Channel views of f and g are recovered from f⊗g only through the stored problem, so verify directly.
    WitnessCheck c;
    CMat rhs = qcc::detail::partial_trace_adjoint(jw.w1.mat(), {d, d, d}, {2}) +
               qcc::detail::partial_trace_adjoint(jw.w2.mat(), {d, d, d}, {1});
    double scale = std::max({1.0, qcc::detail::max_abs(lstar), qcc::detail::max_abs(rhs)});
    c.residual = qcc::detail::max_abs(lstar - rhs) / scale;
    c.min_eigenvalue = min_eigenvalue(jw.rho);
    HermitianMatrix jid = identity_channel(d).choi();
    c.margin = inner(jw.w1 + jw.w2.reshaped(jw.w1.shape()), jid.reshaped(jw.w1.shape()));
    c.valid = c.residual <= 10 * kWitnessTol && c.min_eigenvalue >= -kWitnessTol && jw.rho.trace() > kWitnessTol &&
              c.margin <= -kWitnessTol;
    out.certificate = c;
    out.jordan_witness = jw;
}

inline void decode_povm(const SdpProblem& p, const ConicSolution& s, SdpOutcome& out) {
    const int d = p.dx, m = p.m_outcomes, n = p.n_outcomes;
    const double t = s.u(0);
    for (int b = 0; b < m * n; ++b)
        out.primal.emplace_back(smat(s.x.data() + b * d * d, d) + t * CMat::Identity(d, d), p.shape);
    std::vector<CMat> ys;
    for (int g = 0; g < m + n; ++g) ys.push_back(-group_matrix(s.y, p.group_offsets[static_cast<std::size_t>(g)], d));
    double lmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            lmin = std::min(lmin, min_eigenvalue(CMat(ys[static_cast<std::size_t>(i)] + ys[static_cast<std::size_t>(m + j)])));
    double delta = shift_for(lmin, 1.0);
    for (int i = 0; i < m; ++i) ys[static_cast<std::size_t>(i)] += delta * CMat::Identity(d, d);
    WitnessCheck c;
    c.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            c.min_eigenvalue =
                std::min(c.min_eigenvalue, min_eigenvalue(CMat(ys[static_cast<std::size_t>(i)] + ys[static_cast<std::size_t>(m + j)])));
    for (int g = 0; g < m + n; ++g) {
        out.dual.emplace_back(ys[static_cast<std::size_t>(g)], p.shape);
        c.margin += inner(out.dual.back(), p.targets[static_cast<std::size_t>(g)]);
    }
    c.valid = c.min_eigenvalue >= -kWitnessTol && c.margin <= -kWitnessTol;
    out.certificate = c;
}

inline double primal_violation(const SdpProblem& p, const ConicSolution& s) {
    RVec r = p.form.A * s.x + p.form.B * s.u - p.form.b;
    return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace detail

inline SdpOutcome solve(const SdpProblem& p, SolveMode mode = SolveMode::interior_point, const SolverOptions& opt = {}) {
    SdpOutcome out;
    if (mode == SolveMode::projection) {
        if (p.kind == ProblemKind::jordan) {
            out.message = "projection mode does not apply to the Jordan problem";
            return out;
        }
        auto pr = solve_projection(p.form, opt);
        out.iterations = pr.iterations;
        out.primal_residual = pr.affine_residual;
        out.value = pr.min_eigenvalue;
        out.converged = pr.feasible;
        if (pr.feasible && pr.affine_residual <= kDecisionTol) {
            auto blocks = detail::to_blocks(p.form, pr.x);
            if (p.kind == ProblemKind::povm) {
                for (auto& b : blocks) out.primal.emplace_back(b, p.shape);
            } else {
                out.primal.emplace_back(blocks[0], p.shape);
            }
            out.status = Status::Feasible;
            out.message = "feasible point found by alternating projections";
        } else {
            out.message = "alternating projections did not reach the PSD cone";
        }
        return out;
    }

    detail::check_ipm_size(p.form);
    auto s = solve_ipm(p.form, opt);
    out.iterations = s.iterations;
    out.removed_constraints = s.removed_constraints;
    out.primal_residual = s.primal_residual;
    out.dual_residual = s.dual_residual;
    out.gap = s.gap;
    out.converged = s.converged;
    out.message = s.message;
    if (s.inconsistency > kDecisionTol) {
        out.message = "equality constraints are inconsistent (residual " + std::to_string(s.inconsistency) + ")";
        return out;
    }
    if (p.kind == ProblemKind::jordan) {
        out.value = s.dobj;
        out.dual_value = s.pobj;
    } else {
        out.value = -s.pobj;
        out.dual_value = -s.dobj;
    }
    switch (p.kind) {
        case ProblemKind::marginal:
        case ProblemKind::ppt_marginal: detail::decode_marginal(p, s, out); break;
        case ProblemKind::k_extension: detail::decode_extension(p, s, out); break;
        case ProblemKind::jordan: detail::decode_jordan(p, s, out); break;
        case ProblemKind::povm: detail::decode_povm(p, s, out); break;
    }
    if (!s.accurate) return out;
    bool primal_ok = p.kind == ProblemKind::jordan || detail::primal_violation(p, s) <= kDecisionTol;
    if (out.value >= -kDecisionTol && primal_ok) {
        out.status = Status::Feasible;
    } else if (out.dual_value <= -kDecisionTol && out.certificate.valid) {
        out.status = Status::Infeasible;
    }
    return out;
}

enum class DecideMode { compat, jordan, ppt_compat };
enum class Verdict { Compatible, Incompatible, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Compatible: return "Compatible";
        case Verdict::Incompatible: return "Incompatible";
        default: return "Inconclusive";
    }
}

struct Decision {
    Verdict verdict = Verdict::Inconclusive;
    SdpOutcome outcome;
    std::optional<Channel> compatibilizer;
    std::optional<GenJordanOperator> jordan_operator;
    std::string note;
};

namespace detail {

inline bool marginals_match(const HermitianMatrix& x, const HermitianMatrix& t1, const HermitianMatrix& t2, double tol) {
    const auto& dims = x.shape().factors;
    return qcc::detail::max_abs(qcc::detail::partial_trace(x.mat(), dims, {2}) - t1.mat()) <= tol &&
           qcc::detail::max_abs(qcc::detail::partial_trace(x.mat(), dims, {1}) - t2.mat()) <= tol;
}

}  // namespace detail

/// Three-valued compatibility decision with an attached, independently checked certificate.
inline Decision decide(const Channel& f, const Channel& g, DecideMode mode, const SolverOptions& opt = {}) {
    Decision d;
    SdpProblem p = mode == DecideMode::jordan ? build_jordan_compat(f, g)
                                              : build_compat(f, g, mode == DecideMode::ppt_compat);
    d.outcome = solve(p, SolveMode::interior_point, opt);
    auto& o = d.outcome;
    if (o.status == Status::Feasible) {
        try {
            if (mode == DecideMode::jordan) {
                d.jordan_operator.emplace(o.primal[0], kJordanSolverTol);
                d.compatibilizer.emplace(gen_jordan(f, g, *d.jordan_operator).choi(), f.d_in(), kDecisionTol);
            } else {
                d.compatibilizer.emplace(o.primal[0], f.d_in(), kDecisionTol);
                if (mode == DecideMode::ppt_compat &&
                    min_eigenvalue(partial_transpose(o.primal[0], 0)) < -kDecisionTol)
                    throw DimensionError("primal point is not PPT");
            }
            if (!detail::marginals_match(d.compatibilizer->choi(), f.choi(), g.choi(), kDecisionTol))
                throw DimensionError("primal point misses the marginal constraints");
            d.verdict = Verdict::Compatible;
        } catch (const std::exception& e) {
            d.compatibilizer.reset();
            d.jordan_operator.reset();
            d.note = std::string("primal certificate rejected: ") + e.what();
        }
    } else if (o.status == Status::Infeasible) {
        WitnessCheck c = mode == DecideMode::jordan ? verify_jordan_witness(*o.jordan_witness, f, g)
                                                    : verify_witness(*o.witness, f, g);
        if (c.valid) {
            d.verdict = Verdict::Incompatible;
        } else {
            d.note = "dual certificate failed independent verification";
        }
    } else {
        d.note = o.message;
    }
    if (d.verdict == Verdict::Inconclusive && d.note.empty())
        d.note = "optimal value within the ±1e-7 band around zero";
    return d;
}

/// k-fold self-compatibility of f.
inline Decision decide_self_compat(const Channel& f, int k, SolveMode mode = SolveMode::interior_point,
                                   const SolverOptions& opt = {}) {
    Decision d;
    SdpProblem p = build_k_extension(f, k, mode == SolveMode::interior_point ? kMaxIpmSide : kMaxProjectionSide);
    d.outcome = solve(p, mode, opt);
    if (d.outcome.status == Status::Feasible) {
        d.verdict = Verdict::Compatible;
    } else if (d.outcome.status == Status::Infeasible &&
               verify_extension_witness(d.outcome.dual, f).valid) {
        d.verdict = Verdict::Incompatible;
    } else {
        d.note = d.outcome.message;
    }
    return d;
}

}  // namespace qcc::sdp
