// sdp_solver.hpp - dense primal-dual interior point and projection solvers over Hermitian blocks
// SPDX-License-Identifier: Apache-2.0
//
// Conic form, with X a block-diagonal Hermitian PSD variable in orthonormal
// Hermitian coordinates and u a vector of free real variables:
//
//   (P)  min ⟨C, X⟩ + cᵀu   s.t.  A X + B u = b,  X ⪰ 0
//   (D)  max bᵀy            s.t.  Aᵀy + Z = C,  Bᵀy = c,  Z ⪰ 0

#pragma once

#include "qcc/channels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <limits>

namespace qcc::sdp {

struct ConicForm {
    std::vector<int> block_sides;
    RMat A;  // m × N
    RMat B;  // m × p
    RVec b;
    RVec C;
    RVec c;

    int num_vars() const {
        int n = 0;
        for (int s : block_sides) n += s * s;
        return n;
    }
    int offset(std::size_t blk) const {
        int o = 0;
        for (std::size_t i = 0; i < blk; ++i) o += block_sides[i] * block_sides[i];
        return o;
    }
};

struct SolverOptions {
    double tol = 1e-9;
    int max_iter = 200;
    double redundancy_tol = 1e-10;
    // Accept a stalled run whose measures are all below this bound.
    double loose_tol = 1e-7;
    int refinement_steps = 8;      // iterative refinement passes per Newton solve
    int stall_iterations = 15;     // stop once the best iterate is this many steps old
    int projection_max_iter = 20000;
    double projection_psd_tol = 1e-9;
};

struct ConicSolution {
    RVec x;  // svec blocks
    RVec u;
    RVec y;  // one entry per original constraint row; zero on removed rows
    RVec z;
    double pobj = 0.0;
    double dobj = 0.0;
    double primal_residual = std::numeric_limits<double>::infinity();
    double dual_residual = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int removed_constraints = 0;
    double inconsistency = 0.0;  // residual of right-hand sides on removed rows
    bool converged = false;      // all measures below tol
    bool accurate = false;       // all measures below loose_tol
    std::string message;
};

namespace detail {

using qcc::detail::smat;
using qcc::detail::svec;
using qcc::detail::svec_into;

inline std::vector<CMat> to_blocks(const ConicForm& f, const RVec& v) {
    std::vector<CMat> out;
    int o = 0;
    for (int s : f.block_sides) {
        out.push_back(smat(v.data() + o, s));
        o += s * s;
    }
    return out;
}

inline RVec from_blocks(const ConicForm& f, const std::vector<CMat>& blocks) {
    RVec v(f.num_vars());
    int o = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        svec_into(blocks[i], v.data() + o);
        o += f.block_sides[i] * f.block_sides[i];
    }
    return v;
}

struct Reduction {
    std::vector<int> kept;
    double inconsistency = 0.0;
};

// Selects a maximal independent set of rows of [A B] by pivoted QR.
inline Reduction reduce_rows(const ConicForm& f, double tol) {
    const auto m = f.A.rows();
    RMat ab(m, f.A.cols() + f.B.cols());
    ab << f.A, f.B;
    Reduction r;
    if (m == 0) return r;
    Eigen::ColPivHouseholderQR<RMat> qr(ab.transpose());
    qr.setThreshold(tol);
    auto rank = qr.rank();
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = 0; i < rank; ++i) r.kept.push_back(perm(i));
    std::sort(r.kept.begin(), r.kept.end());
    if (rank < m) {
        RMat kept_rows(rank, ab.cols());
        RVec kept_b(rank);
        for (Eigen::Index i = 0; i < rank; ++i) {
            kept_rows.row(i) = ab.row(r.kept[static_cast<std::size_t>(i)]);
            kept_b(i) = f.b(r.kept[static_cast<std::size_t>(i)]);
        }
        Eigen::ColPivHouseholderQR<RMat> kq(kept_rows.transpose());
        for (Eigen::Index i = 0; i < m; ++i) {
            if (std::binary_search(r.kept.begin(), r.kept.end(), static_cast<int>(i))) continue;
            RVec coef = kq.solve(RVec(ab.row(i).transpose()));
            r.inconsistency = std::max(r.inconsistency, std::abs(f.b(i) - coef.dot(kept_b)));
        }
    }
    return r;
}

struct NtBlock {
    CMat g;
    CMat ginv;
    CMat w;
    RVec v;
};

inline bool nt_scaling(const CMat& x, const CMat& z, NtBlock& out) {
    Eigen::LLT<CMat> lx(x), lz(z);
    if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    CMat l = lx.matrixL();
    CMat r = lz.matrixL();
    Eigen::JacobiSVD<CMat> svd(r.adjoint() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.v = svd.singularValues();
    if (out.v.minCoeff() <= 0.0) return false;
    RVec isq = out.v.cwiseSqrt().cwiseInverse();
    out.g = l * svd.matrixV() * isq.asDiagonal();
    CMat linv = lx.matrixL().solve(CMat::Identity(x.rows(), x.cols()));
    out.ginv = out.v.cwiseSqrt().asDiagonal() * svd.matrixV().adjoint() * linv;
    out.w = out.g * out.g.adjoint();
    return true;
}

// Largest α ≤ cap with x + α dx ⪰ 0.
inline double max_step(const CMat& x, const CMat& dx, double cap = 1e30) {
    Eigen::LLT<CMat> lx(x);
    if (lx.info() != Eigen::Success) return 0.0;
    CMat t = lx.matrixL().solve(dx);
    t = lx.matrixL().solve(CMat(t.adjoint())).adjoint();
    double lmin = min_eigenvalue(CMat(0.5 * (t + t.adjoint())));
    return lmin >= 0.0 ? cap : std::min(cap, -1.0 / lmin);
}

}  // namespace detail

/// Primal-dual path following with Nesterov-Todd scaling and Mehrotra correction.
inline ConicSolution solve_ipm(const ConicForm& full, const SolverOptions& opt = {}) {
    using detail::smat;
    using detail::svec;
    ConicSolution sol;
    auto red = detail::reduce_rows(full, opt.redundancy_tol);
    sol.removed_constraints = static_cast<int>(full.A.rows()) - static_cast<int>(red.kept.size());
    sol.inconsistency = red.inconsistency;

    // Reduced problem.
    const int m0 = static_cast<int>(red.kept.size());
    const int nvar = full.num_vars();
    RMat A0(m0, nvar), B(m0, full.B.cols());
    RVec b0(m0);
    for (int i = 0; i < m0; ++i) {
        A0.row(i) = full.A.row(red.kept[static_cast<std::size_t>(i)]);
        B.row(i) = full.B.row(red.kept[static_cast<std::size_t>(i)]);
        b0(i) = full.b(red.kept[static_cast<std::size_t>(i)]);
    }
    // Free variables: u = V w with Bv = B V of full column rank. Writing Bv = [Q₁ Q₂][R; 0],
    // w = R⁻¹Q₁ᵀ(b − A x) and the remaining problem is a standard SDP in x alone.
    RMat V = RMat::Identity(B.cols(), B.cols());
    if (B.cols() > 0) {
        Eigen::JacobiSVD<RMat> bs(B, Eigen::ComputeFullV);
        bs.setThreshold(opt.redundancy_tol);
        V = bs.matrixV().leftCols(bs.rank());
    }
    const RMat Bv = B * V;
    const RVec cv = V.transpose() * full.c;
    const int pf = static_cast<int>(Bv.cols());
    RMat Q1 = RMat::Zero(m0, 0), Q2 = RMat::Identity(m0, m0), Rf = RMat::Zero(0, 0);
    RVec ybase = RVec::Zero(m0);
    if (pf > 0) {
        Eigen::HouseholderQR<RMat> qr(Bv);
        RMat q = qr.householderQ() * RMat::Identity(m0, m0);
        Q1 = q.leftCols(pf);
        Q2 = q.rightCols(m0 - pf);
        Rf = qr.matrixQR().topLeftCorner(pf, pf).triangularView<Eigen::Upper>();
        ybase = Q1 * RVec(Rf.transpose().triangularView<Eigen::Lower>().solve(cv));
    }
    const RMat A = Q2.transpose() * A0;
    const RVec b = Q2.transpose() * b0;
    const RVec C = full.C - A0.transpose() * ybase;
    const double obj_shift = b0.dot(ybase);
    const int m = static_cast<int>(A.rows());

    const auto& sides = full.block_sides;
    const std::size_t nb = sides.size();
    int ncone = 0;
    for (int s : sides) ncone += s;

    // Starting point.
    double normb = b0.norm(), normC = full.C.norm() + full.c.norm();
    std::vector<CMat> X(nb), Z(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        int s = sides[k], o = full.offset(k);
        double max_ratio = 0.0, max_norm = 0.0;
        for (int i = 0; i < m; ++i) {
            double na = A.row(i).segment(o, s * s).norm();
            max_ratio = std::max(max_ratio, (1.0 + std::abs(b(i))) / (1.0 + na));
            max_norm = std::max(max_norm, na);
        }
        double xi = std::max({10.0, std::sqrt(double(s)), s * max_ratio});
        double eta = std::max({10.0, std::sqrt(double(s)), max_norm, C.segment(o, s * s).norm()});
        X[k] = xi * CMat::Identity(s, s);
        Z[k] = eta * CMat::Identity(s, s);
    }
    RVec y = RVec::Zero(m);

    auto blocks_inner = [&](const std::vector<CMat>& a, const std::vector<CMat>& c) {
        double s = 0.0;
        for (std::size_t k = 0; k < nb; ++k) s += a[k].cwiseProduct(c[k].conjugate()).sum().real();
        return s;
    };
    auto vec = [&](const std::vector<CMat>& blocks) { return detail::from_blocks(full, blocks); };
    auto mat = [&](const RVec& x) { return detail::to_blocks(full, x); };
    auto free_part = [&](const RVec& xv) -> RVec {
        if (pf == 0) return RVec::Zero(0);
        return Rf.triangularView<Eigen::Upper>().solve(RVec(Q1.transpose() * (b0 - A0 * xv)));
    };

    std::vector<detail::NtBlock> nt(nb);
    // Degenerate problems lose accuracy as μ → 0; the best iterate seen is kept as a fallback.
    std::vector<CMat> bestX, bestZ;
    RVec besty;
    double best_merit = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    bool restored = false;
    for (int iter = 0;; ++iter) {
        RVec xv = vec(X), zv = vec(Z);
        RVec rp = b - A * xv;
        RVec rd = C - zv - A.transpose() * y;
        double xz = blocks_inner(X, Z);
        double mu = xz / ncone;
        sol.pobj = C.dot(xv) + obj_shift;
        sol.dobj = b.dot(y) + obj_shift;
        sol.primal_residual = rp.norm() / (1.0 + normb);
        sol.dual_residual = rd.norm() / (1.0 + normC);
        sol.gap = std::max(std::abs(sol.pobj - sol.dobj), std::abs(xz)) / (1.0 + std::abs(sol.pobj) + std::abs(sol.dobj));
        sol.iterations = iter;
#ifdef QCC_IPM_TRACE
        std::fprintf(stderr, "it %d pr %.3e dr %.3e gap %.3e mu %.3e pobj %.10f\n", iter, sol.primal_residual,
                     sol.dual_residual, sol.gap, mu, sol.pobj);
#endif
        auto finish = [&](bool conv, const std::string& msg) {
            sol.converged = conv;
            sol.accurate = conv || (sol.primal_residual <= opt.loose_tol && sol.dual_residual <= opt.loose_tol &&
                                    sol.gap <= opt.loose_tol);
            sol.message = msg;
            sol.x = xv;
            sol.z = zv;
            sol.u = V * free_part(xv);
            RVec yr = ybase + Q2 * y;
            sol.y = RVec::Zero(full.A.rows());
            for (int i = 0; i < m0; ++i) sol.y(red.kept[static_cast<std::size_t>(i)]) = yr(i);
        };
        double merit = std::max({sol.primal_residual, sol.dual_residual, sol.gap});
        if (merit < best_merit) {
            best_merit = merit;
            best_iter = iter;
            bestX = X;
            bestZ = Z;
            besty = y;
        }
        auto bail = [&](const std::string& msg) {
            if (!restored && merit > best_merit) {
                restored = true;
                X = bestX;
                Z = bestZ;
                y = besty;
                return false;
            }
            finish(false, msg);
            return true;
        };
        if (sol.primal_residual <= opt.tol && sol.dual_residual <= opt.tol && sol.gap <= opt.tol) {
            finish(true, "converged");
            return sol;
        }
        if (restored) {
            finish(false, "best iterate restored after loss of accuracy");
            return sol;
        }
        if (iter >= opt.max_iter) {
            if (bail("iteration cap exceeded")) return sol;
            continue;
        }
        if (iter - best_iter >= opt.stall_iterations) {
            if (bail("stalled: no progress")) return sol;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 0; k < nb && ok; ++k) ok = detail::nt_scaling(X[k], Z[k], nt[k]);
        if (!ok) {
            if (bail("scaling failed: iterate lost definiteness")) return sol;
            continue;
        }
        // Schur complement M = A W Aᵀ = FᵀF with F_i = svec(Gᴴ A_i G), since W = GGᴴ.
        // Factoring F by QR keeps the conditioning at that of F instead of its square.
        RMat fac(nvar, m);
        for (int i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < nb; ++k) {
                int s = sides[k], o = full.offset(k);
                RVec seg = A.row(i).segment(o, s * s).transpose();
                if (seg.squaredNorm() == 0.0) {
                    fac.col(i).segment(o, s * s).setZero();
                    continue;
                }
                CMat h = nt[k].g.adjoint() * smat(seg, s) * nt[k].g;
                detail::svec_into(h, fac.col(i).data() + o);
            }
        }
        Eigen::HouseholderQR<RMat> schur(fac);
        const RMat rfac = schur.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        double rdiag_max = 0.0, rdiag_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            rdiag_max = std::max(rdiag_max, std::abs(rfac(i, i)));
            rdiag_min = std::min(rdiag_min, std::abs(rfac(i, i)));
        }
        if (m > 0 && !(rdiag_min > 1e-15 * rdiag_max)) {
            if (bail("Schur complement factorization failed")) return sol;
            continue;
        }
        auto schur_solve = [&](const RVec& rhs) -> RVec {
            if (m == 0) return RVec::Zero(0);
            RVec t = rfac.transpose().triangularView<Eigen::Lower>().solve(rhs);
            return rfac.triangularView<Eigen::Upper>().solve(t);
        };

        std::vector<CMat> rdb = mat(rd);
        std::vector<CMat> wrdw(nb);
        for (std::size_t k = 0; k < nb; ++k) wrdw[k] = nt[k].w * rdb[k] * nt[k].w;

        auto scaled_lift = [&](const RVec& dyv) {
            std::vector<CMat> out = mat(RVec(A.transpose() * dyv));
            for (std::size_t k = 0; k < nb; ++k) out[k] = nt[k].w * out[k] * nt[k].w;
            return out;
        };
        auto newton = [&](const std::vector<CMat>& rc, std::vector<CMat>& dX, std::vector<CMat>& dZ, RVec& dy) {
            std::vector<CMat> t(nb);
            for (std::size_t k = 0; k < nb; ++k) t[k] = rc[k] - wrdw[k];
            dy = schur_solve(RVec(rp - A * vec(t)));
            std::vector<CMat> wl = scaled_lift(dy);
            dX.resize(nb);
            // Badly scaled W leaves a rounding-level anti-Hermitian part; drop it before refining.
            for (std::size_t k = 0; k < nb; ++k) {
                dX[k] = t[k] + wl[k];
                dX[k] = 0.5 * (dX[k] + dX[k].adjoint());
            }
            // Iterative refinement against A dX = rp.
            double last = std::numeric_limits<double>::infinity();
            for (int r = 0; r < opt.refinement_steps; ++r) {
                RVec e = rp - A * vec(dX);
                double en = e.norm();
                if (en <= 1e-15 * (1.0 + rp.norm()) || en >= 0.5 * last) break;
                last = en;
                RVec cy = schur_solve(e);
                std::vector<CMat> cl = scaled_lift(cy);
                for (std::size_t k = 0; k < nb; ++k) {
                    dX[k] += cl[k];
                    dX[k] = 0.5 * (dX[k] + dX[k].adjoint());
                }
                dy += cy;
            }
            dZ = mat(RVec(rd - A.transpose() * dy));
            for (std::size_t k = 0; k < nb; ++k) dZ[k] = 0.5 * (dZ[k] + dZ[k].adjoint());
        };
        auto steps = [&](const std::vector<CMat>& dX, const std::vector<CMat>& dZ, double& ap, double& ad) {
            ap = 1e30;
            ad = 1e30;
            for (std::size_t k = 0; k < nb; ++k) {
                ap = std::min(ap, detail::max_step(X[k], dX[k]));
                ad = std::min(ad, detail::max_step(Z[k], dZ[k]));
            }
        };

        // Predictor.
        std::vector<CMat> rc(nb), dXa, dZa, dX, dZ;
        for (std::size_t k = 0; k < nb; ++k) rc[k] = -X[k];
        RVec dya, dy;
        newton(rc, dXa, dZa, dya);
        double apa, ada;
        steps(dXa, dZa, apa, ada);
        apa = std::min(1.0, apa);
        ada = std::min(1.0, ada);
        double mu_aff = 0.0;
        for (std::size_t k = 0; k < nb; ++k)
            mu_aff += CMat(X[k] + apa * dXa[k]).cwiseProduct(CMat(Z[k] + ada * dZa[k]).conjugate()).sum().real();
        mu_aff /= ncone;
        double expon = std::max(1.0, 3.0 * std::min(apa, ada) * std::min(apa, ada));
        double sigma = mu > 0 ? std::min(1.0, std::pow(std::max(mu_aff, 0.0) / mu, expon)) : 0.0;

        // Corrector in the scaled eigenbasis, where X̃ = Z̃ = diag(v).
        for (std::size_t k = 0; k < nb; ++k) {
            const auto& sc = nt[k];
            CMat dxs = sc.ginv * dXa[k] * sc.ginv.adjoint();
            CMat dzs = sc.g.adjoint() * dZa[k] * sc.g;
            CMat h = -(dxs * dzs + dzs * dxs);
            for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) += 2.0 * sigma * mu - 2.0 * sc.v(i) * sc.v(i);
            for (Eigen::Index i = 0; i < h.rows(); ++i)
                for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) /= (sc.v(i) + sc.v(j));
            rc[k] = sc.g * h * sc.g.adjoint();
            rc[k] = 0.5 * (rc[k] + rc[k].adjoint());
        }
        newton(rc, dX, dZ, dy);
        double ap, ad;
        steps(dX, dZ, ap, ad);
        double gamma = 0.9 + 0.09 * std::min(std::min(ap, 1.0), std::min(ad, 1.0));
        ap = std::min(1.0, gamma * ap);
        ad = std::min(1.0, gamma * ad);
        if (!(ap > 1e-12) && !(ad > 1e-12)) {
            if (bail("stalled: vanishing step length")) return sol;
            continue;
        }
        for (std::size_t k = 0; k < nb; ++k) {
            X[k] += ap * dX[k];
            Z[k] += ad * dZ[k];
            X[k] = 0.5 * (X[k] + X[k].adjoint());
            Z[k] = 0.5 * (Z[k] + Z[k].adjoint());
        }
        y += ad * dy;
    }
}

struct ProjectionResult {
    RVec x;  // affine-feasible point (u fixed at zero)
    double min_eigenvalue = -std::numeric_limits<double>::infinity();
    double affine_residual = 0.0;
    int iterations = 0;
    bool feasible = false;
};

/// Dykstra alternating projections onto {A X = b} ∩ {X ⪰ 0}, with the free variables held at zero.
inline ProjectionResult solve_projection(const ConicForm& full, const SolverOptions& opt = {}) {
    auto red = detail::reduce_rows(full, opt.redundancy_tol);
    const int m = static_cast<int>(red.kept.size());
    RMat A(m, full.num_vars());
    RVec b(m);
    for (int i = 0; i < m; ++i) {
        A.row(i) = full.A.row(red.kept[static_cast<std::size_t>(i)]);
        b(i) = full.b(red.kept[static_cast<std::size_t>(i)]);
    }
    Eigen::LLT<RMat> gram(A * A.transpose());
    auto project_affine = [&](const RVec& x) -> RVec { return x - A.transpose() * gram.solve(RVec(A * x - b)); };
    auto blocks_min_eig = [&](const RVec& x) {
        double lmin = std::numeric_limits<double>::infinity();
        for (const auto& blk : detail::to_blocks(full, x)) lmin = std::min(lmin, min_eigenvalue(blk));
        return lmin;
    };
    auto project_psd = [&](const RVec& x) -> RVec {
        auto blocks = detail::to_blocks(full, x);
        for (auto& blk : blocks) {
            auto e = hermitian_eig(blk);
            blk = e.vectors * e.values.cwiseMax(0.0).asDiagonal() * e.vectors.adjoint();
        }
        return detail::from_blocks(full, blocks);
    };
    ProjectionResult res;
    RVec x = project_affine(RVec::Zero(full.num_vars()));
    RVec pinc = RVec::Zero(x.size()), qinc = RVec::Zero(x.size());
    RVec yaff = x;
    for (int it = 0; it < opt.projection_max_iter; ++it) {
        res.iterations = it + 1;
        yaff = project_affine(x + pinc);
        pinc = x + pinc - yaff;
        res.min_eigenvalue = blocks_min_eig(yaff);
        if (res.min_eigenvalue >= -opt.projection_psd_tol) {
            res.feasible = true;
            break;
        }
        RVec xn = project_psd(yaff + qinc);
        qinc = yaff + qinc - xn;
        x = xn;
    }
    res.x = yaff;
    res.affine_residual = (A * yaff - b).norm();
    return res;
}

}  // namespace qcc::sdp
