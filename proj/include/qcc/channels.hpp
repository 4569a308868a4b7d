// channels.hpp - linear maps and channels in the Choi representation
// SPDX-License-Identifier: Apache-2.0
//
// Choi convention: J[(i·d_out + a), (j·d_out + b)] = Φ(E_ij)[a, b]. The input
// factor is leftmost in every Choi shape.

#pragma once

#include "qcc/linalg.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <functional>
#include <optional>
#include <variant>

namespace qcc {

class SingularMapError : public std::domain_error {
public:
    SingularMapError(const std::string& what, double smallest)
        : std::domain_error(what), smallest_singular_value(smallest) {}
    double smallest_singular_value;
};

inline constexpr double kChannelTol = 1e-8;

namespace detail {

// Orthonormal Hermitian basis coordinates: diagonal entries, then for each i<j
// the pair √2·Re H_ij, √2·Im H_ij.
inline int svec_dim(int n) { return n * n; }

inline void svec_into(const CMat& h, double* out) {
    const int n = static_cast<int>(h.rows());
    const double r2 = std::sqrt(2.0);
    int k = 0;
    for (int i = 0; i < n; ++i) out[k++] = h(i, i).real();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            out[k++] = r2 * h(i, j).real();
            out[k++] = r2 * h(i, j).imag();
        }
}

inline RVec svec(const CMat& h) {
    RVec v(svec_dim(static_cast<int>(h.rows())));
    svec_into(h, v.data());
    return v;
}

inline CMat smat(const double* v, int n) {
    CMat h(n, n);
    const double s = 1.0 / std::sqrt(2.0);
    int k = 0;
    for (int i = 0; i < n; ++i) h(i, i) = v[k++];
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            h(i, j) = cplx(v[k] * s, v[k + 1] * s);
            h(j, i) = std::conj(h(i, j));
            k += 2;
        }
    return h;
}

inline CMat smat(const RVec& v, int n) { return smat(v.data(), n); }

inline CMat herm_basis_element(int n, int b) {
    RVec e = RVec::Zero(n * n);
    e(b) = 1.0;
    return smat(e, n);
}

}  // namespace detail

/// Hermitian-preserving linear map stored by its Choi matrix.
class LinearMapRep {
public:
    LinearMapRep() = default;

    /// `choi` shape must start with the input factor d_in; a single-factor shape is split as [d_in, side/d_in].
    LinearMapRep(const HermitianMatrix& choi, int d_in) : choi_(choi), d_in_(d_in) {
        if (d_in < 1 || choi.side() % d_in != 0) throw DimensionError("LinearMapRep: side not divisible by d_in");
        d_out_ = choi.side() / d_in;
        const auto& f = choi.shape().factors;
        if (f.size() < 2 || f[0] != d_in) choi_ = choi.reshaped(TensorShape{d_in, d_out_});
    }

    LinearMapRep(const HermitianMatrix& choi, int d_in, const TensorShape& out_shape)
        : LinearMapRep(choi.reshaped(TensorShape{d_in}.concat(out_shape)), d_in) {}

    const HermitianMatrix& choi() const { return choi_; }
    int d_in() const { return d_in_; }
    int d_out() const { return d_out_; }
    TensorShape out_shape() const {
        const auto& f = choi_.shape().factors;
        return TensorShape(std::vector<int>(f.begin() + 1, f.end()));
    }

    /// Φ(E_ij) as a d_out × d_out block of the Choi matrix.
    auto block(int i, int j) const { return choi_.mat().block(i * d_out_, j * d_out_, d_out_, d_out_); }

    LinearMapRep operator+(const LinearMapRep& o) const {
        check_same(o);
        return LinearMapRep(choi_ + o.choi_.reshaped(choi_.shape()), d_in_);
    }
    LinearMapRep operator-(const LinearMapRep& o) const {
        check_same(o);
        return LinearMapRep(choi_ - o.choi_.reshaped(choi_.shape()), d_in_);
    }
    LinearMapRep operator*(double s) const { return LinearMapRep(choi_ * s, d_in_); }
    friend LinearMapRep operator*(double s, const LinearMapRep& f) { return f * s; }

private:
    void check_same(const LinearMapRep& o) const {
        if (o.d_in_ != d_in_ || o.d_out_ != d_out_) throw DimensionError("LinearMapRep: dimension mismatch");
    }

    HermitianMatrix choi_;
    int d_in_ = 1;
    int d_out_ = 1;
};

/// Applies the map to an arbitrary (not necessarily Hermitian) input.
inline CMat apply(const LinearMapRep& f, const CMat& x) {
    if (x.rows() != f.d_in() || x.cols() != f.d_in()) throw DimensionError("apply: input side mismatch");
    CMat out = CMat::Zero(f.d_out(), f.d_out());
    for (int i = 0; i < f.d_in(); ++i)
        for (int j = 0; j < f.d_in(); ++j)
            if (x(i, j) != cplx(0.0)) out += x(i, j) * f.block(i, j);
    return out;
}

inline HermitianMatrix apply(const LinearMapRep& f, const HermitianMatrix& x) {
    return HermitianMatrix(qcc::apply(f, x.mat()), f.out_shape());
}

/// Adjoint map: Φ*(Y)_ij = Tr(Φ(E_ji) Y).
inline CMat apply_adjoint(const LinearMapRep& f, const CMat& y) {
    if (y.rows() != f.d_out()) throw DimensionError("apply_adjoint: input side mismatch");
    CMat out(f.d_in(), f.d_in());
    for (int i = 0; i < f.d_in(); ++i)
        for (int j = 0; j < f.d_in(); ++j) out(i, j) = (f.block(j, i) * y).trace();
    return out;
}

inline HermitianMatrix apply_adjoint(const LinearMapRep& f, const HermitianMatrix& y) {
    return HermitianMatrix(apply_adjoint(f, y.mat()), TensorShape{f.d_in()});
}

/// Builds J = Σ E_ij ⊗ action(E_ij).
inline LinearMapRep map_from_action(int d_in, const TensorShape& out_shape,
                                    const std::function<CMat(const CMat&)>& action) {
    int d_out = out_shape.side();
    CMat j(d_in * d_out, d_in * d_out);
    for (int a = 0; a < d_in; ++a)
        for (int b = 0; b < d_in; ++b) {
            CMat img = action(detail::unit(d_in, a, b));
            if (img.rows() != d_out || img.cols() != d_out) throw DimensionError("map_from_action: output side mismatch");
            j.block(a * d_out, b * d_out, d_out, d_out) = img;
        }
    return LinearMapRep(HermitianMatrix(j, TensorShape{d_in}.concat(out_shape)), d_in);
}

/// g ∘ f.
inline LinearMapRep compose(const LinearMapRep& g, const LinearMapRep& f) {
    if (g.d_in() != f.d_out()) throw DimensionError("compose: inner dimensions differ");
    return map_from_action(f.d_in(), g.out_shape(), [&](const CMat& e) { return qcc::apply(g, qcc::apply(f, e)); });
}

/// f ⊗ g acting on X_f ⊗ X_g; the input is a single factor of size d_in(f)·d_in(g).
inline LinearMapRep tensor(const LinearMapRep& f, const LinearMapRep& g) {
    const int df = f.d_in(), dg = g.d_in();
    const int of = f.d_out(), og = g.d_out();
    const int din = df * dg, dout = of * og;
    CMat j(din * dout, din * dout);
    for (int i = 0; i < df; ++i)
        for (int k = 0; k < dg; ++k)
            for (int jj = 0; jj < df; ++jj)
                for (int l = 0; l < dg; ++l)
                    j.block((i * dg + k) * dout, (jj * dg + l) * dout, dout, dout) =
                        detail::kron(f.block(i, jj), g.block(k, l));
    TensorShape out = f.out_shape().concat(g.out_shape());
    return LinearMapRep(HermitianMatrix(j, TensorShape{din}.concat(out)), din);
}

struct ValidationReport {
    bool cp = false;
    bool tp = false;
    bool unital = false;
    std::optional<bool> eb_2x2;
    double min_eigenvalue = 0.0;
    double tp_deviation = 0.0;
};

inline ValidationReport validate(const LinearMapRep& f, double tol = kChannelTol) {
    ValidationReport r;
    const auto& j = f.choi();
    std::vector<int> out_factors;
    for (int k = 1; k < j.shape().size(); ++k) out_factors.push_back(k);
    r.min_eigenvalue = min_eigenvalue(j);
    r.cp = r.min_eigenvalue >= -tol;
    CMat tr_out = detail::partial_trace(j.mat(), j.shape().factors, out_factors);
    r.tp_deviation = detail::max_abs(tr_out - CMat::Identity(f.d_in(), f.d_in()));
    r.tp = r.tp_deviation <= tol;
    CMat tr_in = detail::partial_trace(j.mat(), j.shape().factors, {0});
    r.unital = f.d_in() == f.d_out() && detail::max_abs(tr_in - CMat::Identity(f.d_out(), f.d_out())) <= tol;
    if (f.d_in() == 2 && f.d_out() == 2) {
        CMat pt = detail::partial_transpose(j.mat(), {2, 2}, 0);
        r.eb_2x2 = min_eigenvalue(pt) >= -tol;
    }
    return r;
}

/// Completely positive, trace-preserving map.
class Channel {
public:
    explicit Channel(const LinearMapRep& rep, double tol = kChannelTol) : rep_(rep) {
        auto r = validate(rep, tol);
        if (!r.cp) throw DimensionError("Channel: not completely positive (λ_min = " + std::to_string(r.min_eigenvalue) + ")");
        if (!r.tp) throw DimensionError("Channel: not trace preserving (deviation " + std::to_string(r.tp_deviation) + ")");
    }

    Channel(const HermitianMatrix& choi, int d_in, double tol = kChannelTol) : Channel(LinearMapRep(choi, d_in), tol) {}

    const LinearMapRep& rep() const { return rep_; }
    const HermitianMatrix& choi() const { return rep_.choi(); }
    int d_in() const { return rep_.d_in(); }
    int d_out() const { return rep_.d_out(); }
    TensorShape out_shape() const { return rep_.out_shape(); }

    operator const LinearMapRep&() const { return rep_; }

private:
    LinearMapRep rep_;
};

/// Resolution of the identity into PSD effects.
class Povm {
public:
    explicit Povm(std::vector<HermitianMatrix> effects, double tol = 1e-10) : effects_(std::move(effects)) {
        if (effects_.empty()) throw DimensionError("Povm: no effects");
        int d = effects_.front().side();
        CMat sum = CMat::Zero(d, d);
        for (const auto& e : effects_) {
            if (e.side() != d) throw DimensionError("Povm: effects of different sizes");
            if (min_eigenvalue(e) < -tol) throw DimensionError("Povm: effect not PSD");
            sum += e.mat();
        }
        if (detail::max_abs(sum - CMat::Identity(d, d)) > tol) throw DimensionError("Povm: effects do not sum to identity");
    }

    const std::vector<HermitianMatrix>& effects() const { return effects_; }
    int dim() const { return effects_.front().side(); }
    int outcomes() const { return static_cast<int>(effects_.size()); }
    const HermitianMatrix& operator[](int i) const { return effects_.at(static_cast<std::size_t>(i)); }

    bool is_projective(double tol = 1e-10) const {
        for (const auto& e : effects_)
            if (detail::max_abs(e.mat() * e.mat() - e.mat()) > tol) return false;
        return true;
    }

private:
    std::vector<HermitianMatrix> effects_;
};

inline void check_density(const HermitianMatrix& rho, double tol = 1e-10) {
    if (std::abs(rho.trace() - 1.0) > tol) throw DimensionError("density matrix: trace is not 1");
    if (min_eigenvalue(rho) < -tol) throw DimensionError("density matrix: not PSD");
}

struct MeasurePrepare {
    Povm povm;
    std::vector<HermitianMatrix> preps;

    MeasurePrepare(Povm m, std::vector<HermitianMatrix> p) : povm(std::move(m)), preps(std::move(p)) {
        if (static_cast<int>(preps.size()) != povm.outcomes()) throw DimensionError("MeasurePrepare: length mismatch");
        for (const auto& r : preps) {
            check_density(r);
            if (r.side() != preps.front().side()) throw DimensionError("MeasurePrepare: preps of different sizes");
        }
    }
};

// Named channels.

inline Channel identity_channel(int d) {
    return Channel(map_from_action(d, TensorShape{d}, [](const CMat& e) { return e; }));
}

/// Δ(X) = Σ E_ii X E_ii.
inline Channel dephasing_channel(int d) {
    return Channel(map_from_action(d, TensorShape{d}, [](const CMat& e) { return CMat(e.diagonal().asDiagonal()); }));
}

/// Ω(X) = Tr(X)·I/d.
inline Channel depolarizing_channel(int d) {
    return Channel(map_from_action(d, TensorShape{d}, [d](const CMat& e) {
        return CMat(e.trace() * CMat::Identity(d, d) / static_cast<double>(d));
    }));
}

inline void check_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) throw DimensionError(std::string(what) + " outside [0,1]");
}

/// Ω_q = qΩ + (1−q)I.
inline Channel partial_depolarizing_channel(int d, double q) {
    check_unit_interval(q, "q");
    return Channel(q * depolarizing_channel(d).rep() + (1.0 - q) * identity_channel(d).rep());
}

/// Ξ_{p,q} = (1−p−q)I + pΔ + qΩ.
inline Channel xi_channel(int d, double p, double q) {
    check_unit_interval(p, "p");
    check_unit_interval(q, "q");
    if (p + q > 1.0 + 1e-12) throw DimensionError("xi_channel: p + q > 1");
    return Channel((1.0 - p - q) * identity_channel(d).rep() + p * dephasing_channel(d).rep() +
                   q * depolarizing_channel(d).rep());
}

inline Channel unitary_channel(const CMat& u) {
    if (u.rows() != u.cols()) throw DimensionError("unitary_channel: not square");
    if (detail::max_abs(u.adjoint() * u - CMat::Identity(u.rows(), u.cols())) > 1e-10)
        throw DimensionError("unitary_channel: matrix is not unitary");
    int d = static_cast<int>(u.rows());
    return Channel(map_from_action(d, TensorShape{d}, [&u](const CMat& e) { return CMat(u * e * u.adjoint()); }));
}

/// Φ_ρ(X) = Tr(X)·ρ.
inline Channel constant_channel(int d_in, const HermitianMatrix& rho) {
    check_density(rho);
    return Channel(map_from_action(d_in, rho.shape(), [&rho](const CMat& e) { return CMat(e.trace() * rho.mat()); }));
}

/// Ξ_Π(X) = Σ Π_i X Π_i.
inline Channel pinching_channel(const Povm& pvm) {
    if (!pvm.is_projective()) throw DimensionError("pinching_channel: effects are not projections");
    int d = pvm.dim();
    return Channel(map_from_action(d, TensorShape{d}, [&pvm](const CMat& e) {
        CMat out = CMat::Zero(e.rows(), e.cols());
        for (const auto& p : pvm.effects()) out += p.mat() * e * p.mat();
        return out;
    }));
}

/// Φ_M(X) = Σ ⟨M_i, X⟩ E_ii.
inline Channel measurement_channel(const Povm& m) {
    int n = m.outcomes();
    return Channel(map_from_action(m.dim(), TensorShape{n}, [&m, n](const CMat& e) {
        CMat out = CMat::Zero(n, n);
        for (int i = 0; i < n; ++i) out(i, i) = (m[i].mat() * e).trace();
        return out;
    }));
}

/// Φ(X) = Σ ⟨M_i, X⟩ ρ_i, with Choi Σ M_iᵀ ⊗ ρ_i.
inline Channel measure_prepare_channel(const MeasurePrepare& mp) {
    const auto& first = mp.preps.front();
    int d = mp.povm.dim();
    CMat j = CMat::Zero(d * first.side(), d * first.side());
    for (int i = 0; i < mp.povm.outcomes(); ++i)
        j += detail::kron(mp.povm[i].mat().transpose(), mp.preps[static_cast<std::size_t>(i)].mat());
    return Channel(HermitianMatrix(j, TensorShape{d}.concat(first.shape())), d);
}

struct Identity {};
struct Dephasing {};
struct Depolarizing {};
struct PartialDepolarizing { double q; };
struct Xi { double p, q; };
struct Unitary { CMat u; };
struct Constant { HermitianMatrix rho; };
struct Pinching { Povm pvm; };
struct Measurement { Povm povm; };

using ChannelKind = std::variant<Identity, Dephasing, Depolarizing, PartialDepolarizing, Xi, Unitary, Constant,
                                 Pinching, Measurement>;

inline Channel standard_channel(const ChannelKind& kind, int d_in) {
    auto check_d = [d_in](int d) {
        if (d != d_in) throw DimensionError("standard_channel: parameter dimension differs from d_in");
    };
    struct Visitor {
        int d;
        std::function<void(int)> check_d;
        Channel operator()(const Identity&) const { return identity_channel(d); }
        Channel operator()(const Dephasing&) const { return dephasing_channel(d); }
        Channel operator()(const Depolarizing&) const { return depolarizing_channel(d); }
        Channel operator()(const PartialDepolarizing& k) const { return partial_depolarizing_channel(d, k.q); }
        Channel operator()(const Xi& k) const { return xi_channel(d, k.p, k.q); }
        Channel operator()(const Unitary& k) const { check_d(static_cast<int>(k.u.rows())); return unitary_channel(k.u); }
        Channel operator()(const Constant& k) const { return constant_channel(d, k.rho); }
        Channel operator()(const Pinching& k) const { check_d(k.pvm.dim()); return pinching_channel(k.pvm); }
        Channel operator()(const Measurement& k) const { check_d(k.povm.dim()); return measurement_channel(k.povm); }
    };
    return std::visit(Visitor{d_in, check_d}, kind);
}

/// Marginal of a channel whose output shape is [d1, d2]; keep = 1 traces out Y₂, keep = 2 traces out Y₁.
inline Channel channel_marginal(const Channel& phi, int keep, double tol = kChannelTol) {
    if (phi.choi().shape().size() != 3) throw DimensionError("channel_marginal: output shape must be [d1,d2]");
    if (keep != 1 && keep != 2) throw DimensionError("channel_marginal: keep must be 1 or 2");
    HermitianMatrix m = partial_trace(phi.choi(), {keep == 1 ? 2 : 1});
    return Channel(m, phi.d_in(), tol);
}

namespace detail {

// Real matrix of a Hermitian-preserving map in the orthonormal Hermitian basis.
inline RMat real_matrix_form(const LinearMapRep& f) {
    int n = f.d_in(), m = f.d_out();
    RMat t(m * m, n * n);
    for (int b = 0; b < n * n; ++b) t.col(b) = svec(qcc::apply(f, herm_basis_element(n, b)));
    return t;
}

}  // namespace detail

/// Inverse of an invertible map on the operator space; throws SingularMapError above condition number 1e12.
inline LinearMapRep invert_map(const LinearMapRep& f, double max_condition = 1e12) {
    if (f.d_in() != f.d_out()) throw DimensionError("invert_map: input and output dimensions differ");
    int n = f.d_in();
    RMat t = detail::real_matrix_form(f);
    Eigen::JacobiSVD<RMat> svd(t);
    const auto& s = svd.singularValues();
    double smin = s(s.size() - 1), smax = s(0);
    if (!(smin > 0.0) || smax / smin > max_condition)
        throw SingularMapError("invert_map: map is singular (smallest singular value " + std::to_string(smin) + ")", smin);
    RMat tinv = Eigen::FullPivLU<RMat>(t).inverse();
    std::vector<CMat> inv_basis(static_cast<std::size_t>(n * n));
    for (int b = 0; b < n * n; ++b) inv_basis[static_cast<std::size_t>(b)] = detail::smat(RVec(tinv.col(b)), n);
    return map_from_action(n, TensorShape{n}, [&](const CMat& e) {
        CMat out = CMat::Zero(n, n);
        for (int b = 0; b < n * n; ++b) {
            cplx c = (detail::herm_basis_element(n, b) * e).trace();
            if (c != cplx(0.0)) out += c * inv_basis[static_cast<std::size_t>(b)];
        }
        return out;
    });
}

}  // namespace qcc
