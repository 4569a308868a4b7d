// linalg.hpp - dense complex linear algebra over tensor-product spaces
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qcc {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered list of tensor factor dimensions. Factor 0 is the leftmost.
struct TensorShape {
    std::vector<int> factors;

    TensorShape() : factors{1} {}
    TensorShape(std::initializer_list<int> f) : factors(f) { check(); }
    explicit TensorShape(std::vector<int> f) : factors(std::move(f)) { check(); }

    int side() const {
        return std::accumulate(factors.begin(), factors.end(), 1, std::multiplies<int>());
    }
    int size() const { return static_cast<int>(factors.size()); }
    int operator[](int k) const { return factors.at(static_cast<std::size_t>(k)); }

    TensorShape concat(const TensorShape& other) const {
        std::vector<int> f = factors;
        f.insert(f.end(), other.factors.begin(), other.factors.end());
        return TensorShape(std::move(f));
    }

    bool operator==(const TensorShape&) const = default;

    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(factors[i]);
        }
        return s + "]";
    }

private:
    void check() const {
        if (factors.empty()) throw DimensionError("TensorShape: empty factor list");
        for (int f : factors)
            if (f <= 0) throw DimensionError("TensorShape: non-positive factor");
    }
};

namespace detail {

inline double max_abs(const CMat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Row-major strides of a multi-index over `dims`.
inline std::vector<int> strides(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k) + 1] * dims[static_cast<std::size_t>(k) + 1];
    return s;
}

inline std::vector<int> unravel(int idx, const std::vector<int>& dims) {
    std::vector<int> digits(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        auto uk = static_cast<std::size_t>(k);
        digits[uk] = idx % dims[uk];
        idx /= dims[uk];
    }
    return digits;
}

// full[r][t]: flat index of kept multi-index r combined with traced multi-index t.
inline std::vector<std::vector<int>> split_table(const std::vector<int>& dims,
                                                 const std::vector<bool>& traced) {
    std::vector<int> kept_dims, traced_dims;
    for (std::size_t k = 0; k < dims.size(); ++k)
        (traced[k] ? traced_dims : kept_dims).push_back(dims[k]);
    int nk = std::accumulate(kept_dims.begin(), kept_dims.end(), 1, std::multiplies<int>());
    int nt = std::accumulate(traced_dims.begin(), traced_dims.end(), 1, std::multiplies<int>());
    auto st = strides(dims);
    std::vector<std::vector<int>> table(static_cast<std::size_t>(nk), std::vector<int>(static_cast<std::size_t>(nt)));
    for (int r = 0; r < nk; ++r) {
        auto rd = unravel(r, kept_dims);
        for (int t = 0; t < nt; ++t) {
            auto td = unravel(t, traced_dims);
            int flat = 0;
            std::size_t ir = 0, it = 0;
            for (std::size_t k = 0; k < dims.size(); ++k)
                flat += st[k] * (traced[k] ? td[it++] : rd[ir++]);
            table[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)] = flat;
        }
    }
    return table;
}

inline std::vector<bool> mask(const std::vector<int>& dims, const std::vector<int>& which) {
    std::vector<bool> m(dims.size(), false);
    for (int w : which) {
        if (w < 0 || w >= static_cast<int>(dims.size())) throw DimensionError("factor index out of range");
        m[static_cast<std::size_t>(w)] = true;
    }
    return m;
}

inline CMat partial_trace(const CMat& m, const std::vector<int>& dims, const std::vector<int>& traced) {
    auto table = split_table(dims, mask(dims, traced));
    auto nk = static_cast<Eigen::Index>(table.size());
    auto nt = table.front().size();
    CMat out = CMat::Zero(nk, nk);
    for (Eigen::Index a = 0; a < nk; ++a)
        for (Eigen::Index b = 0; b < nk; ++b) {
            cplx s = 0.0;
            const auto& ra = table[static_cast<std::size_t>(a)];
            const auto& rb = table[static_cast<std::size_t>(b)];
            for (std::size_t t = 0; t < nt; ++t) s += m(ra[t], rb[t]);
            out(a, b) = s;
        }
    return out;
}

// Adjoint of partial_trace: places z on the kept factors and identity on the traced ones.
inline CMat partial_trace_adjoint(const CMat& z, const std::vector<int>& dims, const std::vector<int>& traced) {
    auto table = split_table(dims, mask(dims, traced));
    int n = std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
    if (z.rows() != static_cast<Eigen::Index>(table.size())) throw DimensionError("partial_trace_adjoint: size mismatch");
    CMat out = CMat::Zero(n, n);
    auto nt = table.front().size();
    for (Eigen::Index a = 0; a < z.rows(); ++a)
        for (Eigen::Index b = 0; b < z.cols(); ++b) {
            const auto& ra = table[static_cast<std::size_t>(a)];
            const auto& rb = table[static_cast<std::size_t>(b)];
            for (std::size_t t = 0; t < nt; ++t) out(ra[t], rb[t]) = z(a, b);
        }
    return out;
}

inline CMat partial_transpose(const CMat& m, const std::vector<int>& dims, int factor) {
    auto table = split_table(dims, mask(dims, {factor}));
    CMat out(m.rows(), m.cols());
    auto nk = table.size();
    int df = dims[static_cast<std::size_t>(factor)];
    for (std::size_t r1 = 0; r1 < nk; ++r1)
        for (std::size_t r2 = 0; r2 < nk; ++r2)
            for (int i = 0; i < df; ++i)
                for (int j = 0; j < df; ++j)
                    out(table[r1][static_cast<std::size_t>(i)], table[r2][static_cast<std::size_t>(j)]) =
                        m(table[r1][static_cast<std::size_t>(j)], table[r2][static_cast<std::size_t>(i)]);
    return out;
}

// Reorders tensor factors: output factor k is input factor perm[k].
inline CMat permute_factors(const CMat& m, const std::vector<int>& dims, const std::vector<int>& perm) {
    if (perm.size() != dims.size()) throw DimensionError("permute_factors: bad permutation");
    std::vector<int> new_dims(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) new_dims[k] = dims[static_cast<std::size_t>(perm[k])];
    auto old_st = strides(dims);
    int n = static_cast<int>(m.rows());
    std::vector<int> map(static_cast<std::size_t>(n));
    for (int idx = 0; idx < n; ++idx) {
        auto d = unravel(idx, new_dims);
        int flat = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) flat += old_st[static_cast<std::size_t>(perm[k])] * d[k];
        map[static_cast<std::size_t>(idx)] = flat;
    }
    CMat out(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out(a, b) = m(map[static_cast<std::size_t>(a)], map[static_cast<std::size_t>(b)]);
    return out;
}

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline CMat unit(int n, int i, int j) {
    CMat e = CMat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

}  // namespace detail

/// Dense Hermitian matrix with an attached tensor shape.
class HermitianMatrix {
public:
    HermitianMatrix() : m_(CMat::Zero(1, 1)) {}

    HermitianMatrix(const CMat& m, TensorShape shape) : m_(m), shape_(std::move(shape)) {
        if (m.rows() != m.cols()) throw DimensionError("HermitianMatrix: not square");
        if (m.rows() != shape_.side())
            throw DimensionError("HermitianMatrix: side " + std::to_string(m.rows()) + " does not match shape " + shape_.str());
        double dev = detail::max_abs(m - m.adjoint());
        if (dev > kHermTol * std::max(1.0, detail::max_abs(m)))
            throw DimensionError("HermitianMatrix: not Hermitian (deviation " + std::to_string(dev) + ")");
        m_ = 0.5 * (m + m.adjoint());
    }

    explicit HermitianMatrix(const CMat& m) : HermitianMatrix(m, TensorShape{static_cast<int>(m.rows())}) {}

    static HermitianMatrix identity(const TensorShape& s) {
        return HermitianMatrix(CMat::Identity(s.side(), s.side()), s);
    }
    static HermitianMatrix zero(const TensorShape& s) {
        return HermitianMatrix(CMat::Zero(s.side(), s.side()), s);
    }

    const CMat& mat() const { return m_; }
    const TensorShape& shape() const { return shape_; }
    int side() const { return static_cast<int>(m_.rows()); }
    cplx operator()(int i, int j) const { return m_(i, j); }

    double trace() const { return m_.trace().real(); }

    HermitianMatrix reshaped(const TensorShape& s) const { return HermitianMatrix(m_, s); }

    HermitianMatrix operator+(const HermitianMatrix& o) const {
        same_side(o);
        return HermitianMatrix(m_ + o.m_, shape_);
    }
    HermitianMatrix operator-(const HermitianMatrix& o) const {
        same_side(o);
        return HermitianMatrix(m_ - o.m_, shape_);
    }
    HermitianMatrix operator*(double s) const { return HermitianMatrix(m_ * s, shape_); }
    friend HermitianMatrix operator*(double s, const HermitianMatrix& h) { return h * s; }
    HermitianMatrix operator-() const { return HermitianMatrix(-m_, shape_); }

    static constexpr double kHermTol = 1e-12;

private:
    void same_side(const HermitianMatrix& o) const {
        if (o.side() != side()) throw DimensionError("HermitianMatrix: side mismatch");
    }

    CMat m_;
    TensorShape shape_;
};

/// Hilbert-Schmidt inner product Re Tr(A B) of Hermitian matrices.
inline double inner(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.side() != b.side()) throw DimensionError("inner: side mismatch");
    return (a.mat().cwiseProduct(b.mat().conjugate())).sum().real();
}

inline double max_abs_diff(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.side() != b.side()) throw DimensionError("max_abs_diff: side mismatch");
    return detail::max_abs(a.mat() - b.mat());
}

inline HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(detail::kron(a.mat(), b.mat()), a.shape().concat(b.shape()));
}

inline HermitianMatrix partial_trace(const HermitianMatrix& m, const std::vector<int>& traced) {
    const auto& dims = m.shape().factors;
    std::vector<int> kept;
    auto msk = detail::mask(dims, traced);
    for (std::size_t k = 0; k < dims.size(); ++k)
        if (!msk[k]) kept.push_back(dims[k]);
    if (kept.empty()) kept.push_back(1);
    return HermitianMatrix(detail::partial_trace(m.mat(), dims, traced), TensorShape(kept));
}

/// Adjoint of partial_trace: inserts identities at the traced positions of `full`.
inline HermitianMatrix partial_trace_adjoint(const HermitianMatrix& z, const TensorShape& full,
                                             const std::vector<int>& traced) {
    return HermitianMatrix(detail::partial_trace_adjoint(z.mat(), full.factors, traced), full);
}

inline HermitianMatrix partial_transpose(const HermitianMatrix& m, int factor) {
    return HermitianMatrix(detail::partial_transpose(m.mat(), m.shape().factors, factor), m.shape());
}

inline HermitianMatrix permute_factors(const HermitianMatrix& m, const std::vector<int>& perm) {
    std::vector<int> nd(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) nd[k] = m.shape()[perm[k]];
    return HermitianMatrix(detail::permute_factors(m.mat(), m.shape().factors, perm), TensorShape(nd));
}

struct EigenDecomposition {
    RVec values;   // ascending
    CMat vectors;  // unitary, columns are eigenvectors
};

inline EigenDecomposition hermitian_eig(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    if (es.info() != Eigen::Success) throw NumericalError("hermitian_eig: no convergence");
    return {es.eigenvalues(), es.eigenvectors()};
}

inline EigenDecomposition hermitian_eig(const HermitianMatrix& m) { return hermitian_eig(m.mat()); }

inline double min_eigenvalue(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("min_eigenvalue: no convergence");
    return es.eigenvalues()(0);
}

inline double min_eigenvalue(const HermitianMatrix& m) { return min_eigenvalue(m.mat()); }

/// Relative cutoff for pseudo-inverses and support projectors.
inline constexpr double kRankCutoff = 1e-10;

namespace detail {

template <class F>
CMat spectral_apply(const HermitianMatrix& m, F f) {
    auto e = hermitian_eig(m);
    double lmax = std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
    double cut = kRankCutoff * lmax;
    RVec fv(e.values.size());
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = e.values(i) > cut ? f(e.values(i)) : 0.0;
    return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

}  // namespace detail

/// M^{-1/2} on the support of M, zero elsewhere. Eigenvalues below 1e-10·λ_max count as zero.
inline HermitianMatrix pinv_sqrt(const HermitianMatrix& m) {
    return HermitianMatrix(detail::spectral_apply(m, [](double x) { return 1.0 / std::sqrt(x); }), m.shape());
}

inline HermitianMatrix psd_sqrt(const HermitianMatrix& m) {
    return HermitianMatrix(detail::spectral_apply(m, [](double x) { return std::sqrt(x); }), m.shape());
}

inline HermitianMatrix support_projector(const HermitianMatrix& m) {
    return HermitianMatrix(detail::spectral_apply(m, [](double) { return 1.0; }), m.shape());
}

/// Swap operator W on C^d ⊗ C^d: W(e_i ⊗ e_j) = e_j ⊗ e_i.
inline HermitianMatrix swap_operator(int d) {
    if (d < 1) throw DimensionError("swap_operator: d < 1");
    CMat w = CMat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) w(j * d + i, i * d + j) = 1.0;
    return HermitianMatrix(w, TensorShape{d, d});
}

struct AbsorptionCheck {
    bool holds;
    double residual;
    HermitianMatrix projector;
};

/// For PSD A on X⊗Y (shape [dX, dY...]), checks A = (Π⊗I)A(Π⊗I) with Π the support projector of Tr_Y A.
inline AbsorptionCheck support_projection_absorbs(const HermitianMatrix& a, double tol = 1e-9) {
    if (a.shape().size() < 2) throw DimensionError("support_projection_absorbs: need at least two factors");
    std::vector<int> rest;
    for (int k = 1; k < a.shape().size(); ++k) rest.push_back(k);
    HermitianMatrix pi = support_projector(partial_trace(a, rest));
    int dy = a.side() / pi.side();
    CMat p = detail::kron(pi.mat(), CMat::Identity(dy, dy));
    double res = detail::max_abs(p * a.mat() * p - a.mat());
    return {res <= tol * std::max(1.0, detail::max_abs(a.mat())), res, pi};
}

}  // namespace qcc
