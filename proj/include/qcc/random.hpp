// random.hpp - seeded sampling of unitaries, states, measurements and channels
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>

#include "qcc/channels.hpp"

namespace qcc::random {

using Rng = std::mt19937_64;

inline CMat ginibre(Rng& rng, int rows, int cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMat g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = cplx(n(rng), n(rng));
    return g;
}

/// Haar-random unitary via QR with phase correction.
inline CMat unitary(Rng& rng, int d) {
    Eigen::HouseholderQR<CMat> qr(ginibre(rng, d, d));
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        cplx ph = r(j, j) / std::abs(r(j, j));
        q.col(j) *= ph;
    }
    return q;
}

/// Induced-measure density matrix of the given rank.
inline HermitianMatrix density(Rng& rng, int d, int rank = -1) {
    if (rank < 0) rank = d;
    CMat g = ginibre(rng, d, rank);
    CMat r = g * g.adjoint();
    r /= r.trace().real();
    return HermitianMatrix(r, TensorShape{d});
}

inline Povm povm(Rng& rng, int d, int outcomes) {
    std::vector<CMat> gs;
    CMat s = CMat::Zero(d, d);
    for (int i = 0; i < outcomes; ++i) {
        CMat g = ginibre(rng, d, d);
        gs.push_back(g.adjoint() * g);
        s += gs.back();
    }
    CMat t = pinv_sqrt(HermitianMatrix(s)).mat();
    std::vector<HermitianMatrix> effects;
    for (const auto& g : gs) effects.emplace_back(t * g * t, TensorShape{d});
    return Povm(effects);
}

/// Rank-one projective measurement in a Haar-random basis, grouped into the given number of outcomes.
inline Povm pvm(Rng& rng, int d, int outcomes = -1) {
    if (outcomes < 0) outcomes = d;
    if (outcomes < 1 || outcomes > d) throw DimensionError("random::pvm: outcome count out of range");
    CMat u = unitary(rng, d);
    std::vector<CMat> p(static_cast<std::size_t>(outcomes), CMat::Zero(d, d));
    for (int k = 0; k < d; ++k) p[static_cast<std::size_t>(k % outcomes)] += u.col(k) * u.col(k).adjoint();
    std::vector<HermitianMatrix> effects;
    for (const auto& e : p) effects.emplace_back(e, TensorShape{d});
    return Povm(effects);
}

/// Channel from a random Stinespring isometry with the given number of Kraus operators.
inline Channel channel(Rng& rng, int d_in, int d_out, int kraus = -1) {
    if (kraus < 0) kraus = d_in * d_out;
    if (d_out * kraus < d_in) throw DimensionError("random::channel: too few Kraus operators for an isometry");
    CMat u = unitary(rng, d_out * kraus);
    CMat v = u.leftCols(d_in);
    return Channel(map_from_action(d_in, TensorShape{d_out}, [&](const CMat& e) {
        CMat full = v * e * v.adjoint();
        return detail::partial_trace(full, {d_out, kraus}, {1});
    }));
}

/// Random channel whose Choi-to-map inverse exists with condition number below the given bound.
inline Channel invertible_channel(Rng& rng, int d, double max_condition = 1e6) {
    std::uniform_int_distribution<int> kr(1, d * d);
    for (;;) {
        Channel c = channel(rng, d, d, kr(rng));
        try {
            (void)invert_map(c, max_condition);
            return c;
        } catch (const SingularMapError&) {
        }
    }
}

}  // namespace qcc::random
