// Certificate verification: adjoint maps, the no-broadcasting witness, soundness and serialization.
#include <catch_amalgamated.hpp>

#include "qcc/fixtures.hpp"
#include "qcc/io.hpp"
#include "qcc/random.hpp"
#include "qcc/sdp.hpp"

using namespace qcc;
using Catch::Matchers::WithinAbs;

namespace {

HermitianMatrix random_hermitian(random::Rng& rng, const TensorShape& shape) {
    int n = 1;
    for (int f : shape.factors) n *= f;
    CMat g = random::ginibre(rng, n, n);
    return HermitianMatrix(CMat(g + g.adjoint()), shape);
}

double pairing_at(const Witness& w, int d, double p) {
    auto om = partial_depolarizing_channel(d, p);
    return witness_pairing(w, om.choi(), om.choi());
}

// Valid A = A_JP + a random element of the marginal nullspace.
HermitianMatrix random_valid_operator(random::Rng& rng, int d) {
    const int n = d * d * d;
    CMat g = random::ginibre(rng, n, n);
    CMat h = g + g.adjoint();
    std::vector<int> dims{d, d, d};
    CMat m1 = detail::partial_trace(h, dims, {1}), m2 = detail::partial_trace(h, dims, {2});
    CMat m12 = detail::partial_trace(h, dims, {1, 2});
    CMat proj = h - detail::partial_trace_adjoint(m1, dims, {1}) / double(d) -
                detail::partial_trace_adjoint(m2, dims, {2}) / double(d) +
                detail::partial_trace_adjoint(m12, dims, {1, 2}) / double(d * d);
    return HermitianMatrix(CMat(a_jp(d).matrix().mat() + 0.3 * proj), TensorShape{d, d, d});
}

Witness scaled(const Witness& w, double c) {
    Witness out{c * w.z1, c * w.z2, w.mode, std::nullopt};
    if (w.r) out.r = c * *w.r;
    return out;
}

}  // namespace

TEST_CASE("partial trace adjoint is the Hilbert-Schmidt adjoint") {
    random::Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const int dx = 2 + t % 2, d1 = 2, d2 = 2 + (t / 2) % 2;
        std::vector<int> dims{dx, d1, d2};
        auto x = random_hermitian(rng, TensorShape{dx, d1, d2});
        auto z1 = random_hermitian(rng, TensorShape{dx, d1});
        auto z2 = random_hermitian(rng, TensorShape{dx, d2});
        double lhs1 = (z1.mat() * detail::partial_trace(x.mat(), dims, {2})).trace().real();
        double rhs1 = (detail::partial_trace_adjoint(z1.mat(), dims, {2}) * x.mat()).trace().real();
        CHECK_THAT(lhs1, WithinAbs(rhs1, 1e-12 * (1.0 + std::abs(lhs1))));
        double lhs2 = (z2.mat() * detail::partial_trace(x.mat(), dims, {1})).trace().real();
        double rhs2 = (detail::partial_trace_adjoint(z2.mat(), dims, {1}) * x.mat()).trace().real();
        CHECK_THAT(lhs2, WithinAbs(rhs2, 1e-12 * (1.0 + std::abs(lhs2))));
        // adjoint_sum is the adjoint of X ↦ (Tr_{Y₂}X, Tr_{Y₁}X).
        double total = inner(adjoint_sum(z1, z2, dx, d1, d2), x);
        CHECK_THAT(total, WithinAbs(lhs1 + lhs2, 1e-11 * (1.0 + std::abs(total))));
    }
}

TEST_CASE("no-broadcasting witness pairings on a qubit") {
    auto w = no_broadcast_witness(2);
    CHECK_THAT(pairing_at(w, 2, 0.0), WithinAbs(-4.0 / 3.0, 1e-12));
    CHECK_THAT(pairing_at(w, 2, 1.0 / 3.0), WithinAbs(0.0, 1e-12));
    auto id = identity_channel(2);
    auto c = verify_witness(w, id, id);
    CHECK(c.valid);
    CHECK_THAT(c.margin, WithinAbs(-4.0 / 3.0, 1e-12));
    CHECK(c.min_eigenvalue >= -1e-12);
}

TEST_CASE("no-broadcasting threshold is sharp") {
    for (int d : {2, 3, 4}) {
        auto w = no_broadcast_witness(d);
        // The pairing is affine in p; locate its zero from two evaluations.
        double f0 = pairing_at(w, d, 0.0), f1 = pairing_at(w, d, 1.0);
        double root = -f0 / (f1 - f0);
        INFO("d = " << d);
        CHECK_THAT(root, WithinAbs(d / (2.0 * (d + 1)), 1e-12));
        CHECK(f0 < 0.0);
        CHECK(min_eigenvalue(adjoint_sum(w.z1, w.z2, d, d, d)) >= -1e-12);
        double below = d / (2.0 * (d + 1)) - 0.01, above = d / (2.0 * (d + 1)) + 0.01;
        auto ob = partial_depolarizing_channel(d, below), oa = partial_depolarizing_channel(d, above);
        CHECK(verify_witness(w, ob, ob).valid);
        CHECK_FALSE(verify_witness(w, oa, oa).valid);
    }
}

TEST_CASE("zero and sign-flipped witnesses are rejected") {
    auto id = identity_channel(2);
    HermitianMatrix zero(CMat::Zero(4, 4), TensorShape{2, 2});
    CHECK_FALSE(verify_witness(Witness{zero, zero, WitnessMode::plain, std::nullopt}, id, id).valid);
    auto w = no_broadcast_witness(2);
    auto flipped = scaled(w, -1.0);
    auto c = verify_witness(flipped, id, id);
    CHECK_FALSE(c.valid);
    CHECK(c.min_eigenvalue < 0.0);
}

TEST_CASE("witness validity is invariant under positive scaling") {
    auto id = identity_channel(2);
    auto w = no_broadcast_witness(2);
    auto base = verify_witness(w, id, id);
    REQUIRE(base.valid);
    for (double c : {1e-3, 0.5, 2.0, 1e3}) {
        auto s = verify_witness(scaled(w, c), id, id);
        CHECK(s.valid);
        CHECK_THAT(s.margin, WithinAbs(c * base.margin, 1e-12 * std::max(1.0, c)));
    }
    auto ce = fixtures::counterexample_witness();
    Channel f(fixtures::counterexample_choi1(), 2), g(fixtures::counterexample_choi2(), 2);
    auto cb = verify_witness(ce, f, g);
    REQUIRE(cb.valid);
    auto cs = verify_witness(scaled(ce, 3.0), f, g);
    CHECK(cs.valid);
    CHECK_THAT(cs.margin, WithinAbs(3.0 * cb.margin, 1e-12));
}

TEST_CASE("qubit counterexample witness verifies only in ppt mode") {
    auto w = fixtures::counterexample_witness();
    Channel f(fixtures::counterexample_choi1(), 2), g(fixtures::counterexample_choi2(), 2);
    auto c = verify_witness(w, f, g);
    CHECK(c.valid);
    CHECK_THAT(c.margin, WithinAbs(-0.5, 1e-12));
    CHECK(c.min_eigenvalue >= -1e-12);
    Witness plain = w;
    plain.mode = WitnessMode::plain;
    CHECK_FALSE(verify_witness(plain, f, g).valid);
    // The pair is compatible, so no plain witness can exist.
    CHECK(sdp::solve(sdp::build_compat(f, g)).status == sdp::Status::Feasible);
}

TEST_CASE("verified witnesses are sound against the primal problem", "[property]") {
    random::Rng rng(21);
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        Channel f = t % 3 == 0 ? partial_depolarizing_channel(2, 0.3 * (t % 5) / 4.0) : random::channel(rng, 2, 2, 1 + t % 2);
        Channel g = random::channel(rng, 2, 2, 1 + (t / 2) % 3);
        const bool ppt = t % 4 == 1;
        auto o = sdp::solve(sdp::build_compat(f, g, ppt));
        if (!o.witness) continue;
        auto c = verify_witness(*o.witness, f, g);
        if (!c.valid) continue;
        ++checked;
        CHECK(o.status == sdp::Status::Infeasible);
        // An independent primal solve cannot succeed either; alternating projections are slow, so sample.
        if (checked <= 5)
            CHECK(sdp::solve(sdp::build_compat(f, g, ppt), sdp::SolveMode::projection).status != sdp::Status::Feasible);
    }
    CHECK(checked > 20);
}

TEST_CASE("solver witnesses satisfy the pairing identity with generalized Jordan products", "[property]") {
    random::Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        auto f = random::channel(rng, 2, 2), g = random::channel(rng, 2, 2);
        auto z1 = random_hermitian(rng, TensorShape{2, 2}), z2 = random_hermitian(rng, TensorShape{2, 2});
        GenJordanOperator a(random_valid_operator(rng, 2));
        auto prod = gen_jordan(f, g, a);
        double lhs = inner(z1, f.choi()) + inner(z2, g.choi());
        double rhs = inner(prod.choi(), adjoint_sum(z1, z2, 2, 2, 2));
        CHECK_THAT(lhs, WithinAbs(rhs, 1e-8));
    }
    // Also on a dual-feasible witness from the solver.
    auto id = identity_channel(2);
    auto o = sdp::solve(sdp::build_compat(id, id));
    REQUIRE(o.witness);
    GenJordanOperator a(random_valid_operator(rng, 2));
    double lhs = witness_pairing(*o.witness, id.choi(), id.choi());
    double rhs = inner(gen_jordan(id, id, a).choi(), adjoint_sum(o.witness->z1, o.witness->z2, 2, 2, 2));
    CHECK_THAT(lhs, WithinAbs(rhs, 1e-8));
}

TEST_CASE("Jordan certificates verify and reject tampering") {
    auto id = identity_channel(2);
    auto o = sdp::solve(sdp::build_jordan_compat(id, id));
    REQUIRE(o.status == sdp::Status::Infeasible);
    REQUIRE(o.jordan_witness);
    auto c = verify_jordan_witness(*o.jordan_witness, id, id);
    CHECK(c.valid);
    CHECK(c.margin < 0.0);
    JordanWitness bad = *o.jordan_witness;
    bad.w1 = bad.w1 + HermitianMatrix(CMat(0.1 * CMat::Identity(4, 4)), bad.w1.shape());
    CHECK_FALSE(verify_jordan_witness(bad, id, id).valid);
    CHECK_THROWS_AS(verify_jordan_witness(*o.jordan_witness, id, identity_channel(3)), DimensionError);
}

TEST_CASE("extension witnesses for the identity channel") {
    auto d = sdp::decide_self_compat(identity_channel(2), 3);
    REQUIRE(d.verdict == sdp::Verdict::Incompatible);
    auto c = verify_extension_witness(d.outcome.dual, identity_channel(2));
    CHECK(c.valid);
    // The same certificate cannot refute the completely depolarizing channel.
    CHECK_FALSE(verify_extension_witness(d.outcome.dual, depolarizing_channel(2)).valid);
}

TEST_CASE("certificates survive a JSON round trip") {
    auto id = identity_channel(2);
    auto o = sdp::solve(sdp::build_compat(id, id));
    REQUIRE(o.witness);
    auto j = io::encode_witness(*o.witness, 2, o.certificate.margin);
    auto back = io::decode_certificate(nlohmann::json::parse(j.dump()));
    REQUIRE(back.witness);
    auto c1 = verify_witness(*o.witness, id, id), c2 = verify_witness(*back.witness, id, id);
    CHECK(c2.valid);
    CHECK_THAT(c2.margin, WithinAbs(c1.margin, 1e-12));

    auto ce = fixtures::counterexample_witness();
    Channel f(fixtures::counterexample_choi1(), 2), g(fixtures::counterexample_choi2(), 2);
    auto jc = io::decode_certificate(nlohmann::json::parse(io::encode_witness(ce, 2, -0.5).dump()));
    REQUIRE(jc.witness);
    CHECK(jc.witness->mode == WitnessMode::ppt);
    CHECK(verify_witness(*jc.witness, f, g).valid);

    auto oj = sdp::solve(sdp::build_jordan_compat(id, id));
    REQUIRE(oj.jordan_witness);
    auto jj = io::decode_certificate(nlohmann::json::parse(io::encode_jordan_witness(*oj.jordan_witness, 2, 0.0).dump()));
    REQUIRE(jj.jordan);
    CHECK(verify_jordan_witness(*jj.jordan, id, id).valid);

    CHECK_THROWS_AS(io::decode_certificate(nlohmann::json{{"mode", "other"}, {"dims", {{"x", 2}}}}), io::ParseError);
    CHECK_THROWS_AS(io::decode_certificate(nlohmann::json{{"mode", "plain"}}), io::ParseError);
}

TEST_CASE("witness dimension checks") {
    auto w = no_broadcast_witness(2);
    auto id3 = identity_channel(3);
    CHECK_THROWS_AS(verify_witness(w, id3, id3), DimensionError);
    Witness misplaced = w;
    misplaced.r = HermitianMatrix(CMat::Zero(8, 8), TensorShape{2, 2, 2});
    auto id = identity_channel(2);
    CHECK_THROWS_AS(verify_witness(misplaced, id, id), DimensionError);
}
