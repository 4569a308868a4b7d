// Choi representation, channel validation, named channels, inversion and JSON round trips.
#include <catch_amalgamated.hpp>

#include "qcc/io.hpp"
#include "qcc/random.hpp"

using namespace qcc;
using Catch::Matchers::WithinAbs;

TEST_CASE("Choi convention places the input factor first") {
    auto id = identity_channel(2);
    const CMat& j = id.choi().mat();
    CHECK(j(0, 0) == cplx(1.0));
    CHECK(j(0, 3) == cplx(1.0));
    CHECK(j(3, 0) == cplx(1.0));
    CHECK(j(1, 1) == cplx(0.0));
    CMat e01 = detail::unit(2, 0, 1);
    CHECK(detail::max_abs(qcc::apply(id.rep(), e01) - e01) == 0.0);
}

TEST_CASE("Hermitian basis is orthonormal") {
    for (int n : {1, 2, 3}) {
        for (int a = 0; a < n * n; ++a)
            for (int b = 0; b < n * n; ++b) {
                CMat ha = detail::herm_basis_element(n, a), hb = detail::herm_basis_element(n, b);
                CHECK_THAT((ha * hb).trace().real(), WithinAbs(a == b ? 1.0 : 0.0, 1e-14));
            }
        random::Rng rng(3);
        CMat g = random::ginibre(rng, n, n);
        CMat h = g + g.adjoint();
        CHECK(detail::max_abs(detail::smat(detail::svec(h), n) - h) <= 1e-13);
    }
}

TEST_CASE("random Stinespring channels validate") {
    random::Rng rng(21);
    for (int t = 0; t < 1000; ++t) {
        int din = 1 + t % 3, dout = 1 + (t / 3) % 3;
        int kraus = std::max(1 + t % 4, (din + dout - 1) / dout);
        auto c = random::channel(rng, din, dout, kraus);
        auto r = validate(c);
        CHECK(r.cp);
        CHECK(r.tp);
    }
}

TEST_CASE("channels preserve trace and the adjoint is unital") {
    random::Rng rng(22);
    for (int t = 0; t < 100; ++t) {
        auto c = random::channel(rng, 2, 3);
        auto rho = random::density(rng, 2);
        CHECK_THAT(qcc::apply(c.rep(), rho).trace(), WithinAbs(1.0, 1e-10));
        CMat u = apply_adjoint(c.rep(), CMat(CMat::Identity(3, 3)));
        CHECK(detail::max_abs(u - CMat::Identity(2, 2)) <= 1e-10);
        auto y = random::density(rng, 3);
        CHECK_THAT(inner(qcc::apply(c.rep(), rho), y), WithinAbs(inner(rho, apply_adjoint(c.rep(), y)), 1e-12));
    }
}

TEST_CASE("marginals of a channel into a product space are channels") {
    random::Rng rng(23);
    for (int t = 0; t < 100; ++t) {
        auto c = random::channel(rng, 2, 4);
        Channel phi(LinearMapRep(c.choi(), 2, TensorShape{2, 2}));
        auto m1 = channel_marginal(phi, 1), m2 = channel_marginal(phi, 2);
        CHECK(m1.d_out() == 2);
        CHECK(m2.d_out() == 2);
    }
}

TEST_CASE("composition and tensor products") {
    random::Rng rng(24);
    auto f = random::channel(rng, 2, 3), g = random::channel(rng, 3, 2);
    auto x = random::density(rng, 2);
    CHECK(detail::max_abs(qcc::apply(compose(g, f), x.mat()) - qcc::apply(g.rep(), qcc::apply(f.rep(), x.mat()))) <= 1e-12);
    auto y = random::density(rng, 3);
    auto fg = tensor(f, g);
    CHECK(fg.d_in() == 6);
    CHECK(fg.out_shape() == TensorShape{3, 2});
    CMat lhs = qcc::apply(fg, detail::kron(x.mat(), y.mat()));
    CMat rhs = detail::kron(qcc::apply(f.rep(), x.mat()), qcc::apply(g.rep(), y.mat()));
    CHECK(detail::max_abs(lhs - rhs) <= 1e-12);
    CHECK(validate(fg).cp);
}

TEST_CASE("named channels") {
    SECTION("dephasing kills off-diagonals") {
        CMat x = CMat::Constant(2, 2, cplx(1.0));
        CHECK(detail::max_abs(qcc::apply(dephasing_channel(2).rep(), x) - CMat::Identity(2, 2)) == 0.0);
    }
    SECTION("depolarizing maps to the maximally mixed state") {
        CMat x = CMat::Identity(3, 3) / 3.0;
        x(0, 2) = 0.1;
        x(2, 0) = 0.1;
        CHECK(detail::max_abs(qcc::apply(depolarizing_channel(3).rep(), x) - CMat::Identity(3, 3) / 3.0) <= 1e-15);
    }
    SECTION("Xi interpolates") {
        CHECK(max_abs_diff(xi_channel(2, 0.0, 0.0).choi(), identity_channel(2).choi()) == 0.0);
        CHECK(max_abs_diff(xi_channel(2, 1.0, 0.0).choi(), dephasing_channel(2).choi()) <= 1e-15);
        CHECK(max_abs_diff(xi_channel(2, 0.0, 0.4).choi(), partial_depolarizing_channel(2, 0.4).choi()) <= 1e-15);
        CHECK_THROWS_AS(xi_channel(2, 0.7, 0.7), DimensionError);
    }
    SECTION("unitary channels are unital") {
        random::Rng rng(25);
        auto u = unitary_channel(random::unitary(rng, 3));
        CHECK(validate(u).unital);
    }
    SECTION("standard_channel dispatch") {
        CHECK(max_abs_diff(standard_channel(Depolarizing{}, 2).choi(), depolarizing_channel(2).choi()) == 0.0);
        CHECK_THROWS_AS(standard_channel(Unitary{CMat::Identity(3, 3)}, 2), DimensionError);
    }
}

TEST_CASE("entanglement-breaking flag on qubits") {
    random::Rng rng(26);
    for (int t = 0; t < 100; ++t) {
        auto m = random::povm(rng, 2, 2 + t % 3);
        std::vector<HermitianMatrix> preps;
        for (int i = 0; i < m.outcomes(); ++i) preps.push_back(random::density(rng, 2));
        auto c = measure_prepare_channel(MeasurePrepare(m, preps));
        auto r = validate(c);
        REQUIRE(r.eb_2x2.has_value());
        CHECK(*r.eb_2x2);
    }
    CHECK_FALSE(*validate(identity_channel(2)).eb_2x2);
    CHECK_FALSE(validate(identity_channel(3)).eb_2x2.has_value());
}

TEST_CASE("non-channels are rejected") {
    CMat j = identity_channel(2).choi().mat();
    CHECK_THROWS_AS(Channel(HermitianMatrix(CMat(2.0 * j), TensorShape{2, 2}), 2), DimensionError);
    CHECK_THROWS_AS(Channel(partial_transpose(identity_channel(2).choi(), 0), 2), DimensionError);
}

TEST_CASE("map inversion") {
    random::Rng rng(27);
    for (int t = 0; t < 100; ++t) {
        auto c = random::invertible_channel(rng, 2);
        auto inv = invert_map(c);
        auto back = invert_map(inv);
        CHECK(max_abs_diff(back.choi(), c.choi()) <= 1e-7);
        CHECK(max_abs_diff(compose(inv, c).choi(), identity_channel(2).choi()) <= 1e-8);
    }
    CHECK_THROWS_AS(invert_map(dephasing_channel(2)), SingularMapError);
}

TEST_CASE("JSON channel round trip and rejection of bad input") {
    random::Rng rng(28);
    auto c = random::channel(rng, 2, 4);
    LinearMapRep withf(c.choi(), 2, TensorShape{2, 2});
    auto j = io::encode_channel(withf);
    auto back = io::decode_channel(io::json::parse(j.dump()));
    CHECK(back.out_shape() == TensorShape{2, 2});
    CHECK(max_abs_diff(back.choi(), withf.choi()) == 0.0);

    auto bad = j;
    bad["choi"][0][1][1] = 0.5;
    CHECK_THROWS_AS(io::decode_channel(bad), io::ParseError);
    auto wrong = j;
    wrong["d_out"] = 3;
    CHECK_THROWS_AS(io::decode_channel(wrong), io::ParseError);
    CHECK_THROWS_AS(io::decode_channel(io::json{{"d_in", 2}}), io::ParseError);
}
