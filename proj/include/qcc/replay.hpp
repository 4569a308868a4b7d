// replay.hpp - replays the published worked examples against the library
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qcc/analytic.hpp"
#include "qcc/fixtures.hpp"
#include "qcc/io.hpp"
#include "qcc/sdp.hpp"

namespace qcc::replay {

struct Item {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Counterexample pair, its compatibilizer and the PPT witness.
struct FixtureSet {
    HermitianMatrix choi1;
    HermitianMatrix choi2;
    HermitianMatrix compatibilizer;
    Witness witness;
};

inline FixtureSet embedded_fixtures() {
    return {fixtures::counterexample_choi1(), fixtures::counterexample_choi2(),
            fixtures::counterexample_compatibilizer(), fixtures::counterexample_witness()};
}

inline FixtureSet load_fixtures(const std::string& dir) {
    auto c = io::read_certificate(dir + "/counterexample_witness.json");
    if (!c.witness) throw io::ParseError("counterexample_witness.json: expected a plain or ppt witness");
    return {io::decode_map(io::read_json_file(dir + "/counterexample_phi1.json")).choi(),
            io::decode_map(io::read_json_file(dir + "/counterexample_phi2.json")).choi(),
            io::decode_map(io::read_json_file(dir + "/counterexample_compatibilizer.json")).choi().reshaped(TensorShape{2, 2, 2}),
            *c.witness};
}

namespace detail {

inline std::string num(double x) {
    std::ostringstream s;
    s << std::setprecision(10) << x;
    return s.str();
}

template <class Fn>
Item run_item(std::string name, Fn fn) {
    Item it{std::move(name), false, {}};
    try {
        it.pass = fn(it.detail);
    } catch (const std::exception& e) {
        it.detail = std::string("error: ") + e.what();
    }
    return it;
}

}  // namespace detail

inline std::vector<Item> counterexample_items(const FixtureSet& fx) {
    using detail::num;
    std::vector<Item> out;
    const CMat& j = fx.compatibilizer.mat();
    out.push_back(detail::run_item("counterexample Choi matrices and partial transposes are PSD", [&](std::string& d) {
        double m = std::min({min_eigenvalue(fx.choi1), min_eigenvalue(fx.choi2),
                             min_eigenvalue(partial_transpose(fx.choi1, 0)), min_eigenvalue(partial_transpose(fx.choi2, 0))});
        d = "min eigenvalue " + num(m);
        return m >= -1e-12;
    }));
    out.push_back(detail::run_item("counterexample compatibilizer reproduces both marginals", [&](std::string& d) {
        double r1 = qcc::detail::max_abs(qcc::detail::partial_trace(j, {2, 2, 2}, {2}) - fx.choi1.mat());
        double r2 = qcc::detail::max_abs(qcc::detail::partial_trace(j, {2, 2, 2}, {1}) - fx.choi2.mat());
        d = "residuals " + num(r1) + ", " + num(r2);
        return r1 == 0.0 && r2 == 0.0;
    }));
    out.push_back(detail::run_item("counterexample compatibilizer spectrum: four values, multiplicity 2", [&](std::string& d) {
        RVec ev = hermitian_eig(fx.compatibilizer).values;
        auto ref = fixtures::counterexample_compatibilizer_spectrum();
        bool ok = std::abs(ev.sum() - 2.0) <= 1e-10;
        for (int k = 0; k < 4; ++k) {
            ok = ok && std::abs(ev(2 * k) - ev(2 * k + 1)) <= 1e-10 && std::abs(ev(2 * k) - ref[static_cast<std::size_t>(k)]) <= 1e-10;
            if (k) ok = ok && ev(2 * k) - ev(2 * k - 1) > 1e-6;
        }
        ok = ok && ev(0) > 0.0;
        d = "eigenvalues";
        for (int k = 0; k < 4; ++k) d += " " + num(ev(2 * k)) + " (x2)";
        return ok;
    }));
    out.push_back(detail::run_item("counterexample pair is compatible", [&](std::string& d) {
        Channel f(fx.choi1, 2), g(fx.choi2, 2);
        auto o = sdp::solve(sdp::build_compat(f, g));
        d = std::string(sdp::to_string(o.status)) + ", alpha " + num(o.value);
        return o.status == sdp::Status::Feasible && o.value > 0.0;
    }));
    out.push_back(detail::run_item("counterexample pair has no PPT compatibilizer", [&](std::string& d) {
        Channel f(fx.choi1, 2), g(fx.choi2, 2);
        auto o = sdp::solve(sdp::build_compat(f, g, true));
        d = std::string(sdp::to_string(o.status)) + ", beta " + num(o.dual_value);
        return o.status == sdp::Status::Infeasible;
    }));
    out.push_back(detail::run_item("printed PPT witness verifies with margin -1/2", [&](std::string& d) {
        auto c = verify_witness_targets(fx.witness, fx.choi1, fx.choi2, 2);
        d = "margin " + num(c.margin) + ", slack min eigenvalue " + num(c.min_eigenvalue);
        return c.valid && std::abs(c.margin + 0.5) <= 1e-12 && c.min_eigenvalue >= -1e-12;
    }));
    return out;
}

inline std::vector<Item> standard_items() {
    using detail::num;
    std::vector<Item> out;
    out.push_back(detail::run_item("identity channel is not self-compatible (d=2)", [](std::string& d) {
        auto id = identity_channel(2);
        auto dec = sdp::decide(id, id, sdp::DecideMode::compat);
        d = std::string(sdp::to_string(dec.verdict)) + ", alpha " + num(dec.outcome.value);
        return dec.verdict == sdp::Verdict::Incompatible && verify_witness(*dec.outcome.witness, id, id).valid;
    }));
    out.push_back(detail::run_item("no-broadcast witness pairing is -4/3 at p=0 and 0 at p=1/3 (d=2)", [](std::string& d) {
        auto w = no_broadcast_witness(2);
        auto pair = [&](double p) {
            auto o = partial_depolarizing_channel(2, p);
            return witness_pairing(w, o.choi(), o.choi());
        };
        double a = pair(0.0), b = pair(1.0 / 3);
        d = "pairings " + num(a) + ", " + num(b);
        return std::abs(a + 4.0 / 3) <= 1e-12 && std::abs(b) <= 1e-12 &&
               verify_witness(w, identity_channel(2), identity_channel(2)).valid;
    }));
    out.push_back(detail::run_item("no-broadcast threshold d/(2(d+1)) for d = 2, 3", [](std::string& d) {
        bool ok = true;
        for (int dim : {2, 3}) {
            auto w = no_broadcast_witness(dim);
            double p0 = dim / (2.0 * (dim + 1));
            auto o = partial_depolarizing_channel(dim, p0);
            double v = witness_pairing(w, o.choi(), o.choi());
            d += "d=" + std::to_string(dim) + " pairing at threshold " + num(v) + "; ";
            ok = ok && std::abs(v) <= 1e-10;
        }
        return ok;
    }));
    out.push_back(detail::run_item("depolarizing channel at q=1/3 sits on the self-compatibility boundary", [](std::string& d) {
        auto w = partial_depolarizing_channel(2, 1.0 / 3);
        auto o = sdp::solve(sdp::build_compat(w, w));
        d = "alpha " + num(o.value);
        return qubit_self_compatible(w.choi()) && std::abs(o.value) <= 1e-6 && o.status != sdp::Status::Infeasible;
    }));
    out.push_back(detail::run_item("depolarizing pair (0.6, 0.6) is compatible", [](std::string& d) {
        auto f = partial_depolarizing_channel(2, 0.6);
        auto dec = sdp::decide(f, f, sdp::DecideMode::compat);
        d = sdp::to_string(dec.verdict);
        return dec.verdict == sdp::Verdict::Compatible && depol_pair_compatible(0.6, 0.6);
    }));
    out.push_back(detail::run_item("Xi thresholds at p=0: self-compatible from 1/3, measure-and-prepare from 2/3", [](std::string& d) {
        d = "thresholds " + num(xi_self_threshold(0.0)) + ", " + num(xi_measure_prepare_threshold(0.0));
        return std::abs(xi_self_threshold(0.0) - 1.0 / 3) <= 1e-15 &&
               std::abs(xi_measure_prepare_threshold(0.0) - 2.0 / 3) <= 1e-15;
    }));
    out.push_back(detail::run_item("Xi inverse at p=0 matches the depolarizing inverse", [](std::string& d) {
        const double q = 0.5;
        auto inv = xi_inverse(XiParams(0.0, q));
        LinearMapRep om = (1.0 / (1.0 - q)) * (identity_channel(2).rep() - q * depolarizing_channel(2).rep());
        double r = max_abs_diff(inv.choi(), om.choi());
        d = "max difference " + num(r);
        return r <= 1e-12;
    }));
    out.push_back(detail::run_item("identity pair is Jordan incompatible; identity with a constant channel is compatible", [](std::string& d) {
        auto id = identity_channel(2), om = depolarizing_channel(2);
        auto a = sdp::decide(id, id, sdp::DecideMode::jordan);
        auto b = sdp::solve(sdp::build_jordan_compat(id, om));
        d = std::string(sdp::to_string(a.verdict)) + ", " + sdp::to_string(b.status);
        return a.verdict == sdp::Verdict::Incompatible && b.status == sdp::Status::Feasible;
    }));
    return out;
}

inline std::vector<Item> run_all(const FixtureSet& fx) {
    auto out = counterexample_items(fx);
    auto rest = standard_items();
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

}  // namespace qcc::replay
