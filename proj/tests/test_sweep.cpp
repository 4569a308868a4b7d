// Sweep grids: ordering, CSV layout, boundary extraction and thread-count independence.
#include <catch_amalgamated.hpp>

#include <sstream>

#include "qcc/sweep.hpp"

using namespace qcc;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("family names and spec validation") {
    CHECK(sweep::parse_family("xi_self_k") == sweep::Family::xi_self_k);
    CHECK(sweep::parse_family("depol_pair") == sweep::Family::depol_pair);
    CHECK_THROWS_AS(sweep::parse_family("other"), std::invalid_argument);
    sweep::SweepSpec s;
    s.grid = 1;
    CHECK_THROWS_AS(s.check(), std::invalid_argument);
    s.grid = 3;
    s.k = 1;
    CHECK_THROWS_AS(s.check(), std::invalid_argument);
    s.k = 2;
    s.jobs = 0;
    CHECK_THROWS_AS(s.check(), std::invalid_argument);
}

TEST_CASE("hull of the depolarizing pair region") {
    CHECK(sweep::in_depol_hull(1.0 / 3.0, 1.0 / 3.0));
    CHECK(sweep::in_depol_hull(1.0, 0.0));
    CHECK(sweep::in_depol_hull(0.0, 1.0));
    CHECK(sweep::in_depol_hull(1.0, 1.0));
    CHECK_FALSE(sweep::in_depol_hull(0.3, 0.3));
    CHECK_FALSE(sweep::in_depol_hull(0.1, 0.7));
}

TEST_CASE("depolarizing pair sweep layout") {
    sweep::SweepSpec s;
    s.family = sweep::Family::depol_pair;
    s.grid = 5;
    auto r = sweep::run(s);
    REQUIRE(r.grid.rows.size() == 25);
    CHECK(r.grid.header == std::vector<std::string>{"q0", "q1", "verdict_compat", "verdict_jordan_std", "in_hull"});
    // Row-major: the first column is the slow index.
    CHECK(r.grid.rows[0][0] == "0");
    CHECK(r.grid.rows[0][1] == "0");
    CHECK(r.grid.rows[1][0] == "0");
    CHECK(r.grid.rows[1][1] == "0.25");
    CHECK(r.grid.rows[5][0] == "0.25");
    for (const auto& row : r.grid.rows) {
        double q0 = std::stod(row[0]), q1 = std::stod(row[1]);
        double s0 = q0 + std::sqrt(q0 * q1) + q1 - 1.0;
        if (std::abs(s0) < 0.005) continue;
        CHECK(row[2] == (s0 > 0 ? "1" : "0"));
    }
    CHECK(r.boundary.header == std::vector<std::string>{"q0", "q1_flip_verdict_compat", "q1_flip_verdict_jordan_std"});
    REQUIRE(r.boundary.rows.size() == 5);
    CHECK(r.boundary.rows[0][1] == "1");    // q0 = 0 needs q1 = 1
    CHECK(r.boundary.rows[4][1] == "0");    // q0 = 1 is compatible with everything

    std::ostringstream out;
    sweep::write_csv(out, r);
    auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 1 + 25 + 1 + 1 + 5);
    CHECK(lines[0] == "q0,q1,verdict_compat,verdict_jordan_std,in_hull");
    CHECK(lines[26].empty());
    CHECK(lines[27] == "q0,q1_flip_verdict_compat,q1_flip_verdict_jordan_std");
}

TEST_CASE("Xi sweeps skip invalid parameters and agree with the closed form") {
    sweep::SweepSpec s;
    s.family = sweep::Family::xi_jordan_vs_self;
    s.grid = 5;
    auto r = sweep::run(s);
    CHECK(r.grid.rows.size() == 15);
    CHECK(r.grid.header.back() == "measure_prepare");
    for (const auto& row : r.grid.rows) {
        double p = std::stod(row[0]), q = std::stod(row[1]);
        CHECK(p + q <= 1.0 + 1e-12);
        if (std::abs(q - xi_self_threshold(p)) < 0.005) continue;
        CHECK(row[2] == (xi_self_compatible(XiParams(p, std::min(q, 1.0 - p))) ? "1" : "0"));
        if (row[4] == "1") CHECK(row[3] == "1");
        if (row[3] == "1") CHECK(row[2] == "1");
    }
}

TEST_CASE("sweep output does not depend on the job count") {
    sweep::SweepSpec s;
    s.family = sweep::Family::xi_self_k;
    s.grid = 6;
    s.k = 2;
    std::ostringstream a, b;
    sweep::write_csv(a, sweep::run(s));
    s.jobs = 4;
    sweep::write_csv(b, sweep::run(s));
    CHECK(a.str() == b.str());
}

TEST_CASE("parallel_for propagates exceptions") {
    CHECK_THROWS_AS(sweep::parallel_for(8, 3,
                                        [](int i) {
                                            if (i == 5) throw std::runtime_error("boom");
                                        }),
                    std::runtime_error);
}
