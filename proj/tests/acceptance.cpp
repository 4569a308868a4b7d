// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "qcc/analytic.hpp"
#include "qcc/random.hpp"
#include "qcc/replay.hpp"
#include "qcc/sdp.hpp"
#include "qcc/sweep.hpp"

using namespace qcc;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(4);
    s << x;
    return s.str();
}

Result replay_counterexample() {
    auto t0 = Clock::now();
    auto items = replay::counterexample_items(replay::embedded_fixtures());
    double dt = seconds_since(t0);
    int passed = 0;
    std::string failed;
    for (const auto& it : items) {
        if (it.pass)
            ++passed;
        else
            failed += " [" + it.name + ": " + it.detail + "]";
    }
    bool ok = items.size() == 6 && passed == 6 && dt < 5.0;
    return {ok, std::to_string(passed) + "/" + std::to_string(items.size()) + " items, " + fmt(dt) + " s" + failed};
}

Result no_broadcasting() {
    auto t0 = Clock::now();
    auto id = identity_channel(2);
    auto d = sdp::decide(id, id, sdp::DecideMode::compat);
    bool ok = d.verdict == sdp::Verdict::Incompatible && d.outcome.witness &&
              d.outcome.witness->mode == WitnessMode::plain && verify_witness(*d.outcome.witness, id, id).valid;
    std::string detail = std::string("decide(I, I) ") + sdp::to_string(d.verdict);

    auto pairing = [](const Witness& w, int dim, double p) {
        auto om = partial_depolarizing_channel(dim, p);
        return witness_pairing(w, om.choi(), om.choi());
    };
    auto w2 = no_broadcast_witness(2);
    double at0 = pairing(w2, 2, 0.0), at13 = pairing(w2, 2, 1.0 / 3.0);
    ok = ok && std::abs(at0 + 4.0 / 3.0) <= 1e-12 && std::abs(at13) <= 1e-12;
    detail += ", pairing " + fmt(at0) + " at p=0, " + fmt(at13) + " at p=1/3";
    for (int dim : {2, 3}) {
        auto w = no_broadcast_witness(dim);
        double f0 = pairing(w, dim, 0.0), f1 = pairing(w, dim, 1.0);
        double root = -f0 / (f1 - f0);
        double err = std::abs(root - dim / (2.0 * (dim + 1)));
        ok = ok && err <= 1e-10 && std::abs(pairing(w, dim, root)) <= 1e-10;
        detail += ", d=" + std::to_string(dim) + " root error " + fmt(err);
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 5.0;
    return {ok, detail + ", " + fmt(dt) + " s"};
}

Result depolarizing_boundary() {
    auto t0 = Clock::now();
    sweep::SweepSpec s;
    s.family = sweep::Family::depol_pair;
    s.grid = 41;
    auto r = sweep::run(s);
    int checked = 0, mismatched = 0;
    for (const auto& row : r.grid.rows) {
        double q0 = std::stod(row[0]), q1 = std::stod(row[1]);
        double sign = q0 + std::sqrt(q0 * q1) + q1 - 1.0;
        if (std::abs(sign) < 0.005) continue;
        ++checked;
        mismatched += row[2] != (sign > 0 ? "1" : "0");
    }
    double dt = seconds_since(t0);
    bool ok = r.grid.rows.size() == 41 * 41 && mismatched == 0 && dt < 600.0;
    return {ok, std::to_string(checked) + " points outside the band, " + std::to_string(mismatched) + " mismatches, " +
                    fmt(dt) + " s"};
}

Result xi_boundary() {
    auto t0 = Clock::now();
    const int n = 41;
    const double step = 1.0 / (n - 1);
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = i * step;
        // Smallest grid q that is feasible; every larger q must be feasible too.
        std::optional<double> flip;
        bool monotone = true;
        for (int j = 0; i + j < n; ++j) {
            const double q = std::min(j * step, 1.0 - p);
            auto xi = xi_channel(2, p, q);
            auto d = sdp::decide(xi, xi, sdp::DecideMode::compat);
            if (d.verdict == sdp::Verdict::Compatible) {
                if (!flip) flip = q;
            } else if (flip) {
                monotone = false;
            }
        }
        double err = flip ? std::abs(*flip - xi_self_threshold(p)) : 1.0;
        worst = std::max(worst, err);
        if (!monotone || err > step + 1e-12) ++bad;
    }
    double dt = seconds_since(t0);
    bool ok = bad == 0 && dt < 600.0;
    return {ok, "worst flip offset " + fmt(worst) + ", " + std::to_string(bad) + " bad p values, " + fmt(dt) + " s"};
}

Result k_nesting() {
    auto t0 = Clock::now();
    std::array<std::vector<std::vector<std::string>>, 3> rows;
    for (int k = 2; k <= 4; ++k) {
        sweep::SweepSpec s;
        s.family = sweep::Family::xi_self_k;
        s.grid = 21;
        s.k = k;
        rows[static_cast<std::size_t>(k - 2)] = sweep::run(s).grid.rows;
    }
    int nesting_violations = 0, mp_failures = 0, inconclusive = 0;
    const auto& r2 = rows[0];
    for (std::size_t i = 0; i < r2.size(); ++i) {
        double p = std::stod(r2[i][0]), q = std::stod(r2[i][1]);
        bool mp = q >= xi_measure_prepare_threshold(p) - 1e-12;
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& v = rows[k][i][2];
            inconclusive += v == "?";
            if (mp && v != "1") ++mp_failures;
            if (k > 0 && v == "1" && rows[k - 1][i][2] != "1") ++nesting_violations;
        }
    }
    double dt = seconds_since(t0);
    bool ok = nesting_violations == 0 && mp_failures == 0 && dt < 1800.0;
    return {ok, std::to_string(r2.size()) + " points, " + std::to_string(nesting_violations) + " nesting violations, " +
                    std::to_string(mp_failures) + " measure-and-prepare failures, " + std::to_string(inconclusive) +
                    " inconclusive, " + fmt(dt) + " s"};
}

Result jordan_equivalence() {
    auto t0 = Clock::now();
    random::Rng rng(2024);
    int inconclusive = 0, agree = 0, disagree = 0, compatible = 0;
    for (int t = 0; t < 100; ++t) {
        auto f = random::invertible_channel(rng, 2), g = random::invertible_channel(rng, 2);
        const double s = 0.5 * (t % 5) / 4.0;
        f = Channel((1.0 - s) * f.rep() + s * depolarizing_channel(2).rep());
        g = Channel((1.0 - s) * g.rep() + s * depolarizing_channel(2).rep());
        auto a = sdp::decide(f, g, sdp::DecideMode::compat);
        auto b = sdp::decide(f, g, sdp::DecideMode::jordan);
        if (a.verdict == sdp::Verdict::Inconclusive || b.verdict == sdp::Verdict::Inconclusive) {
            ++inconclusive;
            continue;
        }
        (a.verdict == b.verdict ? agree : disagree)++;
        compatible += a.verdict == sdp::Verdict::Compatible;
    }
    double dt = seconds_since(t0);
    bool ok = disagree == 0 && inconclusive <= 2 && dt < 900.0;
    return {ok, std::to_string(agree) + " agree, " + std::to_string(disagree) + " disagree, " +
                    std::to_string(inconclusive) + " inconclusive, " + std::to_string(compatible) + " compatible, " +
                    fmt(dt) + " s"};
}

// Runs the [property] cases of one unit-test binary and returns its exit status and Catch2 summary.
std::pair<int, std::string> run_property_suite(const std::string& binary) {
    std::string cmd = "\"" + binary + "\" \"[property]\" 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, "could not start " + binary};
    std::string out;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) out += buf.data();
    int status = pclose(pipe);
    std::string summary;
    std::istringstream lines(out);
    for (std::string l; std::getline(lines, l);)
        if (l.rfind("All tests passed", 0) == 0 || l.rfind("test cases:", 0) == 0) summary = l;
    return {status, summary.empty() ? out : summary};
}

Result property_suites() {
    auto t0 = Clock::now();
    const std::vector<std::pair<std::string, std::string>> suites = {
        {"linalg", QCC_TEST_LINALG}, {"jordan", QCC_TEST_JORDAN},   {"marginal", QCC_TEST_MARGINAL},
        {"sdp", QCC_TEST_SDP},       {"witness", QCC_TEST_WITNESS},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [name, path] : suites) {
        auto [status, summary] = run_property_suite(path);
        ok = ok && status == 0;
        detail += (detail.empty() ? "" : "; ") + name + ": " + summary;
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 600.0;
    return {ok, detail + "; " + fmt(dt) + " s"};
}

Result jordan_cp_vs_hull() {
    int outside = 0, missed = 0;
    for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 40; ++j) {
            double q0 = i / 40.0, q1 = j / 40.0;
            bool cp = standard_jordan_cp(partial_depolarizing_channel(2, q0), partial_depolarizing_channel(2, q1));
            bool hull = sweep::in_depol_hull(q0, q1);
            outside += cp && !hull;
            missed += !cp && hull;
        }
    return {outside >= 1 && missed >= 1, std::to_string(outside) + " CP points outside the hull, " +
                                             std::to_string(missed) + " hull points not CP"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
        {"counterexample replay", replay_counterexample},
        {"no-broadcasting", no_broadcasting},
        {"depolarizing-pair boundary", depolarizing_boundary},
        {"Xi self-compatibility boundary", xi_boundary},
        {"k-region nesting", k_nesting},
        {"Jordan/compat equivalence", jordan_equivalence},
        {"property suites", property_suites},
        {"Jordan CP region vs convex hull", jordan_cp_vs_hull},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        failures += !r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << r.detail
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
