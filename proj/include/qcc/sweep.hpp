// sweep.hpp - parameter-grid sweeps over the qubit channel families with ordered CSV output
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "qcc/analytic.hpp"
#include "qcc/sdp.hpp"

namespace qcc::sweep {

enum class Family { xi_self_k, xi_jordan_vs_self, depol_pair };

inline Family parse_family(const std::string& s) {
    if (s == "xi_self_k") return Family::xi_self_k;
    if (s == "xi_jordan_vs_self") return Family::xi_jordan_vs_self;
    if (s == "depol_pair") return Family::depol_pair;
    throw std::invalid_argument("unknown sweep family: " + s);
}

struct SweepSpec {
    Family family = Family::xi_self_k;
    int grid = 21;
    int k = 2;
    sdp::SolveMode solver = sdp::SolveMode::interior_point;
    int jobs = 1;

    void check() const {
        if (grid < 2) throw std::invalid_argument("grid must be at least 2");
        if (k < 2) throw std::invalid_argument("k must be at least 2");
        if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
    }
};

/// "1" compatible, "0" incompatible, "?" inconclusive.
inline std::string verdict_code(sdp::Verdict v) {
    switch (v) {
        case sdp::Verdict::Compatible: return "1";
        case sdp::Verdict::Incompatible: return "0";
        default: return "?";
    }
}

inline std::string bool_code(bool b) { return b ? "1" : "0"; }

/// Convex hull of (1/3,1/3), (1,0), (1,1), (0,1) in the (q₀,q₁) square.
inline bool in_depol_hull(double q0, double q1) {
    constexpr double eps = 1e-12;
    return q1 >= 1.0 - 2.0 * q0 - eps && q1 >= (1.0 - q0) / 2.0 - eps;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct SweepResult {
    Table grid;
    Table boundary;  // first grid value per column where a verdict column flips to "1"
};

inline std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(12) << x;
    return s.str();
}

/// Runs fn(i) for i < n on up to jobs threads; results are indexed, so ordering is deterministic.
template <class Fn>
void parallel_for(int n, int jobs, Fn fn) {
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

namespace detail {

// Groups rows by the first column and reports the second-column value of the first "1" in each listed column.
inline Table boundary_of(const Table& t, const std::vector<std::size_t>& cols) {
    Table b;
    b.header = {t.header[0]};
    for (auto c : cols) b.header.push_back(t.header[1] + "_flip_" + t.header[c]);
    std::vector<std::string> keys;
    for (const auto& r : t.rows)
        if (keys.empty() || keys.back() != r[0]) keys.push_back(r[0]);
    for (const auto& key : keys) {
        std::vector<std::string> row{key};
        for (auto c : cols) {
            std::string flip = "none";
            for (const auto& r : t.rows)
                if (r[0] == key && r[c] == "1") {
                    flip = r[1];
                    break;
                }
            row.push_back(flip);
        }
        b.rows.push_back(row);
    }
    return b;
}

}  // namespace detail

inline SweepResult run(const SweepSpec& spec) {
    spec.check();
    const int n = spec.grid;
    auto axis = [n](int i) { return static_cast<double>(i) / (n - 1); };
    struct Point {
        double a, b;
    };
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double a = axis(i), b = axis(j);
            if (spec.family != Family::depol_pair && a + b > 1.0 + 1e-12) continue;
            pts.push_back({a, b});
        }
    SweepResult res;
    std::vector<std::vector<std::string>> rows(pts.size());
    std::vector<std::size_t> flip_cols;
    switch (spec.family) {
        case Family::xi_self_k:
            res.grid.header = {"p", "q", "verdict", "k"};
            flip_cols = {2};
            parallel_for(static_cast<int>(pts.size()), spec.jobs, [&](int i) {
                const auto& pt = pts[static_cast<std::size_t>(i)];
                auto xi = xi_channel(2, pt.a, std::min(pt.b, 1.0 - pt.a));
                auto d = sdp::decide_self_compat(xi, spec.k, spec.solver);
                rows[static_cast<std::size_t>(i)] = {fmt(pt.a), fmt(pt.b), verdict_code(d.verdict), std::to_string(spec.k)};
            });
            break;
        case Family::xi_jordan_vs_self:
            res.grid.header = {"p", "q", "verdict", "jordan_std", "measure_prepare"};
            flip_cols = {2, 3, 4};
            parallel_for(static_cast<int>(pts.size()), spec.jobs, [&](int i) {
                const auto& pt = pts[static_cast<std::size_t>(i)];
                auto xi = xi_channel(2, pt.a, std::min(pt.b, 1.0 - pt.a));
                auto d = sdp::decide(xi, xi, sdp::DecideMode::compat);
                auto eb = validate(xi).eb_2x2;
                rows[static_cast<std::size_t>(i)] = {fmt(pt.a), fmt(pt.b), verdict_code(d.verdict),
                                                     bool_code(standard_jordan_cp(xi, xi, 1e-10)),
                                                     bool_code(eb.value_or(false))};
            });
            break;
        case Family::depol_pair:
            res.grid.header = {"q0", "q1", "verdict_compat", "verdict_jordan_std", "in_hull"};
            flip_cols = {2, 3};
            parallel_for(static_cast<int>(pts.size()), spec.jobs, [&](int i) {
                const auto& pt = pts[static_cast<std::size_t>(i)];
                auto f = partial_depolarizing_channel(2, pt.a), g = partial_depolarizing_channel(2, pt.b);
                auto d = sdp::decide(f, g, sdp::DecideMode::compat);
                rows[static_cast<std::size_t>(i)] = {fmt(pt.a), fmt(pt.b), verdict_code(d.verdict),
                                                     bool_code(standard_jordan_cp(f, g, 1e-10)),
                                                     bool_code(in_depol_hull(pt.a, pt.b))};
            });
            break;
    }
    res.grid.rows = std::move(rows);
    res.boundary = detail::boundary_of(res.grid, flip_cols);
    return res;
}

inline void write_table(std::ostream& out, const Table& t) {
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

/// Grid section, a blank line, then the boundary section.
inline void write_csv(std::ostream& out, const SweepResult& r) {
    write_table(out, r.grid);
    out << '\n';
    write_table(out, r.boundary);
}

}  // namespace qcc::sweep
