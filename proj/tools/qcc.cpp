// qcc - command-line front end for channel compatibility decisions, certificates and sweeps
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "qcc/io.hpp"
#include "qcc/replay.hpp"
#include "qcc/sweep.hpp"

using namespace qcc;

namespace {

constexpr int kExitCompatible = 0;
constexpr int kExitIncompatible = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitParse = 64;
constexpr int kExitDimension = 65;

int exit_code(sdp::Verdict v) {
    switch (v) {
        case sdp::Verdict::Compatible: return kExitCompatible;
        case sdp::Verdict::Incompatible: return kExitIncompatible;
        default: return kExitInconclusive;
    }
}

sdp::DecideMode parse_mode(const std::string& s) {
    if (s == "compat") return sdp::DecideMode::compat;
    if (s == "jordan") return sdp::DecideMode::jordan;
    return sdp::DecideMode::ppt_compat;
}

sdp::SolveMode parse_solver(const std::string& s) {
    return s == "projection" ? sdp::SolveMode::projection : sdp::SolveMode::interior_point;
}

void print_outcome(const sdp::Decision& d) {
    const auto& o = d.outcome;
    std::cout << "verdict: " << sdp::to_string(d.verdict) << '\n'
              << "alpha: " << o.value << '\n'
              << "beta: " << o.dual_value << '\n'
              << "residuals: primal " << o.primal_residual << ", dual " << o.dual_residual << ", gap " << o.gap << '\n'
              << "iterations: " << o.iterations << '\n';
    if (o.removed_constraints) std::cout << "removed redundant constraints: " << o.removed_constraints << '\n';
    if (!d.note.empty()) std::cout << "note: " << d.note << '\n';
}

// Builds the certificate JSON, reads it back and re-verifies it before anything is written.
io::json certificate_json(const sdp::Decision& d, sdp::DecideMode mode, const Channel& f, const Channel& g) {
    io::json j;
    if (d.verdict == sdp::Verdict::Compatible) {
        j = io::json{{"verdict", "Compatible"}, {"compatibilizer", io::encode_channel(d.compatibilizer->rep())}};
        if (d.jordan_operator) j["A"] = io::encode_matrix(d.jordan_operator->matrix().mat());
        return j;
    }
    if (d.verdict != sdp::Verdict::Incompatible) return io::json{{"verdict", "Inconclusive"}, {"note", d.note}};
    if (mode == sdp::DecideMode::jordan) {
        const auto& w = *d.outcome.jordan_witness;
        j = io::encode_jordan_witness(w, f.d_in(), verify_jordan_witness(w, f, g).margin);
    } else {
        const auto& w = *d.outcome.witness;
        j = io::encode_witness(w, f.d_in(), verify_witness(w, f, g).margin);
    }
    auto back = io::decode_certificate(io::json::parse(j.dump()));
    bool ok = back.jordan ? verify_jordan_witness(*back.jordan, f, g).valid : verify_witness(*back.witness, f, g).valid;
    if (!ok) throw std::runtime_error("certificate failed re-verification after serialization");
    j["verdict"] = "Incompatible";
    return j;
}

int cmd_check(const std::string& a, const std::string& b, const std::string& mode_s, double tol,
              const std::string& cert) {
    Channel f = io::read_channel(a, tol), g = io::read_channel(b, tol);
    if (f.d_in() != g.d_in()) throw DimensionError("input dimensions differ");
    auto mode = parse_mode(mode_s);
    auto d = sdp::decide(f, g, mode);
    print_outcome(d);
    if (!cert.empty()) io::write_json_file(cert, certificate_json(d, mode, f, g));
    return exit_code(d.verdict);
}

int cmd_self_compat(const std::string& a, int k, const std::string& solver, double tol) {
    Channel f = io::read_channel(a, tol);
    auto d = sdp::decide_self_compat(f, k, parse_solver(solver));
    print_outcome(d);
    return exit_code(d.verdict);
}

int cmd_sweep(const std::string& family, int grid, int k, const std::string& solver, int jobs,
              const std::string& out) {
    sweep::SweepSpec spec;
    spec.family = sweep::parse_family(family);
    spec.grid = grid;
    spec.k = k;
    spec.solver = parse_solver(solver);
    spec.jobs = jobs;
    auto res = sweep::run(spec);
    if (out.empty() || out == "-") {
        sweep::write_csv(std::cout, res);
    } else {
        std::ofstream o(out);
        if (!o) throw std::runtime_error("cannot write " + out);
        sweep::write_csv(o, res);
    }
    return 0;
}

int cmd_witness_verify(const std::string& cert, const std::string& a, const std::string& b, double tol) {
    auto c = io::read_certificate(cert);
    Channel f = io::read_channel(a, tol), g = io::read_channel(b, tol);
    WitnessCheck r = c.jordan ? verify_jordan_witness(*c.jordan, f, g) : verify_witness(*c.witness, f, g);
    std::cout << (r.valid ? "valid" : "invalid") << '\n'
              << "margin: " << r.margin << '\n'
              << "min eigenvalue: " << r.min_eigenvalue << '\n';
    if (c.jordan) std::cout << "residual: " << r.residual << '\n';
    return r.valid ? 0 : 1;
}

int cmd_verify_paper(const std::string& dir) {
    auto fx = dir.empty() ? replay::embedded_fixtures() : replay::load_fixtures(dir);
    auto items = replay::run_all(fx);
    int failed = 0;
    for (const auto& it : items) {
        std::cout << (it.pass ? "PASS" : "FAIL") << "  " << it.name;
        if (!it.detail.empty()) std::cout << "  [" << it.detail << "]";
        std::cout << '\n';
        failed += !it.pass;
    }
    std::cout << items.size() - static_cast<std::size_t>(failed) << "/" << items.size() << " items passed\n";
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum channel compatibility toolkit"};
    app.require_subcommand(1);

    std::string a, b, cert, mode = "compat", solver = "ipm", family, out, fixtures_dir;
    double tol = kChannelTol;
    int k = 2, grid = 21, jobs = 1;

    auto* check = app.add_subcommand("check", "Decide compatibility of two channels");
    check->add_option("A", a, "First channel JSON")->required();
    check->add_option("B", b, "Second channel JSON")->required();
    check->add_option("--mode", mode, "compat | jordan | ppt-compat")
        ->check(CLI::IsMember({"compat", "jordan", "ppt-compat"}));
    check->add_option("--tol", tol, "Channel validation tolerance");
    check->add_option("--cert", cert, "Write the certificate to this JSON file");

    auto* self = app.add_subcommand("self-compat", "Decide k-fold self-compatibility");
    self->add_option("A", a, "Channel JSON")->required();
    self->add_option("--k", k, "Number of copies")->check(CLI::Range(2, 16));
    self->add_option("--solver", solver, "ipm | projection")->check(CLI::IsMember({"ipm", "projection"}));
    self->add_option("--tol", tol, "Channel validation tolerance");

    auto* sw = app.add_subcommand("sweep", "Sweep a channel family over a parameter grid");
    sw->add_option("family", family, "xi_self_k | xi_jordan_vs_self | depol_pair")
        ->required()
        ->check(CLI::IsMember({"xi_self_k", "xi_jordan_vs_self", "depol_pair"}));
    sw->add_option("--grid", grid, "Points per axis")->check(CLI::Range(2, 1001));
    sw->add_option("--k", k, "Number of copies for xi_self_k")->check(CLI::Range(2, 16));
    sw->add_option("--solver", solver, "ipm | projection")->check(CLI::IsMember({"ipm", "projection"}));
    sw->add_option("--jobs", jobs, "Concurrent solves")->check(CLI::Range(1, 256));
    sw->add_option("--out", out, "CSV output path (stdout if omitted)");

    auto* wit = app.add_subcommand("witness", "Certificate utilities");
    wit->require_subcommand(1);
    auto* verify = wit->add_subcommand("verify", "Verify a certificate against two channels");
    verify->add_option("cert", cert, "Certificate JSON")->required();
    verify->add_option("A", a, "First channel JSON")->required();
    verify->add_option("B", b, "Second channel JSON")->required();
    verify->add_option("--tol", tol, "Channel validation tolerance");

    auto* vp = app.add_subcommand("verify-paper", "Replay the published worked examples");
    vp->add_option("--fixtures", fixtures_dir, "Directory of counterexample fixture JSON files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }

    try {
        if (*check) return cmd_check(a, b, mode, tol, cert);
        if (*self) return cmd_self_compat(a, k, solver, tol);
        if (*sw) return cmd_sweep(family, grid, k, solver, jobs, out);
        if (*verify) return cmd_witness_verify(cert, a, b, tol);
        if (*vp) return cmd_verify_paper(fixtures_dir);
    } catch (const io::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const DimensionError& e) {
        std::cerr << "dimension error: " << e.what() << '\n';
        return kExitDimension;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInconclusive;
    }
    return kExitParse;
}
