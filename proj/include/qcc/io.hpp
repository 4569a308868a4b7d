// io.hpp - JSON encoding of matrices, channels and certificates
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qcc/witness.hpp"

namespace qcc::io {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kParseHermitianTol = 1e-10;

/// [[[re, im], ...], ...], row-major.
inline json encode_matrix(const CMat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

inline CMat decode_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix: expected a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    CMat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ParseError("matrix: rows must form a square");
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& e = row[static_cast<std::size_t>(k)];
            if (e.is_number()) {
                m(i, k) = cplx(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ParseError("matrix: entries must be [re, im] pairs");
            }
        }
    }
    return m;
}

inline HermitianMatrix decode_hermitian(const json& j, const TensorShape& shape) {
    CMat m = decode_matrix(j);
    if (detail::max_abs(m - m.adjoint()) > kParseHermitianTol) throw ParseError("matrix: not Hermitian");
    if (m.rows() != shape.side()) throw DimensionError("matrix: side does not match " + shape.str());
    return HermitianMatrix(CMat(0.5 * (m + m.adjoint())), shape);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

template <class T>
T get_field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("field \"") + key + "\": " + e.what());
    }
}

/// {"d_in": n, "d_out": m, "choi": matrix, optional "out_factors": [...]}.
inline json encode_channel(const LinearMapRep& f) {
    json j{{"d_in", f.d_in()}, {"d_out", f.d_out()}, {"choi", encode_matrix(f.choi().mat())}};
    if (f.out_shape().size() > 1) j["out_factors"] = f.out_shape().factors;
    return j;
}

inline LinearMapRep decode_map(const json& j) {
    int din = get_field<int>(j, "d_in"), dout = get_field<int>(j, "d_out");
    if (din < 1 || dout < 1) throw ParseError("channel: dimensions must be positive");
    TensorShape out{dout};
    if (j.contains("out_factors")) {
        out = TensorShape(get_field<std::vector<int>>(j, "out_factors"));
        if (out.side() != dout) throw ParseError("channel: out_factors do not multiply to d_out");
    }
    if (!j.contains("choi")) throw ParseError("missing field \"choi\"");
    CMat m = decode_matrix(j.at("choi"));
    if (m.rows() != din * dout) throw DimensionError("channel: Choi side is not d_in*d_out");
    return LinearMapRep(decode_hermitian(j.at("choi"), TensorShape{din}.concat(out)), din, out);
}

inline Channel decode_channel(const json& j, double tol = kChannelTol) { return Channel(decode_map(j), tol); }

inline Channel read_channel(const std::string& path, double tol = kChannelTol) {
    return decode_channel(read_json_file(path), tol);
}

inline void write_channel(const std::string& path, const LinearMapRep& f) { write_json_file(path, encode_channel(f)); }

/// Plain or ppt witness; the dims object fixes the tensor shapes on read-back.
inline json encode_witness(const Witness& w, int dx, double margin) {
    const int d1 = w.z1.side() / dx, d2 = w.z2.side() / dx;
    json j{{"mode", w.mode == WitnessMode::ppt ? "ppt" : "plain"},
           {"dims", {{"x", dx}, {"y1", d1}, {"y2", d2}}},
           {"Z1", encode_matrix(w.z1.mat())},
           {"Z2", encode_matrix(w.z2.mat())},
           {"margin", margin}};
    if (w.r) j["R"] = encode_matrix(w.r->mat());
    return j;
}

inline json encode_jordan_witness(const JordanWitness& w, int d, double margin) {
    return json{{"mode", "jordan"},
                {"dims", {{"x", d}, {"y", w.rho.side() / d}}},
                {"W1", encode_matrix(w.w1.mat())},
                {"W2", encode_matrix(w.w2.mat())},
                {"rho", encode_matrix(w.rho.mat())},
                {"margin", margin}};
}

struct Certificate {
    std::optional<Witness> witness;
    std::optional<JordanWitness> jordan;
    double margin = 0.0;
};

inline Certificate decode_certificate(const json& j) {
    auto mode = get_field<std::string>(j, "mode");
    if (!j.contains("dims")) throw ParseError("missing field \"dims\"");
    const json& dims = j.at("dims");
    Certificate c;
    c.margin = j.value("margin", 0.0);
    if (mode == "plain" || mode == "ppt") {
        int dx = get_field<int>(dims, "x"), d1 = get_field<int>(dims, "y1"), d2 = get_field<int>(dims, "y2");
        Witness w{decode_hermitian(j.at("Z1"), TensorShape{dx, d1}), decode_hermitian(j.at("Z2"), TensorShape{dx, d2}),
                  mode == "ppt" ? WitnessMode::ppt : WitnessMode::plain, std::nullopt};
        if (j.contains("R")) w.r = decode_hermitian(j.at("R"), TensorShape{dx, d1, d2});
        c.witness = w;
    } else if (mode == "jordan") {
        int d = get_field<int>(dims, "x"), dy = get_field<int>(dims, "y");
        c.jordan = JordanWitness{decode_hermitian(j.at("W1"), TensorShape{d, d}),
                                 decode_hermitian(j.at("W2"), TensorShape{d, d}),
                                 decode_hermitian(j.at("rho"), TensorShape{d, dy})};
    } else {
        throw ParseError("certificate: unknown mode \"" + mode + "\"");
    }
    return c;
}

inline Certificate read_certificate(const std::string& path) { return decode_certificate(read_json_file(path)); }

}  // namespace qcc::io
