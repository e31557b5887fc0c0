#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "treeharm/errors.hpp"
#include "treeharm/kernels.hpp"
#include "treeharm/measures.hpp"
#include "treeharm/polyharmonic.hpp"
#include "treeharm/spectral.hpp"
#include "treeharm/tree.hpp"
#include "treeharm/verify.hpp"

namespace treeharm {

using Json = nlohmann::ordered_json;

/// 17 significant digits, '.' decimal separator, locale-free: doubles
/// round-trip exactly.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e)
        throw parse_error("bad " + what + ": '" + s + "'");
    return v;
}

// ---------------------------------------------------------------------------
// Complex numbers
// ---------------------------------------------------------------------------

inline Json complex_to_json(Complex v) { return Json{{"re", v.real()}, {"im", v.imag()}}; }

inline Complex complex_from_json(const Json& j, const std::string& what) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im") ||
        !j["re"].is_number() || !j["im"].is_number())
        throw parse_error(what + ": expected {\"re\": number, \"im\": number}");
    return {j["re"].get<double>(), j["im"].get<double>()};
}

/// Strict complex literal: "1.5", "-2e-3", "0.3i", "1.5+0.3i", "1.5-0.3i".
inline Complex parse_complex_literal(const std::string& s) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    double first = 0.0;
    auto res = std::from_chars(b, e, first);
    if (res.ec != std::errc{})
        throw parse_error("bad complex literal '" + s + "'");
    const char* p = res.ptr;
    if (p == e) return {first, 0.0};
    if (*p == 'i' && p + 1 == e) return {0.0, first};
    if (*p != '+' && *p != '-')
        throw parse_error("bad complex literal '" + s + "' (expected a+bi)");
    const double sign = (*p == '-') ? -1.0 : 1.0;
    ++p;
    double second = 0.0;
    res = std::from_chars(p, e, second);
    if (res.ec != std::errc{} || res.ptr + 1 != e || *res.ptr != 'i')
        throw parse_error("bad complex literal '" + s + "' (expected a+bi)");
    return {first, sign * second};
}

// ---------------------------------------------------------------------------
// Rays and measures
// ---------------------------------------------------------------------------

inline Json ray_to_json(const BoundaryRay& xi) {
    return Json{{"prefix", to_string(xi.prefix())}, {"repeat", int(xi.repeat())}};
}

inline BoundaryRay ray_from_json(Degree d, const Json& j) {
    if (!j.is_object() || !j.contains("prefix") || !j.contains("repeat"))
        throw parse_error("ray: expected {\"prefix\": string, \"repeat\": label}");
    const Vertex prefix = vertex_from_string(j["prefix"].get<std::string>());
    const int rep = j["repeat"].get<int>();
    if (rep < 0 || rep > 255) throw parse_error("ray repeat label out of range");
    BoundaryRay xi(prefix, static_cast<Label>(rep));
    validate_ray(d, xi);
    return xi;
}

/// Canonical form: scale folded in, atoms sorted, cylinder values listed in
/// (length, word) order with exact zeros omitted.
inline Json measure_to_json(const BoundaryMeasure& m0) {
    const BoundaryMeasure m = materialized(m0);
    Json atoms = Json::array();
    for (const auto& a : m.atoms())
        atoms.push_back(Json{{"ray", ray_to_json(a.ray)}, {"w", complex_to_json(a.weight)}});
    Json out{{"atoms", std::move(atoms)}};
    if (m.cylinder()) {
        Json values = Json::object();
        const int d = m.cylinder()->depth;
        for (std::size_t i = 0; i < m.cylinder()->values.size(); ++i) {
            const Complex v = m.cylinder()->values[i];
            if (v == Complex{}) continue;
            values[to_string(sphere_vertex(m.degree(), d, static_cast<std::int64_t>(i)))] =
                complex_to_json(v);
        }
        out["cylinder"] = Json{{"depth", d}, {"values", std::move(values)}};
    }
    return out;
}

inline BoundaryMeasure measure_from_json(Degree d, const Json& j) {
    if (!j.is_object()) throw parse_error("measure: expected an object");
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        if (!j["atoms"].is_array()) throw parse_error("measure atoms: expected an array");
        for (const auto& a : j["atoms"]) {
            if (!a.contains("ray") || !a.contains("w"))
                throw parse_error("measure atom: expected {\"ray\": ..., \"w\": ...}");
            atoms.push_back({ray_from_json(d, a["ray"]), complex_from_json(a["w"], "atom weight")});
        }
    }
    std::optional<CylinderPart> cyl;
    if (j.contains("cylinder")) {
        const auto& c = j["cylinder"];
        if (!c.is_object() || !c.contains("depth"))
            throw parse_error("measure cylinder: expected {\"depth\": ..., \"values\": ...}");
        const int depth = c["depth"].get<int>();
        if (depth < 1) throw parse_error("measure cylinder depth must be >= 1");
        std::vector<Complex> values(static_cast<std::size_t>(sphere_size(d, depth)), Complex{});
        if (c.contains("values")) {
            for (const auto& [key, val] : c["values"].items()) {
                const Vertex u = vertex_from_string(key);
                validate_vertex(d, u);
                if (u.depth() != depth)
                    throw parse_error("cylinder key '" + key + "' is not at depth " +
                                      std::to_string(depth));
                values[static_cast<std::size_t>(sphere_rank(d, u))] =
                    complex_from_json(val, "sector value");
            }
        }
        cyl = CylinderPart{depth, std::move(values)};
    }
    return BoundaryMeasure::of(d, std::move(atoms), std::move(cyl));
}

// ---------------------------------------------------------------------------
// Eigenvalue parameters and polyharmonic functions
// ---------------------------------------------------------------------------

/// Accepts either {"lambda": {...}} (branch computed) or {"z": {...}}
/// (eigenvalue computed); exactly one of the two.
inline EigenParam eigen_param_from_json(Degree d, const Json& j) {
    const bool has_l = j.contains("lambda");
    const bool has_z = j.contains("z");
    if (has_l == has_z)
        throw parse_error("expected exactly one of \"lambda\" or \"z\"");
    if (has_l) return EigenParam::from_lambda(d, complex_from_json(j["lambda"], "lambda"));
    return EigenParam::from_z(d, complex_from_json(j["z"], "z"));
}

struct ParsedPolyFunction {
    PolyFunction fn;
    bool order_demoted = false;
    int dropped_coordinates = 0;
};

inline Json poly_function_to_json(const PolyFunction& f) {
    Json sigmas = Json::array();
    for (const auto& s : f.sigmas) sigmas.push_back(measure_to_json(s));
    return Json{{"q", f.param.degree().q()},
                {"lambda", complex_to_json(f.param.lambda())},
                {"sigmas", std::move(sigmas)}};
}

inline ParsedPolyFunction poly_function_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("q"))
        throw parse_error("polyharmonic function: expected {\"q\", \"lambda\"|\"z\", \"sigmas\"}");
    const Degree d(j["q"].get<int>());
    const EigenParam p = eigen_param_from_json(d, j);
    if (!j.contains("sigmas") || !j["sigmas"].is_array() || j["sigmas"].empty())
        throw parse_error("field \"sigmas\" must be a nonempty array (order >= 1)");
    std::vector<BoundaryMeasure> sigmas;
    int idx = 0;
    for (const auto& s : j["sigmas"]) {
        try {
            sigmas.push_back(measure_from_json(d, s));
        } catch (const parse_error& e) {
            throw parse_error("sigma_" + std::to_string(idx) + ": " + e.what());
        }
        ++idx;
    }
    const PolyMakeResult made = make_poly_function(p, std::move(sigmas));
    return {made.fn, made.order_demoted, made.dropped_coordinates};
}

// ---------------------------------------------------------------------------
// Coefficient matrix
// ---------------------------------------------------------------------------

inline Json coeff_matrix_to_json(const CoeffMatrix& m) {
    Json entries = Json::array();
    for (int r = 1; r <= m.n - 1; ++r)
        for (int k = 1; k <= r; ++k) {
            const Complex a = m.at(k, r);
            entries.push_back(Json{{"k", k}, {"r", r}, {"re", a.real()}, {"im", a.imag()}});
        }
    return Json{{"n", m.n},
                {"lambda", complex_to_json(m.lambda)},
                {"entries", std::move(entries)},
                {"frobenius", m.frobenius}};
}

// ---------------------------------------------------------------------------
// Ball values and orbits (CSV)
// ---------------------------------------------------------------------------

inline std::string ball_values_csv(const BallValues& v) {
    std::string out = "vertex,re,im\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += to_string(v.vertex_at(i));
        out += ',';
        out += format_double(v[i].real());
        out += ',';
        out += format_double(v[i].imag());
        out += '\n';
    }
    return out;
}

inline std::vector<std::pair<Vertex, Complex>> parse_ball_csv(const std::string& text) {
    std::vector<std::pair<Vertex, Complex>> out;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        if (header) {
            if (line != "vertex,re,im") throw parse_error("ball csv: bad header '" + line + "'");
            header = false;
            continue;
        }
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw parse_error("ball csv: bad row '" + line + "'");
        out.emplace_back(vertex_from_string(line.substr(0, c1)),
                         Complex(parse_double(line.substr(c1 + 1, c2 - c1 - 1), "csv re"),
                                 parse_double(line.substr(c2 + 1), "csv im")));
    }
    return out;
}

inline std::string orbit_csv(const std::vector<OrbitRow>& rows, OrbitOperator op) {
    std::string out = "step,total_norm";
    const std::size_t n0 = rows.empty() ? 0 : rows.front().sigma_norms.size();
    for (std::size_t j = 0; j < n0; ++j) out += ",norm_sigma_" + std::to_string(j);
    if (op == OrbitOperator::heat) out += ",laplacian_power_norm";
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.step);
        out += ',';
        out += format_double(r.total_norm);
        for (const auto& s : r.sigma_norms) {
            out += ',';
            out += format_double(s);
        }
        if (op == OrbitOperator::heat) {
            out += ',';
            out += format_double(r.contrast_norm);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verification reports
// ---------------------------------------------------------------------------

inline Json sign_resolution_to_json(const SignResolution& s) {
    Json per = Json::array();
    for (const auto& r : s.per_r)
        per.push_back(Json{{"r", r.r},
                           {"residual_plus", r.residual_plus},
                           {"residual_alternating", r.residual_alternating}});
    return Json{{"chosen", s.chosen == LadderSign::plus_r ? "+r" : "(-1)^r r"},
                {"per_r", std::move(per)},
                {"winning_max", s.winning_max},
                {"losing_min_odd", s.losing_min_odd}};
}

inline Json report_to_json(const SuiteReport& rep) {
    Json cases = Json::array();
    for (const auto& c : rep.cases)
        cases.push_back(Json{{"id", c.id},
                             {"max_abs_err", c.max_abs_err},
                             {"max_rel_err", c.max_rel_err},
                             {"tolerance", c.tolerance},
                             {"pass", c.pass}});
    Json out{{"suite", rep.suite}, {"seed", rep.seed}, {"q", rep.q}, {"cases", std::move(cases)}};
    if (rep.sign) out["resolved_sign"] = sign_resolution_to_json(*rep.sign);
    out["pass"] = rep.passed();
    return out;
}

inline std::string report_table(const SuiteReport& rep) {
    char line[160];
    std::snprintf(line, sizeof(line), "suite %s  (q=%d, seed=%llu)\n", rep.suite.c_str(), rep.q,
                  static_cast<unsigned long long>(rep.seed));
    std::string out = line;
    for (const auto& c : rep.cases) {
        std::snprintf(line, sizeof(line), "  [%s] %-34s max_abs %.3e  max_rel %.3e  tol %.1e\n",
                      c.pass ? "PASS" : "FAIL", c.id.c_str(), c.max_abs_err, c.max_rel_err,
                      c.tolerance);
        out += line;
    }
    if (rep.sign) {
        std::snprintf(line, sizeof(line),
                      "  ladder sign: %s (winning residual %.3e, losing odd-r residual %.3e)\n",
                      rep.sign->chosen == LadderSign::plus_r ? "+r" : "(-1)^r r",
                      rep.sign->winning_max, rep.sign->losing_min_odd);
        out += line;
    }
    out += rep.passed() ? "result: PASS\n" : "result: FAIL\n";
    return out;
}

} // namespace treeharm
