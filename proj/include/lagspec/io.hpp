#pragma once

#include <json.hpp>

#include <sstream>
#include <string>

#include "ncf.hpp"
#include "oracle.hpp"
#include "spectrum.hpp"

namespace lagspec {

using json = nlohmann::json;

/// {"p": "num/den", "q": "num/den", "N": int, "approx": decimal string}
inline json to_json(const QuadNum& x, int digits = 20) {
    return json{{"p", rational_str(x.p())}, {"q", rational_str(x.q())}, {"N", x.N()}, {"approx", qnum_decimal(x, digits).text}};
}

inline mpq_class parse_rational(const std::string& s) {
    mpq_class v;
    if (v.set_str(s, 10) != 0) throw std::invalid_argument("bad rational '" + s + "'");
    v.canonicalize();
    return v;
}

inline QuadNum quadnum_from_json(const json& j) {
    mpq_class p = parse_rational(j.at("p").get<std::string>());
    mpq_class q = parse_rational(j.at("q").get<std::string>());
    long n = j.at("N").get<long>();
    if (sgn(q) == 0) return QuadNum(p);
    return QuadNum(p, q, n);
}

inline json to_json(const ClassId& c) {
    json j{{"family", c.family}, {"label", class_label(c)}};
    j["k"] = c.k ? json(*c.k) : json(nullptr);
    j["t"] = c.t ? json(*c.t) : json(nullptr);
    return j;
}

inline json to_json(const SpectrumPoint& p, int digits = 20) {
    json j{{"label", point_label(p.cls, p.kind == PointKind::limit_point)},
           {"class", to_json(p.cls)},
           {"m_star", to_json(p.m_star, digits)},
           {"m", to_json(p.m, digits)},
           {"kind", to_string(p.kind)},
           {"direction", to_string(p.direction)}};
    j["k"] = p.cls.k ? json(*p.cls.k) : json(nullptr);
    if (p.closed_form) {
        j["closed_form"] = to_json(*p.closed_form, digits);
        j["closed_form_agrees"] = p.closed_form_agrees;
    }
    if (!p.coincident.empty()) {
        json c = json::array();
        for (const auto& x : p.coincident) c.push_back(delta_label(x));
        j["coincident"] = c;
    }
    return j;
}

inline json to_json(const SpectrumCatalog& cat, int digits = 20) {
    json pts = json::array();
    for (const auto& p : cat.points) pts.push_back(to_json(p, digits));
    json fams = json::array();
    for (const auto& f : cat.families) fams.push_back(json{{"family", f.family}, {"kmin", f.kmin}, {"direction", to_string(f.direction)}});
    json j{{"a", cat.alpha.a},
           {"b", cat.alpha.b},
           {"N", cat.alpha.N},
           {"rho_star", to_json(cat.points.front().m_star, digits)},
           {"rho_star_class", delta_label(cat.named_rho)},
           {"first_limit_point", to_json(cat.first_limit_point, digits)},
           {"limit_family", cat.limit_family},
           {"points", pts},
           {"families", fams},
           {"kmax", cat.truncation_k},
           {"anomalies", cat.anomalies}};
    if (regime_of(cat.alpha) == Regime::odd_a) {
        OddParams op = odd_params(cat.alpha);
        j["odd_params"] = json{{"m", op.m}, {"n", op.n}, {"s", op.s}, {"r", op.r}};
    }
    return j;
}

inline json to_json(const OracleReport& r, int digits = 20) {
    json j{{"n_lo", r.n_lo}, {"n_hi", r.n_hi}, {"window_min", to_json(r.window_min, digits)}, {"argmin_n", r.argmin_n},
           {"exact_scan", r.exact_scan}, {"two_sided", r.two_sided}};
    j["target_m"] = r.target_m ? to_json(*r.target_m, digits) : json(nullptr);
    j["relative_gap"] = r.relative_gap ? json(*r.relative_gap) : json(nullptr);
    return j;
}

inline json to_json(const LiminfReport& r, int digits = 20) {
    json w = json::array();
    for (const auto& x : r.windows) w.push_back(to_json(x, digits));
    return json{{"windows", w}, {"stabilized", r.stabilized}, {"value", to_json(r.value, digits)}};
}

inline json to_json(const EuclidResult& r, int digits = 20) {
    return json{{"rho", to_json(r.rho, digits)},
                {"threshold", to_json(r.threshold, digits)},
                {"verdict", r.verdict},
                {"points_above", r.points_above},
                {"count_complete", r.count_complete}};
}

inline json to_json(const NcfExpansion& e) {
    return json{{"integer_part", e.integer_part.get_str()}, {"preperiod", e.preperiod}, {"period", e.period}};
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

/// One row per point; decimal columns only.
inline std::string catalog_csv(const SpectrumCatalog& cat, int digits = 15) {
    std::ostringstream os;
    os << "a,b,label,k,kind,direction,m_star,m\n";
    for (const auto& p : cat.points) {
        os << cat.alpha.a << "," << cat.alpha.b << "," << csv_escape(point_label(p.cls, p.kind == PointKind::limit_point)) << ","
           << (p.cls.k ? std::to_string(*p.cls.k) : std::string()) << "," << to_string(p.kind) << "," << to_string(p.direction) << ","
           << qnum_decimal(p.m_star, digits).text << "," << qnum_decimal(p.m, digits).text << "\n";
    }
    return os.str();
}

}  // namespace lagspec
