#include <CLI11.hpp>

#include <future>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>

#include <lagspec/io.hpp>

using namespace lagspec;

namespace {

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Options {
    long a = 0, b = 0;
    std::string cls;
    std::optional<long> k, t;
    long kmax = 8;
    long nmin = 1000, nmax = 1000000;
    std::string format = "table";
    int digits = -1;
    bool exact = false;
    bool one_sided = false;
    std::string grid;
    std::string p = "0", q = "0";
    long field = 0;
};

int decimal_digits(const Options& o) { return o.digits > 0 ? o.digits : (o.format == "json" ? 20 : 15); }

PeriodTwoAlpha alpha_from(const Options& o) {
    if (o.a == 0 || o.b == 0) throw usage_error("--a and --b are required");
    return make_alpha(o.a, o.b);
}

std::vector<std::pair<long, long>> grid_from(const Options& o) {
    if (o.grid.empty()) {
        if (o.a && o.b) return {{o.a, o.b}};
        return covered_grid(2, 14, 3, 14);
    }
    std::smatch mt;
    static const std::regex re(R"(\s*(\d+)\.\.(\d+)\s*,\s*(\d+)\.\.(\d+)\s*)");
    if (!std::regex_match(o.grid, mt, re)) throw usage_error("--grid must look like amin..amax,bmin..bmax");
    return covered_grid(std::stol(mt[1]), std::stol(mt[2]), std::stol(mt[3]), std::stol(mt[4]));
}

ClassId class_from(const Options& o) {
    if (o.cls.empty()) throw usage_error("--class is required");
    std::string f = o.cls;
    ClassId c{f, o.k, o.t};
    // S0 in the even-a, odd-b regime is the k = 0 member of Sk
    if (f == "S0" && o.a % 2 == 0 && o.a >= 4 && o.b % 2 != 0) c = ClassId{"Sk", 0, std::nullopt};
    return c;
}

std::string dec(const QuadNum& x, int d) { return qnum_decimal(x, d).text; }

void print_table(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> w(head.size());
    for (size_t i = 0; i < head.size(); ++i) w[i] = head[i].size();
    for (const auto& r : rows)
        for (size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
    auto line = [&](const std::vector<std::string>& r) {
        for (size_t i = 0; i < r.size(); ++i) std::cout << std::left << std::setw(static_cast<int>(w[i]) + 2) << r[i];
        std::cout << "\n";
    };
    line(head);
    for (const auto& r : rows) line(r);
}

int cmd_catalog(const Options& o) {
    auto al = alpha_from(o);
    auto cat = spectrum_catalog(al, o.kmax);
    int d = decimal_digits(o);
    if (o.format == "json") {
        std::cout << to_json(cat, d).dump(2) << "\n";
    } else if (o.format == "csv") {
        std::cout << catalog_csv(cat, d);
    } else {
        std::vector<std::vector<std::string>> rows;
        for (const auto& p : cat.points)
            rows.push_back({point_label(p.cls, p.kind == PointKind::limit_point), to_string(p.kind), to_string(p.direction), dec(p.m_star, d),
                            dec(p.m, d)});
        std::cout << "(a,b) = (" << al.a << "," << al.b << "), rho* class " << delta_label(cat.named_rho) << ", kmax " << cat.truncation_k
                  << "\n";
        print_table({"label", "kind", "direction", "M*", "M"}, rows);
        for (const auto& s : cat.anomalies) std::cout << "anomaly: " << s << "\n";
    }
    return 0;
}

struct VerifyRow {
    long a, b;
    std::string label;
    bool ok;
    std::string detail;
};

std::vector<VerifyRow> verify_point(long a, long b, long kmax) {
    std::vector<VerifyRow> out;
    auto al = make_alpha(a, b);
    for (const auto& c : applicable_classes(al, kmax)) {
        QuadNum v = class_value(c, al);
        bool ok = true;
        std::string detail;
        for (const auto& f : delta_branches(c, al))
            if (!(f == v)) {
                ok = false;
                detail = "closed form " + qnum_decimal(f, 15).text + " vs evaluator " + qnum_decimal(v, 15).text;
            }
        for (const auto& alt : class_periods(c, al))
            if (!(m_star(alt, al) == v)) {
                ok = false;
                detail = "alternative period disagrees";
            }
        out.push_back({a, b, delta_label(c), ok, detail});
    }
    return out;
}

int cmd_verify(const Options& o) {
    long kmax = o.kmax;
    std::vector<VerifyRow> rows;
    for (auto [a, b] : grid_from(o)) {
        auto r = verify_point(a, b, kmax);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    long fails = 0;
    json arr = json::array();
    for (const auto& r : rows) {
        if (!r.ok) ++fails;
        if (o.format == "json") arr.push_back(json{{"a", r.a}, {"b", r.b}, {"class", r.label}, {"pass", r.ok}, {"detail", r.detail}});
        else if (o.format == "csv") std::cout << r.a << "," << r.b << "," << csv_escape(r.label) << "," << (r.ok ? "pass" : "fail") << "\n";
        else std::cout << (r.ok ? "PASS " : "FAIL ") << "(" << r.a << "," << r.b << ") " << r.label << (r.ok ? "" : "  " + r.detail) << "\n";
    }
    if (o.format == "json") std::cout << json{{"results", arr}, {"failures", fails}, {"total", rows.size()}}.dump(2) << "\n";
    else if (o.format == "table") std::cout << rows.size() - static_cast<size_t>(fails) << "/" << rows.size() << " classes pass\n";
    return fails ? 1 : 0;
}

int cmd_oracle(const Options& o) {
    auto al = alpha_from(o);
    ClassId c = class_from(o);
    TSequence ts = class_tsequence(c, al);
    QuadNum g = gamma_mod1(ts, al);
    QuadNum target = m_value(m_star(ts, al), al);
    int d = decimal_digits(o);
    bool windowed = o.nmin != 1000 || o.nmax != 1000000;
    std::vector<std::pair<long, long>> windows = windowed ? std::vector<std::pair<long, long>>{{o.nmin, o.nmax}} : default_windows();
    if (o.nmin < 1 || o.nmax < o.nmin) throw usage_error("need 1 <= --nmin <= --nmax");
    LiminfReport rep = liminf_estimate(al.eta, g, windows, o.exact, !o.one_sided);
    for (auto& w : rep.windows) attach_target(w, target);
    if (o.format == "json") {
        json j = to_json(rep, d);
        j["class"] = delta_label(c);
        j["gamma"] = to_json(g, d);
        j["target_m"] = to_json(target, d);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "(a,b) = (" << al.a << "," << al.b << "), class " << delta_label(c) << ", M = " << dec(target, d) << "\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& w : rep.windows) {
            std::ostringstream gap;
            gap << std::setprecision(3) << std::scientific << w.relative_gap.value_or(0.0);
            rows.push_back({std::to_string(w.n_lo) + ".." + std::to_string(w.n_hi), dec(w.window_min, d), std::to_string(w.argmin_n), gap.str()});
        }
        print_table({"window", "min", "argmin_n", "rel_gap"}, rows);
        std::cout << "stabilized: " << (rep.stabilized ? "yes" : "no") << "\n";
    }
    return 0;
}

int cmd_sweep(const Options& o) {
    auto grid = grid_from(o);
    int d = decimal_digits(o);
    struct Row {
        long a, b;
        std::string rho_class;
        QuadNum rho, rho2, gap, limit;
    };
    std::vector<std::future<Row>> jobs;
    for (auto [a, b] : grid)
        jobs.push_back(std::async(std::launch::async, [a, b, &o] {
            auto cat = spectrum_catalog(make_alpha(a, b), o.kmax);
            return Row{a, b, delta_label(cat.named_rho), cat.points[0].m_star, cat.points[1].m_star, isolation_gap(cat), cat.first_limit_point};
        }));
    std::vector<Row> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back(json{{"a", r.a}, {"b", r.b}, {"rho_star_class", r.rho_class}, {"rho_star", to_json(r.rho, d)},
                               {"rho2_star", to_json(r.rho2, d)}, {"gap", to_json(r.gap, d)}, {"first_limit_point", to_json(r.limit, d)}});
        std::cout << arr.dump(2) << "\n";
    } else if (o.format == "csv") {
        std::cout << "a,b,rho_star_class,rho_star,rho2_star,gap,first_limit_point\n";
        for (const auto& r : rows)
            std::cout << r.a << "," << r.b << "," << csv_escape(r.rho_class) << "," << dec(r.rho, d) << "," << dec(r.rho2, d) << "," << dec(r.gap, d)
                      << "," << dec(r.limit, d) << "\n";
    } else {
        std::vector<std::vector<std::string>> t;
        for (const auto& r : rows)
            t.push_back({std::to_string(r.a), std::to_string(r.b), r.rho_class, dec(r.rho, d), dec(r.rho2, d), dec(r.gap, d), dec(r.limit, d)});
        print_table({"a", "b", "rho*", "M*", "rho2*", "gap", "limit"}, t);
    }
    return 0;
}

int cmd_ncf(const Options& o) {
    QuadNum x;
    if (o.field != 0) {
        x = QuadNum(parse_rational(o.p), parse_rational(o.q), o.field);
    } else {
        x = alpha_from(o).eta;
    }
    auto e = ncf_expand(x);
    if (o.format == "json") {
        json j = to_json(e);
        j["x"] = to_json(x, decimal_digits(o));
        std::cout << j.dump(2) << "\n";
    } else {
        auto list = [](const std::vector<long>& v) {
            std::string s;
            for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
            return s;
        };
        std::cout << "[" << e.integer_part.get_str() << "; " << (e.preperiod.empty() ? "" : list(e.preperiod) + ", ") << "(" << list(e.period)
                  << ") repeating]-\n";
    }
    return 0;
}

int cmd_euclid(const Options& o) {
    auto al = alpha_from(o);
    auto r = euclidean_test(al, o.kmax);
    int d = decimal_digits(o);
    if (o.format == "json") {
        std::cout << to_json(r, d).dump(2) << "\n";
    } else {
        std::cout << "rho = " << dec(r.rho, d) << "\nthreshold = " << dec(r.threshold, d) << "\nnorm-Euclidean: " << (r.verdict ? "yes" : "no")
                  << "\npoints above threshold: " << r.points_above << (r.count_complete ? "" : " (catalogue does not reach below the threshold)")
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact inhomogeneous spectrum values for period-two negative continued fractions"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* s) {
        s->add_option("--a", o.a, "first partial quotient");
        s->add_option("--b", o.b, "second partial quotient");
        s->add_option("--kmax", o.kmax, "largest family index listed")->check(CLI::NonNegativeNumber);
        s->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv", "table"}));
        s->add_option("--digits", o.digits, "decimal digits (default 15, JSON 20)")->check(CLI::PositiveNumber);
        s->add_option("--grid", o.grid, "amin..amax,bmin..bmax");
    };
    auto* catalog = app.add_subcommand("catalog", "ordered spectrum above the first limit point");
    auto* verify = app.add_subcommand("verify", "closed forms against the evaluator");
    auto* oracle = app.add_subcommand("oracle", "brute-force liminf windows for a class");
    auto* sweep = app.add_subcommand("sweep", "summary rows over a grid");
    auto* ncf = app.add_subcommand("ncf", "negative continued fraction of p + q sqrt(N), or of eta(a,b)");
    auto* euclid = app.add_subcommand("euclid", "norm-Euclidean criterion");
    for (auto* s : {catalog, verify, oracle, sweep, ncf, euclid}) common(s);
    for (auto* s : {oracle}) {
        s->add_option("--class", o.cls, "family symbol, e.g. Sk1, S-2, S0t");
        s->add_option("--k", o.k, "family index");
        s->add_option("--t", o.t, "t for S0t");
        s->add_option("--nmin", o.nmin, "window start");
        s->add_option("--nmax", o.nmax, "window end");
        s->add_flag("--exact", o.exact, "evaluate every term exactly");
        s->add_flag("--one-sided", o.one_sided, "positive n only");
    }
    ncf->add_option("--p", o.p, "rational part");
    ncf->add_option("--q", o.q, "coefficient of sqrt(N)");
    ncf->add_option("--N", o.field, "field constant");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        // the equivalence check runs k <= 4 unless asked otherwise
        if (verify->parsed() && verify->count("--kmax") == 0) o.kmax = 4;
        if (catalog->parsed()) return cmd_catalog(o);
        if (verify->parsed()) return cmd_verify(o);
        if (oracle->parsed()) return cmd_oracle(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (ncf->parsed()) return cmd_ncf(o);
        if (euclid->parsed()) return cmd_euclid(o);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
