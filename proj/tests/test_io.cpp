#include <gtest/gtest.h>

#include <sstream>

#include <lagspec/io.hpp>

using namespace lagspec;

TEST(Io, QuadNumRoundTrip) {
    for (auto [a, b] : std::vector<std::pair<long, long>>{{4, 8}, {5, 7}, {2, 9}, {12, 18}}) {
        auto al = make_alpha(a, b);
        for (const QuadNum& x : {al.eta, al.beta, al.D, QuadNum(mpq_class(-3, 7))}) {
            json j = to_json(x);
            EXPECT_EQ(quadnum_from_json(json::parse(j.dump())), x);
        }
    }
    EXPECT_THROW(parse_rational("x/2"), std::invalid_argument);
}

TEST(Io, QuadNumShape) {
    json j = to_json(QuadNum(4, -1, 14), 6);
    EXPECT_EQ(j["p"], "4/1");
    EXPECT_EQ(j["q"], "-1/1");
    EXPECT_EQ(j["N"], 14);
    EXPECT_EQ(j["approx"], "0.258343");
}

TEST(Io, CatalogSchema) {
    auto cat = spectrum_catalog(make_alpha(5, 10), 4);
    json j = to_json(cat);
    for (const char* key : {"a", "b", "N", "rho_star", "rho_star_class", "first_limit_point", "limit_family", "points", "families",
                            "kmax", "anomalies", "odd_params"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["kmax"], 4);
    EXPECT_EQ(j["rho_star_class"], "delta_{-2}");
    EXPECT_EQ(j["odd_params"]["r"], 10);
    for (const auto& p : j["points"]) {
        for (const char* key : {"label", "class", "m_star", "m", "kind", "direction", "k"}) EXPECT_TRUE(p.contains(key)) << key;
        EXPECT_EQ(quadnum_from_json(p["m_star"]), QuadNum(4) * (QuadNum(1) - cat.alpha.D) * quadnum_from_json(p["m"]));
    }
    // keys come out sorted, so dumps are stable
    std::string prev;
    for (auto it = j.begin(); it != j.end(); ++it) {
        EXPECT_LT(prev, it.key());
        prev = it.key();
    }
    EXPECT_FALSE(to_json(spectrum_catalog(make_alpha(4, 8), 4)).contains("odd_params"));
}

TEST(Io, PointValuesMatchCatalog) {
    auto cat = spectrum_catalog(make_alpha(4, 7), 4);
    json j = to_json(cat);
    ASSERT_EQ(j["points"].size(), cat.points.size());
    for (size_t i = 0; i < cat.points.size(); ++i) {
        EXPECT_EQ(quadnum_from_json(j["points"][i]["m_star"]), cat.points[i].m_star);
        EXPECT_EQ(quadnum_from_json(j["points"][i]["m"]), cat.points[i].m);
    }
}

TEST(Io, CatalogCsv) {
    auto cat = spectrum_catalog(make_alpha(4, 8), 3);
    std::istringstream is(catalog_csv(cat));
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "a,b,label,k,kind,direction,m_star,m");
    size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        auto comma = line.rfind(',');
        EXPECT_EQ(line.size() - comma - 1 - line.substr(comma + 1).find('.') - 1, 15u) << line;
    }
    EXPECT_EQ(rows, cat.points.size());
    EXPECT_EQ(csv_escape("S_{k,4}"), "\"S_{k,4}\"");
    EXPECT_EQ(csv_escape("plain"), "plain");
}

TEST(Io, OracleAndEuclid) {
    auto al = make_alpha(4, 8);
    auto rep = brute_force_min(al, al.beta, 10, 200);
    json j = to_json(rep);
    EXPECT_EQ(j["n_lo"], 10);
    EXPECT_TRUE(j["target_m"].is_null());
    EXPECT_TRUE(j["two_sided"].get<bool>());
    json e = to_json(euclidean_test(al, 4));
    EXPECT_FALSE(e["verdict"].get<bool>());
    EXPECT_EQ(to_json(ncf_expand(al.eta))["period"], (json{4, 8}));
}
