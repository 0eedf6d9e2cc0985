#include <gtest/gtest.h>

#include <cmath>

#include <lagspec/oracle.hpp>
#include <lagspec/spectrum.hpp>

using namespace lagspec;

namespace {

// n ||n x - g|| in long double; an independent low-precision cross-check
long double float_term(long double x, long double g, long n) {
    long double v = static_cast<long double>(n) * x - g;
    long double f = v - std::floor(v);
    return static_cast<long double>(n) * std::min(f, 1 - f);
}

QuadNum class_gamma(const ClassId& c, const PeriodTwoAlpha& al) { return gamma_mod1(class_tsequence(c, al), al); }

}  // namespace

TEST(Oracle, NearestIntegerDistance) {
    EXPECT_EQ(nearest_int_distance(QuadNum(mpq_class(7, 4))), QuadNum(mpq_class(1, 4)));
    EXPECT_EQ(nearest_int_distance(QuadNum(mpq_class(-7, 4))), QuadNum(mpq_class(1, 4)));
    EXPECT_EQ(nearest_int_distance(QuadNum(3)), QuadNum(0));
    QuadNum r2(0, 1, 2);
    EXPECT_EQ(nearest_int_distance(r2), QuadNum(0) - QuadNum(1) + r2);
}

TEST(Oracle, GammaInLatticeGivesZero) {
    auto al = make_alpha(4, 8);
    auto rep = brute_force_min(al, al.eta, 1, 50);
    EXPECT_EQ(rep.window_min, QuadNum(0));
    EXPECT_EQ(rep.argmin_n, 1);
}

TEST(Oracle, HybridMatchesExactScan) {
    for (auto [a, b] : std::vector<std::pair<long, long>>{{4, 8}, {5, 7}, {2, 6}, {3, 5}}) {
        auto al = make_alpha(a, b);
        auto lay = expected_layout(al);
        QuadNum g = class_gamma(lay.rho, al);
        for (bool two : {false, true}) {
            auto fast = brute_force_min(al, g, 900, 2500, false, two);
            auto slow = brute_force_min(al, g, 900, 2500, true, two);
            EXPECT_EQ(fast.window_min, slow.window_min) << a << "," << b;
            EXPECT_EQ(fast.argmin_n, slow.argmin_n) << a << "," << b;
            EXPECT_EQ(fast.window_min, oracle_term(al.eta, fast.argmin_n > 0 ? g : -g, std::labs(fast.argmin_n)));
        }
    }
}

TEST(Oracle, AgreesWithFloatScan) {
    auto al = make_alpha(4, 7);
    QuadNum g = class_gamma(ClassId{"Sk", 0, std::nullopt}, al);
    long double x = std::stold(qnum_decimal(al.eta, 30).text), gd = std::stold(qnum_decimal(g, 30).text);
    long double best = 1e9;
    for (long n = 1000; n <= 20000; ++n) best = std::min(best, float_term(x, gd, n));
    auto rep = brute_force_min(al, g, 1000, 20000, false, false);
    EXPECT_NEAR(static_cast<double>(best), qnum_to_double(rep.window_min), 1e-9);
}

TEST(Oracle, FourEightWindow) {
    auto al = make_alpha(4, 8);
    ClassId c{"Sk1", 0, std::nullopt};
    auto rep = brute_force_min(al, class_gamma(c, al), 1000, 1000000);
    attach_target(rep, m_value(class_value(c, al), al));
    ASSERT_TRUE(rep.relative_gap.has_value());
    EXPECT_LT(*rep.relative_gap, 1e-2);
    EXPECT_EQ(qnum_decimal(rep.window_min, 3).text, "0.167");
}

TEST(Oracle, SignSymmetry) {
    auto al = make_alpha(5, 9);
    QuadNum g = class_gamma(ClassId{"S0", std::nullopt, std::nullopt}, al);
    auto plus = brute_force_min(al, g, 1000, 200000);
    auto minus = brute_force_min(al, -g + QuadNum(1), 1000, 200000);
    EXPECT_EQ(plus.window_min, minus.window_min);
    // the two-sided minimum is the smaller of the two one-sided scans
    auto p1 = brute_force_min(al, g, 1000, 200000, false, false);
    auto m1 = brute_force_min(al, g - QuadNum(1), 1000, 200000, false, false);
    EXPECT_EQ(plus.window_min, std::min(p1.window_min, brute_force_min(al, -g, 1000, 200000, false, false).window_min));
    EXPECT_EQ(m1.window_min, brute_force_min(al, -QuadNum(1) + g, 1000, 200000, true, false).window_min);
    QuadNum m = m_value(class_value(ClassId{"S0", std::nullopt, std::nullopt}, al), al);
    EXPECT_LT(std::abs(qnum_to_double((plus.window_min - m) / m)), 1e-2);
}

TEST(Oracle, LiminfStabilises) {
    auto al = make_alpha(4, 7);
    ClassId c{"Sk", 0, std::nullopt};
    QuadNum target = m_value(class_value(c, al), al);
    auto rep = liminf_estimate(al.eta, class_gamma(c, al), {{100, 1000}, {1000, 10000}, {10000, 100000}});
    ASSERT_EQ(rep.windows.size(), 3u);
    EXPECT_TRUE(rep.stabilized);
    EXPECT_EQ(qnum_decimal(rep.windows[1].window_min, 3).text, qnum_decimal(rep.windows[2].window_min, 3).text);
    // periodic gamma: window minima sit just below or at M and approach it
    for (const auto& w : rep.windows) EXPECT_LT(std::abs(qnum_to_double((w.window_min - target) / target)), 1e-2);
}

TEST(Oracle, WindowErrors) {
    auto al = make_alpha(4, 8);
    EXPECT_THROW(brute_force_min(al, QuadNum(0), 0, 10), std::invalid_argument);
    EXPECT_THROW(brute_force_min(al, QuadNum(0), 10, 5), std::invalid_argument);
    EXPECT_THROW(liminf_estimate(al.eta, QuadNum(0), {}), std::invalid_argument);
    EXPECT_THROW(liminf_estimate(al.eta, QuadNum(0), {{10, 100}, {50, 200}}), std::invalid_argument);
    EXPECT_EQ(default_windows().size(), 3u);
}
