#include <gtest/gtest.h>

#include <cmath>

#include <lagspec/spectrum.hpp>

using namespace lagspec;

namespace {

TSequence periodic(std::vector<long> t) {
    TSequence s;
    s.period = std::move(t);
    return s;
}

// d_i^+ written straight from the series: one period closed with the
// geometric factor; shares no code with the library
QuadNum series_d_plus(const std::vector<long>& t, long i, const PeriodTwoAlpha& al) {
    long L = static_cast<long>(t.size());
    auto at = [&](long k) { return t[static_cast<size_t>(((k - 1) % L + L) % L)]; };
    QuadNum alpha_i = (i % 2 != 0) ? al.beta : al.eta;
    QuadNum sum(0), pw(1);
    for (long j = 0; j < L / 2; ++j) {
        sum = sum + (QuadNum(at(i + 2 * j + 1)) * alpha_i + QuadNum(at(i + 2 * j + 2)) * al.D) * pw;
        pw = pw * al.D;
    }
    return sum / (QuadNum(1) - pw);
}

QuadNum series_d_minus(const std::vector<long>& t, long i, const PeriodTwoAlpha& al) {
    long L = static_cast<long>(t.size());
    auto at = [&](long k) { return t[static_cast<size_t>(((k - 1) % L + L) % L)]; };
    QuadNum alpha_m = ((i - 1) % 2 != 0) ? al.beta : al.eta;
    QuadNum sum(0), pw(1);
    for (long j = 0; j < L / 2; ++j) {
        sum = sum + (QuadNum(at(i - 2 * j)) * alpha_m + QuadNum(at(i - 2 * j - 1)) * al.D) * pw;
        pw = pw * al.D;
    }
    return sum / (QuadNum(1) - pw);
}

// min over cuts of all four s-functions, no reflection; valid without t = a entries
QuadNum four_function_min(const std::vector<long>& t, const PeriodTwoAlpha& al) {
    QuadNum best;
    bool have = false;
    const QuadNum one(1);
    for (long i = 1; i <= static_cast<long>(t.size()); ++i) {
        QuadNum ai = (i % 2 != 0) ? al.beta : al.eta, am = (i % 2 != 0) ? al.eta : al.beta;
        QuadNum p = series_d_plus(t, i, al), m = series_d_minus(t, i, al);
        for (const QuadNum& v : {(one - ai + p) * (one - am + m), (one + ai - p) * (one + am + m), (one - ai - p) * (one - am - m),
                                 (one + ai + p) * (one + am - m)}) {
            if (!have || v < best) best = v;
            have = true;
        }
    }
    return best;
}

std::vector<std::pair<PeriodTwoAlpha, TSequence>> catalogue_sequences(long bmax, long kmax) {
    std::vector<std::pair<PeriodTwoAlpha, TSequence>> out;
    for (auto [a, b] : covered_grid(2, bmax, 3, bmax)) {
        auto al = make_alpha(a, b);
        for (const auto& c : applicable_classes(al, kmax))
            for (const auto& s : class_periods(c, al)) out.emplace_back(al, s);
    }
    return out;
}

}  // namespace

TEST(Blocks, DigitExamples) {
    auto al47 = make_alpha(4, 7);
    EXPECT_EQ(block_pairs({BlockKind::A, 1}, al47), (std::vector<DigitPair>{{1, 3}}));
    auto al57 = make_alpha(5, 7);
    EXPECT_EQ(block_pairs({BlockKind::B, 1}, al57), (std::vector<DigitPair>{{1, 3}}));
    EXPECT_THROW(block_pairs({BlockKind::A, 1}, make_alpha(4, 6)), block_error);
}

TEST(Blocks, TableAgainstDirectFormulas) {
    // digit pairs straight from the table, for every block and admissible t
    for (auto [a, b] : covered_grid(3, 12, 4, 16)) {
        auto al = make_alpha(a, b);
        struct Row {
            BlockKind k;
            long odd2;  // 2 * first digit
            int sign;   // +t or -t in the second digit
            long shift; // extra offset in the second digit numerator
        };
        const Row rows[] = {{BlockKind::A, a - 2, 1, 0},  {BlockKind::Ap, a - 2, -1, 0}, {BlockKind::B, a - 3, 1, 0},
                            {BlockKind::Bp, a - 1, -1, 0}, {BlockKind::C, a - 4, 1, 0},  {BlockKind::Cp, a, -1, 0},
                            {BlockKind::E, a - 5, 1, 0},  {BlockKind::Ep, a + 1, -1, 0}, {BlockKind::F, 2 * (a - 1), -1, 0},
                            {BlockKind::Fp, 2 * (a - 1), 1, -4}};
        for (const auto& r : rows)
            for (long t = -b; t <= b; ++t) {
                long second2 = b - 2 + r.sign * t + r.shift;
                bool ok = r.odd2 % 2 == 0 && second2 % 2 == 0 && r.odd2 >= 0 && r.odd2 / 2 <= a - 1 && second2 >= 0 && second2 / 2 <= b - 1;
                if (ok) {
                    auto pairs = block_pairs({r.k, t}, al);
                    ASSERT_EQ(pairs.size(), 1u);
                    EXPECT_EQ(pairs[0], (DigitPair{r.odd2 / 2, second2 / 2})) << block_name({r.k, t}) << " at " << a << "," << b;
                } else {
                    EXPECT_THROW(block_pairs({r.k, t}, al), block_error) << block_name({r.k, t}) << " at " << a << "," << b;
                }
            }
    }
}

TEST(Blocks, ThreeFiveSpecials) {
    auto al = make_alpha(3, 5);
    // G = ((b-3)/2, a-1, (b-3)/2) starting on an even index; H = ((a-1)/2, (b-5)/2, a-1, (b-3)/2) read as a run
    auto g = block_digits({BlockKind::G, 0}, al);
    EXPECT_FALSE(g.starts_odd);
    EXPECT_EQ(g.digits, (std::vector<long>{1, 2, 1}));
    auto s = parse_period("H G H' G", al);
    EXPECT_EQ(s.size() % 2, 0);
    validate(s, al);
}

TEST(TSeq, FromBlocksExamples) {
    auto al47 = make_alpha(4, 7);
    auto s = tseq_from_blocks({{BlockKind::A, 1}, {BlockKind::A, 1}, {BlockKind::Ap, 1}, {BlockKind::Ap, 1}}, al47);
    EXPECT_EQ(s.period, (std::vector<long>{0, 1, 0, 1, 0, -1, 0, -1}));
    EXPECT_EQ(tseq_from_blocks({{BlockKind::A, 0}}, make_alpha(4, 8)).period, (std::vector<long>{0, 0}));
    EXPECT_EQ(tseq_from_blocks({{BlockKind::C, 3}}, make_alpha(8, 13)).period, (std::vector<long>{-2, 3}));
    EXPECT_EQ(parse_period("A1 A1 A1' A1'", al47), s);
    EXPECT_EQ(parse_period("(A1)^2 (A1')^2", al47), s);
    EXPECT_EQ(parse_period("t:(0,1,0,1,0,-1,0,-1)", al47), s);
    EXPECT_THROW(parse_period("t:(0,1,0)", al47), sequence_error);
    EXPECT_THROW(parse_period("t:(1,1)", al47), sequence_error);
    EXPECT_THROW(parse_period("t:(0,9)", al47), sequence_error);
}

TEST(TSeq, DigitEncodingRoundTrip) {
    auto al = make_alpha(5, 9);
    for (long i = 1; i <= 4; ++i)
        for (long d = 0; d < al.quotient(i); ++d) {
            long t = t_from_digit(d, i, al);
            EXPECT_EQ(digit_from_t(t, i, al), d);
            EXPECT_EQ((t - al.quotient(i)) % 2, 0);
            EXPECT_LE(t, al.quotient(i));
            EXPECT_GE(t, -(al.quotient(i) - 2));
        }
}

TEST(Gamma, Examples) {
    auto al48 = make_alpha(4, 8);
    // all digits zero: t = -(a_i - 2)
    EXPECT_EQ(gamma_value(periodic({-2, -6}), al48), QuadNum(0));
    // period A_0: digits (1,3)
    QuadNum g = gamma_value(parse_period("A0", al48), al48);
    EXPECT_EQ(g, (al48.eta + QuadNum(3) * al48.D) / (QuadNum(1) - al48.D));
    QuadNum s14(0, 1, 14);
    EXPECT_EQ(qnum_reduce(g), (QuadNum(49) - QuadNum(13) * s14) / (QuadNum(4) * s14 - QuadNum(14)));
    auto al25 = make_alpha(2, 5);
    // digits (0,1) at (2,5): t = (0, -1)
    EXPECT_EQ(gamma_value(periodic({0, -1}), al25), al25.D / (QuadNum(1) - al25.D));
}

TEST(Gamma, PreperiodAndTruncationBound) {
    for (auto [a, b] : covered_grid(2, 9, 3, 11)) {
        auto al = make_alpha(a, b);
        TSequence s;
        s.preperiod = {al.a - 2, -(al.b - 2)};
        s.period = {al.a % 2 == 0 ? 0 : 1, al.b % 2 == 0 ? 2 : 1, al.a, al.b};
        QuadNum exact = gamma_value(s, al);
        // direct partial sums
        QuadNum partial(0), pw(1);
        const QuadNum bound_coef = (QuadNum(a - 1) * al.eta + QuadNum(b - 1) * al.D) / (QuadNum(1) - al.D);
        for (long n = 1; n <= 12; ++n) {
            long i = 2 * n - 1;
            partial += (QuadNum(digit_from_t(s.at(i), i, al)) * al.eta + QuadNum(digit_from_t(s.at(i + 1), i + 1, al)) * al.D) * pw;
            pw *= al.D;
            QuadNum err = exact - partial;
            EXPECT_GE(qnum_sign(err), 0);
            EXPECT_LE(err, bound_coef * pw) << a << "," << b << " n=" << n;
        }
    }
}

TEST(Tails, Examples) {
    // B_m at odd a: d+ at odd i equals v = (m beta - D)/(1 - D)
    for (auto [a, b] : covered_grid(3, 13, 4, 20)) {
        if (a % 2 == 0) continue;
        auto al = make_alpha(a, b);
        auto op = odd_params(al);
        auto s = parse_period("B" + std::to_string(op.m), al);
        EXPECT_EQ(d_plus(s, 1, al), (QuadNum(op.m) * al.beta - al.D) / (QuadNum(1) - al.D)) << a << "," << b;
    }
    auto al47 = make_alpha(4, 7);
    auto zero = periodic({0, 0});
    auto al48 = make_alpha(4, 8);
    for (long i = 1; i <= 4; ++i) {
        EXPECT_EQ(d_plus(zero, i, al48), QuadNum(0));
        EXPECT_EQ(d_minus(zero, i, al48), QuadNum(0));
    }
    // cut before the second A_1 of A1 A1 A1' A1': d- = D(1-D)/(1+D^2)
    auto s = parse_period("A1 A1 A1' A1'", al47);
    const QuadNum& D = al47.D;
    EXPECT_EQ(d_minus(s, 3, al47), D * (QuadNum(1) - D) / (QuadNum(1) + D * D));
}

TEST(Tails, PreperiodRules) {
    auto al = make_alpha(4, 8);
    TSequence s;
    s.preperiod = {2, 4};
    s.period = {0, 0};
    EXPECT_THROW(d_minus(s, 1, al), sequence_error);
    EXPECT_THROW(d_minus(s, 2, al), sequence_error);
    EXPECT_EQ(d_minus(s, 3, al), QuadNum(0));
    // d_0^+ sees the preperiod: alpha_0 = eta
    EXPECT_EQ(d_plus(s, 0, al), QuadNum(2) * al.eta + QuadNum(4) * al.D);
}

TEST(Tails, AgreeWithSeriesAndRecurrence) {
    for (const auto& [al, s] : catalogue_sequences(10, 3)) {
        Tails tl = all_tails(s, al);
        long L = s.size();
        for (long i = 1; i <= L; ++i) {
            QuadNum p = tl.plus[static_cast<size_t>(i - 1)], m = tl.minus[static_cast<size_t>(i - 1)];
            ASSERT_EQ(p, series_d_plus(s.period, i, al));
            ASSERT_EQ(m, series_d_minus(s.period, i, al));
            ASSERT_EQ(p, d_plus(s, i, al));
            QuadNum next = tl.plus[static_cast<size_t>((i + 1) % L)];
            ASSERT_EQ(p, QuadNum(s.at(i + 1)) * al.weight(i) + QuadNum(s.at(i + 2)) * al.D + al.D * next);
        }
    }
}

TEST(SStar, Examples) {
    auto al = make_alpha(4, 8);
    auto z = periodic({0, 0});
    auto sv = s_star(z, 1, al);
    const QuadNum one(1);
    EXPECT_EQ(sv[0], (one - al.eta) * (one - al.beta));
    EXPECT_GT(sv[1], one);
    auto al57 = make_alpha(5, 7);
    auto s = parse_period("B1", al57);
    auto v = s_star(s, 1, al57);
    EXPECT_EQ(v[0], (one - al57.beta + d_plus(s, 1, al57)) * (one - al57.eta + d_minus(s, 1, al57)));
}

TEST(Reflect, Examples) {
    auto al = make_alpha(4, 7);
    EXPECT_EQ(reflect(periodic({0, 1, 0, -1}), al).period, (std::vector<long>{0, -1, 0, 1}));
    auto al48 = make_alpha(4, 8);
    EXPECT_EQ(reflect(periodic({0, 0}), al48).period, (std::vector<long>{0, 0}));
    auto al27 = make_alpha(2, 7);
    EXPECT_EQ(reflect(periodic({2, -3, 2, -1}), al27).period, (std::vector<long>{2, -1, 2, -3}));
    // the primed tail rule at a cut next to t = a: d' = -2 alpha - d
    auto s = periodic({2, -3, 2, -1});
    auto r = reflect(s, al27);
    EXPECT_EQ(d_plus(r, 1, al27), QuadNum(-2) * al27.beta - d_plus(s, 1, al27));
    EXPECT_EQ(d_minus(r, 2, al27), QuadNum(-2) * al27.beta - d_minus(s, 2, al27));
}

TEST(MStar, Examples) {
    auto al48 = make_alpha(4, 8);
    const QuadNum one(1);
    EXPECT_EQ(m_star(periodic({0, 0}), al48), (one - al48.eta) * (one - al48.beta));
    auto al47 = make_alpha(4, 7);
    QuadNum b(7);
    EXPECT_EQ(m_star(parse_period("A1' A1", al47), al47), (one - al47.beta - one / b) * (one - al47.eta + al47.eta / b));
    // (1 - eta)(1 - beta) / (4 (1 - D)) in doubles from eta = 4 - sqrt 14, beta = 2 - sqrt(14)/2
    const double e = 4 - std::sqrt(14.0), bb = 2 - std::sqrt(14.0) / 2, d = e * bb;
    EXPECT_NEAR(qnum_to_double(m_value(m_star(periodic({0, 0}), al48), al48)), (1 - e) * (1 - bb) / (4 * (1 - d)), 1e-12);
    EXPECT_NEAR(qnum_to_double(m_value(m_star(periodic({0, 0}), al48), al48)), 0.16705, 5e-5);
    EXPECT_EQ(m_value(QuadNum(0), al48), QuadNum(0));
    QuadNum x = m_star(parse_period("A1' A1", al47), al47);
    EXPECT_EQ(m_value(x, al47) * QuadNum(4) * (one - al47.D), x);
}

TEST(MStar, PreperiodIgnored) {
    auto al = make_alpha(4, 8);
    TSequence s;
    s.preperiod = {2, 8, -2, 4};
    s.period = {0, 0};
    EXPECT_EQ(m_star(s, al), m_star(periodic({0, 0}), al));
}

TEST(MStar, MatchesFourFunctionReading) {
    long checked = 0;
    for (const auto& [al, s] : catalogue_sequences(12, 3)) {
        if (touches_top(s.period, al)) continue;
        ASSERT_EQ(m_star(s, al), four_function_min(s.period, al)) << al.a << "," << al.b << " " << format_t(s.period);
        ++checked;
    }
    EXPECT_GT(checked, 450);
}

TEST(MStar, ReflectionAndShiftInvariance) {
    for (const auto& [al, s] : catalogue_sequences(14, 3)) {
        QuadNum v = m_star(s, al);
        if (!touches_top(s.period, al)) {
            ASSERT_EQ(m_star(reflect(s, al), al), v) << al.a << "," << al.b << " " << format_t(s.period);
        }
        TSequence r = s;
        for (long k = 2; k < s.size(); k += 2) {
            std::rotate(r.period.begin(), r.period.begin() + 2, r.period.end());
            ASSERT_EQ(m_star(r, al), v) << al.a << "," << al.b << " " << format_t(s.period);
        }
    }
}

TEST(Bounds, Examples) {
    auto al48 = make_alpha(4, 8);
    EXPECT_EQ(upper_bound_inf_ta(al48, 2), al48.beta);
    EXPECT_EQ(upper_bound_inf_t(al48, 2, 2), QuadNum(1) - QuadNum(2) * al48.beta + al48.D);
    auto al25 = make_alpha(2, 5);
    EXPECT_EQ(upper_bound_inf_t(al25, 1, 1), QuadNum(1) - al25.eta + al25.D);
    EXPECT_THROW(upper_bound_inf_t(al48, 2, 9), domain_error);
    EXPECT_THROW(upper_bound_inf_t(al48, 2, -1), domain_error);
}

TEST(Bounds, IdentityOnGrid) {
    for (auto [a, b] : covered_grid(2, 14, 3, 14)) {
        auto al = make_alpha(a, b);
        for (long j = 1; j <= 2; ++j)
            for (long t = 0; t <= al.quotient(j); ++t)
                EXPECT_EQ(upper_bound_inf_t(al, j, t), QuadNum(1) - QuadNum(t) * al.weight(j - 1) + al.D);
    }
}

TEST(Bounds, CatalogueSequencesRespectBounds) {
    for (const auto& [al, s] : catalogue_sequences(12, 3)) {
        QuadNum v = m_star(s, al);
        if (touches_top(s.period, al)) {
            if (al.a == 2) {
                EXPECT_LE(v, al.eta);
            }
            continue;
        }
        long tmax = 0;
        for (long i = 2; i <= s.size(); i += 2) tmax = std::max(tmax, std::abs(s.at(i)));
        EXPECT_LE(v, upper_bound_inf_t(al, 2, tmax)) << al.a << "," << al.b << " " << format_t(s.period);
    }
}
