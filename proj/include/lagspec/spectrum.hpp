#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "expansion.hpp"

namespace lagspec {

class applicability_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Regime { even_a, odd_a, two };

inline Regime regime_of(const PeriodTwoAlpha& al) {
    if (al.a == 2) return Regime::two;
    return al.a % 2 == 0 ? Regime::even_a : Regime::odd_a;
}

/// b = m a + r with 0 < r <= 2a, r even; n = m + 2, s = m - 2 (odd a only).
struct OddParams {
    long m = 0, n = 0, s = 0, r = 0;
};

inline OddParams odd_params(const PeriodTwoAlpha& al) {
    if (al.a % 2 == 0) throw applicability_error("odd-a parameters need odd a");
    OddParams p;
    for (long m = al.b / al.a; m >= 0; --m) {
        long r = al.b - m * al.a;
        if (r > 0 && r <= 2 * al.a && r % 2 == 0) {
            p.m = m;
            p.r = r;
            break;
        }
    }
    p.n = p.m + 2;
    p.s = p.m - 2;
    return p;
}

/**
 * A class of gamma by family symbol. Families:
 *   even a, b odd: Sk (k >= 0), S-1, S-2
 *   even a, b even: Sk1..Sk7, S-1, S-2
 *   odd a: S0, S-1..S-9, Sk1..Sk12
 *   a = 2: S0t (with t), S-1, S-2, S2k, S2k+1
 */
struct ClassId {
    std::string family;
    std::optional<long> k;
    std::optional<long> t;
    bool operator==(const ClassId&) const = default;
};

inline std::string class_label(const ClassId& c) {
    const std::string& f = c.family;
    auto kk = [&] { return c.k ? std::to_string(*c.k) : std::string("k"); };
    if (f == "Sk") return "S_{" + kk() + "}";
    if (f == "S0t") return "S_{0," + (c.t ? std::to_string(*c.t) : std::string("t")) + "}";
    if (f == "S2k") return c.k ? "S_{" + std::to_string(2 * *c.k) + "}" : "S_{2k}";
    if (f == "S2k+1") return c.k ? "S_{" + std::to_string(2 * *c.k + 1) + "}" : "S_{2k+1}";
    if (f.size() > 2 && f.compare(0, 2, "Sk") == 0) return "S_{" + kk() + "," + f.substr(2) + "}";
    if (f.size() > 1 && f[0] == 'S') return "S_{" + f.substr(1) + "}";
    return f;
}

inline std::string delta_label(const ClassId& c) {
    std::string s = class_label(c);
    return "delta" + s.substr(1);
}

inline std::string limit_label(const std::string& family) {
    if (family.size() > 2 && family.compare(0, 2, "Sk") == 0) return "delta_{inf," + family.substr(2) + "}";
    return "delta_{inf}";
}

inline std::string point_label(const ClassId& c, bool limit) { return limit ? limit_label(c.family) : delta_label(c); }

namespace detail {

/// The closed forms and periods of one class, every branch whose condition holds.
struct Resolved {
    std::vector<std::string> periods;  // notation accepted by parse_period
    std::vector<QuadNum> forms;
};

struct Sym {
    const PeriodTwoAlpha& al;
    bool limit;
    QuadNum e, B, D, one{1};
    Sym(const PeriodTwoAlpha& a, bool lim) : al(a), limit(lim), e(a.eta), B(a.beta), D(a.D) {}
    // a k-dependent power of D; vanishes in the limit k -> infinity
    QuadNum P(long n) const { return limit ? QuadNum(0) : D.pow(static_cast<unsigned>(n)); }
};

inline QuadNum rat(long p, long q = 1) { return QuadNum(mpq_class(p, q)); }

// p + q sqrt(d) written in alpha's field; d N must be a perfect square
inline QuadNum radical(const mpq_class& p, const mpq_class& q, long d, const PeriodTwoAlpha& al) {
    mpz_class dn = mpz_class(d) * al.N, root;
    if (!mpz_perfect_square_p(dn.get_mpz_t())) throw applicability_error("radical outside the field");
    mpz_sqrt(root.get_mpz_t(), dn.get_mpz_t());
    // sqrt(d) = sqrt(dN) / N * sqrt(N)
    return QuadNum(p, q * mpq_class(root, al.N), al.N);
}

inline std::string blk(const char* name, long t, bool primed = false) {
    return std::string(name) + std::to_string(t) + (primed ? "'" : "");
}

inline std::string rep(const std::string& s, long k) {
    std::string out;
    for (long i = 0; i < k; ++i) out += s + " ";
    return out;
}

inline std::string tstr(const std::vector<long>& v) {
    std::string s = "t:(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

[[noreturn]] inline void inapplicable(const ClassId& c, const PeriodTwoAlpha& al, const std::string& why) {
    throw applicability_error(class_label(c) + " does not apply at (a,b)=(" + std::to_string(al.a) + "," + std::to_string(al.b) +
                              "): " + why);
}

inline long need_k(const ClassId& c, const PeriodTwoAlpha& al, bool limit, long kmin) {
    if (limit) return kmin;
    if (!c.k) inapplicable(c, al, "family member needs k");
    if (*c.k < kmin) inapplicable(c, al, "k must be >= " + std::to_string(kmin));
    return *c.k;
}

inline void no_k(const ClassId& c, const PeriodTwoAlpha& al, bool limit) {
    if (limit) inapplicable(c, al, "isolated class has no family limit");
}

inline Resolved resolve_even(const ClassId& c, const PeriodTwoAlpha& al, bool limit) {
    Sym S(al, limit);
    const QuadNum &e = S.e, &B = S.B, &D = S.D, &one = S.one;
    const long a = al.a, b = al.b;
    const std::string& f = c.family;
    Resolved R;
    if (b % 2 != 0) {
        if (f == "Sk") {
            long k = need_k(c, al, limit, 0);
            R.periods.push_back("A1' A1 " + rep("A1' A1' A1 A1", k));
            QuadNum w = rat(2) * S.P(4 * k + 1) * (one - D) / ((one + D * D) * (one - S.P(4 * k + 2)));
            R.forms.push_back((one - B - B * (one - D) * (one + rat(2) * D * D) / (one + D * D) - B * D.pow(3) * w) *
                              (one - e - D * (one - D) / (one + D * D) + w));
            if (!limit && k == 0) R.forms.push_back((one - B - rat(1, b)) * (one - e + e / rat(b)));
        } else if (f == "S-1") {
            no_k(c, al, limit);
            R.periods.push_back("A1 A1 A1' A1'");
            R.forms.push_back((one - B - B * (one - D) / (one + D * D)) * (one - e - D * (one - D) / (one + D * D)));
        } else if (f == "S-2") {
            no_k(c, al, limit);
            R.periods.push_back("C3");
            QuadNum x = (rat(3) * B - rat(2) * D) / (one - D), y = (rat(2) * e - rat(3) * D) / (one - D);
            bool c1 = 2 * b >= 3 * a && b >= 2 * a - 5;
            bool c2 = 2 * b <= 3 * a && b <= a + 5;
            if (c1) R.forms.push_back((one - B + x) * (one - e - y));
            if (c2) R.forms.push_back((one - B - x) * (one - e + y));
            if (!c1 && !c2) R.forms.push_back((one + B - x) * (one + e - y));
        } else {
            inapplicable(c, al, "unknown family for even a, odd b");
        }
        return R;
    }
    if (f == "Sk1") {
        long k = need_k(c, al, limit, 0);
        R.periods.push_back("A0 " + rep("A2 A2'", k));
        QuadNum w = S.P(2 * k) * (one - D) / (one - S.P(2 * k + 1));
        if (limit) w = QuadNum(0);
        R.forms.push_back((one - e + rat(2) * D * D / (one + D) * (one - w)) * (one - B - rat(2) * B / (one + D) * (one - w)));
        if (!limit && k == 0) R.forms.push_back((one - e) * (one - B));
    } else if (f == "Sk2") {
        if (!(b == 2 * a - 2 && a >= 8)) inapplicable(c, al, "needs b = 2a-2, a >= 8");
        long k = need_k(c, al, limit, 1);
        R.periods.push_back("A2 " + rep("C4", k) + "C2 A2' " + rep("C4'", k) + "C2'");
        QuadNum w = rat(2) * S.P(k + 1) * (one + D) * (one - e + D) / ((one - D) * (one + S.P(k + 2)));
        R.forms.push_back((one - rat(3) * e + rat(2) * D * (rat(2) - e) / (one - D) - w) *
                          (one + B - rat(2) * B * D / (one - D) * (one - e + D) + B * D * w));
    } else if (f == "Sk3") {
        if (!(b == 2 * a - 4 && a >= 10)) inapplicable(c, al, "needs b = 2a-4, a >= 10");
        long k = need_k(c, al, limit, 1);
        R.periods.push_back("C4 " + rep("C2 C4", k));
        QuadNum w = rat(2) * S.P(2 * k + 1) / ((one + D) * (one - S.P(2 * k + 1)));
        R.forms.push_back((one - e - rat(2) * e * D / (one - D) + rat(2) * D / (one - D * D) * (one + rat(2) * D) + w) *
                          (one - rat(3) * B + rat(2) * D / (one - D) - rat(2) * B * D / (one - D * D) * (rat(2) + D) - B * D * w));
    } else if (f == "Sk4") {
        bool wrange = a + 6 <= b && b <= 2 * a - 6;
        auto wform = [&](long k) {
            QuadNum w = rat(2) * S.P(k + 1) / (one - S.P(k + 1));
            return (one - e + rat(2) * D * (one - e) / (one - D) + w) * (one - rat(3) * B + rat(2) * D * (one - B) / (one - D) - B * w);
        };
        if (limit) {
            if (!(b <= 2 * a - 6 || (a == 6 && b == 8))) inapplicable(c, al, "limit needs b <= 2a-6 or (a,b)=(6,8)");
            R.forms.push_back(wform(0));
            return R;
        }
        long k = need_k(c, al, limit, 0);
        R.periods.push_back("C4 " + rep("C2", k));
        if (k == 0) {
            QuadNum u = rat(2) * D * (one - rat(2) * B) / (one - D), v = rat(2) * D * (rat(2) - e) / (one - D);
            bool c1 = b >= 3 * a - 6 && b >= 2 * a;
            bool c2 = b <= a + 6 && b <= 2 * a - 2;
            if (c1) R.forms.push_back((one + rat(3) * B - u) * (one - rat(3) * e + v));
            if (c2) R.forms.push_back((one - rat(5) * B + u) * (one + e - v));
            if (!c1 && !c2) R.forms.push_back((one - rat(3) * B + u) * (one - e + v));
            // at b = a+6 the k = 0 member falls below the limit and only the branch above holds
            if (wrange && b > a + 6) R.forms.push_back(wform(0));
        } else if (wrange || (k == 1 && b == 2 * a - 4 && a >= 10)) {
            R.forms.push_back(wform(k));
        } else if (k == 1 && a == 6 && b == 10) {
            R.forms.push_back(radical(mpq_class(703, 40), mpq_class(-703, 600), 210, al));
        } else {
            inapplicable(c, al, "k >= 1 needs a+6 <= b <= 2a-6");
        }
    } else if (f == "Sk5") {
        long k = need_k(c, al, limit, 0);
        bool ok = k == 0 || b <= 2 * a - 6 || (a == 6 && b == 8) || (k == 1 && b == 2 * a - 4);
        if (limit) ok = b <= 2 * a - 6 || (a == 6 && b == 8);
        if (!ok) inapplicable(c, al, "needs k = 0, b <= 2a-6, (6,8) or k = 1 with b = 2a-4");
        R.periods.push_back("A2 " + rep("C2", k) + "A2' " + rep("C2'", k));
        QuadNum w = rat(2) * S.P(k + 1) * (one - rat(2) * B + D) / ((one - D) * (one + S.P(k + 1)));
        R.forms.push_back((one - e + rat(2) * D * (one - e) / (one - D) + e * w) * (one - rat(3) * B + rat(2) * D * (one - B) / (one - D) - w));
    } else if (f == "Sk6") {
        if (!(a == 8 && b == 12)) inapplicable(c, al, "only (a,b) = (8,12)");
        long k = need_k(c, al, limit, 0);
        R.periods.push_back(rep("A2' C2' A2 C2", k) + "A2' C2' C2' A2 C2 C2");
        QuadNum w = rat(2) * S.P(4 * k + 4) * (one - rat(2) * B + D) * (one - D.pow(3)) / ((one + D * D) * (one - S.P(4 * k + 6)));
        R.forms.push_back((one - rat(3) * e + rat(2) * D - rat(2) * D * D + rat(2) * e * D * D -
                           rat(2) * D.pow(3) * (one - e + D) / (one + D * D) - e * D * D * w) *
                          (one + B - rat(2) * D * (one - B + B * D) / (one + D * D) + w));
    } else if (f == "Sk7") {
        if (!(a == 6 && b == 10)) inapplicable(c, al, "only (a,b) = (6,10)");
        long k = need_k(c, al, limit, 1);
        R.periods.push_back(rep("C4 C2", k) + "A2' A2");
        QuadNum w = rat(2) * S.P(2 * k) * (one - rat(3) * B + D) / (one - S.P(2 * k + 2));
        // first factor carries eta D^3 w (a coefficient of 2 does not match the evaluator)
        R.forms.push_back((one + e - rat(2) * D + rat(2) * D * D + rat(2) * e * D.pow(3) / (one - D) -
                           rat(2) * D.pow(3) * (one + rat(2) * D) / (one - D * D) - e * D.pow(3) * w) *
                          (one - rat(5) * B + rat(2) * D / (one - D) - rat(2) * B * D * (one + rat(2) * D) / (one - D * D) - w));
    } else if (f == "S-1") {
        no_k(c, al, limit);
        R.periods.push_back("C2");
        R.forms.push_back((one - rat(3) * e + rat(2) * D * (one - e) / (one - D)) * (one - B + rat(2) * B * (one - e) / (one - D)));
    } else if (f == "S-2") {
        no_k(c, al, limit);
        if (!(a == 4 && b == 6)) inapplicable(c, al, "only (a,b) = (4,6)");
        R.periods.push_back("A2 C2");
        R.forms.push_back((one - e - rat(2) * D / (one - D) + rat(2) * e * D / (one - D * D)) *
                          (one - rat(3) * B - rat(2) * B * D / (one - D) + rat(2) * D / (one - D * D)));
    } else {
        inapplicable(c, al, "unknown family for even a, even b");
    }
    return R;
}

inline Resolved resolve_odd(const ClassId& c, const PeriodTwoAlpha& al, bool limit) {
    Sym S(al, limit);
    const QuadNum &e = S.e, &B = S.B, &D = S.D, &one = S.one;
    const long a = al.a, b = al.b;
    const OddParams op = odd_params(al);
    const long m = op.m, n = op.n, s = op.s, r = op.r;
    const QuadNum v = (rat(m) * B - D) / (one - D);
    const std::string& f = c.family;
    const std::string Bm = blk("B", m), Bn = blk("B", n), Bs = blk("B", s);
    const std::string Bm_ = blk("B", m, true), Bn_ = blk("B", n, true), Bs_ = blk("B", s, true);
    auto qb = rat(1, b);
    Resolved R;
    auto isolated = [&] { no_k(c, al, limit); };
    if (f == "S0") {
        isolated();
        R.periods.push_back(Bm);
        R.forms.push_back((one - rat(2) * e + e * v) * (one - B + v));
    } else if (f == "S-1") {
        isolated();
        R.periods.push_back(Bm + " " + Bn);
        if (r <= a + 1)
            R.forms.push_back((one - e * v - rat(2) * D * D / (one - D * D)) * (one - rat(3) * B - v - rat(2) * B * D * D / (one - D * D)));
        if (r >= a + 1)
            R.forms.push_back((one - rat(2) * e + e * v + rat(2) * D / (one - D * D)) * (one - B + v + rat(2) * B * D / (one - D * D)));
    } else if (f == "S-2") {
        isolated();
        R.periods.push_back(Bn);
        R.forms.push_back((one - e * v - rat(2) * D / (one - D)) * (one - rat(3) * B - v - rat(2) * B * D / (one - D)));
    } else if (f == "S-3") {
        isolated();
        R.periods.push_back(Bn + " " + Bs);
        R.forms.push_back((one - rat(2) * e + e * v + rat(2) * e * qb) * (one - rat(3) * B + v + rat(2) * D * qb));
    } else if (f == "S-4") {
        isolated();
        R.periods.push_back(Bm + " " + Bm_);
        if (m == 1) R.periods.push_back(Bs + " " + Bs_);
        R.forms.push_back((one - rat(2) * e + e * (rat(m) + e) * qb) * (one - B - (rat(m) - e) * qb));
    } else if (f == "S-5") {
        isolated();
        if (!(m == 1 && a >= 5)) inapplicable(c, al, "needs m = 1, a >= 5");
        R.periods.push_back("E3");
        QuadNum x = rat(3) * D * (one - e) / (one - D), y = rat(3) * D * (one - B) / (one - D);
        if (r >= a - 7) R.forms.push_back((one - rat(4) * e + x) * (one + rat(2) * B - y));
        if (r <= a - 9) R.forms.push_back((one - rat(2) * e + x) * (one - rat(2) * B + y));
    } else if (f == "S-6") {
        isolated();
        if (b % 2 != 0) inapplicable(c, al, "needs b even");
        R.periods.push_back("F2");
        R.forms.push_back(e);
    } else if (f == "S-7") {
        isolated();
        if (b % 2 == 0) inapplicable(c, al, "needs b odd");
        R.periods.push_back("F1");
        R.periods.push_back("F3");
        QuadNum x = B / (one - D);
        R.forms.push_back(e * (one - x * x));
    } else if (f == "S-8") {
        isolated();
        if (!(a == 3 && b == 4)) inapplicable(c, al, "only (a,b) = (3,4)");
        R.periods.push_back("F0 B0");
        R.periods.push_back("F2 B2'");
        QuadNum x = B * (one - e + D) / (one - D * D);
        R.forms.push_back(e * (one - x * x));
    } else if (f == "S-9") {
        isolated();
        if (!(a == 3 && b == 5)) inapplicable(c, al, "only (a,b) = (3,5)");
        R.periods.push_back("H G H' G");
        QuadNum x = (rat(2) * B - D + D.pow(3) - rat(2) * B * D.pow(3)) / (one + D.pow(4));
        R.forms.push_back(e * (one - x * x));
    } else if (f == "Sk1") {
        if (!(r >= a + 3)) inapplicable(c, al, "needs r >= a+3");
        long k = need_k(c, al, limit, 0);
        R.periods.push_back(rep(Bn, k) + Bm);
        QuadNum g = rat(2) * S.P(k + 1) / (one - S.P(k + 1));
        R.forms.push_back((one - rat(2) * e + e * v + rat(2) * D / (one - D) - g) * (one - B + v + rat(2) * B * D / (one - D) - B * g));
    } else if (f == "Sk2") {
        if (!(m == 0 && r >= a + 3)) inapplicable(c, al, "needs m = 0, r >= a+3");
        long k = need_k(c, al, limit, 1);
        R.periods.push_back(rep(Bn, k) + Bm + " " + rep(Bn_, k) + Bm_);
        QuadNum ep = rat(2) * S.P(k) * (B * (one + D) - D) / ((one - D) * (one + S.P(k + 1)));
        R.forms.push_back((one - rat(2) * e + D * (rat(2) - e) / (one - D) - e * ep) * (one - B + D * (one - rat(2) * B) / (one - D) + D * ep));
    } else if (f == "Sk3") {
        if (!(r <= a + 1 && b >= 6)) inapplicable(c, al, "needs r <= a+1, b >= 6");
        long k = need_k(c, al, limit, 0);
        R.periods.push_back(rep(Bm + " " + Bn, k) + Bn);
        QuadNum ep = rat(2) * B * S.P(2 * k + 1) / ((one + D) * (one - S.P(2 * k + 1)));
        R.forms.push_back((one - e * v - rat(2) * D / (one - D * D) - e * ep) * (one - rat(3) * B - v - rat(2) * B * D * D / (one - D * D) - ep));
    } else if (f == "Sk4") {
        if (!(b == a + 1 && b >= 6)) inapplicable(c, al, "needs b = a+1 >= 6");
        long k = need_k(c, al, limit, 1);
        R.periods.push_back(rep(Bn + " " + Bm, k) + rep(Bn_ + " " + Bm_, k));
        QuadNum ep = rat(2) * S.P(2 * k) * (one - rat(2) * qb) / ((one - D) * (one + S.P(2 * k)));
        R.forms.push_back((one - e * D / (one - D) + rat(2) * D * D / (one - D * D) + e * D * ep) *
                          (one - rat(3) * B + D / (one - D) - rat(2) * B * D * D / (one - D * D) - ep));
    } else if (f == "Sk5") {
        if (!(r <= a - 1)) inapplicable(c, al, "needs r <= a-1");
        long k = need_k(c, al, limit, 0);
        R.periods.push_back(rep(Bm, k) + Bn);
        QuadNum g = rat(2) * S.P(k + 1) / (one - S.P(k + 1));
        R.forms.push_back((one - e * v - g) * (one - rat(3) * B - v - B * g));
    } else if (f == "Sk6") {
        if (!(r == 2 && b >= 7)) inapplicable(c, al, "needs r = 2, b >= 7");
        long k = need_k(c, al, limit, 0);
        R.periods.push_back(rep(Bn + " " + Bs, k) + Bn + " " + rep(Bm, k));
        QuadNum den = (one + D) * (one - S.P(3 * k + 1));
        R.forms.push_back((one - e * v - rat(2) * S.P(k + 1) * (one + S.P(2 * k + 1)) / den) *
                          (one - rat(3) * B - v + rat(2) * D * qb - rat(2) * B * S.P(2 * k + 1) * (one + S.P(k)) / den));
    } else if (f == "Sk7") {
        if (b != 2 * a + 2) inapplicable(c, al, "needs b = 2a+2");
        long k = need_k(c, al, limit, 1);
        R.periods.push_back(rep(Bn + " " + Bs, k) + rep(Bn_ + " " + Bs_, k));
        QuadNum ep = rat(2) * S.P(2 * k) * (one - rat(4) * qb) / ((one - D) * (one + S.P(2 * k)));
        R.forms.push_back((one - e * D / (one - D) + rat(4) * D * D / (one - D * D) + e * D * ep) *
                          (one - B + D / (one - D) - rat(4) * B / (one - D * D) - ep));
    } else if (f == "Sk8") {
        if (!(b == a + 2 && b >= 7)) inapplicable(c, al, "needs b = a+2 >= 7");
        long k = need_k(c, al, limit, 1);
        R.periods.push_back(rep(Bn + " " + Bs, k) + Bm_);
        QuadNum ep = rat(2) * S.P(2 * k) * (one - rat(2) * qb) / (one - S.P(2 * k + 1));
        R.forms.push_back((one + D * (one + D - rat(4) * D * D) / (one - D * D) - e * D * (one - rat(2) * D) / (one - D) - e * D * D * ep) *
                          (one - rat(4) * B + D / (one - D) + B * D * (one - rat(3) * D) / (one - D * D) - ep));
    } else if (f == "Sk9") {
        if (!(b == a + 2 && b >= 11)) inapplicable(c, al, "needs b = a+2 >= 11");
        long k = need_k(c, al, limit, 0);
        R.periods.push_back(rep(Bm, k) + Bn_ + " E3' " + Bs_);
        QuadNum ep = rat(2) * S.P(k + 1) / (one - S.P(k + 3)) * (one - rat(2) * B + rat(2) * D - rat(2) * B * D + D * D);
        R.forms.push_back((one - rat(2) * e + rat(3) * D - rat(3) * e * D + rat(3) * D * D - e * D * D - e * D * D * (B - D) / (one - D) -
                           e * D * D * ep) *
                          (one - rat(2) * B + D * (one - B) / (one - D) - ep));
    } else if (f == "Sk10") {
        if (!(a == 3 && b == 4)) inapplicable(c, al, "only (a,b) = (3,4)");
        long k = need_k(c, al, limit, 1);
        R.periods.push_back("F2 " + rep("F2 B2'", k));
        R.periods.push_back("F2 " + rep("F0 B0", k));
        QuadNum x = B * (one - e + D) / (one - D * D);
        QuadNum ep = B * S.P(2 * k) * (one - e + D) / ((one + D) * (one - S.P(2 * k + 1)));
        R.forms.push_back(e * (one - x + ep) * (one + D * x - D * ep));
    } else if (f == "Sk11") {
        if (!(a == 3 && b == 5)) inapplicable(c, al, "only (a,b) = (3,5)");
        long k = need_k(c, al, limit, 0);
        R.periods.push_back(rep("H' G H G", k) + "H G");
        QuadNum ep = rat(2) * S.P(8 * k) / (one - S.P(8 * k + 4));
        QuadNum q = D.pow(3) * (one - rat(2) * B - rat(2) * B * D + D * D) / (one + D.pow(4));
        R.forms.push_back(e * (one - rat(2) * B + D - q * (one - ep)) * (one + rat(2) * B - D - q * (one + D.pow(4) * ep)));
    } else if (f == "Sk12") {
        if (!(a == 3 && b == 6)) inapplicable(c, al, "only (a,b) = (3,6)");
        long k = need_k(c, al, limit, 0);
        R.periods.push_back("F2 " + rep("B2'", k + 1));
        R.periods.push_back("F0 " + rep("B2", k) + "B0");
        QuadNum x = B * (one - e + D) * (one - S.P(k + 1)) / ((one - D) * (one - S.P(k + 2)));
        R.forms.push_back(e * (one - x * x));
    } else {
        inapplicable(c, al, "unknown family for odd a");
    }
    return R;
}

inline Resolved resolve_two(const ClassId& c, const PeriodTwoAlpha& al, bool limit) {
    if (al.b < 5) throw applicability_error("a = 2 with b = 3, 4 is excluded");
    Sym S(al, limit);
    const QuadNum &e = S.e, &B = S.B, &D = S.D, &one = S.one;
    const long b = al.b;
    const std::string& f = c.family;
    Resolved R;
    if (f == "S0t") {
        no_k(c, al, limit);
        if (!c.t) inapplicable(c, al, "needs t");
        long t = *c.t;
        if (t < 2 || t > b - 2 || (t - b) % 2 != 0) inapplicable(c, al, "needs 2 <= t <= b-2, t = b mod 2");
        R.periods.push_back(tstr({2, -t}));
        if (t - 4 >= -(b - 2)) R.periods.push_back(tstr({2, t - 4}));
        QuadNum x = rat(t - 2) * B / (one - D);
        // t <= b - sqrt(2b-4), decided in integers
        bool low = (b - t) * (b - t) >= 2 * b - 4;
        if (low) R.forms.push_back(e * (one - x * x));
        else {
            QuadNum y = rat(2) - rat(2) * B - x;
            R.forms.push_back(e * (y * y - one));
        }
        return R;
    }
    if (b % 2 == 0) {
        if (f == "S-1") {
            no_k(c, al, limit);
            R.periods.push_back("t:(0,0)");
            R.forms.push_back(e * (one - B) * (one - B));
        } else if (f == "S2k") {
            long k = need_k(c, al, limit, 1);
            std::vector<long> p1 = {2, -4}, p2 = {2, 0};
            for (long i = 0; i < k; ++i) {
                p1.insert(p1.end(), {2, -2});
                p2.insert(p2.end(), {2, -2});
            }
            R.periods = {tstr(p1), tstr(p2)};
            QuadNum g = one - S.P(k + 1);
            R.forms.push_back(e * (one - rat(2) * B - rat(2) * B * S.P(k + 1) / g) * (one + rat(2) * B * S.P(k) / g));
        } else if (f == "S2k+1") {
            long k = need_k(c, al, limit, 0);
            std::vector<long> p1 = {2, -2, 0, 0}, p2 = {2, 0, 0, -2};
            for (long i = 0; i < k; ++i) {
                p1.insert(p1.end(), {2, -2});
                p2.insert(p2.end(), {2, -2});
            }
            R.periods = {tstr(p1), tstr(p2)};
            QuadNum x = (one - S.P(k + 1)) / (one - S.P(k + 2));
            R.forms.push_back(e * ((one - B) * (one - B) - B * B * x * x));
        } else {
            inapplicable(c, al, "unknown family for a = 2, b even");
        }
        return R;
    }
    if (f == "S-2") {
        no_k(c, al, limit);
        R.periods.push_back("t:(2,-3,2,-1)");
        QuadNum x = one - B + B * D / (one + D);
        R.forms.push_back(e * x * x);
    } else if (f == "S-1") {
        no_k(c, al, limit);
        R.periods.push_back("t:(2,-1,2,-3,2,-1,2,-1)");
        R.periods.push_back("t:(2,-3,2,-1,2,-3,2,-3)");
        QuadNum x = one - B + B * (one - D) * D.pow(3) / (one - D.pow(4));
        QuadNum y = B * (one + D) * D / (one - D.pow(4));
        R.forms.push_back(e * (x * x - y * y));
    } else if (f == "S2k") {
        long k = need_k(c, al, limit, 1);
        std::vector<long> p1 = {2, -1}, p2 = {2, -3};
        for (long i = 0; i < k; ++i) {
            p1.insert(p1.end(), {2, -3, 2, -1});
            p2.insert(p2.end(), {2, -1, 2, -3});
        }
        R.periods = {tstr(p1), tstr(p2)};
        QuadNum den = (one + D) * (one - S.P(2 * k + 1));
        QuadNum h = B * B / rat(2);
        R.forms.push_back(e * (one - B - h - rat(2) * B * S.P(2 * k + 2) / den) * (one - B + h + rat(2) * B * S.P(2 * k) / den));
    } else if (f == "S2k+1") {
        long k = need_k(c, al, limit, 0);
        std::vector<long> p1 = {2, -1, 0, -1}, p2 = {2, -1, 0, -1};
        for (long i = 0; i < k; ++i) {
            p1.insert(p1.end(), {2, -3, 2, -1});
            p2.insert(p2.end(), {2, -1, 2, -3});
        }
        R.periods = {tstr(p1), tstr(p2)};
        QuadNum x = (one - S.P(2 * k)) / (one - S.P(2 * k + 2));
        R.forms.push_back(e * ((one - B) * (one - B) - B.pow(4) / rat(4) * x * x));
    } else {
        inapplicable(c, al, "unknown family for a = 2, b odd");
    }
    return R;
}

inline Resolved resolve(const ClassId& c, const PeriodTwoAlpha& al, bool limit) {
    switch (regime_of(al)) {
        case Regime::even_a: return resolve_even(c, al, limit);
        case Regime::odd_a: return resolve_odd(c, al, limit);
        case Regime::two: return resolve_two(c, al, limit);
    }
    throw applicability_error("unreachable");
}

}  // namespace detail

/// All equivalent periods of a class, first one canonical.
inline std::vector<TSequence> class_periods(const ClassId& c, const PeriodTwoAlpha& al) {
    auto R = detail::resolve(c, al, false);
    std::vector<TSequence> out;
    for (const auto& p : R.periods) out.push_back(parse_period(p, al));
    return out;
}

inline TSequence class_tsequence(const ClassId& c, const PeriodTwoAlpha& al) { return class_periods(c, al).front(); }

inline std::string class_period_notation(const ClassId& c, const PeriodTwoAlpha& al) {
    auto R = detail::resolve(c, al, false);
    std::string s = R.periods.front();
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

/// Every closed-form branch whose condition holds (usually one).
inline std::vector<QuadNum> delta_branches(const ClassId& c, const PeriodTwoAlpha& al) { return detail::resolve(c, al, false).forms; }

inline QuadNum delta_closed_form(const ClassId& c, const PeriodTwoAlpha& al) { return delta_branches(c, al).front(); }

/// delta_inf of a family: the closed form with its k-dependent correction dropped.
inline QuadNum family_limit(const std::string& family, const PeriodTwoAlpha& al) {
    ClassId c{family, std::nullopt, std::nullopt};
    return detail::resolve(c, al, true).forms.front();
}

inline bool class_applies(const ClassId& c, const PeriodTwoAlpha& al) {
    try {
        detail::resolve(c, al, false);
        return true;
    } catch (const applicability_error&) {
        return false;
    }
}

inline std::vector<std::string> known_families(const PeriodTwoAlpha& al) {
    switch (regime_of(al)) {
        case Regime::even_a:
            if (al.b % 2 != 0) return {"Sk", "S-1", "S-2"};
            return {"Sk1", "Sk2", "Sk3", "Sk4", "Sk5", "Sk6", "Sk7", "S-1", "S-2"};
        case Regime::odd_a:
            return {"S0", "S-1", "S-2", "S-3", "S-4", "S-5", "S-6", "S-7", "S-8", "S-9", "Sk1", "Sk2",
                    "Sk3", "Sk4", "Sk5", "Sk6", "Sk7", "Sk8", "Sk9", "Sk10", "Sk11", "Sk12"};
        case Regime::two:
            return {"S0t", "S-1", "S-2", "S2k", "S2k+1"};
    }
    return {};
}

inline bool is_family(const std::string& f) { return f.size() > 2 && (f.compare(0, 2, "Sk") == 0 || f.compare(0, 2, "S2") == 0); }

/// Every applicable class with k <= kmax (and every admissible t for S0t).
inline std::vector<ClassId> applicable_classes(const PeriodTwoAlpha& al, long kmax) {
    std::vector<ClassId> out;
    if (regime_of(al) == Regime::two && al.b < 5) return out;
    for (const auto& f : known_families(al)) {
        if (f == "S0t") {
            for (long t = 2; t <= al.b - 2; ++t) {
                ClassId c{f, std::nullopt, t};
                if (class_applies(c, al)) out.push_back(c);
            }
        } else if (f == "Sk" || is_family(f)) {
            for (long k = 0; k <= kmax; ++k) {
                ClassId c{f, k, std::nullopt};
                if (class_applies(c, al)) out.push_back(c);
            }
        } else {
            ClassId c{f, std::nullopt, std::nullopt};
            if (class_applies(c, al)) out.push_back(c);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// The ordered spectrum above the first limit point

enum class PointKind { isolated, family_member, limit_point };
enum class Direction { increasing, decreasing, none };

inline const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::isolated: return "isolated";
        case PointKind::family_member: return "family_member";
        case PointKind::limit_point: return "limit_point";
    }
    return "";
}

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::increasing: return "increasing";
        case Direction::decreasing: return "decreasing";
        case Direction::none: return "none";
    }
    return "";
}

struct SpectrumPoint {
    ClassId cls;
    QuadNum m_star;  // evaluator value
    QuadNum m;
    std::optional<QuadNum> closed_form;
    bool closed_form_agrees = true;
    PointKind kind = PointKind::isolated;
    Direction direction = Direction::none;
    std::vector<ClassId> coincident;  // other listed classes with exactly this value
};

struct FamilySpec {
    std::string family;
    long kmin = 0;
    Direction direction = Direction::none;
};

/// Expected shape of the spectrum top for one (a,b): rho*, the isolated values, the families and the limit.
struct ExpectedLayout {
    ClassId rho;
    std::vector<ClassId> isolated;
    std::vector<FamilySpec> families;
    std::string limit_family;
};

inline ExpectedLayout expected_layout(const PeriodTwoAlpha& al) {
    const long a = al.a, b = al.b;
    ExpectedLayout L;
    auto iso = [](const std::string& f) { return ClassId{f, std::nullopt, std::nullopt}; };
    auto mem = [](const std::string& f, long k) { return ClassId{f, k, std::nullopt}; };
    const auto dec = Direction::decreasing, inc = Direction::increasing;
    switch (regime_of(al)) {
        case Regime::even_a:
            if (b % 2 != 0) {
                L.rho = (b == a + 1 || b == a + 3 || b >= 2 * a - 3) ? mem("Sk", 0) : iso("S-2");
                L.isolated.push_back(iso("S-1"));
                if (a + 3 <= b && b <= 2 * a - 3) L.isolated.push_back(iso("S-2"));
                L.families.push_back({"Sk", 0, dec});
                L.limit_family = "Sk";
            } else {
                L.rho = mem("Sk1", 0);
                if (b >= 2 * a || (a == 4 && b == 6)) {
                    L.families.push_back({"Sk1", 0, dec});
                    L.isolated.push_back(mem("Sk5", 0));
                    if (2 * a <= b && b <= 3 * a - 6) L.isolated.push_back(mem("Sk4", 0));
                    if (a == 4 && b == 6) L.isolated.push_back(iso("S-2"));
                    L.limit_family = "Sk1";
                } else if (b == 2 * a - 2 && a >= 8) {
                    L.isolated = {mem("Sk1", 0), mem("Sk4", 0)};
                    L.families.push_back({"Sk2", 1, inc});
                    L.limit_family = "Sk2";
                } else if (b == 2 * a - 4 && a >= 10) {
                    L.isolated = {mem("Sk1", 0), mem("Sk4", 0), mem("Sk4", 1), mem("Sk5", 1)};
                    L.families.push_back({"Sk3", 1, dec});
                    L.limit_family = "Sk3";
                } else if (b <= 2 * a - 6 || (a == 6 && b == 8)) {
                    L.isolated = {mem("Sk1", 0), iso("S-1")};
                    L.families.push_back({"Sk5", 0, inc});
                    if (a + 6 <= b && b <= 2 * a - 6) L.families.push_back({"Sk4", b == a + 6 ? 1 : 0, dec});
                    L.limit_family = "Sk4";
                } else if (a == 8 && b == 12) {
                    L.isolated = {mem("Sk1", 0), mem("Sk5", 1)};
                    L.families.push_back({"Sk6", 0, dec});
                    L.limit_family = "Sk6";
                } else if (a == 6 && b == 10) {
                    L.isolated = {mem("Sk1", 0), mem("Sk5", 0), mem("Sk4", 1)};
                    L.families.push_back({"Sk7", 1, inc});
                    L.limit_family = "Sk7";
                }
            }
            break;
        case Regime::odd_a: {
            const OddParams p = odd_params(al);
            const long m = p.m, r = p.r;
            if (a == 3 && b == 4) {
                L.rho = iso("S-6");
                L.isolated = {iso("S-6"), iso("S-8")};
                L.families.push_back({"Sk10", 1, dec});
                L.limit_family = "Sk10";
                break;
            }
            if (a == 3 && b == 5) {
                L.rho = iso("S-7");
                L.isolated = {iso("S-7"), iso("S-9")};
                L.families.push_back({"Sk11", 0, dec});
                L.limit_family = "Sk11";
                break;
            }
            if (a == 3 && b == 6) {
                L.rho = iso("S-2");
                L.isolated = {iso("S-2"), iso("S-6")};
                L.families.push_back({"Sk12", 0, dec});
                L.limit_family = "Sk12";
                break;
            }
            if (2 <= r && r <= a - 1 && (a >= 5 || m >= 2)) L.rho = iso("S0");
            else if (r == a + 1 && (a >= 5 || m >= 1)) L.rho = iso("S-1");
            else if (a + 3 <= r && r <= 2 * a) L.rho = iso("S-2");
            else throw applicability_error("no rho* branch for this (a,b)");
            L.isolated.push_back(L.rho);
            if ((a == 5 && b == 7) || (a == 7 && b == 9)) {
                L.isolated.push_back(iso("S-3"));
                L.isolated.push_back(iso("S-4"));
                L.families.push_back({"Sk8", 1, inc});
                L.limit_family = "Sk8";
            } else if (r >= a + 3) {
                if (m >= 1) L.families.push_back({"Sk1", 0, inc});
                else L.families.push_back({"Sk2", 1, inc});
                L.limit_family = L.families.back().family;
            } else if (r == a + 1) {
                if (m >= 1) L.families.push_back({"Sk3", 0, inc});
                else L.families.push_back({"Sk4", 1, inc});
                L.limit_family = L.families.back().family;
            } else if (4 <= r && r <= a - 1) {
                if (b == a + 4 && b >= 17) L.isolated.push_back(iso("S-5"));
                L.families.push_back({"Sk5", 0, inc});
                L.limit_family = "Sk5";
            } else if (r == 2) {
                if (m >= 2) L.isolated.push_back(iso("S-3"));
                else L.isolated.push_back(iso("S-5"));
                if (m >= 3) L.families.push_back({"Sk6", 0, inc});
                else if (m == 2) L.families.push_back({"Sk7", 1, inc});
                else L.families.push_back({"Sk9", 0, inc});
                L.limit_family = L.families.back().family;
            }
            break;
        }
        case Regime::two: {
            if (b < 5) throw applicability_error("a = 2 with b = 3, 4 is excluded");
            L.rho = ClassId{"S0t", std::nullopt, b % 2 == 0 ? 2 : 3};
            if (b % 2 == 0) {
                L.isolated.push_back(iso("S-1"));
            } else {
                L.isolated.push_back(iso("S-2"));
                L.isolated.push_back(iso("S-1"));
            }
            if (b >= 8) {
                mpz_class root;
                mpz_class arg(2 * b - 4);
                mpz_sqrt(root.get_mpz_t(), arg.get_mpz_t());
                long top = 2 + root.get_si();
                for (long t = 4; t <= top; ++t) {
                    if ((t - b) % 2 != 0) continue;
                    if ((b == 6 && t == 4) || (b == 7 && t == 5)) continue;
                    L.isolated.push_back(ClassId{"S0t", std::nullopt, t});
                }
            }
            L.families.push_back({"S2k", 1, dec});
            L.families.push_back({"S2k+1", 0, dec});
            L.limit_family = "S2k";
            break;
        }
    }
    return L;
}

struct SpectrumCatalog {
    PeriodTwoAlpha alpha;
    std::vector<SpectrumPoint> points;  // strictly decreasing in m_star, limit point included
    QuadNum first_limit_point;
    std::string limit_family;
    long truncation_k = 0;
    ClassId named_rho;
    std::vector<FamilySpec> families;
    std::vector<std::string> anomalies;  // anything that contradicts the layout, reported not hidden
};

inline QuadNum class_value(const ClassId& c, const PeriodTwoAlpha& al) { return m_star(class_tsequence(c, al), al); }

inline SpectrumCatalog spectrum_catalog(const PeriodTwoAlpha& al, long kmax = 8) {
    SpectrumCatalog cat;
    cat.alpha = al;
    cat.truncation_k = kmax;
    ExpectedLayout L = expected_layout(al);
    cat.named_rho = L.rho;
    cat.families = L.families;
    cat.limit_family = L.limit_family;
    cat.first_limit_point = family_limit(L.limit_family, al);

    auto make_point = [&](const ClassId& c, PointKind kind, Direction dir) {
        SpectrumPoint pt;
        pt.cls = c;
        pt.m_star = class_value(c, al);
        pt.m = m_value(pt.m_star, al);
        pt.kind = kind;
        pt.direction = dir;
        pt.closed_form = delta_closed_form(c, al);
        pt.closed_form_agrees = *pt.closed_form == pt.m_star;
        if (!pt.closed_form_agrees) cat.anomalies.push_back(delta_label(c) + ": closed form differs from the evaluator");
        return pt;
    };
    std::vector<SpectrumPoint> pts;
    auto listed = [&](const ClassId& c) {
        return std::any_of(pts.begin(), pts.end(), [&](const SpectrumPoint& p) { return p.cls == c; });
    };
    for (const auto& fam : L.families) {
        for (long k = fam.kmin; k <= kmax; ++k) pts.push_back(make_point(ClassId{fam.family, k, std::nullopt}, PointKind::family_member, fam.direction));
    }
    for (const auto& c : L.isolated)
        if (!listed(c)) pts.push_back(make_point(c, PointKind::isolated, Direction::none));
    if (!listed(L.rho)) pts.push_back(make_point(L.rho, PointKind::isolated, Direction::none));

    for (const auto& p : pts) {
        int side = qnum_sign(p.m_star - cat.first_limit_point);
        if (p.kind == PointKind::isolated && side <= 0) cat.anomalies.push_back(delta_label(p.cls) + ": not above the first limit point");
        if (p.kind == PointKind::family_member) {
            if (p.direction == Direction::decreasing && side <= 0)
                cat.anomalies.push_back(delta_label(p.cls) + ": decreasing family member not above its limit");
            if (p.direction == Direction::increasing && side >= 0)
                cat.anomalies.push_back(delta_label(p.cls) + ": increasing family member not below its limit");
        }
    }
    SpectrumPoint lim;
    lim.cls = ClassId{L.limit_family, std::nullopt, std::nullopt};
    lim.m_star = cat.first_limit_point;
    lim.m = m_value(lim.m_star, al);
    lim.kind = PointKind::limit_point;
    pts.push_back(lim);

    std::stable_sort(pts.begin(), pts.end(), [](const SpectrumPoint& x, const SpectrumPoint& y) { return x.m_star > y.m_star; });
    // equal values are one spectrum point
    std::vector<SpectrumPoint> merged;
    for (auto& p : pts) {
        if (!merged.empty() && merged.back().m_star == p.m_star) {
            if (p.kind == PointKind::limit_point) cat.anomalies.push_back(delta_label(merged.back().cls) + ": equals the first limit point");
            merged.back().coincident.push_back(p.cls);
            continue;
        }
        merged.push_back(std::move(p));
    }
    pts = std::move(merged);
    if (!(pts.front().cls == L.rho)) cat.anomalies.push_back("maximum is " + delta_label(pts.front().cls) + ", not the named rho*");
    cat.points = std::move(pts);
    return cat;
}

/// points[0] - points[1], certified positive.
inline QuadNum isolation_gap(const SpectrumCatalog& cat) {
    if (cat.points.size() < 2) throw std::invalid_argument("isolation gap needs at least two points");
    QuadNum g = cat.points[0].m_star - cat.points[1].m_star;
    if (qnum_sign(g) <= 0) throw std::logic_error("catalogue is not strictly decreasing");
    return g;
}

struct EuclidResult {
    QuadNum rho;        // rho* / (4(1-D))
    QuadNum threshold;  // 1/sqrt(B^2 - 4C) for the minimal polynomial x^2 + Bx + C of eta
    bool verdict = false;  // rho < threshold
    long points_above = 0;  // catalogue M values above the threshold
    bool count_complete = false;  // the first limit point is below the threshold
};

/**
 * eta satisfies x^2 - b x + b/a = 0, so B^2 - 4C = b^2 - 4b/a = N/a^2 and
 * the threshold a/sqrt(N) already lies in the field. Comparisons are exact.
 */
inline EuclidResult euclidean_test(const PeriodTwoAlpha& al, long kmax = 8) {
    EuclidResult res;
    SpectrumCatalog cat = spectrum_catalog(al, kmax);
    res.rho = cat.points.front().m;
    res.threshold = QuadNum(mpq_class(0), mpq_class(al.a, al.N), al.N);
    res.verdict = res.rho < res.threshold;
    for (const auto& p : cat.points)
        if (p.kind != PointKind::limit_point && p.m > res.threshold) ++res.points_above;
    res.count_complete = m_value(cat.first_limit_point, al) < res.threshold;
    return res;
}

/// Grid points inside the covered regimes.
inline std::vector<std::pair<long, long>> covered_grid(long amin, long amax, long bmin, long bmax) {
    std::vector<std::pair<long, long>> out;
    for (long a = std::max(2L, amin); a <= amax; ++a)
        for (long b = std::max(a + 1, bmin); b <= bmax; ++b) {
            if (a == 2 && b < 5) continue;
            out.emplace_back(a, b);
        }
    return out;
}

}  // namespace lagspec
