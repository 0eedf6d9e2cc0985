#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "expansion.hpp"

namespace lagspec {

struct OracleReport {
    long n_lo = 0;
    long n_hi = 0;
    QuadNum window_min;
    long argmin_n = 0;  // negative when the minimum comes from -n
    std::optional<QuadNum> target_m;
    std::optional<double> relative_gap;  // |window_min - target| / target
    bool exact_scan = false;             // every term evaluated exactly
    bool two_sided = true;               // n and -n both scanned
};

/// ||x||, distance to the nearest integer, exactly.
inline QuadNum nearest_int_distance(const QuadNum& x) {
    QuadNum f = x - QuadNum(mpq_class(qnum_floor(x)));
    QuadNum g = QuadNum(1) - f;
    return f < g ? f : g;
}

/// n ||n alpha - gamma|| for one n, exactly.
inline QuadNum oracle_term(const QuadNum& alpha, const QuadNum& gamma, long n) {
    return QuadNum(n) * nearest_int_distance(QuadNum(n) * alpha - gamma);
}

namespace detail {

using u128 = unsigned __int128;

// floor(frac(x) * 2^128)
inline u128 fixed_fraction(const QuadNum& x) {
    mpz_class scale = mpz_class(1) << 128;
    mpz_class f = qnum_floor(x * QuadNum(mpq_class(scale)));
    mpz_class low;
    mpz_fdiv_r_2exp(low.get_mpz_t(), f.get_mpz_t(), 128);
    mpz_class hi = low >> 64;
    mpz_class lo = low - (hi << 64);
    return (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
}

inline long double fixed_distance(u128 x) {
    u128 d = std::min(x, static_cast<u128>(0) - x);
    return static_cast<long double>(d) / 340282366920938463463374607431768211456.0L;  // 2^128
}

inline double to_double(const QuadNum& x) { return std::stod(qnum_decimal(x, 30).text); }

}  // namespace detail

/**
 * Minimum of |n| ||n alpha - gamma|| over n_lo <= |n| <= n_hi (over positive
 * n only when two_sided is false). -n contributes n ||n alpha + gamma||.
 *
 * Default: a 128-bit fixed-point scan picks candidates, then every n whose
 * approximate value is within 1e-9 relative of the scan minimum is re-evaluated
 * exactly, so the reported minimum and argmin are exact. exact = true
 * evaluates every term in the field (slow, meant for short windows).
 */
inline OracleReport brute_force_min_one_sided(const QuadNum& alpha, const QuadNum& gamma, long n_lo, long n_hi, bool exact = false) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("oracle window must satisfy 1 <= n_lo <= n_hi");
    OracleReport rep;
    rep.n_lo = n_lo;
    rep.n_hi = n_hi;
    rep.exact_scan = exact;
    if (exact) {
        QuadNum x = QuadNum(n_lo) * alpha - gamma;
        bool first = true;
        for (long n = n_lo; n <= n_hi; ++n, x += alpha) {
            QuadNum v = QuadNum(n) * nearest_int_distance(x);
            if (first || v < rep.window_min) {
                rep.window_min = v;
                rep.argmin_n = n;
                first = false;
            }
        }
        return rep;
    }
    using detail::u128;
    const u128 a_fp = detail::fixed_fraction(alpha);
    const u128 g_fp = detail::fixed_fraction(gamma);
    auto approx = [&](long n, u128 x) { return static_cast<long double>(n) * detail::fixed_distance(x); };
    long double best = -1;
    u128 x = static_cast<u128>(n_lo) * a_fp - g_fp;
    for (long n = n_lo; n <= n_hi; ++n, x += a_fp) {
        long double v = approx(n, x);
        if (best < 0 || v < best) best = v;
    }
    const long double cut = best * (1 + 1e-9L) + 1e-30L;
    bool first = true;
    x = static_cast<u128>(n_lo) * a_fp - g_fp;
    for (long n = n_lo; n <= n_hi; ++n, x += a_fp) {
        if (approx(n, x) > cut) continue;
        QuadNum v = oracle_term(alpha, gamma, n);
        if (first || v < rep.window_min) {
            rep.window_min = v;
            rep.argmin_n = n;
            first = false;
        }
    }
    return rep;
}

inline OracleReport brute_force_min(const QuadNum& alpha, const QuadNum& gamma, long n_lo, long n_hi, bool exact = false,
                                    bool two_sided = true) {
    OracleReport rep = brute_force_min_one_sided(alpha, gamma, n_lo, n_hi, exact);
    rep.two_sided = two_sided;
    if (!two_sided) return rep;
    OracleReport neg = brute_force_min_one_sided(alpha, -gamma, n_lo, n_hi, exact);
    if (neg.window_min < rep.window_min) {
        rep.window_min = neg.window_min;
        rep.argmin_n = -neg.argmin_n;
    }
    return rep;
}

inline OracleReport brute_force_min(const PeriodTwoAlpha& al, const QuadNum& gamma, long n_lo, long n_hi, bool exact = false,
                                    bool two_sided = true) {
    return brute_force_min(al.eta, gamma, n_lo, n_hi, exact, two_sided);
}

inline void attach_target(OracleReport& rep, const QuadNum& target) {
    rep.target_m = target;
    if (qnum_sign(target) != 0) rep.relative_gap = std::abs(detail::to_double((rep.window_min - target) / target));
}

struct LiminfReport {
    std::vector<OracleReport> windows;
    bool stabilized = false;  // the last two minima agree to 1e-3 relative
    QuadNum value;            // minimum of the last window
};

inline std::vector<std::pair<long, long>> default_windows() { return {{1000, 10000}, {10000, 100000}, {100000, 1000000}}; }

inline LiminfReport liminf_estimate(const QuadNum& alpha, const QuadNum& gamma, const std::vector<std::pair<long, long>>& windows,
                                    bool exact = false, bool two_sided = true) {
    if (windows.empty()) throw std::invalid_argument("need at least one window");
    for (size_t i = 1; i < windows.size(); ++i)
        if (windows[i].first < windows[i - 1].second) throw std::invalid_argument("windows must be increasing and disjoint");
    LiminfReport out;
    for (const auto& [lo, hi] : windows) out.windows.push_back(brute_force_min(alpha, gamma, lo, hi, exact, two_sided));
    out.value = out.windows.back().window_min;
    if (out.windows.size() >= 2) {
        const QuadNum& prev = out.windows[out.windows.size() - 2].window_min;
        if (qnum_sign(out.value) == 0) out.stabilized = qnum_sign(prev) == 0;
        else out.stabilized = std::abs(detail::to_double((out.value - prev) / out.value)) < 1e-3;
    }
    return out;
}

/// gamma of a t-sequence, reduced to [0,1).
inline QuadNum gamma_mod1(const TSequence& s, const PeriodTwoAlpha& al) {
    QuadNum g = gamma_value(s, al);
    return g - QuadNum(mpq_class(qnum_floor(g)));
}

}  // namespace lagspec
