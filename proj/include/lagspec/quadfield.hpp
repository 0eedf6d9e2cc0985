#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace lagspec {

class field_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Exact element p + q*sqrt(N) of a real quadratic field.
 *
 * N is the field context. A value with q == 0 may carry N == 0, meaning a
 * plain rational that takes on the context of whatever it is combined with.
 * N need not be squarefree.
 */
class QuadNum {
public:
    QuadNum() = default;
    QuadNum(long v) : p_(v) {}                         // NOLINT: rationals embed
    QuadNum(const mpq_class& p) : p_(p) { p_.canonicalize(); }  // NOLINT
    QuadNum(const mpq_class& p, const mpq_class& q, long n) : p_(p), q_(q), n_(n) {
        check_field(n);
        p_.canonicalize();
        q_.canonicalize();
    }

    const mpq_class& p() const { return p_; }
    const mpq_class& q() const { return q_; }
    long N() const { return n_; }
    bool is_rational() const { return sgn(q_) == 0; }

    static void check_field(long n) {
        if (n <= 0) throw field_error("field constant must be positive");
        mpz_class z(n);
        if (mpz_perfect_square_p(z.get_mpz_t())) throw field_error("field constant is a perfect square");
    }

    QuadNum conjugate() const { return raw(p_, -q_, n_); }

    // p^2 - q^2 N, the field norm
    mpq_class norm() const { return p_ * p_ - q_ * q_ * n_; }

    friend QuadNum operator+(const QuadNum& x, const QuadNum& y) {
        long n = join(x, y);
        return raw(x.p_ + y.p_, x.q_ + y.q_, n);
    }
    friend QuadNum operator-(const QuadNum& x, const QuadNum& y) {
        long n = join(x, y);
        return raw(x.p_ - y.p_, x.q_ - y.q_, n);
    }
    friend QuadNum operator*(const QuadNum& x, const QuadNum& y) {
        long n = join(x, y);
        if (x.is_rational()) return raw(x.p_ * y.p_, x.p_ * y.q_, n);
        if (y.is_rational()) return raw(x.p_ * y.p_, x.q_ * y.p_, n);
        return raw(x.p_ * y.p_ + x.q_ * y.q_ * n, x.p_ * y.q_ + x.q_ * y.p_, n);
    }
    friend QuadNum operator/(const QuadNum& x, const QuadNum& y) {
        long n = join(x, y);
        if (y.is_rational()) {
            if (sgn(y.p_) == 0) throw std::domain_error("division by zero");
            return raw(x.p_ / y.p_, x.q_ / y.p_, n);
        }
        // (p + q r)^-1 = (p - q r) / (p^2 - q^2 N)
        mpq_class nm = y.norm();
        QuadNum c = y.conjugate();
        QuadNum t = x * c;
        return raw(t.p_ / nm, t.q_ / nm, n);
    }
    QuadNum operator-() const { return raw(-p_, -q_, n_); }

    QuadNum& operator+=(const QuadNum& y) { return *this = *this + y; }
    QuadNum& operator-=(const QuadNum& y) { return *this = *this - y; }
    QuadNum& operator*=(const QuadNum& y) { return *this = *this * y; }
    QuadNum& operator/=(const QuadNum& y) { return *this = *this / y; }

    QuadNum inverse() const { return QuadNum(1) / *this; }
    QuadNum pow(unsigned e) const {
        QuadNum r(1), b = *this;
        r.n_ = n_;
        while (e) {
            if (e & 1u) r *= b;
            b *= b;
            e >>= 1u;
        }
        return r;
    }

    friend bool operator==(const QuadNum& x, const QuadNum& y) {
        if (x.p_ != y.p_ || x.q_ != y.q_) return false;
        return x.is_rational() || x.n_ == y.n_;
    }
    friend std::strong_ordering operator<=>(const QuadNum& x, const QuadNum& y);

private:
    static QuadNum raw(mpq_class p, mpq_class q, long n) {
        QuadNum r;
        r.p_ = std::move(p);
        r.q_ = std::move(q);
        r.n_ = n;
        return r;
    }
    static long join(const QuadNum& x, const QuadNum& y) {
        if (x.n_ == y.n_) return x.n_;
        if (x.n_ == 0) return y.n_;
        if (y.n_ == 0) return x.n_;
        if (x.is_rational() && y.is_rational()) return x.n_;
        throw field_error("mixing quadratic fields " + std::to_string(x.n_) + " and " + std::to_string(y.n_));
    }

    mpq_class p_{0};
    mpq_class q_{0};
    long n_ = 0;
};

inline QuadNum qnum_make(const mpq_class& p, const mpq_class& q, long n) { return QuadNum(p, q, n); }

// Exact sign of p + q sqrt(N); rational comparisons only.
inline int qnum_sign(const QuadNum& x) {
    int sp = sgn(x.p()), sq = sgn(x.q());
    if (sq == 0) return sp;
    if (sp == 0 || sp == sq) return sq;
    // opposite signs: compare p^2 with q^2 N (never equal, N is not a square)
    mpq_class lhs = x.p() * x.p();
    mpq_class rhs = x.q() * x.q() * x.N();
    return lhs > rhs ? sp : sq;
}

inline std::strong_ordering operator<=>(const QuadNum& x, const QuadNum& y) {
    int s = qnum_sign(x - y);
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

inline mpz_class floor_q(const mpq_class& v) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    return r;
}

inline mpz_class qnum_floor(const QuadNum& x) {
    if (x.is_rational()) return floor_q(x.p());
    // bracket sqrt(N) by r/s <= sqrt(N) < (r+1)/s and narrow until the
    // floor is pinned, settling the last step with an exact sign test
    for (unsigned bits = 16;; bits *= 2) {
        mpz_class s = mpz_class(1) << bits;
        mpz_class ns = mpz_class(x.N()) * s * s;
        mpz_class r;
        mpz_sqrt(r.get_mpz_t(), ns.get_mpz_t());
        mpq_class lo = x.p() + x.q() * mpq_class(r, s);
        mpq_class hi = x.p() + x.q() * mpq_class(r + 1, s);
        if (lo > hi) std::swap(lo, hi);
        mpz_class fl = floor_q(lo), fh = floor_q(hi);
        if (fl == fh) return fl;
        if (fh == fl + 1) return qnum_sign(x - QuadNum(mpq_class(fh))) >= 0 ? fh : fl;
    }
}

inline mpz_class qnum_ceil(const QuadNum& x) { return -qnum_floor(-x); }

struct Decimal {
    std::string text;
    mpq_class error;  // |value - text| <= error
};

// Round-to-nearest decimal, certified: the rounding is an exact floor.
inline Decimal qnum_decimal(const QuadNum& x, int digits) {
    if (digits < 1) throw std::invalid_argument("digits must be >= 1");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class v = qnum_floor(x * QuadNum(mpq_class(scale)) + QuadNum(mpq_class(1, 2)));
    bool neg = v < 0;
    if (neg) v = -v;
    std::string s = v.get_str();
    if (s.size() <= static_cast<size_t>(digits)) s.insert(0, static_cast<size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<size_t>(digits), ".");
    if (neg) s.insert(0, "-");
    return {s, mpq_class(1, 2) / mpq_class(scale)};
}

// Quick double, only for diagnostics and the hybrid oracle seed.
inline double qnum_to_double(const QuadNum& x) {
    return x.p().get_d() + x.q().get_d() * std::sqrt(static_cast<double>(x.N()));
}

/**
 * Move square factors of N into q. Trial division, so only meant for
 * presenting or comparing values across contexts, not for hot loops.
 */
inline QuadNum qnum_reduce(const QuadNum& x) {
    if (x.is_rational()) return x;
    long n = x.N();
    mpq_class q = x.q();
    for (long f = 2; f * f <= n; ++f) {
        while (n % (f * f) == 0) {
            n /= f * f;
            q *= f;
        }
    }
    return QuadNum(x.p(), q, n);
}

inline std::string rational_str(const mpq_class& v) {
    return v.get_num().get_str() + "/" + v.get_den().get_str();
}

inline std::ostream& operator<<(std::ostream& os, const QuadNum& x) {
    os << x.p().get_str();
    if (!x.is_rational()) {
        os << (sgn(x.q()) < 0 ? " - " : " + ") << mpq_class(abs(x.q())).get_str() << "*sqrt(" << x.N() << ")";
    }
    return os;
}

struct QuadNumHash {
    size_t operator()(const QuadNum& x) const {
        std::hash<std::string> h;
        return h(x.p().get_str()) * 31u ^ h(x.q().get_str());
    }
};

}  // namespace lagspec
