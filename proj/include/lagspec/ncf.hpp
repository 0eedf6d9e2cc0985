#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "quadfield.hpp"

namespace lagspec {

class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * alpha = [0; (a,b) repeating]^- together with the constants the rest of
 * the library runs on. All live in Q(sqrt(N)), N = ab(ab-4).
 */
struct PeriodTwoAlpha {
    long a = 0;
    long b = 0;
    long N = 0;
    QuadNum eta;   // [0; (a,b)]^-
    QuadNum beta;  // [0; (b,a)]^-
    QuadNum D;     // eta * beta

    // partial quotient at 1-based index i
    long quotient(long i) const { return (i % 2 != 0) ? a : b; }
    // alpha_j: beta for odd j, eta for even j
    const QuadNum& weight(long j) const { return (j % 2 != 0) ? beta : eta; }
};

inline PeriodTwoAlpha make_alpha(long a, long b) {
    if (a < 2 || a >= b) throw domain_error("need 2 <= a < b");
    PeriodTwoAlpha al;
    al.a = a;
    al.b = b;
    al.N = a * b * (a * b - 4);
    // sqrt(b^2 - 4b/a) = sqrt(N)/a and sqrt(a^2 - 4a/b) = sqrt(N)/b
    al.eta = QuadNum(mpq_class(b, 2), mpq_class(-1, 2 * a), al.N);
    al.beta = QuadNum(mpq_class(a, 2), mpq_class(-1, 2 * b), al.N);
    al.D = al.eta * al.beta;
    return al;
}

struct NcfExpansion {
    mpz_class integer_part;
    std::vector<long> preperiod;
    std::vector<long> period;
};

/**
 * Negative continued fraction of a real quadratic irrational.
 *
 * 0 < x < 1 is expanded as x = 1/(a1 - 1/(a2 - ...)) with integer part 0;
 * anything else as x = c - 1/(a1 - ...) with c = ceil(x). The period is
 * found by exact repetition of the remainder, so it is minimal.
 */
inline NcfExpansion ncf_expand(const QuadNum& x, int max_terms = 512) {
    if (x.is_rational()) throw domain_error("rational input has no periodic expansion");
    NcfExpansion out;
    QuadNum y;
    if (qnum_sign(x) > 0 && qnum_sign(x - QuadNum(1)) < 0) {
        out.integer_part = 0;
        y = x;
    } else {
        out.integer_part = qnum_ceil(x);
        y = QuadNum(mpq_class(out.integer_part)) - x;
    }
    std::unordered_map<QuadNum, size_t, QuadNumHash> seen;
    std::vector<long> digits;
    for (int k = 0; k < max_terms; ++k) {
        auto it = seen.find(y);
        if (it != seen.end()) {
            out.preperiod.assign(digits.begin(), digits.begin() + static_cast<long>(it->second));
            out.period.assign(digits.begin() + static_cast<long>(it->second), digits.end());
            return out;
        }
        seen.emplace(y, digits.size());
        QuadNum inv = y.inverse();
        mpz_class ak = qnum_ceil(inv);
        if (!ak.fits_slong_p()) throw domain_error("partial quotient overflow");
        digits.push_back(ak.get_si());
        y = QuadNum(mpq_class(ak)) - inv;
    }
    throw domain_error("no period within " + std::to_string(max_terms) + " terms");
}

}  // namespace lagspec
