#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncf.hpp"

namespace lagspec {

class block_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class sequence_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct DigitPair {
    long b_odd = 0;
    long b_even = 0;
    bool operator==(const DigitPair&) const = default;
};

enum class BlockKind { A, Ap, B, Bp, C, Cp, E, Ep, F, Fp, G, H, Hp };

struct Block {
    BlockKind kind = BlockKind::A;
    long t = 0;  // unused by G, H, H'
};

inline std::string block_name(const Block& blk) {
    static const char* names[] = {"A", "A'", "B", "B'", "C", "C'", "E", "E'", "F", "F'", "G", "H", "H'"};
    std::string s = names[static_cast<int>(blk.kind)];
    if (blk.kind != BlockKind::G && blk.kind != BlockKind::H && blk.kind != BlockKind::Hp) {
        // primes go after the parameter, as in A1'
        bool primed = s.size() == 2;
        s = s.substr(0, 1) + std::to_string(blk.t) + (primed ? "'" : "");
    }
    return s;
}

/// Raw digits b_i of a block and the parity of the index the block starts on.
struct BlockDigits {
    std::vector<long> digits;
    bool starts_odd = true;
};

namespace detail {

inline long half_exact(long v, const Block& blk) {
    if (v % 2 != 0) throw block_error("block " + block_name(blk) + " has a non-integer digit");
    return v / 2;
}

}  // namespace detail

inline BlockDigits block_digits(const Block& blk, const PeriodTwoAlpha& al) {
    const long a = al.a, b = al.b, t = blk.t;
    BlockDigits out;
    auto pair = [&](long twice_odd, long twice_even) {
        out.digits = {detail::half_exact(twice_odd, blk), detail::half_exact(twice_even, blk)};
    };
    switch (blk.kind) {
        case BlockKind::A: pair(a - 2, b - 2 + t); break;
        case BlockKind::Ap: pair(a - 2, b - 2 - t); break;
        case BlockKind::B: pair(a - 3, b - 2 + t); break;
        case BlockKind::Bp: pair(a - 1, b - 2 - t); break;
        case BlockKind::C: pair(a - 4, b - 2 + t); break;
        case BlockKind::Cp: pair(a, b - 2 - t); break;
        case BlockKind::E: pair(a - 5, b - 2 + t); break;
        case BlockKind::Ep: pair(a + 1, b - 2 - t); break;
        case BlockKind::F: pair(2 * (a - 1), b - 2 - t); break;
        case BlockKind::Fp: pair(2 * (a - 1), b - 2 + (t - 4)); break;
        case BlockKind::G:
            out.starts_odd = false;
            out.digits = {detail::half_exact(b - 3, blk), a - 1, detail::half_exact(b - 3, blk)};
            break;
        case BlockKind::H: {
            long x = detail::half_exact(a - 1, blk), y = detail::half_exact(b - 5, blk);
            out.digits = {x, y, a - 1, y, x};
            break;
        }
        case BlockKind::Hp: {
            long x = detail::half_exact(a - 3, blk), y = detail::half_exact(b - 1, blk);
            out.digits = {x, y, a - 1, y, x};
            break;
        }
    }
    bool odd = out.starts_odd;
    for (long d : out.digits) {
        long top = odd ? a : b;
        if (d < 0 || d > top - 1) throw block_error("block " + block_name(blk) + " has a digit out of range");
        odd = !odd;
    }
    return out;
}

inline std::vector<DigitPair> block_pairs(const Block& blk, const PeriodTwoAlpha& al) {
    auto bd = block_digits(blk, al);
    if (!bd.starts_odd || bd.digits.size() % 2 != 0) throw block_error("block " + block_name(blk) + " is not a whole number of pairs");
    std::vector<DigitPair> out;
    for (size_t i = 0; i < bd.digits.size(); i += 2) out.push_back({bd.digits[i], bd.digits[i + 1]});
    return out;
}

/**
 * Eventually periodic t-sequence, t_i = 2 b_i - (a_i - 2). Index 1 is odd
 * (partial quotient a). Both parts have even length so pairs stay aligned.
 */
struct TSequence {
    std::vector<long> preperiod;
    std::vector<long> period;

    long size() const { return static_cast<long>(period.size()); }

    // t at 1-based global index i; indices past the preperiod run through the
    // periodic part, and indices <= len(preperiod) hit the preperiod only
    // when it is non-empty; the periodic part is extended both ways
    long at(long i) const {
        long pre = static_cast<long>(preperiod.size());
        if (i >= 1 && i <= pre) return preperiod[static_cast<size_t>(i - 1)];
        long L = size();
        long k = ((i - pre - 1) % L + L) % L;
        return period[static_cast<size_t>(k)];
    }
    bool operator==(const TSequence&) const = default;
};

inline long t_from_digit(long digit, long i, const PeriodTwoAlpha& al) { return 2 * digit - (al.quotient(i) - 2); }
inline long digit_from_t(long t, long i, const PeriodTwoAlpha& al) { return (al.quotient(i) - 2 + t) / 2; }

inline void validate(const TSequence& s, const PeriodTwoAlpha& al) {
    if (s.period.empty()) throw sequence_error("empty period");
    if (s.period.size() % 2 != 0 || s.preperiod.size() % 2 != 0) throw sequence_error("odd length breaks pair alignment");
    auto check = [&](const std::vector<long>& v) {
        for (size_t k = 0; k < v.size(); ++k) {
            long ai = al.quotient(static_cast<long>(k) + 1);
            long t = v[k];
            if (((t - ai) % 2) != 0) throw sequence_error("t has the wrong parity at position " + std::to_string(k + 1));
            if (t > ai || t < -(ai - 2)) throw sequence_error("t out of range at position " + std::to_string(k + 1));
        }
    };
    check(s.preperiod);
    check(s.period);
}

inline std::vector<long> digits_to_t(const std::vector<long>& digits, const PeriodTwoAlpha& al, long first_index = 1) {
    std::vector<long> t;
    t.reserve(digits.size());
    for (size_t k = 0; k < digits.size(); ++k) t.push_back(t_from_digit(digits[k], first_index + static_cast<long>(k), al));
    return t;
}

/// Concatenate blocks into a purely periodic sequence. Block start parities
/// are checked against the running position.
inline TSequence tseq_from_blocks(const std::vector<Block>& blocks, const PeriodTwoAlpha& al) {
    std::vector<long> digits;
    for (const auto& blk : blocks) {
        auto bd = block_digits(blk, al);
        bool pos_odd = digits.size() % 2 == 0;
        if (bd.starts_odd != pos_odd) throw sequence_error("block " + block_name(blk) + " lands on the wrong parity");
        digits.insert(digits.end(), bd.digits.begin(), bd.digits.end());
    }
    if (digits.empty() || digits.size() % 2 != 0) throw sequence_error("period has odd length");
    TSequence s;
    s.period = digits_to_t(digits, al);
    return s;
}

namespace detail {

inline Block parse_block(const std::string& tok) {
    size_t i = 0;
    if (tok.empty() || !std::isupper(static_cast<unsigned char>(tok[0]))) throw block_error("bad block token '" + tok + "'");
    char letter = tok[i++];
    bool primed = false;
    if (i < tok.size() && tok[i] == '\'') {
        primed = true;
        ++i;
    }
    std::string num;
    while (i < tok.size() && (std::isdigit(static_cast<unsigned char>(tok[i])) || tok[i] == '-')) num += tok[i++];
    if (i < tok.size() && tok[i] == '\'') {
        primed = true;
        ++i;
    }
    if (i != tok.size()) throw block_error("bad block token '" + tok + "'");
    Block blk;
    switch (letter) {
        case 'A': blk.kind = primed ? BlockKind::Ap : BlockKind::A; break;
        case 'B': blk.kind = primed ? BlockKind::Bp : BlockKind::B; break;
        case 'C': blk.kind = primed ? BlockKind::Cp : BlockKind::C; break;
        case 'E': blk.kind = primed ? BlockKind::Ep : BlockKind::E; break;
        case 'F': blk.kind = primed ? BlockKind::Fp : BlockKind::F; break;
        case 'G':
            if (primed) throw block_error("no block G'");
            blk.kind = BlockKind::G;
            break;
        case 'H': blk.kind = primed ? BlockKind::Hp : BlockKind::H; break;
        default: throw block_error("unknown block letter in '" + tok + "'");
    }
    bool multi = letter == 'G' || letter == 'H';
    if (multi && !num.empty()) throw block_error("block " + std::string(1, letter) + " takes no parameter");
    if (!multi) {
        if (num.empty() || num == "-") throw block_error("block '" + tok + "' needs a parameter");
        blk.t = std::stol(num);
    }
    return blk;
}

// tokens with "(" ... ")^k" grouping
inline std::vector<Block> parse_blocks(const std::string& text, size_t& pos) {
    std::vector<Block> out;
    while (pos < text.size()) {
        char c = text[pos];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else if (c == '(') {
            ++pos;
            auto inner = parse_blocks(text, pos);
            if (pos >= text.size() || text[pos] != ')') throw block_error("unbalanced parenthesis");
            ++pos;
            long reps = 1;
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                size_t end = pos;
                while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
                if (end == pos) throw block_error("missing exponent");
                reps = std::stol(text.substr(pos, end - pos));
                pos = end;
            }
            for (long r = 0; r < reps; ++r) out.insert(out.end(), inner.begin(), inner.end());
        } else if (c == ')') {
            return out;
        } else {
            size_t end = pos;
            while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) && text[end] != '(' && text[end] != ')') ++end;
            out.push_back(parse_block(text.substr(pos, end - pos)));
            pos = end;
        }
    }
    return out;
}

}  // namespace detail

/**
 * Period notation: block strings ("A1 A1 A1' A1'", "(A1' A1' A1 A1)^2",
 * "H G H' G") or raw t-tuples "t:(2,-3,2,-1)".
 */
inline TSequence parse_period(const std::string& text, const PeriodTwoAlpha& al) {
    auto first = text.find_first_not_of(" \t");
    if (first != std::string::npos && text.compare(first, 2, "t:") == 0) {
        std::string body = text.substr(first + 2);
        for (char& c : body)
            if (c == '(' || c == ')' || c == ',') c = ' ';
        std::istringstream in(body);
        TSequence s;
        long v;
        while (in >> v) s.period.push_back(v);
        if (!in.eof()) throw sequence_error("bad t-tuple '" + text + "'");
        validate(s, al);
        return s;
    }
    size_t pos = 0;
    auto blocks = detail::parse_blocks(text, pos);
    if (pos != text.size()) throw block_error("unbalanced parenthesis");
    auto s = tseq_from_blocks(blocks, al);
    validate(s, al);
    return s;
}

inline std::string format_t(const std::vector<long>& t) {
    std::string s = "(";
    for (size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + std::to_string(t[k]);
    return s + ")";
}

/// gamma = sum_i (b_{2i-1} eta + b_{2i} D) D^{i-1}, with the periodic tail summed in closed form.
inline QuadNum gamma_value(const TSequence& s, const PeriodTwoAlpha& al) {
    validate(s, al);
    auto pair_sum = [&](const std::vector<long>& t, QuadNum& scale) {
        QuadNum acc(0);
        for (size_t k = 0; k < t.size(); k += 2) {
            long i = static_cast<long>(k) + 1;
            QuadNum term = QuadNum(digit_from_t(t[k], i, al)) * al.eta + QuadNum(digit_from_t(t[k + 1], i + 1, al)) * al.D;
            acc += term * scale;
            scale *= al.D;
        }
        return acc;
    };
    QuadNum scale(1);
    QuadNum head = pair_sum(s.preperiod, scale);
    QuadNum at_start = scale;
    QuadNum one_period = pair_sum(s.period, scale);
    // scale is now D^(pre + P) pairs; divide out the start to get D^P
    QuadNum dp = scale / at_start;
    return head + one_period / (QuadNum(1) - dp);
}

namespace detail {

// closed-form d_i^+ over one period for a purely periodic sequence
inline QuadNum d_plus_periodic(const TSequence& s, long i, const PeriodTwoAlpha& al) {
    long P = s.size() / 2;
    QuadNum acc(0), pw(1);
    const QuadNum& ai = al.weight(i);
    for (long j = 0; j < P; ++j) {
        acc += (QuadNum(s.at(i + 2 * j + 1)) * ai + QuadNum(s.at(i + 2 * j + 2)) * al.D) * pw;
        pw *= al.D;
    }
    return acc / (QuadNum(1) - pw);
}

inline QuadNum d_minus_periodic(const TSequence& s, long i, const PeriodTwoAlpha& al) {
    long P = s.size() / 2;
    QuadNum acc(0), pw(1);
    const QuadNum& am = al.weight(i - 1);
    for (long j = 0; j < P; ++j) {
        acc += (QuadNum(s.at(i - 2 * j)) * am + QuadNum(s.at(i - 2 * j - 1)) * al.D) * pw;
        pw *= al.D;
    }
    return acc / (QuadNum(1) - pw);
}

}  // namespace detail

/// d_i^+ = sum_j (t_{i+2j+1} alpha_i + t_{i+2j+2} D) D^j
inline QuadNum d_plus(const TSequence& s, long i, const PeriodTwoAlpha& al) {
    long pre = static_cast<long>(s.preperiod.size());
    if (i < 0) throw sequence_error("index must be >= 0");
    if (i >= pre) return detail::d_plus_periodic(s, i, al);
    // walk forward into the periodic part
    QuadNum tail = d_plus(s, i + 2, al);
    return QuadNum(s.at(i + 1)) * al.weight(i) + QuadNum(s.at(i + 2)) * al.D + al.D * tail;
}

/// d_i^- = sum_j (t_{i-2j} alpha_{i-1} + t_{i-2j-1} D) D^j; needs i inside the periodic part.
inline QuadNum d_minus(const TSequence& s, long i, const PeriodTwoAlpha& al) {
    long pre = static_cast<long>(s.preperiod.size());
    if (i <= pre) throw sequence_error("d_minus is undefined at a preperiod index");
    if (pre == 0) return detail::d_minus_periodic(s, i, al);
    // the backward sum runs over the bi-infinite period, never the preperiod;
    // pre is even, so shifting by it keeps the parity of i
    TSequence p;
    p.period = s.period;
    return detail::d_minus_periodic(p, i - pre, al);
}

/// All tails of a purely periodic sequence at i = 1..L, using the one-step recurrences.
struct Tails {
    std::vector<QuadNum> plus;   // plus[i-1] = d_i^+
    std::vector<QuadNum> minus;  // minus[i-1] = d_i^-
};

inline Tails all_tails(const TSequence& s, const PeriodTwoAlpha& al) {
    TSequence p;
    p.period = s.period;
    long L = p.size();
    Tails out;
    out.plus.resize(static_cast<size_t>(L));
    out.minus.resize(static_cast<size_t>(L));
    auto ix = [L](long i) { return static_cast<size_t>(((i - 1) % L + L) % L); };
    out.plus[ix(L)] = detail::d_plus_periodic(p, L, al);
    out.plus[ix(L - 1)] = detail::d_plus_periodic(p, L - 1, al);
    for (long i = L - 2; i >= 1; --i)
        out.plus[ix(i)] = QuadNum(p.at(i + 1)) * al.weight(i) + QuadNum(p.at(i + 2)) * al.D + al.D * out.plus[ix(i + 2)];
    out.minus[ix(1)] = detail::d_minus_periodic(p, 1, al);
    out.minus[ix(2)] = detail::d_minus_periodic(p, 2, al);
    for (long i = 3; i <= L; ++i)
        out.minus[ix(i)] = QuadNum(p.at(i)) * al.weight(i - 1) + QuadNum(p.at(i - 1)) * al.D + al.D * out.minus[ix(i - 2)];
    return out;
}

inline std::array<QuadNum, 4> s_from_tails(const QuadNum& dp, const QuadNum& dm, long i, const PeriodTwoAlpha& al) {
    const QuadNum one(1);
    const QuadNum& ai = al.weight(i);
    const QuadNum& am = al.weight(i - 1);
    return {(one - ai + dp) * (one - am + dm), (one + ai - dp) * (one + am + dm), (one - ai - dp) * (one - am - dm),
            (one + ai + dp) * (one + am - dm)};
}

/// (s1*, s2*, s3*, s4*) at index i.
inline std::array<QuadNum, 4> s_star(const TSequence& s, long i, const PeriodTwoAlpha& al) {
    return s_from_tails(d_plus(s, i, al), d_minus(s, i, al), i, al);
}

inline bool touches_top(const std::vector<long>& t, const PeriodTwoAlpha& al, long first_index = 1) {
    for (size_t k = 0; k < t.size(); ++k)
        if (t[k] == al.quotient(first_index + static_cast<long>(k))) return true;
    return false;
}

/**
 * Sequence for 1 - alpha - gamma. Entries equal to a_k stay put, the rest
 * are negated, and each a_k entry takes 2 off both neighbours (cyclically
 * within the period).
 */
inline TSequence reflect(const TSequence& s, const PeriodTwoAlpha& al) {
    TSequence r = s;
    // keep an a_k entry at the very end of the preperiod off the period
    // boundary by unrolling one pair of the period
    for (long guard = 0; !r.preperiod.empty() && r.preperiod.back() == al.quotient(static_cast<long>(r.preperiod.size())) &&
                         guard < r.size();
         guard += 2) {
        r.preperiod.push_back(r.period[0]);
        r.preperiod.push_back(r.period[1]);
        std::rotate(r.period.begin(), r.period.begin() + 2, r.period.end());
    }
    auto flip = [&](std::vector<long>& v, long first_index, bool cyclic) {
        const std::vector<long> orig = v;
        const long n = static_cast<long>(v.size());
        auto at = [&](long k) -> long& { return v[static_cast<size_t>(k)]; };
        for (long k = 0; k < n; ++k) {
            long ak = al.quotient(first_index + k);
            at(k) = orig[static_cast<size_t>(k)] == ak ? ak : -orig[static_cast<size_t>(k)];
        }
        for (long k = 0; k < n; ++k) {
            if (orig[static_cast<size_t>(k)] != al.quotient(first_index + k)) continue;
            if (k + 1 < n) at(k + 1) -= 2;
            else if (cyclic) at(0) -= 2;
            if (k > 0) at(k - 1) -= 2;
            else if (cyclic) at(n - 1) -= 2;
        }
    };
    const long pre = static_cast<long>(r.preperiod.size());
    const bool head_top = !r.period.empty() && r.period[0] == al.quotient(pre + 1);
    flip(r.preperiod, 1, false);
    flip(r.period, pre + 1, true);
    // an a_k in the first period slot also reaches back into the preperiod
    if (head_top && pre > 0) r.preperiod.back() -= 2;
    return r;
}

struct MStarDetail {
    QuadNum value;
    bool reflected = false;  // minimum found on the reflected sequence
    long index = 0;          // cut index within one period, 1-based
    int which = 0;           // 1..4
    bool top_mode = false;   // some t_k = a_k in the period
};

/**
 * M*(alpha, gamma) for the periodic part of s: the minimum over every cut of
 * one period of s1*, s2*, taken over the sequence and its reflection. With no
 * t_k = a_k this is the same as the minimum of s1*..s4* over the period.
 */
inline MStarDetail m_star_detail(const TSequence& s, const PeriodTwoAlpha& al) {
    validate(s, al);
    TSequence p;
    p.period = s.period;
    MStarDetail best;
    best.top_mode = touches_top(p.period, al);
    bool have = false;
    for (int pass = 0; pass < 2; ++pass) {
        TSequence q = pass == 0 ? p : reflect(p, al);
        Tails tl = all_tails(q, al);
        for (long i = 1; i <= q.size(); ++i) {
            auto sv = s_from_tails(tl.plus[static_cast<size_t>(i - 1)], tl.minus[static_cast<size_t>(i - 1)], i, al);
            for (int w = 0; w < 2; ++w) {
                if (!have || sv[static_cast<size_t>(w)] < best.value) {
                    have = true;
                    best.value = sv[static_cast<size_t>(w)];
                    best.reflected = pass == 1;
                    best.index = i;
                    best.which = w + 1;
                }
            }
        }
    }
    return best;
}

inline QuadNum m_star(const TSequence& s, const PeriodTwoAlpha& al) { return m_star_detail(s, al).value; }

/// M = M* / (4(1 - D))
inline QuadNum m_value(const QuadNum& mstar, const PeriodTwoAlpha& al) { return mstar / (QuadNum(4) * (QuadNum(1) - al.D)); }

/// t_k = a_k infinitely often at parity j: M* <= alpha_{j-1}.
inline QuadNum upper_bound_inf_ta(const PeriodTwoAlpha& al, long j) { return al.weight(j - 1); }

/// |t_k| >= t infinitely often at parity j: M* <= (a_j - t) alpha_{j-1} = 1 - t alpha_{j-1} + D.
inline QuadNum upper_bound_inf_t(const PeriodTwoAlpha& al, long j, long t) {
    long aj = al.quotient(j);
    if (t < 0 || t > aj) throw domain_error("t out of range [0, a_j]");
    return QuadNum(aj - t) * al.weight(j - 1);
}

}  // namespace lagspec
