#pragma once

// Branch words over {L, R} for the middle-thirds construction on [0, 1].
//
// Letter L picks the left closed third, R the right one. An infinite word maps
// to the point sum d_i 3^-i with d_i = 0 (L) or 2 (R); the map is an
// order-isomorphism onto the middle-thirds set, so comparing values and
// comparing words lexicographically agree.

#include "gillab/interval_set.hpp"
#include "gillab/rational.hpp"

#include <map>
#include <string>
#include <string_view>

namespace gillab {

// Eventually periodic word: prefix followed by period repeated forever.
// Text form: "LRR(LR)" -- the parenthesized part is the period.
struct Address {
    std::string prefix;
    std::string period = "L";

    Address() = default;
    Address(std::string pre, std::string per) : prefix(std::move(pre)), period(std::move(per))
    {
        validate();
        canonicalize();
    }

    static Address parse(std::string_view text)
    {
        auto open = text.find('(');
        auto close = text.find(')');
        if (open == std::string_view::npos || close != text.size() - 1 || close <= open + 1)
            throw Error("malformed address: '" + std::string(text) + "'");
        return Address(std::string(text.substr(0, open)), std::string(text.substr(open + 1, close - open - 1)));
    }

    std::string str() const { return prefix + "(" + period + ")"; }

    char at(std::size_t i) const
    {
        if (i < prefix.size()) return prefix[i];
        return period[(i - prefix.size()) % period.size()];
    }

    // First n letters.
    std::string head(std::size_t n) const
    {
        std::string out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out += at(i);
        return out;
    }

    // The word with its first n letters dropped.
    Address tail(std::size_t n) const
    {
        if (n <= prefix.size()) return Address(prefix.substr(n), period);
        std::size_t shift = (n - prefix.size()) % period.size();
        return Address("", period.substr(shift) + period.substr(0, shift));
    }

    bool eventually_constant() const { return period.size() == 1; }

    // Extreme words L(R) ... those are the endpoints of the middle-thirds set.
    bool is_endpoint_word() const { return eventually_constant(); }

    friend bool operator==(const Address& a, const Address& b) { return a.prefix == b.prefix && a.period == b.period; }

    Rational unit_value() const;

private:
    void validate() const
    {
        if (period.empty()) throw Error("address period must be non-empty");
        for (char c : prefix + period)
            if (c != 'L' && c != 'R') throw Error("address letters must be L or R");
    }

    void canonicalize()
    {
        // primitive period
        const std::size_t m = period.size();
        for (std::size_t d = 1; d < m; ++d) {
            if (m % d) continue;
            bool ok = true;
            for (std::size_t i = d; i < m && ok; ++i) ok = period[i] == period[i - d];
            if (ok) {
                period.resize(d);
                break;
            }
        }
        // fold the prefix into the period while possible
        while (!prefix.empty() && prefix.back() == period.back()) {
            prefix.pop_back();
            period = period.back() + period.substr(0, period.size() - 1);
        }
    }
};

inline Rational word_value(std::string_view word)
{
    Integer acc = 0;
    for (char c : word) {
        acc *= 3;
        if (c == 'R') acc += 2;
    }
    return Rational(acc, pow_int(3, word.size()));
}

inline Rational Address::unit_value() const
{
    const std::size_t n = prefix.size();
    const std::size_t m = period.size();
    Integer q = 0;
    for (char c : period) {
        q *= 3;
        if (c == 'R') q += 2;
    }
    Rational periodic(q, pow_int(3, m) - 1);
    periodic.canonicalize();
    Rational v = word_value(prefix) + periodic * third_pow(n);
    v.canonicalize();
    return v;
}

// Closed hull of the cylinder of a finite word inside [0, 1].
inline ClosedInterval cylinder_hull(std::string_view word)
{
    Rational lo = word_value(word);
    return {lo, lo + third_pow(word.size())};
}

// The open middle third removed below `node`: (node L R^inf, node R L^inf).
inline OpenInterval node_gap(std::string_view node)
{
    Rational lo = word_value(node);
    Rational w = third_pow(node.size());
    return {lo + w / 3, lo + 2 * w / 3};
}

inline Rational affine(const ClosedInterval& base, const Rational& u) { return base.lo + base.width() * u; }

inline Rational unaffine(const ClosedInterval& base, const Rational& t) { return (t - base.lo) / base.width(); }

// Result of running the exact ternary digit analysis on a point of [0, 1].
struct TernaryPath {
    bool in_set = false;
    Address address;      // valid when in_set
    std::string gap_node; // valid when !in_set: the point lies in node_gap(gap_node)
};

// Exact middle-thirds analysis of u in [0, 1]. With u = n/q in lowest terms,
// tripling strips one factor 3 from q per step until q is coprime to 3; from
// then on the digit map permutes residues mod q, so the state recurs.
inline TernaryPath ternary_locate(const Rational& u)
{
    if (u < 0 || u > 1) throw Error("ternary_locate: point outside [0,1]");
    Integer n = u.get_num();
    Integer q = u.get_den();
    std::string letters;
    std::size_t pre = 0;
    Integer n0;
    bool periodic_phase = false;
    for (;;) {
        if (!periodic_phase && mpz_divisible_ui_p(q.get_mpz_t(), 3) == 0) {
            periodic_phase = true;
            pre = letters.size();
            n0 = n;
        } else if (periodic_phase && letters.size() > pre && n == n0) {
            TernaryPath p;
            p.in_set = true;
            p.address = Address(letters.substr(0, pre), letters.substr(pre));
            return p;
        }
        Integer n3 = 3 * n;
        if (n3 <= q) {
            letters += 'L';
        } else if (n3 >= 2 * q) {
            letters += 'R';
            n3 -= 2 * q;
        } else {
            TernaryPath p;
            p.gap_node = letters;
            return p;
        }
        if (periodic_phase) {
            n = std::move(n3);
        } else {
            // 3 divides both n3 and q, and the quotient stays in lowest terms
            mpz_divexact_ui(n.get_mpz_t(), n3.get_mpz_t(), 3);
            mpz_divexact_ui(q.get_mpz_t(), q.get_mpz_t(), 3);
        }
    }
}

// Whether u lies in the depth-d middle-thirds cover of [0, 1].
inline bool ternary_in_stage(const Rational& u, int depth)
{
    if (u < 0 || u > 1) return false;
    static const Rational third(1, 3);
    static const Rational two_thirds(2, 3);
    Rational x = u;
    for (int i = 0; i < depth; ++i) {
        if (x <= third)
            x *= 3;
        else if (x >= two_thirds)
            x = 3 * x - 2;
        else
            return false;
    }
    return true;
}

}  // namespace gillab
