#pragma once

// Exact rational scalars. Everything in gillab is computed over these; there is
// no floating point anywhere in the core.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gillab {

using Rational = mpq_class;
using Integer = mpz_class;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : Error {
    using Error::Error;
};

inline Rational rat(long num, long den = 1)
{
    if (den == 0) throw Error("rat: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Lowest-terms text: "n/d", or "n" for integers.
inline std::string to_string(const Rational& q)
{
    return q.get_str();
}

inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto first = s.find_first_not_of(" \t");
    auto last = s.find_last_not_of(" \t");
    if (first == std::string::npos) throw Error("empty rational");
    s = s.substr(first, last - first + 1);
    Rational q;
    if (q.set_str(s, 10) != 0) throw Error("malformed rational: '" + s + "'");
    if (q.get_den() == 0) throw Error("zero denominator: '" + s + "'");
    q.canonicalize();
    return q;
}

inline Integer pow_int(unsigned long base, unsigned long exp)
{
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
    return r;
}

// 3^-k as an exact rational.
inline Rational third_pow(unsigned long k)
{
    Rational q(Integer(1), pow_int(3, k));
    return q;
}

inline Rational half_pow(unsigned long k)
{
    Rational q(Integer(1), pow_int(2, k));
    return q;
}

inline const Rational& min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }

// True when q = k / 2^n for integers k, n >= 0.
inline bool is_dyadic(const Rational& q)
{
    Integer den = q.get_den();
    return mpz_popcount(den.get_mpz_t()) == 1;
}

inline Integer floor_of(const Rational& q)
{
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// Round to nearest integer, ties upward. Only used at the pixel mapping stage.
inline Integer round_nearest(const Rational& q) { return floor_of(q + Rational(1, 2)); }

}  // namespace gillab
