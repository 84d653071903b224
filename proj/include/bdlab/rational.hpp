#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace bdlab {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational abs_q(const Rational& x) { return x < 0 ? Rational(-x) : x; }

// "p/q" in lowest terms, integers printed without denominator
inline std::string to_string(const Rational& x)
{
    Rational y(x);
    y.canonicalize();
    return y.get_str();
}

inline std::string to_string(const BigInt& x) { return x.get_str(); }

Rational parse_rational(const std::string& s);
BigInt parse_bigint(const std::string& s);

inline Rational make_q(long num, long den = 1)
{
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_q(const BigInt& num, const BigInt& den)
{
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// 1/b^j
Rational inv_pow(long base, long j);
BigInt ipow(long base, long j);

}
