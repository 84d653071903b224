#include "bdlab/rational.hpp"

#include <stdexcept>

namespace bdlab {

Rational parse_rational(const std::string& s)
{
    Rational r;
    if (s.empty() || r.set_str(s, 10) != 0)
        throw std::invalid_argument("not a rational: '" + s + "'");
    if (r.get_den() == 0)
        throw std::invalid_argument("zero denominator: '" + s + "'");
    r.canonicalize();
    return r;
}

BigInt parse_bigint(const std::string& s)
{
    BigInt z;
    if (s.empty() || z.set_str(s, 10) != 0)
        throw std::invalid_argument("not an integer: '" + s + "'");
    return z;
}

BigInt ipow(long base, long j)
{
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(j));
    return r;
}

Rational inv_pow(long base, long j)
{
    return make_q(BigInt(1), ipow(base, j));
}

}
