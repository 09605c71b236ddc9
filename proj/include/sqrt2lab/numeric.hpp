#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

namespace sqrt2lab {

using BigInt = mpz_class;
using Rational = mpq_class;

// 100 significant decimal digits; enough headroom for 50-digit reports.
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<100>,
    boost::multiprecision::et_off>;

/// Natural log of a positive integer from its bit length and leading 64 bits.
/// Absolute error is below 2^-62.
Real log_big(const BigInt& v);

Real to_real(const Rational& q);

/// Fixed-point decimal rendering, rounded to nearest.
std::string to_fixed(const Real& x, int decimals);

}  // namespace sqrt2lab
