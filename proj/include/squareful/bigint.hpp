#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace squareful {

/// Fixed 256-bit signed integer that throws std::overflow_error instead of
/// wrapping.
using Int256 = boost::multiprecision::checked_int256_t;

/// Arbitrary precision integer and rational, used where exactness matters more
/// than speed (Gauss sums at high prime powers, local densities).
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt big_pow(std::int64_t base, unsigned exp)
{
    return boost::multiprecision::pow(BigInt(base), exp);
}

inline double to_double(const Rational& r)
{
    return r.convert_to<double>();
}

template <class Number>
std::string to_string(const Number& n)
{
    return n.str();
}

inline std::string to_string(const Rational& r)
{
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

} // namespace squareful
