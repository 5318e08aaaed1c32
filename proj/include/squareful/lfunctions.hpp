#pragma once

// Quadratic characters attached to Q(sqrt(A)) and the values L(1, chi),
// L(2, chi) through finite character sums.

#include "squareful/arith.hpp"
#include "squareful/parallel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <cmath>
#include <string>

namespace squareful {

/// Discriminant of Q(sqrt(d)) for a signed squarefree d != 1.
inline i64 fundamental_discriminant(i64 d)
{
    require(d != 0 && d != 1, "fundamental_discriminant: d must be a non-square");
    require(is_squarefree(d), "fundamental_discriminant: d must be squarefree");
    const i64 r = ((d % 4) + 4) % 4;
    return r == 1 ? d : 4 * d;
}

inline int residue_symbol(const Int256& A, u64 p)
{
    const Int256 ip = static_cast<i64>(p);
    Int256 r = A % ip;
    if (r < 0) r += ip;
    return jacobi(r.convert_to<i64>(), static_cast<i64>(p));
}

/// Checks (D/p) = (A/p) on the first `count` odd primes coprime to A.
inline void check_character(i64 D, const Int256& A, int count = 50)
{
    int checked = 0;
    for (u64 p = 3; checked < count; p += 2) {
        if (!is_prime(p)) continue;
        const Int256 ip = static_cast<i64>(p);
        if (A % ip == 0) continue;
        const int lhs = kronecker(D, static_cast<i64>(p));
        const int rhs = residue_symbol(A, p);
        ensure(lhs == rhs, "character mismatch: (" + std::to_string(D) + "/" + std::to_string(p) +
                               ") != (A/p)");
        ++checked;
    }
}

inline constexpr i64 max_character_modulus = 10'000'000;

namespace detail {

inline double L1_uncached(i64 D)
{
    require(D != 1 && D != 0, "L1: D must be a nontrivial discriminant");
    require(uabs(D) <= u64(max_character_modulus), "L1: |D| too large");
    const long double pi = boost::math::constants::pi<long double>();
    const i64 m = static_cast<i64>(uabs(D));
    if (D < 0) {
        i64 s = 0;
        for (i64 a = 1; a < m; ++a) s += kronecker(D, a) * a;
        return static_cast<double>(-pi * static_cast<long double>(s) / std::pow(static_cast<long double>(m), 1.5L));
    }
    long double s = 0;
    for (i64 a = 1; a < m; ++a) {
        const int chi = kronecker(D, a);
        if (chi) s += chi * std::log(std::sin(pi * static_cast<long double>(a) / static_cast<long double>(m)));
    }
    return static_cast<double>(-s / std::sqrt(static_cast<long double>(m)));
}

inline double L2_uncached(i64 D)
{
    require(D != 0, "L2: D must be nonzero");
    require(uabs(D) <= u64(max_character_modulus), "L2: |D| too large");
    const i64 m = static_cast<i64>(uabs(D));
    long double s = 0;
    for (i64 a = 1; a <= m; ++a) {
        const int chi = kronecker(D, a);
        if (chi) s += chi * boost::math::trigamma(static_cast<long double>(a) / static_cast<long double>(m));
    }
    return static_cast<double>(s / (static_cast<long double>(m) * static_cast<long double>(m)));
}

} // namespace detail

/// L(1, chi_D) for a fundamental discriminant D.
inline double L1(i64 D)
{
    static Memo<i64, double> memo;
    return memo.get(D, [&] { return detail::L1_uncached(D); });
}

/// L(2, chi_D) = |D|^{-2} sum_a chi(a) psi_1(a / |D|).
inline double L2(i64 D)
{
    static Memo<i64, double> memo;
    return memo.get(D, [&] { return detail::L2_uncached(D); });
}

} // namespace squareful
