#pragma once

// Exact complete quadratic exponential sums at prime powers,
//   S_{p^n}(a) = sum_{k mod p^n, p !| k} sum_{b mod p^n} e_{p^n}(k (a1 b1^2 + ... + a4 b4^2)),
// the congruence counts N_a(p^n) they determine, and the exact bad-prime
// Euler factor 1 + sum_n p^{-4n} S_{p^n}(a).

#include "squareful/arith.hpp"
#include "squareful/bigint.hpp"
#include "squareful/parallel.hpp"

#include <array>
#include <string>

namespace squareful {

namespace detail {

// c0 + c1 z + c2 z^2 + c3 z^3 with z = exp(2 pi i / 8), z^4 = -1.
struct Cyclo8 {
    std::array<BigInt, 4> c{};

    static Cyclo8 scalar(const BigInt& v)
    {
        Cyclo8 x;
        x.c[0] = v;
        return x;
    }

    static Cyclo8 zeta_power(i64 k)
    {
        const int r = static_cast<int>(((k % 8) + 8) % 8);
        Cyclo8 x;
        if (r < 4) x.c[r] = 1;
        else x.c[r - 4] = -1;
        return x;
    }

    Cyclo8 operator*(const Cyclo8& o) const
    {
        Cyclo8 out;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const BigInt t = c[i] * o.c[j];
                if (i + j < 4) out.c[i + j] += t;
                else out.c[i + j - 4] -= t;
            }
        return out;
    }

    Cyclo8& operator+=(const Cyclo8& o)
    {
        for (int i = 0; i < 4; ++i) c[i] += o.c[i];
        return *this;
    }

    Cyclo8& operator*=(const BigInt& s)
    {
        for (auto& v : c) v *= s;
        return *this;
    }
};

// g(v, 2^m) = sum_{b mod 2^m} e(v b^2 / 2^m) for odd v.
inline Cyclo8 gauss_2adic_unit(i64 v, unsigned m)
{
    if (m == 0) return Cyclo8::scalar(1);
    if (m == 1) return Cyclo8::scalar(0);
    if (m % 2 == 0) {
        // 2^{m/2} (1 + i^v), i = z^2
        Cyclo8 x = Cyclo8::scalar(1);
        x += Cyclo8::zeta_power(2 * (((v % 4) + 4) % 4));
        x *= big_pow(2, m / 2);
        return x;
    }
    Cyclo8 x = Cyclo8::zeta_power(v);
    x *= big_pow(2, (m + 1) / 2);
    return x;
}

struct SplitCoeff {
    unsigned t = 0; // p-adic valuation
    i64 u = 0;      // unit part (signed)
};

inline SplitCoeff split(i64 a, u64 p)
{
    require(a != 0, "gauss: coefficients must be nonzero");
    SplitCoeff s{0, a};
    while (s.u % static_cast<i64>(p) == 0) {
        s.u /= static_cast<i64>(p);
        ++s.t;
    }
    return s;
}

inline BigInt gauss_sum_odd(const Vec4& a, u64 p, unsigned n)
{
    const i64 ip = static_cast<i64>(p);
    BigInt scale = big_pow(ip, n - 1) * (ip - 1); // phi(p^n)
    int legendre = 1;
    unsigned odd_type = 0;
    for (i64 ai : a) {
        const auto [t, u] = split(ai, p);
        if (t >= n) {
            scale *= big_pow(ip, n);
            continue;
        }
        const unsigned m = n - t;
        scale *= big_pow(ip, t + m / 2);
        if (m % 2 == 1) {
            ++odd_type;
            legendre *= jacobi(u, ip);
        }
    }
    if (odd_type % 2 == 1) return 0;
    // Each pair of odd-type factors contributes G^2 = (-1/p) p.
    const int minus_one = (p % 4 == 1) ? 1 : -1;
    int sign = legendre;
    for (unsigned k = 0; k < odd_type / 2; ++k) {
        sign *= minus_one;
        scale *= ip;
    }
    return sign * scale;
}

inline BigInt gauss_sum_two(const Vec4& a, unsigned n)
{
    std::array<SplitCoeff, 4> parts{};
    for (int i = 0; i < 4; ++i) parts[i] = split(a[i], 2);

    // g(k a_i, 2^n) depends on k only through k mod 8 (mod 2^n when n <= 2).
    const u64 modulus = n <= 2 ? (u64(1) << n) : 8;
    const BigInt weight = n <= 2 ? BigInt(1) : big_pow(2, n - 3);
    Cyclo8 total;
    for (u64 k = 1; k < modulus; k += 2) {
        Cyclo8 prod = Cyclo8::scalar(1);
        for (const auto& [t, u] : parts) {
            if (t >= n) {
                prod *= big_pow(2, n);
                continue;
            }
            Cyclo8 g = gauss_2adic_unit(static_cast<i64>(k) * (u % 8), n - t);
            g *= big_pow(2, t);
            prod = prod * g;
        }
        total += prod;
    }
    ensure(total.c[1] == 0 && total.c[2] == 0 && total.c[3] == 0,
           "gauss: 2-adic sum is not a rational integer");
    return total.c[0] * weight;
}

} // namespace detail

/// Exact S_{p^n}(a) at c = 0 for an arbitrary nonzero coefficient vector.
inline BigInt gauss_sum_prime_power(const Vec4& a, u64 p, unsigned n)
{
    require(is_prime(p), "gauss_sum_prime_power: p must be prime");
    if (n == 0) return 1;
    return p == 2 ? detail::gauss_sum_two(a, n) : detail::gauss_sum_odd(a, p, n);
}

/// #{m mod p^n : a1 m1^2 + ... + a4 m4^2 = 0 mod p^n}, recovered from the Gauss
/// sums through p^n N(p^n) = S_{p^n} + p^{n+3} N(p^{n-1}). Each step's exact
/// divisibility is checked.
inline BigInt congruence_count(const Vec4& a, u64 p, unsigned n)
{
    require(is_prime(p), "congruence_count: p must be prime");
    const i64 ip = static_cast<i64>(p);
    BigInt N = 1;
    for (unsigned j = 1; j <= n; ++j) {
        const BigInt num = gauss_sum_prime_power(a, p, j) + big_pow(ip, j + 3) * N;
        const BigInt den = big_pow(ip, j);
        ensure(num % den == 0, "congruence_count: Gauss-sum recursion is not integral at p^" + std::to_string(j));
        N = num / den;
    }
    return N;
}

/// Direct enumeration of the same count; used as an oracle for p^{4n} small.
inline u64 congruence_count_brute(const Vec4& a, u64 p, unsigned n)
{
    u64 q = 1;
    for (unsigned j = 0; j < n; ++j) q *= p;
    require(q <= 200, "congruence_count_brute: modulus too large");
    const i64 iq = static_cast<i64>(q);
    // histogram of a_i m^2 mod q per coordinate, then convolve
    std::array<std::vector<u64>, 4> h;
    for (int i = 0; i < 4; ++i) {
        h[i].assign(q, 0);
        const i64 ai = ((a[i] % iq) + iq) % iq;
        for (i64 m = 0; m < iq; ++m) ++h[i][static_cast<std::size_t>((ai * ((m * m) % iq)) % iq)];
    }
    std::vector<u64> h12(q, 0), h34(q, 0);
    for (u64 x = 0; x < q; ++x)
        for (u64 y = 0; y < q; ++y) {
            h12[(x + y) % q] += h[0][x] * h[1][y];
            h34[(x + y) % q] += h[2][x] * h[3][y];
        }
    u64 count = 0;
    for (u64 x = 0; x < q; ++x) count += h12[x] * h34[(q - x) % q];
    return count;
}

/// First level from which term_{n+2} = term_n / p^2 holds for
/// term_n = p^{-4n} S_{p^n}(a).
inline unsigned gauss_periodic_start(const Vec4& a, u64 p)
{
    unsigned tmax = 0;
    for (i64 ai : a) tmax = std::max(tmax, detail::split(ai, p).t);
    return p == 2 ? std::max(tmax + 2, 3u) : tmax + 1;
}

/// Exact local factor 1 + sum_{n >= 1} p^{-4n} S_{p^n}(a). Terms are summed
/// up to the periodic start and the remaining geometric tail is closed. The
/// period relation is verified on two full periods.
inline Rational gauss_local_factor_uncached(const Vec4& a, u64 p)
{
    const unsigned n0 = gauss_periodic_start(a, p);
    const BigInt bp(static_cast<i64>(p));
    auto term = [&](unsigned n) {
        return Rational(gauss_sum_prime_power(a, p, n)) / Rational(boost::multiprecision::pow(bp, 4 * n));
    };
    Rational total = 1;
    for (unsigned n = 1; n < n0; ++n) total += term(n);
    const Rational t0 = term(n0), t1 = term(n0 + 1);
    const Rational p2 = Rational(bp * bp);
    ensure(term(n0 + 2) * p2 == t0 && term(n0 + 3) * p2 == t1,
           "gauss_local_factor: period relation failed at p=" + std::to_string(p));
    total += (t0 + t1) * p2 / (p2 - 1);
    return total;
}

/// Memoized on the sorted coefficient vector (the factor is symmetric).
inline Rational gauss_local_factor(const Vec4& a, u64 p)
{
    static Memo<std::pair<Vec4, u64>, Rational> memo;
    Vec4 key = a;
    std::sort(key.begin(), key.end());
    return memo.get({key, p}, [&] { return gauss_local_factor_uncached(key, p); });
}

} // namespace squareful
