#pragma once

// Quadratic Gauss sums, the complete sums S_q(c), partial sums Sigma(x; c),
// the singular series and the cube-coincidence count rho.

#include "squareful/arith.hpp"
#include "squareful/gauss.hpp"
#include "squareful/lfunctions.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace squareful {

using Complex = std::complex<double>;

struct ExpSumValue {
    u64 q = 1;
    Vec4 a{1, 1, 1, 1};
    Vec4 c{0, 0, 0, 0};
    Complex value{1.0, 0.0};
    std::optional<BigInt> exact;
    std::string method; // direct | gauss-product | multiplicative
};

namespace detail {

inline i64 mod_q(i64 v, i64 q)
{
    const i64 r = v % q;
    return r < 0 ? r + q : r;
}

// e_q(r) for r = 0..q-1.
inline std::vector<Complex> unit_roots(u64 q)
{
    const long double two_pi = 2 * boost::math::constants::pi<long double>();
    std::vector<Complex> e(q);
    for (u64 r = 0; r < q; ++r) {
        const long double t = two_pi * static_cast<long double>(r) / static_cast<long double>(q);
        e[r] = Complex(static_cast<double>(std::cos(t)), static_cast<double>(std::sin(t)));
    }
    return e;
}

} // namespace detail

/// g(m, q) = sum_{b mod q} e_q(m b^2), by direct summation.
inline Complex gauss_g(i64 m, u64 q)
{
    require(q >= 1, "gauss_g: q must be positive");
    const i64 iq = static_cast<i64>(q);
    const auto e = detail::unit_roots(q);
    const i64 mm = detail::mod_q(m, iq);
    Complex s = 0;
    for (i64 b = 0; b < iq; ++b) s += e[static_cast<std::size_t>(static_cast<i64>((i128(mm) * ((b * b) % iq)) % iq))];
    return s;
}

inline constexpr u64 max_direct_q = 200;

/// S_q(c) by summing over k coprime to q and b mod q; the b-sum factorizes
/// over coordinates, so each k costs O(q).
inline ExpSumValue S_q_direct(const CoeffVector& a, const Vec4& c, u64 q)
{
    require(q >= 1, "S_q_direct: q must be positive");
    require(q <= max_direct_q, "S_q_direct: q above direct-summation limit " + std::to_string(max_direct_q));
    const i64 iq = static_cast<i64>(q);
    const auto e = detail::unit_roots(q);
    Vec4 ar{}, cr{};
    for (int i = 0; i < 4; ++i) {
        ar[i] = detail::mod_q(a[i], iq);
        cr[i] = detail::mod_q(c[i], iq);
    }
    Complex total = 0;
    for (i64 k = 0; k < iq; ++k) {
        if (std::gcd(k, iq) != 1) continue;
        Complex prod = 1;
        for (int i = 0; i < 4; ++i) {
            Complex g = 0;
            const i64 ka = (k * ar[i]) % iq;
            for (i64 b = 0; b < iq; ++b) g += e[static_cast<std::size_t>((ka * ((b * b) % iq) + cr[i] * b) % iq)];
            prod *= g;
        }
        total += prod;
    }
    ExpSumValue out;
    out.q = q;
    out.a = a.a();
    out.c = c;
    out.value = total;
    out.method = "direct";
    return out;
}

inline constexpr u64 max_direct_q_c0 = 20'000;

/// S_q(0) by direct summation, with g(m, q) tabulated for all m mod q from the
/// histogram of squares mod q. Independent of the prime-power formulas.
inline ExpSumValue S_q_direct_c0(const CoeffVector& a, u64 q)
{
    require(q >= 1, "S_q_direct_c0: q must be positive");
    require(q <= max_direct_q_c0, "S_q_direct_c0: q above limit " + std::to_string(max_direct_q_c0));
    const i64 iq = static_cast<i64>(q);
    const auto e = detail::unit_roots(q);
    std::vector<u64> hist(q, 0);
    for (i64 b = 0; b < iq; ++b) ++hist[static_cast<std::size_t>((b * b) % iq)];
    std::vector<std::pair<i64, double>> squares;
    for (i64 v = 0; v < iq; ++v)
        if (hist[v]) squares.emplace_back(v, static_cast<double>(hist[v]));
    std::vector<Complex> g(q);
    for (i64 m = 0; m < iq; ++m) {
        Complex s = 0;
        for (const auto& [v, w] : squares) s += w * e[static_cast<std::size_t>((m * v) % iq)];
        g[m] = s;
    }
    Vec4 ar{};
    for (int i = 0; i < 4; ++i) ar[i] = detail::mod_q(a[i], iq);
    Complex total = 0;
    for (i64 k = 0; k < iq; ++k) {
        if (std::gcd(k, iq) != 1) continue;
        Complex prod = 1;
        for (int i = 0; i < 4; ++i) prod *= g[static_cast<std::size_t>((k * ar[i]) % iq)];
        total += prod;
    }
    ExpSumValue out;
    out.q = q;
    out.a = a.a();
    out.value = total;
    out.method = "direct";
    return out;
}

/// S_q(0) as the product of exact prime-power sums.
inline ExpSumValue S_q_fast(const CoeffVector& a, u64 q)
{
    require(q >= 1, "S_q_fast: q must be positive");
    BigInt v = 1;
    if (q > 1)
        for (const auto& [p, e] : factorize(static_cast<i64>(q)).factors) v *= gauss_sum_prime_power(a.a(), p, e);
    ExpSumValue out;
    out.q = q;
    out.a = a.a();
    out.value = Complex(v.convert_to<double>(), 0.0);
    out.exact = v;
    out.method = q > 1 && factorize(static_cast<i64>(q)).factors.size() > 1 ? "multiplicative" : "gauss-product";
    return out;
}

/// (A/q) phi(q) q^2 for gcd(q, 2A) = 1.
inline BigInt S_q_closed_form(const CoeffVector& a, u64 q)
{
    require(q % 2 == 1, "S_q_closed_form: q must be odd");
    const Int256 iq = static_cast<i64>(q);
    Int256 r = a.A() % iq;
    if (r < 0) r += iq;
    const int sym = jacobi(r.convert_to<i64>(), static_cast<i64>(q));
    require(sym != 0 || q == 1, "S_q_closed_form: q must be coprime to A");
    return BigInt(sym) * BigInt(euler_phi(q)) * BigInt(q) * BigInt(q);
}

inline constexpr u64 max_partial_x_c0 = 10'000;

/// Sigma(x; c) = sum_{q <= x} q^{-3} S_q(c).
inline double sigma_partial(const CoeffVector& a, const Vec4& c, double x)
{
    if (x < 1) return 0.0;
    const u64 X = static_cast<u64>(std::floor(x));
    const bool zero = c == Vec4{0, 0, 0, 0};
    require(X <= (zero ? max_partial_x_c0 : max_direct_q),
            "sigma_partial: x above limit for this c");
    double total = 0;
    for (u64 q = 1; q <= X; ++q) {
        const double s = zero ? S_q_fast(a, q).value.real() : S_q_direct(a, c, q).value.real();
        total += s / (static_cast<double>(q) * static_cast<double>(q) * static_cast<double>(q));
    }
    return total;
}

enum class SeriesMethod { truncated_q_sum, euler_product, l_hybrid };

inline std::string to_string(SeriesMethod m)
{
    switch (m) {
    case SeriesMethod::truncated_q_sum: return "truncated-q-sum";
    case SeriesMethod::euler_product: return "euler-product";
    case SeriesMethod::l_hybrid: return "L-hybrid";
    }
    return "?";
}

inline SeriesMethod parse_series_method(const std::string& s)
{
    if (s == "truncated-q-sum" || s == "qsum") return SeriesMethod::truncated_q_sum;
    if (s == "euler-product" || s == "euler") return SeriesMethod::euler_product;
    if (s == "L-hybrid" || s == "hybrid") return SeriesMethod::l_hybrid;
    throw UsageError("unknown series method: " + s);
}

struct SeriesEstimate {
    double value = 0;
    u64 cutoff = 0;
    double tail_bound = 0;
    SeriesMethod method = SeriesMethod::l_hybrid;
    // Factorization of the value: exact bad-prime part (primes dividing 2A)
    // times the product over the remaining primes.
    double bad_part = 1;
    double good_part = 1;
    double odd_part = 1; // value with the p = 2 factor divided out
    i64 discriminant = 0;
};

struct SeriesOptions {
    u64 euler_cutoff = 100'000;
    u64 qsum_cutoff = 20'000;
};

namespace detail {

inline double good_factor(int chi, double p)
{
    return (1.0 - chi / (p * p)) / (1.0 - chi / p);
}

// Partial product over p <= P with p !| 2A of the good local factor.
inline long double good_partial_product(const Int256& A, u64 P, const std::vector<u64>& primes)
{
    long double prod = 1;
    for (u64 p : primes) {
        if (p > P) break;
        if (p == 2) continue;
        const int chi = residue_symbol(A, p);
        if (chi == 0) continue;
        prod *= static_cast<long double>(good_factor(chi, static_cast<double>(p)));
    }
    return prod;
}

} // namespace detail

/// Exact product over p | 2A of 1 + sum_n p^{-4n} S_{p^n}(0), plus the p = 2
/// factor on its own.
inline std::pair<Rational, Rational> bad_prime_part(const CoeffVector& a)
{
    auto ps = a.primes_of_A();
    if (std::find(ps.begin(), ps.end(), u64(2)) == ps.end()) ps.insert(ps.begin(), 2);
    Rational total = 1, two = 1;
    for (u64 p : ps) {
        const Rational f = gauss_local_factor(a.a(), p);
        total *= f;
        if (p == 2) two = f;
    }
    return {total, two};
}

/// The singular series sum_q q^{-4} S_q(0).
inline SeriesEstimate singular_series(const CoeffVector& a, SeriesMethod method, double tol,
                                      const SeriesOptions& opt = {})
{
    require(tol > 0, "singular_series: tol must be positive");
    require(!is_square(a.A()), "singular_series: A is a perfect square, the series diverges");
    SeriesEstimate est;
    est.method = method;
    const i64 d = a.squarefree_kernel();
    est.discriminant = fundamental_discriminant(d);
    check_character(est.discriminant, a.A());

    const auto [bad, two] = bad_prime_part(a);
    est.bad_part = to_double(bad);

    if (method == SeriesMethod::truncated_q_sum) {
        // Cesaro (C,1) mean of the partial sums; exact S_q through cached
        // prime-power values.
        const u64 Q = opt.qsum_cutoff;
        std::map<std::pair<u64, unsigned>, double> cache;
        auto sq = [&](u64 q) {
            double v = 1;
            if (q == 1) return v;
            for (const auto& [p, e] : factorize(static_cast<i64>(q)).factors) {
                auto it = cache.find({p, e});
                if (it == cache.end()) {
                    const double s = gauss_sum_prime_power(a.a(), p, e).convert_to<double>() /
                                     std::pow(static_cast<double>(p), 4.0 * e);
                    it = cache.emplace(std::make_pair(p, e), s).first;
                }
                v *= it->second;
            }
            return v;
        };
        auto cesaro = [&](u64 X) {
            long double partial = 0, mean = 0;
            for (u64 q = 1; q <= X; ++q) {
                partial += sq(q);
                mean += partial;
            }
            return static_cast<double>(mean / static_cast<long double>(X));
        };
        est.value = cesaro(Q);
        est.tail_bound = std::abs(est.value - cesaro(Q / 2));
        est.cutoff = Q;
        est.good_part = est.value / est.bad_part;
        est.odd_part = est.value / to_double(two);
        (void)tol;
        return est;
    }

    if (method == SeriesMethod::euler_product) {
        const u64 P = opt.euler_cutoff;
        const auto primes = primes_up_to(P);
        const long double full = detail::good_partial_product(a.A(), P, primes);
        const long double half = detail::good_partial_product(a.A(), P / 2, primes);
        est.good_part = static_cast<double>(full);
        est.tail_bound = static_cast<double>(std::abs(full - half)) * est.bad_part;
        est.cutoff = P;
    } else {
        // L(1)/L(2) covers every prime; divide out the factors at p | 2A
        // where chi_D(p) != 0.
        long double g = static_cast<long double>(L1(est.discriminant)) / L2(est.discriminant);
        auto ps = a.primes_of_A();
        if (std::find(ps.begin(), ps.end(), u64(2)) == ps.end()) ps.insert(ps.begin(), 2);
        for (u64 p : ps) {
            const int chi = kronecker(est.discriminant, static_cast<i64>(p));
            if (chi) g /= detail::good_factor(chi, static_cast<double>(p));
        }
        est.good_part = static_cast<double>(g);
        est.tail_bound = 1e-12 * std::max<double>(1.0, static_cast<double>(uabs(est.discriminant)));
        est.cutoff = uabs(est.discriminant);
    }
    est.value = est.bad_part * est.good_part;
    est.odd_part = est.value / to_double(two);
    return est;
}

/// S_{q1 q2}(c) against S_{q1}(c) S_{q2}(c) for coprime q1, q2. The c = 0
/// case runs on the histogram path, general c on the direct sum.
struct MultiplicativityCheck {
    Complex lhs, rhs;
    double abs_error = 0;
    double rel_error = 0; // relative to max(|lhs|, |rhs|, q^3)
};

inline MultiplicativityCheck check_multiplicativity(const CoeffVector& a, const Vec4& c, u64 q1, u64 q2)
{
    require(std::gcd(q1, q2) == 1, "check_multiplicativity: q1, q2 must be coprime");
    MultiplicativityCheck out;
    const u64 q = q1 * q2;
    const bool zero = c == Vec4{0, 0, 0, 0};
    if (zero) {
        out.lhs = S_q_direct_c0(a, q).value;
        out.rhs = S_q_direct_c0(a, q1).value * S_q_direct_c0(a, q2).value;
    } else {
        out.lhs = S_q_direct(a, c, q).value;
        out.rhs = S_q_direct(a, c, q1).value * S_q_direct(a, c, q2).value;
    }
    out.abs_error = std::abs(out.lhs - out.rhs);
    const double scale = std::max({std::abs(out.lhs), std::abs(out.rhs), std::pow(static_cast<double>(q), 3.0)});
    out.rel_error = out.abs_error / scale;
    return out;
}

/// rho(r) = #{(e1, e2) mod r : e1^3 = e2^3}, multiplicative over the primes of
/// squarefree r.
inline u64 rho(i64 r)
{
    require(r >= 1, "rho: r must be positive");
    require(is_squarefree(r), "rho: r must be squarefree");
    u64 total = 1;
    if (r == 1) return total;
    for (const auto& pp : factorize(r).factors) {
        const u64 p = pp.p;
        std::vector<u64> h(p, 0);
        for (u64 e = 0; e < p; ++e) ++h[(e * e % p) * e % p];
        u64 s = 0;
        for (u64 v : h) s += v * v;
        total *= s;
    }
    return total;
}

} // namespace squareful
