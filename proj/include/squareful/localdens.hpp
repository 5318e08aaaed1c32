#pragma once

// p-adic solution counts of sum y_i^3 m_i^2 = 0, their stabilized densities,
// and both sides of the identity expressing the omega-weighted sum of
// singular series as a product of local densities.

#include "squareful/expsums.hpp"
#include "squareful/gauss.hpp"
#include "squareful/lfunctions.hpp"
#include "squareful/omega.hpp"

#include <boost/math/constants/constants.hpp>

#include <string>
#include <vector>

namespace squareful {

inline Vec4 cube(const Vec4& y)
{
    Vec4 c{};
    for (int i = 0; i < 4; ++i) c[i] = y[i] * y[i] * y[i];
    return c;
}

inline void require_squarefree_vector(const Vec4& y, const char* who)
{
    for (i64 v : y) {
        require(v != 0, std::string(who) + ": y_i must be nonzero");
        require(uabs(v) <= 2'000'000, std::string(who) + ": |y_i| too large");
        require(is_squarefree(v), std::string(who) + ": y_i must be squarefree");
    }
}

inline Int256 product(const Vec4& v)
{
    return Int256(v[0]) * v[1] * v[2] * v[3];
}

inline u64 prime_power(u64 p, unsigned n)
{
    u64 q = 1;
    for (unsigned j = 0; j < n; ++j) q *= p;
    return q;
}

inline constexpr u64 max_brute_modulus = 10'000;

/// Counts m mod q with sum c_i m_i^2 = 0 mod q. With `p` nonzero only vectors
/// having some coordinate with p !| m_j y_j are counted. Pairwise histogram
/// convolution, O(q^2).
inline u64 quadratic_count_brute(const Vec4& c, const Vec4& y, u64 q, u64 p)
{
    require(q >= 1 && q <= max_brute_modulus, "quadratic_count_brute: modulus out of range");
    const i64 iq = static_cast<i64>(q);
    // per coordinate: histogram of c m^2 mod q split by whether the
    // coordinate is "good" (p !| m y)
    std::array<std::vector<u64>, 4> tot, bad;
    for (int i = 0; i < 4; ++i) {
        tot[i].assign(q, 0);
        bad[i].assign(q, 0);
        const i64 ci = detail::mod_q(c[i], iq);
        for (i64 m = 0; m < iq; ++m) {
            const auto v = static_cast<std::size_t>(static_cast<i64>((i128(ci) * ((m * m) % iq)) % iq));
            ++tot[i][v];
            const bool good = p != 0 && m % static_cast<i64>(p) != 0 && y[i] % static_cast<i64>(p) != 0;
            if (!good) ++bad[i][v];
        }
    }
    auto conv = [&](const std::vector<u64>& x, const std::vector<u64>& z) {
        std::vector<u64> out(q, 0);
        for (u64 u = 0; u < q; ++u) {
            if (!x[u]) continue;
            for (u64 v = 0; v < q; ++v) out[(u + v) % q] += x[u] * z[v];
        }
        return out;
    };
    const auto t12 = conv(tot[0], tot[1]), t34 = conv(tot[2], tot[3]);
    u64 count = 0;
    for (u64 v = 0; v < q; ++v) count += t12[v] * t34[(q - v) % q];
    if (p == 0) return count;
    const auto b12 = conv(bad[0], bad[1]), b34 = conv(bad[2], bad[3]);
    for (u64 v = 0; v < q; ++v) count -= b12[v] * b34[(q - v) % q];
    return count;
}

/// M_N(y, p) by enumeration (p^N <= 10^4). M_0 = 0 by convention.
inline u64 M_count_brute(const Vec4& y, u64 p, unsigned N)
{
    require_squarefree_vector(y, "M_count");
    require(is_prime(p), "M_count: p must be prime");
    if (N == 0) return 0;
    return quadratic_count_brute(cube(y), y, prime_power(p, N), p);
}

/// M_N(y, p) exactly at any level: N_{y^3}(p^N) minus the vectors with
/// p | m_j for every j where p !| y_j.
inline BigInt M_count(const Vec4& y, u64 p, unsigned N)
{
    require_squarefree_vector(y, "M_count");
    require(is_prime(p), "M_count: p must be prime");
    require(N <= 64, "M_count: level above supported range");
    if (N == 0) return 0;
    const Vec4 c = cube(y);
    Vec4 c2 = c;
    unsigned outside = 0;
    for (int i = 0; i < 4; ++i)
        if (y[i] % static_cast<i64>(p) != 0) {
            c2[i] *= static_cast<i64>(p * p);
            ++outside;
        }
    const BigInt all = congruence_count(c, p, N);
    const BigInt ex = congruence_count(c2, p, N);
    const BigInt div = big_pow(static_cast<i64>(p), outside);
    ensure(ex % div == 0, "M_count: excluded count not divisible");
    return all - ex / div;
}

/// N_{s,y}(p^n) = #{m mod p^n : sum s_i^2 y_i^3 m_i^2 = 0}; exact via Gauss sums.
inline BigInt N_count(const Vec4& s, const Vec4& y, u64 p, unsigned n)
{
    require(is_prime(p), "N_count: p must be prime");
    Vec4 c = cube(y);
    for (int i = 0; i < 4; ++i) {
        require(s[i] >= 1, "N_count: s_i must be positive");
        c[i] *= s[i] * s[i];
    }
    return congruence_count(c, p, n);
}

inline u64 N_count_brute(const Vec4& s, const Vec4& y, u64 p, unsigned n)
{
    Vec4 c = cube(y);
    for (int i = 0; i < 4; ++i) c[i] *= s[i] * s[i];
    return quadratic_count_brute(c, y, prime_power(p, n), 0);
}

struct LocalDensity {
    u64 p = 2;
    Vec4 y{1, 1, 1, 1};
    unsigned N_stable = 1;
    Rational value;
    double tail_bound = 0;
};

/// Smallest level from which solutions lift uniformly (gradient argument).
inline unsigned hensel_level(u64 p)
{
    return p == 2 ? 3 : 1;
}

inline constexpr unsigned max_density_level = 24;

/// sigma_p(y) = lim M_N / p^{3N}. Levels are scanned from the lifting level
/// upward until two consecutive normalized counts coincide.
inline LocalDensity local_density_uncached(const Vec4& y, u64 p, double tol)
{
    require(tol > 0, "local_density: tol must be positive");
    require_squarefree_vector(y, "local_density");
    require(is_prime(p), "local_density: p must be prime");
    LocalDensity out;
    out.p = p;
    out.y = y;
    auto level = [&](unsigned N) {
        return Rational(M_count(y, p, N)) / Rational(big_pow(static_cast<i64>(p), 3 * N));
    };
    unsigned N = hensel_level(p);
    Rational prev = level(N);
    for (; N < max_density_level; ++N) {
        const Rational next = level(N + 1);
        if (next == prev) {
            out.N_stable = N;
            out.value = prev;
            ensure(out.value >= 0, "local_density: negative density");
            return out;
        }
        prev = next;
    }
    throw ConsistencyError("local_density: no stabilization by level " + std::to_string(max_density_level) +
                           " for p=" + std::to_string(p) + " y=" + format_vec(y));
}

inline LocalDensity local_density(const Vec4& y, u64 p, double tol = 1e-12)
{
    static Memo<std::pair<Vec4, u64>, LocalDensity> memo;
    Vec4 key = y;
    std::sort(key.begin(), key.end());
    LocalDensity d = memo.get({key, p}, [&] { return local_density_uncached(key, p, tol); });
    d.y = y;
    return d;
}

/// (1 - p^-2)(1 - chi p^-2)/(1 - chi p^-1) with chi = (Y/p), for p !| 2Y.
inline Rational local_density_closed_form(const Vec4& y, u64 p)
{
    const int chi = residue_symbol(product(y), p);
    require(p != 2 && chi != 0, "local_density_closed_form: p must not divide 2Y");
    const Rational ip(static_cast<i64>(p));
    const Rational one(1);
    return (one - one / (ip * ip)) * (one - Rational(chi) / (ip * ip)) / (one - Rational(chi) / ip);
}

inline std::vector<u64> primes_of_vector(const Vec4& v)
{
    std::vector<u64> ps;
    for (i64 x : v)
        if (uabs(x) > 1)
            for (const auto& pp : factorize(x).factors) ps.push_back(pp.p);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

struct DensityProduct {
    double value = 0;
    double tail_bound = 0;
    Rational bad_part; // exact product of sigma_p over p | 2Y
    i64 discriminant = 0;
    std::size_t terms = 0; // number of (r, s) terms, inner-sum side only
};

/// prod_p sigma_p(y): exact factors at p | 2Y, the rest as
/// zeta(2)^{-1} L(1, chi) / L(2, chi) with the factors at p | 2Y removed.
inline DensityProduct euler_product_density(const Vec4& y, double tol = 1e-9)
{
    require_squarefree_vector(y, "euler_product_density");
    const Int256 Y = product(y);
    require(!is_square(Y), "euler_product_density: Y is a perfect square");
    DensityProduct out;
    auto ps = primes_of_vector(y);
    if (ps.empty() || ps.front() != 2) ps.insert(ps.begin(), 2);
    out.bad_part = 1;
    for (u64 p : ps) out.bad_part *= local_density(y, p, tol).value;

    i64 d = Y < 0 ? -1 : 1;
    for (u64 p : ps) {
        unsigned e = 0;
        for (i64 v : y) e += valuation(v, p);
        if (e % 2) d *= static_cast<i64>(p);
    }
    out.discriminant = fundamental_discriminant(d);
    check_character(out.discriminant, Y);

    const long double pi = boost::math::constants::pi<long double>();
    long double good = 6.0L / (pi * pi) * static_cast<long double>(L1(out.discriminant)) / L2(out.discriminant);
    for (u64 p : ps) {
        const long double fp = static_cast<long double>(p);
        good /= (1.0L - 1.0L / (fp * fp));
        const int chi = kronecker(out.discriminant, static_cast<i64>(p));
        if (chi) good /= (1.0L - chi / (fp * fp)) / (1.0L - chi / fp);
    }
    out.value = to_double(out.bad_part) * static_cast<double>(good);
    out.tail_bound = 1e-12 * std::max<double>(1.0, static_cast<double>(uabs(out.discriminant)));
    return out;
}

/// sum over (r, s, s0) with r | y of omega(r, s, s0) G_{s^2 y^3} / (S s0^2).
/// The support of omega puts the primes of r and s inside those of Y. At
/// primes outside Y only s0 varies, and those primes contribute
/// (6/pi^2) prod_{p | Y} (1 - p^-2)^{-1} in closed form; at primes of Y the
/// s0 choice is enumerated together with r and s.
inline DensityProduct inner_sum(const Vec4& y, double tol = 1e-9,
                                OmegaVariant variant = OmegaVariant::as_defined)
{
    require_squarefree_vector(y, "inner_sum");
    const Int256 Y = product(y);
    require(!is_square(Y), "inner_sum: Y is a perfect square");
    const auto ps = primes_of_vector(y);

    std::vector<std::vector<LocalOmegaPattern>> local;
    for (u64 p : ps) {
        std::array<bool, 4> dy{};
        for (int i = 0; i < 4; ++i) dy[i] = y[i] % static_cast<i64>(p) == 0;
        local.push_back(local_omega_patterns(dy, {true, true, true, true}, variant));
    }

    const long double pi = boost::math::constants::pi<long double>();
    long double outside = 6.0L / (pi * pi);
    for (u64 p : ps) outside /= (1.0L - 1.0L / (static_cast<long double>(p) * p));

    DensityProduct out;
    long double total = 0;
    double tail = 0;
    std::vector<std::size_t> idx(ps.size(), 0);
    for (;;) {
        OmegaArg arg;
        int weight = 1;
        for (std::size_t j = 0; j < ps.size(); ++j) {
            const auto& pat = local[j][idx[j]];
            const i64 p = static_cast<i64>(ps[j]);
            weight *= pat.weight;
            for (int i = 0; i < 4; ++i) {
                if (pat.r[i]) arg.r[i] *= p;
                if (pat.s[i]) arg.s[i] *= p;
            }
            if (pat.s0) arg.s0 *= p;
        }
        ensure(omega(arg, variant) == weight, "inner_sum: local omega patterns disagree with omega()");
        Vec4 coeff = cube(y);
        i64 S = 1;
        for (int i = 0; i < 4; ++i) {
            coeff[i] *= arg.s[i] * arg.s[i];
            S *= arg.s[i];
        }
        const auto G = singular_series(CoeffVector(coeff), SeriesMethod::l_hybrid, tol);
        const long double denom = static_cast<long double>(S) * arg.s0 * arg.s0;
        total += weight * static_cast<long double>(G.value) / denom;
        tail += G.tail_bound / static_cast<double>(denom);
        ++out.terms;

        std::size_t j = 0;
        while (j < ps.size() && ++idx[j] == local[j].size()) idx[j++] = 0;
        if (j == ps.size()) break;
    }
    out.value = static_cast<double>(total * outside);
    out.tail_bound = tail * static_cast<double>(outside);
    return out;
}

} // namespace squareful
