#pragma once

// Exact integer kernels: factorization, squarefree/squareful predicates,
// quadratic symbols and the coefficient invariants of diagonal quaternary
// forms.

#include "squareful/bigint.hpp"
#include "squareful/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace squareful {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

using Vec4 = std::array<i64, 4>;

inline constexpr i64 max_magnitude = std::numeric_limits<i64>::max();

inline u64 uabs(i64 n)
{
    return n < 0 ? u64(0) - u64(n) : u64(n);
}

/// gcd with gcd(x, 0) = |x|.
inline u64 gcd_u(u64 a, u64 b)
{
    return std::gcd(a, b);
}

inline u64 gcd_i(i64 a, i64 b)
{
    return std::gcd(uabs(a), uabs(b));
}

/// floor(sqrt(n)), exact for all 64-bit n.
inline u64 isqrt(u64 n)
{
    if (n < 2) return n;
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

inline bool is_square(i64 n)
{
    if (n < 0) return false;
    const u64 r = isqrt(u64(n));
    return r * r == u64(n);
}

inline bool is_square(const Int256& n)
{
    if (n < 0) return false;
    const Int256 r = boost::multiprecision::sqrt(n);
    return r * r == n;
}

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 m)
{
    return static_cast<u64>(u128(a) * b % m);
}

inline u64 powmod(u64 base, u64 exp, u64 m)
{
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Deterministic for all n < 2^64 with these bases.
inline bool is_prime_mr(u64 n)
{
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

// Brent's variant with fixed starting constants, so the result is deterministic.
inline u64 pollard_rho(u64 n)
{
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void factor_rec(u64 n, std::vector<u64>& out)
{
    if (n == 1) return;
    if (is_prime_mr(n)) {
        out.push_back(n);
        return;
    }
    const u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

} // namespace detail

inline bool is_prime(u64 n)
{
    return detail::is_prime_mr(n);
}

struct PrimePower {
    u64 p;
    unsigned e;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = sign * prod p^e with strictly increasing primes.
struct Factorization {
    i64 n = 1;
    int sign = 1;
    std::vector<PrimePower> factors;

    i64 value() const
    {
        i64 v = sign;
        for (const auto& [p, e] : factors)
            for (unsigned k = 0; k < e; ++k) v *= static_cast<i64>(p);
        return v;
    }

    unsigned valuation(u64 p) const
    {
        for (const auto& f : factors)
            if (f.p == p) return f.e;
        return 0;
    }
};

inline constexpr u64 trial_division_limit = u64(1) << 21;

/// Trial division up to 2^21, then Miller-Rabin / Pollard rho on the cofactor.
inline Factorization factorize(i64 n)
{
    require(n != 0, "factorize: n must be nonzero");
    require(n != std::numeric_limits<i64>::min(), "factorize: |n| must fit in 63 bits");
    Factorization f;
    f.n = n;
    f.sign = n < 0 ? -1 : 1;
    u64 m = uabs(n);
    auto take = [&](u64 p) {
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e) f.factors.push_back({p, e});
    };
    take(2);
    for (u64 p = 3; p < trial_division_limit && p * p <= m; p += 2) take(p);
    if (m > 1) {
        if (m < trial_division_limit * trial_division_limit || detail::is_prime_mr(m)) {
            f.factors.push_back({m, 1});
        } else {
            std::vector<u64> ps;
            detail::factor_rec(m, ps);
            std::sort(ps.begin(), ps.end());
            for (std::size_t i = 0; i < ps.size();) {
                std::size_t j = i;
                while (j < ps.size() && ps[j] == ps[i]) ++j;
                f.factors.push_back({ps[i], static_cast<unsigned>(j - i)});
                i = j;
            }
        }
    }
    return f;
}

inline bool is_squarefree(i64 n)
{
    require(n != 0, "is_squarefree: n must be nonzero");
    const auto f = factorize(n);
    return std::all_of(f.factors.begin(), f.factors.end(), [](const PrimePower& pp) { return pp.e == 1; });
}

/// True iff every prime dividing n divides it at least twice; +-1 qualify.
inline bool is_squareful(i64 n)
{
    require(n != 0, "is_squareful: n must be nonzero");
    const auto f = factorize(n);
    return std::all_of(f.factors.begin(), f.factors.end(), [](const PrimePower& pp) { return pp.e >= 2; });
}

/// Smallest positive r with |m|/r a perfect square.
inline u64 sqf(i64 m)
{
    require(m != 0, "sqf: m must be nonzero");
    u64 r = 1;
    for (const auto& [p, e] : factorize(m).factors)
        if (e % 2) r *= p;
    return r;
}

inline int mobius(i64 n)
{
    require(n != 0, "mobius: n must be nonzero");
    int mu = 1;
    for (const auto& pp : factorize(n).factors) {
        if (pp.e > 1) return 0;
        mu = -mu;
    }
    return mu;
}

inline u64 euler_phi(u64 n)
{
    if (n == 0) return 0;
    u64 phi = n;
    for (const auto& pp : factorize(static_cast<i64>(n)).factors) phi = phi / pp.p * (pp.p - 1);
    return phi;
}

inline unsigned valuation(i64 n, u64 p)
{
    unsigned v = 0;
    u64 m = uabs(n);
    if (m == 0) return std::numeric_limits<unsigned>::max();
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

namespace detail {

// Jacobi symbol (a/n) for odd n >= 1, no argument checking.
inline int jacobi_unchecked(i64 a, u64 n)
{
    u64 x = static_cast<u64>(((a % static_cast<i64>(n)) + static_cast<i64>(n)) % static_cast<i64>(n));
    if (n == 1) return 1;
    int t = 1;
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            const u64 r = n & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(x, n);
        if ((x & 3) == 3 && (n & 3) == 3) t = -t;
        x %= n;
    }
    return n == 1 ? t : 0;
}

} // namespace detail

/// Jacobi symbol (a/n); n must be odd and positive.
inline int jacobi(i64 a, i64 n)
{
    require(n >= 1 && (n & 1) == 1, "jacobi: lower argument must be odd and positive");
    return detail::jacobi_unchecked(a, static_cast<u64>(n));
}

/// Kronecker symbol (a/n) for arbitrary integers. Kept separate from the
/// strict Jacobi entry point: only used to evaluate quadratic characters.
inline int kronecker(i64 a, i64 n)
{
    if (n == 0) return uabs(a) == 1 ? 1 : 0;
    int result = 1;
    u64 m = uabs(n);
    if (n < 0 && a < 0) result = -1;
    unsigned twos = 0;
    while ((m & 1) == 0) {
        m >>= 1;
        ++twos;
    }
    if (twos) {
        if ((a & 1) == 0) return 0;
        const i64 r = ((a % 8) + 8) % 8;
        if ((twos & 1) && (r == 3 || r == 5)) result = -result;
    }
    return result * detail::jacobi_unchecked(a, m);
}

/// All primes <= n.
inline std::vector<u64> primes_up_to(u64 n)
{
    std::vector<u64> out;
    if (n < 2) return out;
    std::vector<bool> composite(n + 1, false);
    for (u64 i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

// gcd(x, y1*y2*y3) without forming the product.
inline u64 gcd_with_product(i64 x, const std::array<i64, 3>& ys)
{
    const u64 m = uabs(x);
    if (m == 0) throw PreconditionError("gcd_with_product: zero modulus");
    u64 prod = 1 % m;
    for (i64 y : ys) prod = detail::mulmod(prod, uabs(y) % m, m);
    return std::gcd(m, prod);
}

/// Coefficient vector of the diagonal form a1 x1^2 + ... + a4 x4^2.
class CoeffVector {
public:
    CoeffVector() : CoeffVector(Vec4{1, 1, 1, 1}) {}

    explicit CoeffVector(const Vec4& a) : a_(a)
    {
        for (i64 v : a_) {
            require(v != 0, "CoeffVector: coefficients must be nonzero");
            require(v != std::numeric_limits<i64>::min(), "CoeffVector: coefficients must fit in 63 bits");
        }
        A_ = Int256(a_[0]) * a_[1] * a_[2] * a_[3];
        for (int i = 0; i < 4; ++i) eps_[i] = a_[i] > 0 ? 1 : -1;
    }

    const Vec4& a() const { return a_; }
    i64 operator[](int i) const { return a_[i]; }
    const Int256& A() const { return A_; }
    const std::array<int, 4>& eps() const { return eps_; }

    /// Primes dividing A, from the coordinate factorizations.
    std::vector<u64> primes_of_A() const
    {
        std::vector<u64> ps;
        for (i64 v : a_)
            for (const auto& pp : factorize(v).factors) ps.push_back(pp.p);
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
        return ps;
    }

    /// Signed squarefree kernel of A (A / kernel is a perfect square).
    i64 squarefree_kernel() const
    {
        i64 k = A_ < 0 ? -1 : 1;
        for (u64 p : primes_of_A()) {
            unsigned e = 0;
            for (i64 v : a_) e += valuation(v, p);
            if (e % 2) k *= static_cast<i64>(p);
        }
        return k;
    }

    friend bool operator==(const CoeffVector& x, const CoeffVector& y) { return x.a_ == y.a_; }

private:
    Vec4 a_;
    Int256 A_;
    std::array<int, 4> eps_{};
};

inline std::array<i64, 3> others(const Vec4& v, int i)
{
    std::array<i64, 3> out{};
    int k = 0;
    for (int j = 0; j < 4; ++j)
        if (j != i) out[k++] = v[j];
    return out;
}

/// Delta(a) = prod_i gcd(a_i, prod_{j != i} a_j).
inline Int256 delta(const CoeffVector& a)
{
    Int256 d = 1;
    for (int i = 0; i < 4; ++i) d *= gcd_with_product(a[i], others(a.a(), i));
    return d;
}

/// Delta_c(a) = prod_i gcd(g_i, prod_{j != i} g_j) with g_i = gcd(a_i, c_i);
/// equals Delta(a) at c = 0.
inline Int256 delta_c(const CoeffVector& a, const Vec4& c)
{
    Vec4 g{};
    for (int i = 0; i < 4; ++i) g[i] = static_cast<i64>(gcd_i(a[i], c[i]));
    Int256 d = 1;
    for (int i = 0; i < 4; ++i) d *= gcd_with_product(g[i], others(g, i));
    return d;
}

/// Dual form F*_a(c) = sum_i (prod_{j != i} a_j) c_i^2, exact in 256 bits.
inline Int256 dual_form(const CoeffVector& a, const Vec4& c)
{
    try {
        Int256 total = 0;
        for (int i = 0; i < 4; ++i) {
            Int256 term = Int256(c[i]) * c[i];
            for (i64 aj : others(a.a(), i)) term *= aj;
            total += term;
        }
        return total;
    } catch (const std::overflow_error&) {
        throw PreconditionError("dual_form: value exceeds 256-bit range");
    }
}

inline std::string format_vec(const Vec4& v)
{
    std::string s;
    for (int i = 0; i < 4; ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

} // namespace squareful
