#include "squareful/constant.hpp"

#include <gtest/gtest.h>

#include <boost/math/constants/constants.hpp>

using namespace squareful;

namespace {

// Direct enumeration of m mod q with sum c_i m_i^2 = 0; with `p` set, some
// coordinate must have p !| m_j y_j.
u64 enumerate(const Vec4& c, const Vec4& y, i64 q, i64 p)
{
    u64 n = 0;
    Vec4 m{};
    for (m[0] = 0; m[0] < q; ++m[0])
        for (m[1] = 0; m[1] < q; ++m[1])
            for (m[2] = 0; m[2] < q; ++m[2])
                for (m[3] = 0; m[3] < q; ++m[3]) {
                    i64 s = 0;
                    bool good = p == 0;
                    for (int i = 0; i < 4; ++i) {
                        s += c[i] % q * (m[i] * m[i] % q);
                        good = good || (m[i] % p != 0 && y[i] % p != 0);
                    }
                    n += good && s % q == 0;
                }
    return n;
}

Vec4 cubed(const Vec4& y) { return {y[0] * y[0] * y[0], y[1] * y[1] * y[1], y[2] * y[2] * y[2], y[3] * y[3] * y[3]}; }

std::vector<Vec4> small_vectors()
{
    std::vector<Vec4> out;
    const std::vector<i64> vals{-5, -3, -2, -1, 1, 2, 3, 5};
    for (std::size_t a = 0; a < vals.size(); ++a)
        for (std::size_t b = a; b < vals.size(); ++b)
            for (std::size_t c = b; c < vals.size(); ++c)
                for (std::size_t d = c; d < vals.size(); ++d) out.push_back({vals[a], vals[b], vals[c], vals[d]});
    return out;
}

} // namespace

TEST(LocalCounts, Examples)
{
    EXPECT_EQ(M_count({1, 1, 1, -1}, 3, 1), 20);
    EXPECT_EQ(M_count({1, 1, 1, 1}, 3, 1), 32);
    EXPECT_EQ(M_count({1, 1, 1, 1}, 3, 0), 0);
    EXPECT_EQ(M_count_brute({1, 1, 1, -1}, 3, 1), 20u);
    EXPECT_EQ(M_count_brute({1, 1, 1, -1}, 3, 0), 0u);
    EXPECT_EQ(N_count({1, 1, 1, 1}, {1, 1, 1, -1}, 3, 0), 1);
    EXPECT_EQ(N_count({1, 1, 1, 1}, {1, 1, 1, -1}, 3, 1), 21);
    EXPECT_EQ(N_count({1, 1, 1, 1}, {1, 1, 1, 1}, 3, 1), 33);
    EXPECT_EQ(N_count({1, 1, 1, 1}, {1, 1, 1, 1}, 2, 1), 8);
    EXPECT_THROW(M_count({1, 1, 4, 1}, 3, 1), PreconditionError);
    EXPECT_THROW(M_count({1, 1, 1, 1}, 4, 1), PreconditionError);
}

TEST(LocalCounts, AgainstEnumeration)
{
    const std::vector<Vec4> ys{{1, 1, 1, -1}, {1, 1, 1, -2}, {1, 2, -3, 5}, {2, 3, -1, -6}, {-1, -1, 3, 3}};
    for (const auto& y : ys)
        for (auto [p, N] : std::vector<std::pair<i64, unsigned>>{{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {5, 1}, {7, 1}}) {
            const i64 q = static_cast<i64>(prime_power(p, N));
            const u64 m = enumerate(cubed(y), y, q, p);
            EXPECT_EQ(M_count(y, p, N), m) << format_vec(y) << " p=" << p << " N=" << N;
            EXPECT_EQ(M_count_brute(y, p, N), m);
            const Vec4 s{1, 2, 1, 3};
            Vec4 c = cubed(y);
            for (int i = 0; i < 4; ++i) c[i] *= s[i] * s[i];
            EXPECT_EQ(N_count(s, y, p, N), enumerate(c, y, q, 0));
            EXPECT_EQ(N_count_brute(s, y, p, N), enumerate(c, y, q, 0));
        }
}

TEST(LocalCounts, ExactPathAtHighLevels)
{
    for (const Vec4& y : {Vec4{1, 1, 1, -2}, Vec4{1, 3, -5, 2}})
        for (u64 p : {2ull, 3ull, 5ull})
            for (unsigned N = 1; prime_power(p, N) <= max_brute_modulus; ++N)
                EXPECT_EQ(M_count(y, p, N), M_count_brute(y, p, N)) << format_vec(y) << " p=" << p << " N=" << N;
}

TEST(LocalCounts, RecursionAwayFromY)
{
    const Vec4 one{1, 1, 1, 1};
    for (const Vec4& y : {Vec4{1, 1, 1, -1}, Vec4{1, 2, -3, 5}, Vec4{1, 1, 2, -1}})
        for (u64 p : {3ull, 7ull, 11ull, 13ull}) {
            if (product(y) % static_cast<i64>(p) == 0) continue;
            const BigInt p4 = big_pow(static_cast<i64>(p), 4);
            EXPECT_EQ(M_count(y, p, 1), N_count(one, y, p, 1) - 1);
            for (unsigned N = 2; N <= 5; ++N)
                EXPECT_EQ(M_count(y, p, N), N_count(one, y, p, N) - p4 * N_count(one, y, p, N - 2));
        }
    // with p | Y the non-primitive part is not p^4 N(p^{N-2})
    const Vec4 y{1, 1, 1, -2};
    EXPECT_NE(M_count(y, 2, 4), N_count(one, y, 2, 4) - 16 * N_count(one, y, 2, 2));
}

TEST(LocalDensities, Examples)
{
    EXPECT_EQ(local_density({1, 1, 1, -1}, 3).value, Rational(20, 27));
    EXPECT_EQ(local_density({1, 1, 1, -1}, 5).value, Rational(720, 625));
    for (i64 p : {5, 13, 17}) {
        const Rational ip(p), one(1);
        const Rational want = (one - one / (ip * ip)) * (one - one / (ip * ip)) / (one - one / ip);
        EXPECT_EQ(local_density({1, 1, 1, 1}, p).value, want);
    }
    EXPECT_EQ(local_density({1, 1, 1, -1}, 3).N_stable, 1u);
    EXPECT_EQ(local_density({-1, 1, 1, 1}, 3).value, local_density({1, 1, 1, -1}, 3).value);
}

TEST(LocalDensities, ClosedFormAwayFromTwoY)
{
    for (const auto& y : small_vectors()) {
        const Int256 Y = product(y);
        for (u64 p : primes_up_to(50)) {
            if (p == 2 || Y % static_cast<i64>(p) == 0) continue;
            const auto d = local_density(y, p);
            EXPECT_EQ(d.N_stable, 1u);
            EXPECT_EQ(d.value, local_density_closed_form(y, p)) << format_vec(y) << " p=" << p;
        }
    }
}

TEST(LocalDensities, NonnegativeAndMonotoneFactors)
{
    for (const auto& y : small_vectors())
        for (u64 p : {2ull, 3ull, 5ull}) EXPECT_GE(local_density(y, p).value, 0);
    // chi = +1 factors decrease to 1
    const Vec4 y{1, 1, 1, -1};
    Rational prev = 10;
    for (u64 p : primes_up_to(400)) {
        if (p % 4 != 1) continue;
        const Rational f = local_density_closed_form(y, p);
        EXPECT_GT(f, 1);
        EXPECT_LT(f, prev);
        prev = f;
    }
}

TEST(DensityProducts, EulerProductAgainstPartialProduct)
{
    // exact bad part times a long partial product over the good primes;
    // the product converges conditionally, about 2e-4 relative at 2e5
    for (const Vec4& y : {Vec4{1, 1, 1, -1}, Vec4{1, 1, 1, -2}, Vec4{1, 2, -3, 5}}) {
        const auto e = euler_product_density(y);
        double prod = to_double(e.bad_part);
        const Int256 Y = product(y);
        for (u64 p : primes_up_to(200'000)) {
            if (p == 2 || Y % static_cast<i64>(p) == 0) continue;
            const int chi = residue_symbol(Y, p);
            const double fp = double(p);
            prod *= (1 - 1 / (fp * fp)) * (1 - chi / (fp * fp)) / (1 - chi / fp);
        }
        EXPECT_NEAR(e.value, prod, 1e-3 * e.value) << format_vec(y);
    }
}

TEST(DensityProducts, Symmetry)
{
    const double v = euler_product_density({1, 2, -3, 5}).value;
    EXPECT_DOUBLE_EQ(euler_product_density({5, -3, 2, 1}).value, v);
    EXPECT_DOUBLE_EQ(euler_product_density({-1, -2, 3, -5}).value, v);
    EXPECT_THROW(euler_product_density({1, 1, 1, 1}), PreconditionError);
    EXPECT_THROW(inner_sum({1, 1, 2, 2}), PreconditionError);
}

TEST(InnerSum, OnlyTrivialTermWhenYIsUnit)
{
    const Vec4 y{1, 1, 1, -1};
    const double pi = boost::math::constants::pi<double>();
    const double G = singular_series(CoeffVector(y), SeriesMethod::l_hybrid, 1e-12).value;
    const auto s = inner_sum(y);
    EXPECT_EQ(s.terms, 1u);
    EXPECT_NEAR(s.value, 6 / (pi * pi) * G, 1e-12);
    EXPECT_NEAR(s.value, euler_product_density(y).value, 1e-9);
}

TEST(InnerSum, RepairedWeightsMatchEulerProduct)
{
    for (const auto& shell : y_shells(30, false))
        for (const auto& y : shell) {
            const double e = euler_product_density(y).value;
            EXPECT_NEAR(inner_sum(y, 1e-9, OmegaVariant::repaired).value, e, 1e-8) << format_vec(y);
        }
}

TEST(InnerSum, DefinitionAsWrittenDeviatesWhenPrimesDivideY)
{
    // y = (1, 1, 1, -2): the missed family sits at p = 2
    const Vec4 y{1, 1, 1, -2};
    const double e = euler_product_density(y).value;
    EXPECT_GT(std::abs(inner_sum(y).value - e), 1e-3);
    EXPECT_NEAR(inner_sum(y, 1e-9, OmegaVariant::repaired).value, e, 1e-9);
}
