#include "squareful/counting.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace squareful;

namespace {

// All signed squareful values up to B with their y-parts, by direct scan.
struct Brute {
    std::vector<i64> z;
    std::map<i64, i64> y;

    explicit Brute(u64 B)
    {
        for (i64 n = 1; n <= static_cast<i64>(B); ++n) {
            if (!is_squareful(n)) continue;
            const i64 yy = static_cast<i64>(sqf(n)); // primes with odd exponent
            z.push_back(n);
            z.push_back(-n);
            y[n] = yy;
            y[-n] = -yy;
        }
        std::sort(z.begin(), z.end());
    }

    bool has(i64 v) const { return y.count(v) > 0; }

    // visit(z1, z2, z3, z4) for every ordered zero-sum quadruple
    template <class F>
    void each(F&& visit) const
    {
        for (i64 a : z)
            for (i64 b : z)
                for (i64 c : z) {
                    const i64 d = -(a + b + c);
                    if (has(d)) visit(a, b, c, d);
                }
    }

    u64 absY(i64 a, i64 b, i64 c, i64 d) const
    {
        return uabs(y.at(a)) * uabs(y.at(b)) * uabs(y.at(c)) * uabs(y.at(d));
    }
};

bool primitive(i64 a, i64 b, i64 c, i64 d)
{
    return std::gcd(std::gcd(uabs(a), uabs(b)), std::gcd(uabs(c), uabs(d))) == 1;
}

} // namespace

TEST(Naive, Examples)
{
    EXPECT_EQ(count_Nk_naive(5, 3, true).count, 0u);
    EXPECT_EQ(count_Nk_naive(9, 3, true).count, 12u);
    EXPECT_EQ(count_Nk_naive(10, 4, true).count, 150u);
    EXPECT_EQ(count_Nk_naive(10, 4, true, true).count, 24u);
    EXPECT_THROW(count_Nk_naive(200'000, 4, true), PreconditionError);
    EXPECT_THROW(count_Nk_naive(10, 5, true), PreconditionError);
}

TEST(Fast, Examples)
{
    EXPECT_EQ(count_N(10, std::nullopt, true).count, 24u);
    EXPECT_EQ(count_N(10, 1, true).count, 24u);
    EXPECT_EQ(count_N(5, std::nullopt, true).count, 0u);
    // without thin removal all 30 primitive solutions at B = 5 are thin
    EXPECT_EQ(count_N(5, std::nullopt, false).count, 30u);
    EXPECT_EQ(count_M(10, 1).count, 150u);
    EXPECT_EQ(count_M(10, 2).count, 48u);
    EXPECT_EQ(count_M(10, 5).count, 0u);
    EXPECT_THROW(count_N(200'000'000, std::nullopt, true), BudgetError);
}

TEST(Fast, MatchesNaive)
{
    for (u64 B : {1ull, 9ull, 100ull, 1000ull, 5000ull})
        for (bool thin : {false, true})
            for (std::optional<u64> D : {std::optional<u64>{}, std::optional<u64>{1}, std::optional<u64>{6},
                                         std::optional<u64>{40}}) {
                EXPECT_EQ(count_N(B, D, thin, 2).count, count_Nk_naive(B, 4, true, thin, D).count)
                    << "B=" << B << " thin=" << thin;
            }
}

TEST(Fast, TailAgainstBrute)
{
    const u64 B = 1000;
    const Brute br(B);
    std::map<u64, u64> byY; // primitive solutions per |Y|
    u64 thin_primitive = 0;
    br.each([&](i64 a, i64 b, i64 c, i64 d) {
        if (!primitive(a, b, c, d)) return;
        ++byY[br.absY(a, b, c, d)];
        thin_primitive += thin_test({a, b, c, d});
    });
    const auto M = [&](u64 D) {
        u64 n = 0;
        for (const auto& [Y, c] : byY)
            if (Y >= D) n += c;
        return n;
    };
    u64 prev = ~u64(0);
    for (u64 D : {1ull, 2ull, 3ull, 8ull, 27ull, 100ull, 1000ull, 1001ull, 5000ull}) {
        const u64 m = count_M(B, D).count;
        EXPECT_EQ(m, M(D)) << D;
        EXPECT_LE(m, prev);
        prev = m;
    }
    EXPECT_EQ(count_M(B, 1).count, count_N(B, std::nullopt, true).count + thin_primitive);
    // |Y| can exceed B, so M(B, D) with D > B need not vanish
    EXPECT_GT(count_M(B, B + 1).count, 0u);
    EXPECT_EQ(count_M(B, byY.rbegin()->first + 1).count, 0u);

    const auto t = enumerate_squareful(B);
    const auto v = signed_values(t, B);
    const std::vector<u64> Ds{1, 2, 8, 64, 1001};
    const auto profile = count_M_profile(v, B, Ds, 3);
    for (std::size_t i = 0; i < Ds.size(); ++i) EXPECT_EQ(profile[i], M(Ds[i]));
}

TEST(Fast, SignSymmetryAndThreads)
{
    const u64 B = 200'000;
    const auto a = count_N(B, 30, true, 1).count;
    EXPECT_EQ(count_N(B, 30, true, 4).count, a);
    EXPECT_EQ(a % 2, 0u);
    const auto t = enumerate_squareful(2000);
    const auto v = signed_values(t, 2000);
    // each solution's negation is also visited
    using Acc = std::set<std::array<i64, 4>>;
    const auto all = reduce_solutions<Acc>(
        v, 2000, 2,
        [&](const std::array<std::uint32_t, 4>& idx, u64 mult, Acc& acc) {
            std::array<i64, 4> z{v[idx[0]].z, v[idx[1]].z, v[idx[2]].z, v[idx[3]].z};
            acc.insert(z);
            if (mult == 2) acc.insert({-z[0], -z[1], -z[2], -z[3]});
        },
        [](Acc& t, Acc& p) { t.insert(p.begin(), p.end()); });
    for (const auto& z : all) EXPECT_TRUE(all.count({-z[0], -z[1], -z[2], -z[3]}));
    EXPECT_EQ(all.size(), count_fast(v, CountQuery{2000, {}, {}, false, false}, 1));
}

TEST(Windows, CoverPositiveSums)
{
    const auto t = enumerate_squareful(300'000);
    const auto v = signed_values(t, 300'000);
    const auto b = pair_windows(v, 300'000);
    ASSERT_GE(b.size(), 3u);
    EXPECT_EQ(b.front(), 1);
    EXPECT_EQ(b.back(), 600'001);
    for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LT(b[i - 1], b[i]);
}

TEST(Boxes, Examples)
{
    EXPECT_EQ(count_NXY({1, 1, 1, 1}, {1, 1, 1, 1}).count, 96u);
    EXPECT_EQ(count_NXY({1, 1, 1, 1}, {2, 2, 2, 2}).count, 576u);
    // direct oracle over all sign and value choices
    auto brute = [](std::array<u64, 4> X, std::array<u64, 4> Y) {
        std::vector<std::vector<i64>> terms(4);
        for (int i = 0; i < 4; ++i)
            for (i64 y = -static_cast<i64>(Y[i]); y <= static_cast<i64>(Y[i]); ++y) {
                if (y == 0 || !is_squarefree(y)) continue;
                for (i64 x = -static_cast<i64>(X[i]); x <= static_cast<i64>(X[i]); ++x)
                    if (x != 0) terms[i].push_back(y * y * y * x * x);
            }
        u64 n = 0;
        for (i64 a : terms[0])
            for (i64 b : terms[1])
                for (i64 c : terms[2])
                    for (i64 d : terms[3]) n += a + b + c + d == 0;
        return n;
    };
    EXPECT_EQ(count_NXY({1, 1, 1, 1}, {1, 1, 1, 2}).count, brute({1, 1, 1, 1}, {1, 1, 1, 2}));
    EXPECT_EQ(count_NXY({1, 1, 1, 1}, {1, 1, 1, 2}).count, 96u);
    EXPECT_EQ(count_NXY({3, 2, 3, 4}, {3, 2, 2, 3}).count, brute({3, 2, 3, 4}, {3, 2, 2, 3}));
    EXPECT_THROW(count_NXY({100000, 100000, 100000, 100000}, {1000, 1000, 1000, 1000}), BudgetError);
}

TEST(Quadric, Examples)
{
    EXPECT_EQ(count_quadric(CoeffVector({1, 1, 1, 1}), 1000).count, 0u);
    EXPECT_EQ(count_quadric(CoeffVector({1, 1, 1, -1}), 9).count, 48u);
    EXPECT_EQ(count_quadric(CoeffVector({1, -1, 2, -2}), 2).count, 16u);
}

TEST(Quadric, PythagoreanByDivisorSums)
{
    // x1^2 + x2^2 = x4^2 - x3^2 counted with r2(n) = 4 sum_{d | n} chi_4(d)
    auto r2 = [](u64 n) {
        i64 s = 0;
        for (u64 d = 1; d * d <= n; ++d) {
            if (n % d) continue;
            auto chi = [](u64 m) { return m % 2 == 0 ? 0 : (m % 4 == 1 ? 1 : -1); };
            s += chi(d);
            if (d * d != n) s += chi(n / d);
        }
        return 4 * s;
    };
    for (u64 B : {9ull, 100ull, 2000ull, 10000ull}) {
        const u64 top = isqrt(B);
        i64 total = 0;
        for (u64 x4 = 1; x4 <= top; ++x4)
            for (u64 x3 = 1; x3 < x4; ++x3) {
                const u64 n = x4 * x4 - x3 * x3;
                i64 c = r2(n);
                if (is_square(static_cast<i64>(n))) c -= 4; // a zero coordinate
                total += 2 * 2 * c;                         // signs of x3 and x4
            }
        EXPECT_EQ(count_quadric(CoeffVector({1, 1, 1, -1}), B).count, static_cast<u64>(total)) << B;
    }
}

TEST(Fibre, Examples)
{
    EXPECT_EQ(fibre_count({1, 1, 1, -1}, 10).count, 48u);
    EXPECT_EQ(fibre_count({1, 1, 1, 1}, 100000).count, 0u);
    EXPECT_EQ(fibre_count({1, 1, 2, -2}, 10).count, 0u);
    EXPECT_THROW(fibre_count({1, 1, 4, -1}, 10), PreconditionError);
}

TEST(Fibre, SumIdentity)
{
    EXPECT_EQ(16 * count_N(10, std::nullopt, true).count, 384u);
    EXPECT_EQ(fibre_sum(10), 384u);
    for (u64 B : {100ull, 500ull}) EXPECT_EQ(fibre_sum(B), 16 * count_N(B, std::nullopt, true).count);
}

TEST(Fibre, DivisibleMatchesQuadric)
{
    // positive-orthant N_y(B; s, s0) times the 16 sign choices equals
    // N_{s^2 y^3}(B / s0^2)
    const std::vector<Vec4> ys{{1, 1, 1, -1}, {1, 1, 1, -2}, {1, 2, 3, -5}, {1, -1, 2, -2}};
    const std::vector<std::pair<Vec4, i64>> ss{{{1, 1, 1, 1}, 1}, {{2, 1, 1, 1}, 1}, {{1, 1, 1, 1}, 3},
                                               {{2, 1, 2, 1}, 3}, {{1, 3, 1, 2}, 5}};
    for (const auto& y : ys)
        for (const auto& [s, s0] : ss) {
            const u64 B = 40'000;
            const u64 pos = fibre_count_divisible(y, B, s, s0, Orthant::positive).count;
            const u64 sgn = fibre_count_divisible(y, B, s, s0, Orthant::signed_all).count;
            Vec4 a{};
            for (int i = 0; i < 4; ++i) a[i] = s[i] * s[i] * y[i] * y[i] * y[i];
            const u64 q = count_quadric(CoeffVector(a), B / static_cast<u64>(s0 * s0)).count;
            EXPECT_EQ(16 * pos, q);
            EXPECT_EQ(sgn, q);
        }
}

TEST(ScriptN, Examples)
{
    EXPECT_EQ(count_script_N(10, 10, {1, 1, 1, 1}, {1, 1, 1, 1}, 1).count, 24u);
    EXPECT_EQ(count_script_N(10, 10, {1, 1, 1, 1}, {1, 1, 1, 1}, 2).count, 0u);
    EXPECT_EQ(count_script_N(10, 10, {2, 1, 1, 1}, {1, 1, 1, 1}, 1).count, 0u);
}

TEST(ScriptN, AgainstBrute)
{
    const u64 B = 600, D = 20;
    const Brute br(B);
    std::vector<std::array<i64, 4>> base;
    br.each([&](i64 a, i64 b, i64 c, i64 d) {
        if (br.absY(a, b, c, d) <= D && !thin_test({a, b, c, d})) base.push_back({a, b, c, d});
    });
    const std::vector<std::tuple<Vec4, Vec4, i64>> keys{{{1, 1, 1, 1}, {1, 1, 1, 1}, 1},
                                                         {{1, 1, 1, 1}, {1, 1, 1, 1}, 2},
                                                         {{2, 1, 1, 1}, {1, 1, 1, 1}, 1},
                                                         {{1, 1, 1, 1}, {2, 2, 1, 1}, 1},
                                                         {{1, 2, 1, 1}, {2, 1, 2, 2}, 3}};
    for (const auto& [r, s, s0] : keys) {
        u64 n = 0;
        for (const auto& z : base) {
            bool ok = true;
            for (int i = 0; i < 4; ++i) {
                const auto d = decompose(z[i]);
                ok = ok && uabs(d.y) % static_cast<u64>(r[i]) == 0 && d.x % static_cast<u64>(s[i]) == 0 &&
                     d.x % static_cast<u64>(s0) == 0;
            }
            n += ok;
        }
        EXPECT_EQ(count_script_N(B, D, r, s, s0).count, n);
    }
}

TEST(InclusionExclusion, Examples)
{
    for (auto [B, D, expect] : std::vector<std::tuple<u64, u64, u64>>{{10, 10, 24}, {5, 5, 0}, {10, 1, 24}}) {
        const auto r = verify_inclusion_exclusion(B, D);
        EXPECT_EQ(r.lhs, expect);
        EXPECT_EQ(r.rhs, static_cast<i64>(expect));
        EXPECT_TRUE(r.equal);
    }
}

TEST(InclusionExclusion, RepairedWeightsAreExact)
{
    for (u64 B : {10ull, 100ull, 1000ull})
        for (u64 D : {1ull, 5ull, 10ull, 20ull}) {
            const auto r = verify_inclusion_exclusion(B, D, 2);
            EXPECT_EQ(r.rhs_repaired, static_cast<i64>(r.lhs)) << B << " " << D;
        }
}

TEST(InclusionExclusion, DefinitionAsWrittenMissesAllXFamily)
{
    // with D = 1 no prime divides a y-part, so both weightings agree
    for (u64 B : {100ull, 1000ull}) EXPECT_TRUE(verify_inclusion_exclusion(B, 1).equal);
    const auto r = verify_inclusion_exclusion(100, 5);
    EXPECT_EQ(r.lhs, 912u);
    EXPECT_EQ(r.rhs, 768);
    EXPECT_FALSE(r.equal);
    // a member of the missed family: 2 divides every x_i but only y_4
    const Vec4 z{256, 16, 16, -288};
    EXPECT_EQ(z[0] + z[1] + z[2] + z[3], 0);
    EXPECT_FALSE(thin_test(z));
    int even_y = 0;
    for (i64 v : z) {
        const auto d = decompose(v);
        EXPECT_EQ(d.x % 2, 0u);
        even_y += d.y % 2 == 0;
    }
    EXPECT_EQ(even_y, 1);
}
