#include "squareful/constant.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace squareful;

namespace {

// c(D) from its definition, shell by shell, without the library's grouping.
double constant_oracle(u64 D)
{
    double total = 0;
    const std::vector<i64> mags{1, 2, 3, 5, 6, 7};
    for (i64 a : mags)
        for (i64 b : mags)
            for (i64 c : mags)
                for (i64 d : mags) {
                    const u64 Y = u64(a * b * c * d);
                    if (Y > D) continue;
                    for (int m = 0; m < 16; ++m) {
                        Vec4 y{a, b, c, d};
                        Signs e{1, 1, 1, 1};
                        for (int i = 0; i < 4; ++i)
                            if (m >> i & 1) {
                                y[i] = -y[i];
                                e[i] = -1;
                            }
                        if (is_square(Int256(y[0]) * y[1] * y[2] * y[3])) continue;
                        const double s = sigma_infinity(e).value;
                        if (s == 0) continue;
                        total += s * euler_product_density(y).value * std::pow(double(Y), -1.5) / 16;
                    }
                }
    return total;
}

} // namespace

TEST(Constant, Examples)
{
    EXPECT_EQ(leading_constant(0).value, 0.0);
    const double S1 = euler_product_density({1, 1, 1, -1}).value;
    const double pi = boost::math::constants::pi<double>();
    EXPECT_NEAR(leading_constant(1).value, pi * S1, 1e-12);
    EXPECT_NEAR(leading_constant(1).value, constant_oracle(1), 1e-12);
    EXPECT_NEAR(leading_constant(2).value, constant_oracle(2), 1e-10);
    EXPECT_NEAR(leading_constant(7).value, constant_oracle(7), 1e-10);
    EXPECT_GE(leading_constant(2).value, leading_constant(1).value);
}

TEST(Constant, FrozenAnchors)
{
    // first oracle-validated values, kept as regressions
    EXPECT_NEAR(leading_constant(1).value, 1.63761609555586, 1e-12);
    EXPECT_NEAR(leading_constant(2).value, 7.86112339, 1e-8);
    EXPECT_NEAR(leading_constant(50).value, 42.0312447212, 1e-8);
}

TEST(Constant, MonotoneWithShrinkingShells)
{
    const auto c = leading_constant(1024);
    double run = 0;
    for (u64 Y = 1; Y <= 1024; ++Y) {
        EXPECT_GE(c.shell_mass[Y], 0.0);
        run += c.shell_mass[Y];
        if (Y == 8 || Y == 64 || Y == 512) {
            EXPECT_NEAR(leading_constant(Y).value, run, 1e-9);
        }
    }
    EXPECT_NEAR(run, c.value, 1e-9);
    auto dyadic = [&](u64 D) {
        double m = 0;
        for (u64 Y = D / 2 + 1; Y <= D; ++Y) m += c.shell_mass[Y];
        return m;
    };
    // dyadic masses still grow for small D and shrink from D = 128 on
    EXPECT_GT(dyadic(16), dyadic(8));
    for (u64 D = 256; D <= 1024; D *= 2) EXPECT_LT(dyadic(D), dyadic(D / 2)) << D;
    EXPECT_NEAR(c.last_shell_mass, dyadic(1024), 1e-12);
}

TEST(Constant, SignClassSymmetry)
{
    const auto c = leading_constant(30);
    ASSERT_TRUE(c.per_eps.count("3+1-"));
    EXPECT_NEAR(c.per_eps.at("3+1-"), c.per_eps.at("1+3-"), 1e-12 * c.value);
    double sum = 0;
    for (const auto& [k, v] : c.per_eps) sum += v;
    EXPECT_NEAR(sum, c.value, 1e-12 * c.value);
    EXPECT_FALSE(c.per_eps.count("4+0-"));
}

TEST(Constant, ThreadIndependent)
{
    EXPECT_EQ(leading_constant(40, 1e-9, 1).value, leading_constant(40, 1e-9, 3).value);
}

TEST(Shells, Structure)
{
    const auto s = y_shells(6);
    EXPECT_EQ(s[1].size(), 8u); // odd number of minus signs
    // |Y| = 4 only as two coordinates of size 2: 6 placements, odd minus count
    EXPECT_EQ(s[4].size(), 6u * 8u);
    for (u64 Y = 1; Y <= 6; ++Y)
        for (const auto& y : s[Y]) {
            EXPECT_EQ(uabs(y[0]) * uabs(y[1]) * uabs(y[2]) * uabs(y[3]), Y);
            EXPECT_FALSE(is_square(Int256(y[0]) * y[1] * y[2] * y[3]));
        }
    EXPECT_EQ(density_key({2, -1, 1, 1}), density_key({-2, 1, -1, -1}));
    EXPECT_EQ(density_key({3, 1, -1, 1}), density_key({1, 1, 3, -1}));
}

TEST(DensityLemma, AsDefinedFailsRepairedHolds)
{
    const auto r = check_density_lemma(30);
    EXPECT_GT(r.vectors, 0u);
    EXPECT_GT(r.failures, 0u);
    EXPECT_GT(r.max_diff, 1e-3);
    EXPECT_LT(r.max_diff_repaired, 1e-8);
    // with |Y| = 1 no prime divides y, so both weightings agree
    const auto one = check_density_lemma(1);
    EXPECT_EQ(one.failures, 0u);
}

TEST(Compare, SmallExampleAndRows)
{
    const auto path = (std::filesystem::temp_directory_path() / "sqful_compare_rows.csv").string();
    std::remove(path.c_str());
    const auto c = compare_empirical(10, 10, 1e-9, 1, path);
    EXPECT_EQ(c.observed, 24u);
    EXPECT_EQ(c.observed_ymax, 24u);
    EXPECT_NEAR(c.predicted, 10 * leading_constant(10).value, 1e-9);
    compare_empirical(100, 10, 1e-9, 1, path);
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "B,D,observed,observed_ymax,constant,predicted,ratio");
    EXPECT_EQ(lines[1].rfind("10,10,24,24,", 0), 0u);
    EXPECT_EQ(lines[2].rfind("100,10,1200,", 0), 0u);
    std::remove(path.c_str());
}

TEST(Compare, PredictionNondecreasingInD)
{
    double prev = 0;
    for (u64 D : {1ull, 2ull, 5ull, 10ull, 20ull}) {
        const auto c = compare_empirical(1000, D, 1e-9, 1);
        EXPECT_GE(c.predicted, prev);
        EXPECT_EQ(c.observed, 27240u);
        prev = c.predicted;
    }
}
