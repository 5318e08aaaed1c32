#pragma once

// The leading constant c(D) assembled from sigma_inf and the Euler products
// of local densities, and its comparison with exact counts.

#include "squareful/archimedean.hpp"
#include "squareful/counting.hpp"
#include "squareful/localdens.hpp"
#include "squareful/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace squareful {

/// Sorted, and of the two sorted tuples of y and -y the smaller one; the
/// density is invariant under both operations.
inline Vec4 density_key(const Vec4& y)
{
    Vec4 a = y, b{-y[0], -y[1], -y[2], -y[3]};
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::min(a, b);
}

inline DensityProduct cached_density(const Vec4& y, double tol)
{
    static Memo<Vec4, DensityProduct> memo;
    const Vec4 key = density_key(y);
    return memo.get(key, [&] { return euler_product_density(key, tol); });
}

/// Squarefree y in Z^4 (signed) with |Y| <= D and Y not a square, grouped
/// by |Y|. Definite sign patterns are dropped when `indefinite_only`.
inline std::vector<std::vector<Vec4>> y_shells(u64 D, bool indefinite_only = true)
{
    std::vector<std::vector<Vec4>> shells(D + 1);
    if (D == 0) return shells;
    const auto sf = squarefree_flags(D);
    std::vector<i64> mags;
    for (u64 v = 1; v <= D; ++v)
        if (sf[v]) mags.push_back(static_cast<i64>(v));
    for (i64 a : mags)
        for (i64 b : mags) {
            if (u64(a * b) > D) break;
            for (i64 c : mags) {
                if (u64(a * b * c) > D) break;
                for (i64 d : mags) {
                    const u64 Y = u64(a * b * c * d);
                    if (Y > D) break;
                    for (int mask = 0; mask < 16; ++mask) {
                        if (indefinite_only && (mask == 0 || mask == 15)) continue;
                        Vec4 y{a, b, c, d};
                        for (int i = 0; i < 4; ++i)
                            if (mask >> i & 1) y[i] = -y[i];
                        if (is_square(Int256(y[0]) * y[1] * y[2] * y[3])) continue;
                        shells[Y].push_back(y);
                    }
                }
            }
        }
    return shells;
}

struct DensityLemmaCheck {
    u64 D = 0;
    std::size_t vectors = 0;
    std::size_t failures = 0;      // |inner_sum - euler_product_density| > threshold
    double max_diff = 0;
    Vec4 worst{};
    double max_diff_repaired = 0;  // the same with OmegaVariant::repaired
};

/// inner_sum against euler_product_density for every y with |Y| <= D.
inline DensityLemmaCheck check_density_lemma(u64 D, double threshold = 1e-3, double tol = 1e-9,
                                             unsigned threads = default_threads())
{
    require(threshold > 0, "check_density_lemma: threshold must be positive");
    std::vector<Vec4> ys;
    for (const auto& shell : y_shells(D, false)) ys.insert(ys.end(), shell.begin(), shell.end());
    struct Row {
        double diff, repaired;
    };
    const auto rows = parallel_map(ys.size(), threads, [&](std::size_t i) {
        const double e = cached_density(ys[i], tol).value;
        return Row{std::abs(inner_sum(ys[i], tol).value - e),
                   std::abs(inner_sum(ys[i], tol, OmegaVariant::repaired).value - e)};
    });
    DensityLemmaCheck out;
    out.D = D;
    out.vectors = ys.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].diff > threshold) ++out.failures;
        if (rows[i].diff > out.max_diff) {
            out.max_diff = rows[i].diff;
            out.worst = ys[i];
        }
        out.max_diff_repaired = std::max(out.max_diff_repaired, rows[i].repaired);
    }
    return out;
}

struct ConstantEstimate {
    u64 D = 0;
    double value = 0;
    double error_estimate = 0;
    std::map<std::string, double> per_eps; // keyed by sign class, e.g. "3+1-"
    std::vector<double> shell_mass;        // index |Y|
    double last_shell_mass = 0;            // c(D) - c(floor(D / 2))
    std::size_t vectors = 0;
};

inline std::string sign_class(const Signs& e)
{
    const int k = positive_count(e);
    return std::to_string(k) + "+" + std::to_string(4 - k) + "-";
}

/// c(D) = (1/16) sum_eps sigma_inf(eps) sum_{sgn y = eps} |Y|^{-3/2} prod_p sigma_p(y).
/// Shells are evaluated in parallel and summed in order of |Y|. Half of
/// `tol` goes to the densities and half to sigma_inf.
inline ConstantEstimate leading_constant(u64 D, double tol = 1e-9, unsigned threads = default_threads())
{
    require(tol > 0, "leading_constant: tol must be positive");
    ConstantEstimate out;
    out.D = D;
    out.shell_mass.assign(D + 1, 0);
    if (D == 0) return out;
    std::map<int, SigmaInfResult> sig;
    for (int k : {1, 2, 3}) {
        Signs e{};
        for (int i = 0; i < 4; ++i) e[i] = i < k ? 1 : -1;
        sig[k] = sigma_infinity(e, tol / 2);
    }
    const auto shells = y_shells(D);
    struct ShellSum {
        double mass = 0, error = 0;
        std::map<std::string, double> per_eps;
        std::size_t count = 0;
    };
    const auto parts = parallel_map(shells.size(), threads, [&](std::size_t Y) {
        ShellSum s;
        const double w = std::pow(static_cast<double>(Y), -1.5) / 16.0;
        for (const auto& y : shells[Y]) {
            Signs e{};
            for (int i = 0; i < 4; ++i) e[i] = y[i] > 0 ? 1 : -1;
            const auto& si = sig.at(positive_count(e));
            const auto dens = cached_density(y, tol / 2);
            const double term = w * si.value * dens.value;
            s.mass += term;
            s.per_eps[sign_class(e)] += term;
            s.error += w * (si.error_estimate * dens.value + si.value * dens.tail_bound);
            ++s.count;
        }
        return s;
    });
    for (std::size_t Y = 0; Y < parts.size(); ++Y) {
        out.shell_mass[Y] = parts[Y].mass;
        out.value += parts[Y].mass;
        out.error_estimate += parts[Y].error;
        out.vectors += parts[Y].count;
        for (const auto& [k, v] : parts[Y].per_eps) out.per_eps[k] += v;
    }
    for (u64 Y = D / 2 + 1; Y <= D; ++Y) out.last_shell_mass += out.shell_mass[Y];
    return out;
}

struct EmpiricalComparison {
    u64 B = 0, D = 0;
    u64 observed = 0;         // N(B), thin solutions removed
    u64 observed_ymax = 0;    // the same with |Y| <= D
    double constant = 0;      // c(D)
    double predicted = 0;     // c(D) B
    double ratio = 0;         // observed / predicted
};

inline void append_comparison_row(const EmpiricalComparison& c, const std::string& path)
{
    bool fresh = false;
    {
        std::ifstream probe(path);
        fresh = !probe.good() || probe.peek() == std::ifstream::traits_type::eof();
    }
    std::ofstream os(path, std::ios::app);
    if (!os) throw PreconditionError("cannot write comparison rows to " + path);
    if (fresh) os << "B,D,observed,observed_ymax,constant,predicted,ratio\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%llu,%llu,%llu,%llu,%.12g,%.12g,%.12g\n",
                  static_cast<unsigned long long>(c.B), static_cast<unsigned long long>(c.D),
                  static_cast<unsigned long long>(c.observed), static_cast<unsigned long long>(c.observed_ymax),
                  c.constant, c.predicted, c.ratio);
    os << buf;
}

/// N(B) against c(D) B. With `rows` set, one CSV row is appended there.
inline EmpiricalComparison compare_empirical(u64 B, u64 D, double tol = 1e-9, unsigned threads = default_threads(),
                                             const std::optional<std::string>& rows = std::nullopt)
{
    require(B >= 1, "compare_empirical: B must be >= 1");
    if (B > max_fast_bound) throw BudgetError("compare_empirical: B above supported bound 1e8");
    EmpiricalComparison c;
    c.B = B;
    c.D = D;
    const auto table = enumerate_squareful(B);
    c.observed = count_N(B, std::nullopt, true, threads, &table).count;
    c.observed_ymax = count_N(B, D, true, threads, &table).count;
    c.constant = leading_constant(D, tol, threads).value;
    c.predicted = c.constant * static_cast<double>(B);
    c.ratio = c.predicted > 0 ? static_cast<double>(c.observed) / c.predicted : 0.0;
    if (rows) append_comparison_row(c, *rows);
    return c;
}

} // namespace squareful
