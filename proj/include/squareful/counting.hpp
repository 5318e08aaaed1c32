#pragma once

// Exact counts of squareful quadruples summing to zero (meet in the middle
// over pair sums), naive oracles, box and quadric counters, fibre counts and
// the omega-weighted sieve sets.

#include "squareful/arith.hpp"
#include "squareful/omega.hpp"
#include "squareful/parallel.hpp"
#include "squareful/squareful.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace squareful {

struct CountResult {
    std::string op;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    u64 count = 0;
    std::string algorithm;
    double seconds = 0;
};

namespace detail {

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace detail

inline constexpr u64 max_fast_bound = 100'000'000;

/// Signed squareful values in [-B, B] \ {0}, ascending. Entry n-1-i is the
/// negation of entry i.
inline std::vector<SquarefulDecomp> signed_values(const SquarefulTable& t, u64 B)
{
    require(B <= t.B, "signed_values: table bound below requested B");
    std::vector<SquarefulDecomp> pos;
    for (const auto& e : t.entries)
        if (static_cast<u64>(e.z) <= B) pos.push_back(e);
    std::vector<SquarefulDecomp> v;
    v.reserve(2 * pos.size());
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) v.push_back({-it->z, -it->y, it->x});
    v.insert(v.end(), pos.begin(), pos.end());
    return v;
}

struct PairRecord {
    i64 s;
    std::uint32_t i, j;
};

/// Ordered index pairs (i, j) of a signed value list whose sum lies in a
/// window [lo, hi), sorted by (sum, i, j). A sequence of windows covering
/// [1, 2B] together with the zero-sum pairs covers all pairs with sum >= 0.
class PairSumIndex {
public:
    PairSumIndex(std::span<const SquarefulDecomp> values, i64 lo, i64 hi) : lo_(lo), hi_(hi)
    {
        const std::size_t n = values.size();
        for (std::size_t i = 0; i < n; ++i) {
            const i64 zi = values[i].z;
            auto cmp = [](const SquarefulDecomp& e, i64 v) { return e.z < v; };
            auto first = std::lower_bound(values.begin(), values.end(), lo - zi, cmp);
            auto last = std::lower_bound(values.begin(), values.end(), hi - zi, cmp);
            for (auto it = first; it != last; ++it)
                records_.push_back({zi + it->z, static_cast<std::uint32_t>(i),
                                    static_cast<std::uint32_t>(it - values.begin())});
        }
        std::sort(records_.begin(), records_.end(), [](const PairRecord& a, const PairRecord& b) {
            return std::tie(a.s, a.i, a.j) < std::tie(b.s, b.i, b.j);
        });
    }

    std::span<const PairRecord> records() const { return records_; }
    i64 lo() const { return lo_; }
    i64 hi() const { return hi_; }

    /// Calls fn(group) for each maximal run of equal sums.
    template <class Fn>
    void for_each_group(Fn&& fn) const
    {
        std::size_t a = 0;
        while (a < records_.size()) {
            std::size_t b = a + 1;
            while (b < records_.size() && records_[b].s == records_[a].s) ++b;
            fn(std::span<const PairRecord>(records_.data() + a, b - a));
            a = b;
        }
    }

private:
    i64 lo_, hi_;
    std::vector<PairRecord> records_;
};

namespace detail {

// #{(i, j) : v_i + v_j < t} by two pointers.
inline u64 pairs_below(std::span<const SquarefulDecomp> v, i64 t)
{
    const std::size_t n = v.size();
    u64 count = 0;
    std::size_t j = n;
    for (std::size_t i = 0; i < n; ++i) {
        while (j > 0 && v[i].z + v[j - 1].z >= t) --j;
        count += j;
    }
    return count;
}

} // namespace detail

inline constexpr u64 max_pairs_per_window = u64(1) << 22;

/// Window boundaries b_0 = 1 < b_1 < ... < b_W = 2B + 1 over positive sums,
/// chosen from pair counts only (no dependence on the thread count).
inline std::vector<i64> pair_windows(std::span<const SquarefulDecomp> v, u64 B)
{
    const i64 top = 2 * static_cast<i64>(B) + 1;
    const u64 base = detail::pairs_below(v, 1);
    const u64 total = detail::pairs_below(v, top) - base;
    u64 windows = std::max<u64>(1, (total + max_pairs_per_window - 1) / max_pairs_per_window);
    windows = std::max<u64>(windows, std::min<u64>(64, total / 65536));
    std::vector<i64> b{1};
    for (u64 k = 1; k < windows; ++k) {
        const u64 target = base + total / windows * k;
        i64 lo = b.back(), hi = top;
        while (lo < hi) {
            const i64 mid = lo + (hi - lo) / 2;
            if (detail::pairs_below(v, mid) >= target) hi = mid;
            else lo = mid + 1;
        }
        if (lo > b.back() && lo < top) b.push_back(lo);
    }
    b.push_back(top);
    return b;
}

/// One solution group: all pairs with a common sum s. Every (a, b) in
/// group x group yields the solution (v_{a.i}, v_{a.j}, -v_{b.i}, -v_{b.j}),
/// and for s > 0 its global negation is the s < 0 counterpart, hence
/// `multiplicity` 2; the s = 0 group has multiplicity 1.
struct SolutionGroup {
    std::span<const PairRecord> pairs;
    u64 multiplicity;
};

/// Folds fn(group, acc) over all solution groups. Windows are evaluated in
/// parallel and their accumulators combined in window order with `merge`.
template <class Acc, class GroupFn, class Merge>
Acc reduce_solution_groups(std::span<const SquarefulDecomp> v, u64 B, unsigned threads, GroupFn&& fn,
                           Merge&& merge)
{
    require(B <= max_fast_bound, "meet-in-the-middle: B above supported bound 1e8");
    require(v.size() < (u64(1) << 32), "meet-in-the-middle: value list too long");
    const auto bounds = pair_windows(v, B);
    const std::size_t windows = bounds.size() - 1;
    // task 0 is the zero-sum group
    auto parts = parallel_map(windows + 1, threads, [&](std::size_t task) {
        Acc acc{};
        if (task == 0) {
            std::vector<PairRecord> zero;
            zero.reserve(v.size());
            const auto n = static_cast<std::uint32_t>(v.size());
            for (std::uint32_t i = 0; i < n; ++i) zero.push_back({0, i, n - 1 - i});
            fn(SolutionGroup{zero, 1}, acc);
            return acc;
        }
        PairSumIndex index(v, bounds[task - 1], bounds[task]);
        index.for_each_group([&](std::span<const PairRecord> g) { fn(SolutionGroup{g, 2}, acc); });
        return acc;
    });
    Acc total{};
    for (auto& p : parts) merge(total, p);
    return total;
}

/// Calls visit(idx, multiplicity, acc) for every solution with idx the four
/// value indices; `multiplicity` accounts for the negated twin when 2.
template <class Acc, class Visit, class Merge>
Acc reduce_solutions(std::span<const SquarefulDecomp> v, u64 B, unsigned threads, Visit&& visit, Merge&& merge)
{
    const auto n1 = static_cast<std::uint32_t>(v.size() - 1);
    return reduce_solution_groups<Acc>(
        v, B, threads,
        [&](const SolutionGroup& g, Acc& acc) {
            for (const auto& a : g.pairs)
                for (const auto& b : g.pairs)
                    visit(std::array<std::uint32_t, 4>{a.i, a.j, n1 - b.i, n1 - b.j}, g.multiplicity, acc);
        },
        merge);
}

/// Signed squarefree kernel of y1 y2 for squarefree y1, y2.
inline i64 pair_kernel(i64 y1, i64 y2)
{
    const i64 g = static_cast<i64>(gcd_i(y1, y2));
    return (y1 / g) * (y2 / g);
}

struct CountQuery {
    u64 B = 1;
    std::optional<u64> ymax; // |Y| <= ymax
    std::optional<u64> ymin; // |Y| >= ymin
    bool remove_thin = false;
    bool primitive = true;
};

namespace detail {

struct PairData {
    u64 g;     // gcd(|z_i|, |z_j|)
    u64 yy;    // |y_i y_j|
    i64 kern;  // signed squarefree kernel of y_i y_j
};

inline bool accept(const CountQuery& q, const PairData& a, const PairData& b)
{
    if (q.primitive && a.g != 1 && b.g != 1 && std::gcd(a.g, b.g) != 1) return false;
    // the solution's Y equals (y_i y_j)(y_k y_l) with both factors negated
    // for the second pair, so thinness is kernel equality
    if (q.remove_thin && a.kern == b.kern) return false;
    if (q.ymax || q.ymin) {
        const u128 Y = u128(a.yy) * b.yy;
        if (q.ymax && Y > *q.ymax) return false;
        if (q.ymin && Y < *q.ymin) return false;
    }
    return true;
}

inline void pair_data(std::span<const SquarefulDecomp> v, std::span<const PairRecord> g, std::vector<PairData>& out)
{
    out.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto& x = v[g[k].i];
        const auto& y = v[g[k].j];
        out[k] = {std::gcd(uabs(x.z), uabs(y.z)), uabs(x.y) * uabs(y.y), pair_kernel(x.y, y.y)};
    }
}

} // namespace detail

/// Counts ordered solutions of z1 + z2 + z3 + z4 = 0 in nonzero squareful
/// integers with |z_i| <= B subject to the query filters.
inline u64 count_fast(std::span<const SquarefulDecomp> v, const CountQuery& q, unsigned threads)
{
    return reduce_solution_groups<u64>(
        v, q.B, threads,
        [&](const SolutionGroup& g, u64& acc) {
            thread_local std::vector<detail::PairData> data;
            detail::pair_data(v, g.pairs, data);
            u64 c = 0;
            for (const auto& a : data)
                for (const auto& b : data) c += detail::accept(q, a, b);
            acc += c * g.multiplicity;
        },
        [](u64& t, u64 p) { t += p; });
}

/// M(B, D) for each D in `thresholds` from a single enumeration: primitive
/// solutions with |Y| >= D, thin solutions kept.
inline std::vector<u64> count_M_profile(std::span<const SquarefulDecomp> v, u64 B,
                                        const std::vector<u64>& thresholds, unsigned threads)
{
    using Acc = std::vector<u64>;
    return reduce_solution_groups<Acc>(
        v, B, threads,
        [&](const SolutionGroup& g, Acc& acc) {
            acc.resize(thresholds.size(), 0);
            thread_local std::vector<detail::PairData> data;
            detail::pair_data(v, g.pairs, data);
            for (const auto& a : data)
                for (const auto& b : data) {
                    if (a.g != 1 && b.g != 1 && std::gcd(a.g, b.g) != 1) continue;
                    const u128 Y = u128(a.yy) * b.yy;
                    for (std::size_t k = 0; k < thresholds.size(); ++k)
                        if (Y >= thresholds[k]) acc[k] += g.multiplicity;
                }
        },
        [&](Acc& t, const Acc& p) {
            t.resize(thresholds.size(), 0);
            for (std::size_t k = 0; k < p.size(); ++k) t[k] += p[k];
        });
}

inline nlohmann::ordered_json query_params(const CountQuery& q)
{
    nlohmann::ordered_json p;
    p["B"] = q.B;
    if (q.ymax) p["ymax"] = *q.ymax;
    if (q.ymin) p["ymin"] = *q.ymin;
    p["k"] = 4;
    p["remove_thin"] = q.remove_thin;
    p["primitive"] = q.primitive;
    return p;
}

/// N(B) or N(D, B): primitive solutions, optionally |Y| <= D and thin removed.
inline CountResult count_N(u64 B, std::optional<u64> D, bool remove_thin, unsigned threads = default_threads(),
                           const SquarefulTable* table = nullptr)
{
    require(B >= 1, "count_N: B must be >= 1");
    if (B > max_fast_bound) throw BudgetError("count_N: B above supported bound 1e8");
    detail::Stopwatch sw;
    const SquarefulTable own = table ? SquarefulTable{} : enumerate_squareful(B);
    const auto v = signed_values(table ? *table : own, B);
    CountQuery q;
    q.B = B;
    q.ymax = D;
    q.remove_thin = remove_thin;
    CountResult r;
    r.op = "count";
    r.params = query_params(q);
    r.count = count_fast(v, q, threads);
    r.algorithm = "meet-in-the-middle";
    r.seconds = sw.seconds();
    return r;
}

/// M(B, D): primitive solutions with |Y| >= D, thin solutions kept.
inline CountResult count_M(u64 B, u64 D, unsigned threads = default_threads(),
                           const SquarefulTable* table = nullptr)
{
    require(B >= 1, "count_M: B must be >= 1");
    if (B > max_fast_bound) throw BudgetError("count_M: B above supported bound 1e8");
    detail::Stopwatch sw;
    const SquarefulTable own = table ? SquarefulTable{} : enumerate_squareful(B);
    const auto v = signed_values(table ? *table : own, B);
    CountQuery q;
    q.B = B;
    q.ymin = D;
    CountResult r;
    r.op = "tail";
    r.params = query_params(q);
    r.count = count_fast(v, q, threads);
    r.algorithm = "meet-in-the-middle";
    r.seconds = sw.seconds();
    return r;
}

inline constexpr u64 max_naive_bound_k4 = 100'000;
inline constexpr u64 max_naive_bound_k3 = 10'000'000;

/// Exhaustive count of ordered k-vectors (k = 3, 4) of nonzero squareful
/// integers with |z_i| <= B and zero sum. Squarefulness comes from a direct
/// scan with the factorization-based predicate.
inline CountResult count_Nk_naive(u64 B, int k, bool primitive, bool remove_thin = false,
                                  std::optional<u64> ymax = std::nullopt)
{
    require(k == 3 || k == 4, "count_Nk_naive: k must be 3 or 4");
    require(B >= 1, "count_Nk_naive: B must be >= 1");
    const u64 limit = k == 4 ? max_naive_bound_k4 : max_naive_bound_k3;
    if (B > limit)
        throw PreconditionError("count_Nk_naive: B above oracle scale " + std::to_string(limit) +
                                "; use the meet-in-the-middle count");
    require(k == 4 || (!remove_thin && !ymax), "count_Nk_naive: thin and |Y| filters need k = 4");
    detail::Stopwatch sw;
    std::vector<i64> ypart(B + 1, 0); // 0 marks non-squareful
    std::vector<i64> vals;
    for (u64 n = 1; n <= B; ++n)
        if (is_squareful(static_cast<i64>(n))) {
            ypart[n] = decompose(static_cast<i64>(n)).y;
            vals.push_back(-static_cast<i64>(n));
            vals.push_back(static_cast<i64>(n));
        }
    std::sort(vals.begin(), vals.end());
    const i64 iB = static_cast<i64>(B);
    auto member = [&](i64 z) { return z != 0 && z >= -iB && z <= iB && ypart[uabs(z)] != 0; };
    u64 count = 0;
    if (k == 3) {
        for (i64 a : vals)
            for (i64 b : vals) {
                const i64 c = -(a + b);
                if (!member(c)) continue;
                if (primitive && std::gcd(std::gcd(uabs(a), uabs(b)), uabs(c)) != 1) continue;
                ++count;
            }
    } else {
        for (i64 a : vals)
            for (i64 b : vals)
                for (i64 c : vals) {
                    const i64 d = -(a + b + c);
                    if (!member(d)) continue;
                    if (primitive && std::gcd(std::gcd(uabs(a), uabs(b)), std::gcd(uabs(c), uabs(d))) != 1)
                        continue;
                    if (remove_thin && thin_test({a, b, c, d})) continue;
                    if (ymax) {
                        const u128 Y = u128(uabs(ypart[uabs(a)])) * uabs(ypart[uabs(b)]) *
                                       uabs(ypart[uabs(c)]) * uabs(ypart[uabs(d)]);
                        if (Y > *ymax) continue;
                    }
                    ++count;
                }
    }
    CountResult r;
    r.op = "count";
    r.params["B"] = B;
    if (ymax) r.params["ymax"] = *ymax;
    r.params["k"] = k;
    r.params["remove_thin"] = remove_thin;
    r.params["primitive"] = primitive;
    r.count = count;
    r.algorithm = "naive";
    r.seconds = sw.seconds();
    return r;
}

/// N(X, Y): (x, y) with 0 < |x_i| <= X_i, y_i squarefree, 0 < |y_i| <= Y_i
/// and sum x_i^2 y_i^3 = 0. Half lists {x1,y1} x {x2,y2} against a sorted
/// {x3,y3} x {x4,y4} list.
inline constexpr u64 max_box_steps = 10'000'000'000ull;

inline CountResult count_NXY(const std::array<u64, 4>& X, const std::array<u64, 4>& Y)
{
    detail::Stopwatch sw;
    std::array<std::vector<i128>, 4> lists;
    u64 ysf[4];
    for (int i = 0; i < 4; ++i) {
        require(X[i] >= 1 && Y[i] >= 1, "count_NXY: bounds must be positive");
        require(Y[i] <= 10'000'000 && X[i] <= 10'000'000, "count_NXY: bound out of range");
        const auto sf = squarefree_flags(Y[i]);
        ysf[i] = 0;
        for (u64 y = 1; y <= Y[i]; ++y) ysf[i] += sf[y];
    }
    const long double left = 4.0L * X[0] * ysf[0] * X[1] * ysf[1];
    const long double right = 4.0L * X[2] * ysf[2] * X[3] * ysf[3];
    if (left + right * std::log2(std::max(2.0L, right)) > static_cast<long double>(max_box_steps))
        throw BudgetError("count_NXY: search range exceeds 1e10 steps");
    for (int i = 0; i < 4; ++i) {
        const auto sf = squarefree_flags(Y[i]);
        for (u64 y = 1; y <= Y[i]; ++y) {
            if (!sf[y]) continue;
            const i128 y3 = i128(y) * y * y;
            for (u64 x = 1; x <= X[i]; ++x) {
                const i128 v = y3 * x * x;
                lists[i].push_back(v);  // (x, y), (-x, y)
                lists[i].push_back(v);
                lists[i].push_back(-v); // (x, -y), (-x, -y)
                lists[i].push_back(-v);
            }
        }
    }
    std::vector<i128> right_sums;
    right_sums.reserve(lists[2].size() * lists[3].size());
    for (i128 a : lists[2])
        for (i128 b : lists[3]) right_sums.push_back(a + b);
    std::sort(right_sums.begin(), right_sums.end());
    u64 count = 0;
    for (i128 a : lists[0])
        for (i128 b : lists[1]) {
            const auto [lo, hi] = std::equal_range(right_sums.begin(), right_sums.end(), -(a + b));
            count += static_cast<u64>(hi - lo);
        }
    CountResult r;
    r.op = "boxes";
    r.params["X"] = X;
    r.params["Y"] = Y;
    r.count = count;
    r.algorithm = "half-lists";
    r.seconds = sw.seconds();
    return r;
}

inline constexpr u64 max_quadric_steps = 10'000'000'000ull;

/// Core loop for diagonal quaternary forms: x_i >= 1 with |a_i| x_i^2 <= B,
/// three coordinates enumerated and the fourth solved. `filter(x)` sees each
/// positive solution; the caller scales by sign choices.
template <class Filter>
u64 count_positive_solutions(const Vec4& a, u64 B, Filter&& filter)
{
    std::array<u64, 4> range{};
    for (int i = 0; i < 4; ++i) {
        require(a[i] != 0, "quadric: coefficients must be nonzero");
        range[i] = uabs(a[i]) > B ? 0 : isqrt(B / uabs(a[i]));
    }
    const bool pos = a[0] > 0 && a[1] > 0 && a[2] > 0 && a[3] > 0;
    const bool neg = a[0] < 0 && a[1] < 0 && a[2] < 0 && a[3] < 0;
    if (pos || neg) return 0;
    // solve for the coordinate with the largest range
    int solve = 0;
    for (int i = 1; i < 4; ++i)
        if (range[i] > range[solve]) solve = i;
    std::array<int, 3> loop{};
    for (int i = 0, k = 0; i < 4; ++i)
        if (i != solve) loop[k++] = i;
    const long double steps = static_cast<long double>(range[loop[0]]) * range[loop[1]] * range[loop[2]];
    if (steps > static_cast<long double>(max_quadric_steps))
        throw BudgetError("quadric: more than 1e10 enumeration steps");
    u64 count = 0;
    std::array<u64, 4> x{};
    const i128 as = a[solve];
    for (u64 x0 = 1; x0 <= range[loop[0]]; ++x0) {
        x[loop[0]] = x0;
        const i128 t0 = i128(a[loop[0]]) * x0 * x0;
        for (u64 x1 = 1; x1 <= range[loop[1]]; ++x1) {
            x[loop[1]] = x1;
            const i128 t1 = t0 + i128(a[loop[1]]) * x1 * x1;
            for (u64 x2 = 1; x2 <= range[loop[2]]; ++x2) {
                x[loop[2]] = x2;
                const i128 t = -(t1 + i128(a[loop[2]]) * x2 * x2);
                if (t % as != 0) continue;
                const i128 sq = t / as;
                if (sq <= 0 || sq > i128(range[solve]) * range[solve]) continue;
                const u64 r = isqrt(static_cast<u64>(sq));
                if (i128(r) * r != sq) continue;
                x[solve] = r;
                if (filter(x)) ++count;
            }
        }
    }
    return count;
}

/// N_a(B): x in (Z \ 0)^4 with sum a_i x_i^2 = 0 and |a_i x_i^2| <= B.
inline CountResult count_quadric(const CoeffVector& a, u64 B)
{
    require(B >= 1, "count_quadric: B must be >= 1");
    detail::Stopwatch sw;
    CountResult r;
    r.op = "quadric";
    r.params["a"] = a.a();
    r.params["B"] = B;
    r.count = 16 * count_positive_solutions(a.a(), B, [](const std::array<u64, 4>&) { return true; });
    r.algorithm = "three-loop-solve";
    r.seconds = sw.seconds();
    return r;
}

/// N_y(B): x in (Z \ 0)^4 with sum y_i^3 x_i^2 = 0, gcd(x_i y_i) = 1 and
/// |y_i^3 x_i^2| <= B.
inline CountResult fibre_count(const Vec4& y, u64 B)
{
    require(B >= 1, "fibre_count: B must be >= 1");
    for (i64 v : y) {
        require(v != 0 && uabs(v) <= 2'000'000, "fibre_count: y_i out of range");
        require(is_squarefree(v), "fibre_count: y_i must be squarefree");
    }
    detail::Stopwatch sw;
    Vec4 a{};
    for (int i = 0; i < 4; ++i) a[i] = y[i] * y[i] * y[i];
    const u64 n = count_positive_solutions(a, B, [&](const std::array<u64, 4>& x) {
        u64 g = 0;
        for (int i = 0; i < 4; ++i) g = std::gcd(g, x[i] * uabs(y[i]));
        return g == 1;
    });
    CountResult r;
    r.op = "fibre";
    r.params["y"] = y;
    r.params["B"] = B;
    r.count = 16 * n;
    r.algorithm = "three-loop-solve";
    r.seconds = sw.seconds();
    return r;
}

enum class Orthant { positive, signed_all };

/// N_y(B; s, s0): solutions of sum y_i^3 x_i^2 = 0 with |y_i^3 x_i^2| <= B,
/// s_i | x_i and s0 | x_i, no primitivity. `positive` counts x in N^4,
/// `signed_all` counts x in (Z \ 0)^4.
inline CountResult fibre_count_divisible(const Vec4& y, u64 B, const Vec4& s, i64 s0, Orthant orthant)
{
    for (int i = 0; i < 4; ++i) require(s[i] >= 1, "fibre_count_divisible: s_i must be positive");
    require(s0 >= 1, "fibre_count_divisible: s0 must be positive");
    detail::Stopwatch sw;
    Vec4 a{};
    for (int i = 0; i < 4; ++i) a[i] = y[i] * y[i] * y[i];
    const u64 n = count_positive_solutions(a, B, [&](const std::array<u64, 4>& x) {
        for (int i = 0; i < 4; ++i)
            if (x[i] % static_cast<u64>(s[i]) != 0 || x[i] % static_cast<u64>(s0) != 0) return false;
        return true;
    });
    CountResult r;
    r.op = "fibre-divisible";
    r.params["y"] = y;
    r.params["B"] = B;
    r.params["s"] = s;
    r.params["s0"] = s0;
    r.params["orthant"] = orthant == Orthant::positive ? "positive" : "signed";
    r.count = orthant == Orthant::positive ? n : 16 * n;
    r.algorithm = "three-loop-solve";
    r.seconds = sw.seconds();
    return r;
}

/// Sum of fibre_count(y, B) over squarefree y with |y_i|^3 <= B, Y != square.
inline u64 fibre_sum(u64 B)
{
    const u64 ymax = icbrt(B);
    std::vector<i64> ys;
    const auto sf = squarefree_flags(ymax);
    for (u64 v = 1; v <= ymax; ++v)
        if (sf[v]) {
            ys.push_back(static_cast<i64>(v));
            ys.push_back(-static_cast<i64>(v));
        }
    u64 total = 0;
    for (i64 a : ys)
        for (i64 b : ys)
            for (i64 c : ys)
                for (i64 d : ys) {
                    if (is_square(Int256(a) * b * c * d)) continue;
                    total += fibre_count({a, b, c, d}, B).count;
                }
    return total;
}

/// Base solutions of the sieve: |z_i| <= B, |Y| <= D, Y != square, no
/// primitivity.
inline std::vector<std::array<SquarefulDecomp, 4>> sieve_base_solutions(u64 B, u64 D, unsigned threads)
{
    const auto table = enumerate_squareful(B);
    const auto v = signed_values(table, B);
    CountQuery q;
    q.B = B;
    q.ymax = D;
    q.remove_thin = true;
    q.primitive = false;
    using Acc = std::vector<std::array<SquarefulDecomp, 4>>;
    return reduce_solutions<Acc>(
        v, B, threads,
        [&](const std::array<std::uint32_t, 4>& idx, u64 mult, Acc& acc) {
            std::array<SquarefulDecomp, 4> z{v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
            u128 Y = 1;
            for (const auto& e : z) Y *= uabs(e.y);
            if (Y > D) return;
            if (thin_test({z[0].z, z[1].z, z[2].z, z[3].z})) return;
            acc.push_back(z);
            if (mult == 2) {
                for (auto& e : z) e = {-e.z, -e.y, e.x};
                acc.push_back(z);
            }
        },
        [](Acc& t, Acc& p) { t.insert(t.end(), p.begin(), p.end()); });
}

/// #N(B; r, s, s0): base solutions with r_i | y_i, s_i | x_i, s0 | x_i.
inline CountResult count_script_N(u64 B, u64 D, const Vec4& r, const Vec4& s, i64 s0,
                                  unsigned threads = default_threads())
{
    for (int i = 0; i < 4; ++i) require(r[i] >= 1 && s[i] >= 1, "count_script_N: r, s must be positive");
    require(s0 >= 1, "count_script_N: s0 must be positive");
    detail::Stopwatch sw;
    u64 count = 0;
    for (const auto& z : sieve_base_solutions(B, D, threads)) {
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i)
            ok = uabs(z[i].y) % static_cast<u64>(r[i]) == 0 && z[i].x % static_cast<u64>(s[i]) == 0 &&
                 z[i].x % static_cast<u64>(s0) == 0;
        count += ok;
    }
    CountResult res;
    res.op = "script-N";
    res.params["B"] = B;
    res.params["D"] = D;
    res.params["r"] = r;
    res.params["s"] = s;
    res.params["s0"] = s0;
    res.count = count;
    res.algorithm = "filtered-enumeration";
    res.seconds = sw.seconds();
    return res;
}

struct InclusionExclusion {
    u64 lhs = 0;
    i64 rhs = 0;
    bool equal = false;
    i64 rhs_repaired = 0; // same sum with OmegaVariant::repaired
    std::size_t keys = 0; // distinct (r, s, s0) with nonzero count
};

/// Both sides of N(D, B) = sum omega(r, s, s0) #N(B; r, s, s0). The right
/// side is built by visiting each base solution and crediting every
/// (r, s, s0) with r | y, s | x, s0 | x whose prime support divides
/// gcd(z_1, ..., z_4); omega vanishes on every other triple.
inline InclusionExclusion verify_inclusion_exclusion(u64 B, u64 D, unsigned threads = default_threads())
{
    require(B >= 1 && D >= 1, "verify_inclusion_exclusion: B and D must be positive");
    std::map<OmegaArg, u64> counts;
    for (const auto& z : sieve_base_solutions(B, D, threads)) {
        u64 g = 0;
        for (const auto& e : z) g = std::gcd(g, uabs(e.z));
        std::vector<u64> primes;
        if (g > 1)
            for (const auto& pp : factorize(static_cast<i64>(g)).factors) primes.push_back(pp.p);
        // candidate local patterns: the union of both variants' supports
        std::vector<std::vector<LocalOmegaPattern>> local;
        for (u64 p : primes) {
            std::array<bool, 4> dy{}, dx{};
            for (int i = 0; i < 4; ++i) {
                dy[i] = uabs(z[i].y) % p == 0;
                dx[i] = z[i].x % p == 0;
            }
            local.push_back(local_omega_patterns(dy, dx, OmegaVariant::repaired));
        }
        std::vector<std::size_t> idx(primes.size(), 0);
        for (;;) {
            OmegaArg arg;
            for (std::size_t j = 0; j < primes.size(); ++j) {
                const auto& pat = local[j][idx[j]];
                const i64 p = static_cast<i64>(primes[j]);
                for (int i = 0; i < 4; ++i) {
                    if (pat.r[i]) arg.r[i] *= p;
                    if (pat.s[i]) arg.s[i] *= p;
                }
                if (pat.s0) arg.s0 *= p;
            }
            ++counts[arg];
            std::size_t j = 0;
            while (j < primes.size() && ++idx[j] == local[j].size()) idx[j++] = 0;
            if (j == primes.size()) break;
        }
    }
    InclusionExclusion out;
    for (const auto& [arg, n] : counts) {
        out.rhs += omega(arg, OmegaVariant::as_defined) * static_cast<i64>(n);
        out.rhs_repaired += omega(arg, OmegaVariant::repaired) * static_cast<i64>(n);
    }
    out.keys = counts.size();
    out.lhs = count_N(B, D, true, threads).count;
    out.equal = static_cast<i64>(out.lhs) == out.rhs;
    return out;
}

} // namespace squareful
