#pragma once

// Squareful integers z = y^3 x^2 (y squarefree), complete enumeration up to a
// bound, the thin-set product test, and a binary cache for tables.

#include "squareful/arith.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

namespace squareful {

/// z = y^3 * x^2 with y squarefree (sign of y = sign of z) and x >= 1.
struct SquarefulDecomp {
    i64 z = 1;
    i64 y = 1;
    u64 x = 1;
    friend bool operator==(const SquarefulDecomp&, const SquarefulDecomp&) = default;
};

inline SquarefulDecomp decompose(i64 z)
{
    require(z != 0, "decompose: z must be nonzero");
    const auto f = factorize(z);
    SquarefulDecomp d{z, f.sign, 1};
    for (const auto& [p, e] : f.factors) {
        require(e >= 2, "decompose: " + std::to_string(z) + " is not squareful");
        if (e % 2) {
            d.y *= static_cast<i64>(p);
            for (unsigned k = 0; k < (e - 3) / 2; ++k) d.x *= p;
        } else {
            for (unsigned k = 0; k < e / 2; ++k) d.x *= p;
        }
    }
    return d;
}

inline constexpr u64 max_table_bound = 1'000'000'000'000ull;

/// Every squareful z in [1, B], ascending. Negative values are the mirror
/// image and are not stored.
struct SquarefulTable {
    u64 B = 0;
    std::vector<SquarefulDecomp> entries;

    std::size_t size() const { return entries.size(); }
};

/// Sieve flags: squarefree[n] for 0 < n <= limit.
inline std::vector<bool> squarefree_flags(u64 limit)
{
    std::vector<bool> ok(limit + 1, true);
    ok[0] = false;
    for (u64 d = 2; d * d <= limit; ++d)
        for (u64 m = d * d; m <= limit; m += d * d) ok[m] = false;
    return ok;
}

inline u64 icbrt(u64 n)
{
    u64 r = static_cast<u64>(std::cbrt(static_cast<long double>(n)));
    while (r > 0 && r * r * r > n) --r;
    while ((r + 1) * (r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// Closed-form size: sum over squarefree y with y^3 <= B of floor(sqrt(B / y^3)).
inline u64 squareful_count(u64 B)
{
    const u64 ymax = icbrt(B);
    const auto sf = squarefree_flags(ymax);
    u64 count = 0;
    for (u64 y = 1; y <= ymax; ++y)
        if (sf[y]) count += isqrt(B / (y * y * y));
    return count;
}

inline SquarefulTable enumerate_squareful(u64 B)
{
    require(B >= 1, "enumerate_squareful: B must be >= 1");
    if (B > max_table_bound)
        throw BudgetError("enumerate_squareful: B above supported bound 1e12");
    SquarefulTable t;
    t.B = B;
    const u64 ymax = icbrt(B);
    const auto sf = squarefree_flags(ymax);
    for (u64 y = 1; y <= ymax; ++y) {
        if (!sf[y]) continue;
        const u64 y3 = y * y * y;
        const u64 xmax = isqrt(B / y3);
        for (u64 x = 1; x <= xmax; ++x)
            t.entries.push_back({static_cast<i64>(y3 * x * x), static_cast<i64>(y), x});
    }
    std::sort(t.entries.begin(), t.entries.end(),
              [](const SquarefulDecomp& l, const SquarefulDecomp& r) { return l.z < r.z; });
    return t;
}

/// True iff z1 z2 z3 z4 is a perfect square (so in particular positive).
inline bool thin_test(const Vec4& z)
{
    Int256 prod = 1;
    for (i64 v : z) {
        require(v != 0, "thin_test: coordinates must be nonzero");
        prod *= v;
    }
    return is_square(prod);
}

// Binary cache layout (little endian):
//   bytes 0..3   magic "SQFT"
//   bytes 4..7   format version (uint32) = 1
//   bytes 8..15  bound B (uint64)
//   then one 24-byte record per entry: z (int64), y (int64), x (uint64).
inline constexpr char cache_magic[4] = {'S', 'Q', 'F', 'T'};
inline constexpr std::uint32_t cache_version = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T v)
{
    unsigned char buf[sizeof(T)];
    auto u = static_cast<std::make_unsigned_t<T>>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is)
{
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw PreconditionError("cache: truncated file");
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
    return static_cast<T>(u);
}

} // namespace detail

inline void write_table(const SquarefulTable& t, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    require(bool(os), "cache: cannot open " + path + " for writing");
    os.write(cache_magic, 4);
    detail::put_le<std::uint32_t>(os, cache_version);
    detail::put_le<u64>(os, t.B);
    for (const auto& e : t.entries) {
        detail::put_le<i64>(os, e.z);
        detail::put_le<i64>(os, e.y);
        detail::put_le<u64>(os, e.x);
    }
}

inline SquarefulTable read_table(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    require(bool(is), "cache: cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, cache_magic, 4) != 0)
        throw PreconditionError("cache: bad magic in " + path);
    const auto version = detail::get_le<std::uint32_t>(is);
    require(version == cache_version, "cache: unsupported version " + std::to_string(version));
    SquarefulTable t;
    t.B = detail::get_le<u64>(is);
    const u64 expected = squareful_count(t.B);
    t.entries.reserve(expected);
    for (u64 i = 0; i < expected; ++i) {
        SquarefulDecomp d;
        d.z = detail::get_le<i64>(is);
        d.y = detail::get_le<i64>(is);
        d.x = detail::get_le<u64>(is);
        t.entries.push_back(d);
    }
    return t;
}

/// Loads the table from `path` when it exists and covers B (truncating a
/// larger one), otherwise builds it and writes the cache. An empty path
/// disables caching.
inline SquarefulTable load_or_build_table(u64 B, const std::string& path)
{
    if (path.empty()) return enumerate_squareful(B);
    if (std::ifstream probe(path, std::ios::binary); probe) {
        auto t = read_table(path);
        if (t.B >= B) {
            while (!t.entries.empty() && static_cast<u64>(t.entries.back().z) > B) t.entries.pop_back();
            t.B = B;
            return t;
        }
    }
    auto t = enumerate_squareful(B);
    write_table(t, path);
    return t;
}

} // namespace squareful
