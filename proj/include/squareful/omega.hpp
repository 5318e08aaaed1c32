#pragma once

// The multiplicative inclusion-exclusion weight omega(r, s, s0) that sieves
// gcd(z1, ..., z4) = 1 through divisibility of the y- and x-parts.

#include "squareful/arith.hpp"

#include <string>
#include <vector>

namespace squareful {

struct OmegaArg {
    Vec4 r{1, 1, 1, 1};
    Vec4 s{1, 1, 1, 1};
    i64 s0 = 1;

    friend auto operator<=>(const OmegaArg&, const OmegaArg&) = default;
};

/// Patterns with k = nu_p(RS) outside [4, 7] would contradict the definition;
/// they cannot occur for squarefree r, s with gcd(s) = 1, and are counted here
/// if they ever do.
inline std::size_t& omega_range_violations()
{
    static thread_local std::size_t count = 0;
    return count;
}

/// Which weight to use. `as_defined` follows the six rules literally. Under
/// those rules the local sum at p fails to be the indicator of
/// "p !| y_i x_i for some i" when p divides every x_i but only some y_i:
/// the s0 = p term is left uncancelled. `repaired` gives the s0 = p term the
/// weight mu(p) (-1)^{#{i : p | r_i}} for every squarefree r, which restores
/// the indicator for all divisibility patterns and agrees with `as_defined`
/// whenever p !| s0.
enum class OmegaVariant { as_defined, repaired };

inline std::string to_string(OmegaVariant v)
{
    return v == OmegaVariant::as_defined ? "as-defined" : "repaired";
}

inline int omega(const OmegaArg& arg, OmegaVariant variant = OmegaVariant::as_defined)
{
    for (int i = 0; i < 4; ++i) {
        require(arg.r[i] >= 1 && arg.s[i] >= 1, "omega: r and s must be positive");
    }
    require(arg.s0 >= 1, "omega: s0 must be positive");

    const int mu0 = mobius(arg.s0);
    if (mu0 == 0) return 0;
    for (int i = 0; i < 4; ++i) {
        if (!is_squarefree(arg.r[i]) || !is_squarefree(arg.s[i])) return 0;
    }
    u64 gs = 0;
    for (i64 v : arg.s) gs = std::gcd(gs, u64(v));
    if (gs > 1) return 0;
    for (i64 v : arg.s)
        if (std::gcd(u64(v), u64(arg.s0)) != 1) return 0;

    std::vector<u64> primes;
    for (int i = 0; i < 4; ++i) {
        for (const auto& pp : factorize(arg.r[i]).factors) primes.push_back(pp.p);
        for (const auto& pp : factorize(arg.s[i]).factors) primes.push_back(pp.p);
    }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

    int value = mu0;
    for (u64 p : primes) {
        if (variant == OmegaVariant::repaired && arg.s0 % static_cast<i64>(p) == 0) {
            // s is coprime to p here; only r carries p
            for (int i = 0; i < 4; ++i)
                if (arg.r[i] % static_cast<i64>(p) == 0) value = -value;
            continue;
        }
        unsigned k = 0;
        for (int i = 0; i < 4; ++i) {
            const bool in_r = arg.r[i] % static_cast<i64>(p) == 0;
            const bool in_s = arg.s[i] % static_cast<i64>(p) == 0;
            if (!in_r && !in_s) return 0;
            k += unsigned(in_r) + unsigned(in_s);
        }
        if (k < 4 || k > 7) ++omega_range_violations();
        value *= (k % 2 == 1) ? 1 : -1; // (-1)^(k+1)
    }
    return value;
}

/// One prime's contribution to a supported (r, s, s0): which coordinates carry
/// p in r and in s, and whether p divides s0.
struct LocalOmegaPattern {
    std::array<bool, 4> r{};
    std::array<bool, 4> s{};
    bool s0 = false;
    int weight = 1;
};

/// All local patterns at p with nonzero omega, given which y_i and x_i are
/// divisible by p (r_i | y_i, s_i | x_i, s0 | x). Includes the trivial pattern.
inline std::vector<LocalOmegaPattern> local_omega_patterns(const std::array<bool, 4>& p_divides_y,
                                                            const std::array<bool, 4>& p_divides_x,
                                                            OmegaVariant variant = OmegaVariant::as_defined)
{
    std::vector<LocalOmegaPattern> out;
    out.push_back({});
    // s0 = p forces s coprime to p; r is then all-trivial or all-p.
    const bool all_x = p_divides_x[0] && p_divides_x[1] && p_divides_x[2] && p_divides_x[3];
    for (int mask = 1; mask < 256; ++mask) {
        LocalOmegaPattern pat;
        bool ok = true;
        unsigned k = 0;
        for (int i = 0; i < 4; ++i) {
            pat.r[i] = (mask >> i) & 1;
            pat.s[i] = (mask >> (4 + i)) & 1;
            if (pat.r[i] && !p_divides_y[i]) ok = false;
            if (pat.s[i] && !p_divides_x[i]) ok = false;
            if (!pat.r[i] && !pat.s[i]) ok = false;
            k += unsigned(pat.r[i]) + unsigned(pat.s[i]);
        }
        if (!ok) continue;
        if (pat.s[0] && pat.s[1] && pat.s[2] && pat.s[3]) continue;
        pat.weight = (k % 2 == 1) ? 1 : -1;
        out.push_back(pat);
    }
    if (all_x && variant == OmegaVariant::repaired) {
        for (int mask = 0; mask < 16; ++mask) {
            LocalOmegaPattern q;
            q.s0 = true;
            q.weight = -1;
            bool ok = true;
            for (int i = 0; i < 4; ++i) {
                q.r[i] = (mask >> i) & 1;
                if (q.r[i] && !p_divides_y[i]) ok = false;
                if (q.r[i]) q.weight = -q.weight;
            }
            if (ok) out.push_back(q);
        }
    } else if (all_x) {
        const std::size_t base = out.size();
        for (std::size_t i = 0; i < base; ++i) {
            const auto& pat = out[i];
            if (pat.s[0] || pat.s[1] || pat.s[2] || pat.s[3]) continue;
            LocalOmegaPattern q = pat;
            q.s0 = true;
            q.weight = -pat.weight;
            out.push_back(q);
        }
    }
    return out;
}

} // namespace squareful
