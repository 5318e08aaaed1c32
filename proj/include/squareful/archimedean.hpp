#pragma once

// The real density of sum eps_i x_i^2 = 0 on [-1, 1]^4:
//   sigma_inf(eps) = lim_{delta -> 0} (2 delta)^{-1} vol{x : |G(x)| <= delta}.
// With P the sum over the positive coordinates and N over the negative ones,
// the density is int_0^inf f_P(t) f_N(t) dt where f_k is the density of
// x_1^2 + ... + x_k^2 for x uniform (volume measure) on [-1, 1]^k.

#include "squareful/arith.hpp"
#include "squareful/parallel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace squareful {

using Signs = std::array<int, 4>;

struct SigmaInfResult {
    Signs eps{1, 1, 1, 1};
    double value = 0;
    double error_estimate = 0;
    std::string method; // reduction-quadrature | monte-carlo-extrapolation | definite
};

inline Signs parse_signs(const std::string& s)
{
    if (s.size() != 4) throw UsageError("signs must have four characters from +/-: " + s);
    Signs e{};
    for (int i = 0; i < 4; ++i) {
        if (s[i] == '+') e[i] = 1;
        else if (s[i] == '-') e[i] = -1;
        else throw UsageError("signs must have four characters from +/-: " + s);
    }
    return e;
}

inline std::string format_signs(const Signs& e)
{
    std::string s;
    for (int v : e) s += v > 0 ? '+' : '-';
    return s;
}

inline int positive_count(const Signs& e)
{
    int k = 0;
    for (int v : e) {
        require(v == 1 || v == -1, "signs must be +1 or -1");
        k += v > 0;
    }
    return k;
}

namespace detail {

// f_k(t), k = 1, 2, 3, on the ranges where it is needed below.
inline double square_sum_density(int k, double t)
{
    const double pi = boost::math::constants::pi<double>();
    switch (k) {
    case 1: return t > 0 && t <= 1 ? 1.0 / std::sqrt(t) : 0.0;
    case 2:
        if (t < 0 || t > 2) return 0.0;
        return t <= 1 ? pi : pi - 4.0 * std::acos(1.0 / std::sqrt(t));
    case 3: return t >= 0 && t <= 1 ? 2.0 * pi * std::sqrt(t) : 0.0;
    }
    throw PreconditionError("square_sum_density: k must be 1, 2 or 3");
}

} // namespace detail

/// Density by one-dimensional quadrature of f_P f_N. For the (3, 1) class
/// only t <= 1 contributes; for (2, 2) the range is [0, 2].
inline SigmaInfResult sigma_infinity(const Signs& eps, double tol = 1e-10)
{
    require(tol > 0, "sigma_infinity: tol must be positive");
    SigmaInfResult r;
    r.eps = eps;
    const int k = positive_count(eps);
    if (k == 0 || k == 4) {
        r.method = "definite";
        return r;
    }
    r.method = "reduction-quadrature";
    boost::math::quadrature::tanh_sinh<double> integrator;
    const int m = k == 2 ? 2 : 3;
    const int n = 4 - m;
    auto f = [&](double t) { return detail::square_sum_density(m, t) * detail::square_sum_density(n, t); };
    double err = 0, total = 0;
    const double lo = integrator.integrate(f, 0.0, 1.0, tol, &err);
    total += err;
    double hi = 0;
    if (m == 2) {
        hi = integrator.integrate(f, 1.0, 2.0, tol, &err);
        total += err;
    }
    r.value = lo + hi;
    r.error_estimate = total;
    return r;
}

struct MonteCarloOptions {
    u64 seed = 1;
    std::size_t batches = 32;
    std::size_t samples_per_batch = std::size_t(1) << 20;
    double delta0 = 0.08;
    unsigned levels = 3; // delta0, delta0 / 2, delta0 / 4
};

namespace detail {

inline u64 splitmix64(u64 x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Romberg table on window estimates at halving deltas. The window average
// of the density has a |g| kink at 0, so the expansion runs over delta^1,
// delta^2, ...
inline double richardson(std::vector<double> v)
{
    double factor = 2;
    for (std::size_t level = 1; level < v.size(); ++level, factor *= 2)
        for (std::size_t i = v.size() - 1; i >= level; --i) v[i] = (factor * v[i] - v[i - 1]) / (factor - 1);
    return v.back();
}

} // namespace detail

/// Volume estimates at delta0 / 2^j from uniform samples, extrapolated to
/// delta -> 0. Each batch has its own generator seeded from (seed, batch), so
/// the result does not depend on the thread count. The error estimate is
/// three standard errors across batches plus the size of the last Richardson
/// correction.
inline SigmaInfResult sigma_infinity_monte_carlo(const Signs& eps, const MonteCarloOptions& opt = {},
                                                 unsigned threads = default_threads())
{
    require(opt.batches >= 2 && opt.samples_per_batch >= 1 && opt.levels >= 1 && opt.delta0 > 0,
            "sigma_infinity_monte_carlo: bad options");
    SigmaInfResult r;
    r.eps = eps;
    const int k = positive_count(eps);
    if (k == 0 || k == 4) {
        r.method = "definite";
        return r;
    }
    r.method = "monte-carlo-extrapolation";
    struct Batch {
        double extrapolated = 0;
        std::vector<double> window;
    };
    auto batches = parallel_map(opt.batches, threads, [&](std::size_t b) {
        std::mt19937_64 gen(detail::splitmix64(opt.seed * 0x100000001B3ull + b));
        auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
        std::vector<u64> hits(opt.levels, 0);
        for (std::size_t i = 0; i < opt.samples_per_batch; ++i) {
            double g = 0;
            for (int c = 0; c < 4; ++c) {
                const double x = uniform();
                g += eps[c] * x * x;
            }
            g = std::abs(g);
            double d = opt.delta0;
            for (unsigned j = 0; j < opt.levels && g <= d; ++j, d /= 2) ++hits[j];
        }
        Batch out;
        double d = opt.delta0;
        for (unsigned j = 0; j < opt.levels; ++j, d /= 2)
            out.window.push_back(16.0 * static_cast<double>(hits[j]) /
                                 static_cast<double>(opt.samples_per_batch) / (2 * d));
        out.extrapolated = detail::richardson(out.window);
        return out;
    });
    const double nb = static_cast<double>(opt.batches);
    double mean = 0;
    std::vector<double> window(opt.levels, 0);
    for (const auto& b : batches) {
        mean += b.extrapolated / nb;
        for (unsigned j = 0; j < opt.levels; ++j) window[j] += b.window[j] / nb;
    }
    double var = 0;
    for (const auto& b : batches) var += (b.extrapolated - mean) * (b.extrapolated - mean);
    var /= nb - 1;
    const double stderr_mean = std::sqrt(var / nb);
    std::vector<double> lower(window.begin(), window.end() - 1);
    const double correction = opt.levels >= 2 ? std::abs(mean - detail::richardson(lower)) : 0.0;
    r.value = mean;
    r.error_estimate = 3 * stderr_mean + correction;
    return r;
}

} // namespace squareful
