#pragma once

// Command-line front end: argument parsing, dispatch, and one JSON object
// (or one CSV header plus row) per run.

#include "squareful/archimedean.hpp"
#include "squareful/constant.hpp"
#include "squareful/counting.hpp"
#include "squareful/errors.hpp"
#include "squareful/expsums.hpp"
#include "squareful/localdens.hpp"
#include "squareful/parallel.hpp"
#include "squareful/squareful.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace squareful {

inline constexpr const char* tool_version = "sqful 1.0.0";

using Json = nlohmann::ordered_json;

/// Parses a nonnegative integer given as digits or as m e k ("1e6", "5e3").
inline u64 parse_count(const std::string& s, const std::string& flag)
{
    auto bad = [&] { return UsageError(flag + ": expected a nonnegative integer, got '" + s + "'"); };
    if (s.empty()) throw bad();
    const auto e = s.find_first_of("eE");
    auto digits = [&](const std::string& t) {
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw bad();
        if (t.size() > 19) throw bad();
        return static_cast<u64>(std::stoull(t));
    };
    if (e == std::string::npos) return digits(s);
    u64 v = digits(s.substr(0, e));
    const u64 k = digits(s.substr(e + 1));
    for (u64 i = 0; i < k; ++i) {
        if (v > std::numeric_limits<u64>::max() / 10) throw bad();
        v *= 10;
    }
    return v;
}

inline Vec4 parse_vec4(const std::string& s, const std::string& flag)
{
    Vec4 v{};
    std::stringstream ss(s);
    std::string item;
    int n = 0;
    while (std::getline(ss, item, ',')) {
        if (n == 4) throw UsageError(flag + ": expected four comma-separated integers");
        try {
            std::size_t pos = 0;
            v[n] = std::stoll(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(flag + ": not an integer: '" + item + "'");
        }
        ++n;
    }
    if (n != 4) throw UsageError(flag + ": expected four comma-separated integers");
    return v;
}

namespace detail {

inline void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out)
{
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    if (j.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) s += ';';
            s += j[i].is_string() ? j[i].get<std::string>() : j[i].dump();
        }
        out.emplace_back(prefix, s);
        return;
    }
    out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

} // namespace detail

inline void emit(const Json& record, const std::string& format, std::ostream& out)
{
    if (format == "csv") {
        std::vector<std::pair<std::string, std::string>> cells;
        detail::flatten(record, "", cells);
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << detail::csv_field(cells[i].first);
        out << "\n";
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << detail::csv_field(cells[i].second);
        out << "\n";
        return;
    }
    out << record.dump() << "\n";
}

inline Json to_json(const SeriesEstimate& e)
{
    Json j;
    j["value"] = e.value;
    j["method"] = to_string(e.method);
    j["cutoff"] = e.cutoff;
    j["tail_bound"] = e.tail_bound;
    j["bad_part"] = e.bad_part;
    j["good_part"] = e.good_part;
    j["odd_part"] = e.odd_part;
    j["discriminant"] = e.discriminant;
    return j;
}

inline Json to_json(const SigmaInfResult& r)
{
    Json j;
    j["signs"] = format_signs(r.eps);
    j["value"] = r.value;
    j["error_estimate"] = r.error_estimate;
    j["method"] = r.method;
    return j;
}

/// N_a(B) predicted by G_a sigma_inf(eps) B / sqrt|A| for nonsquare A.
inline double quadric_prediction(const CoeffVector& a, u64 B, double tol = 1e-9)
{
    require(!is_square(a.A()), "quadric_prediction: A is a perfect square");
    const auto G = singular_series(a, SeriesMethod::l_hybrid, tol);
    const auto s = sigma_infinity(a.eps(), tol);
    const double absA = std::abs(a.A().convert_to<double>());
    return G.value * s.value * static_cast<double>(B) / std::sqrt(absA);
}

struct RunConfig {
    std::string subcommand;
    Json params = Json::object();
    u64 seed = 1;
    std::string format = "json";
    unsigned threads = 1;
    bool timing = false;
    std::string cache;

    /// Serialized into every record. The thread count is left out so output
    /// does not depend on it.
    Json to_json() const
    {
        Json j;
        j["subcommand"] = subcommand;
        for (const auto& [k, v] : params.items()) j[k] = v;
        j["seed"] = seed;
        j["format"] = format;
        if (!cache.empty()) j["cache"] = cache;
        return j;
    }
};

/// Runs one command line (without the program name). Records go to `out`,
/// diagnostics to `err`. Returns the process exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact counts and constants for sums of four squareful numbers", "sqful"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    cfg.threads = default_threads();
    std::string format = "json";
    app.add_option("--threads", cfg.threads, "worker threads (default: $" + std::string(threads_env_var) +
                                                 " or hardware concurrency)")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", cfg.seed, "seed for randomized cross-checks");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--cache", cfg.cache, "squareful table cache file");
    app.add_flag("--timing", cfg.timing, "add wall-clock seconds to each record");

    std::string max_s, ymax_s, ymin_s, x_s, y_s, a_s, c_s, signs_s, rows_path;
    std::string method = "hybrid";
    std::string suite;
    u64 p = 0;
    unsigned level = 0, k = 4;
    double tol = 1e-9;
    bool keep_thin = false, naive = false, monte_carlo = false;
    std::string omega_variant = "as-defined";

    std::vector<std::pair<CLI::App*, std::function<Json()>>> handlers;
    int exit_code = 0;
    auto params = [&]() -> Json& { return cfg.params; };
    auto need = [&](const std::string& v, const std::string& flag) {
        if (v.empty()) throw UsageError(flag + " is required");
        return v;
    };

    {
        auto* sub = app.add_subcommand("squareful", "count squareful numbers up to B, optionally caching the table");
        sub->add_option("--max", max_s, "bound B")->required();
        handlers.emplace_back(sub, [&] {
            const u64 B = parse_count(max_s, "--max");
            params()["B"] = B;
            const auto t = load_or_build_table(B, cfg.cache);
            Json r;
            r["count"] = t.size();
            r["closed_form"] = squareful_count(B);
            ensure(t.size() == squareful_count(B), "squareful: table size differs from the closed form");
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("count", "N(B) or N(D,B): primitive zero-sum quadruples");
        sub->add_option("--max", max_s, "bound B")->required();
        sub->add_option("--ymax", ymax_s, "restrict to |Y| <= D");
        sub->add_flag("--keep-thin", keep_thin, "keep solutions with z1 z2 z3 z4 a square");
        sub->add_option("--k", k, "number of summands")->check(CLI::IsMember({3, 4}));
        sub->add_flag("--naive", naive, "exhaustive enumeration");
        handlers.emplace_back(sub, [&] {
            const u64 B = parse_count(max_s, "--max");
            std::optional<u64> D;
            if (!ymax_s.empty()) D = parse_count(ymax_s, "--ymax");
            CountResult c;
            if (k == 3) {
                if (D || keep_thin) throw UsageError("count: --ymax and --keep-thin need --k 4");
                c = count_Nk_naive(B, 3, true);
            } else if (naive) {
                c = count_Nk_naive(B, 4, true, !keep_thin, D);
            } else {
                const auto t = load_or_build_table(B, cfg.cache);
                c = count_N(B, D, !keep_thin, cfg.threads, &t);
            }
            params()["B"] = B;
            if (D) params()["ymax"] = *D;
            params()["k"] = k;
            params()["remove_thin"] = k == 4 && !keep_thin;
            params()["naive"] = naive || k == 3;
            Json r;
            r["count"] = c.count;
            r["algorithm"] = c.algorithm;
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("tail", "M(B,D): primitive solutions with |Y| >= D, thin kept");
        sub->add_option("--max", max_s, "bound B")->required();
        sub->add_option("--ymin", ymin_s, "lower bound D on |Y|")->required();
        handlers.emplace_back(sub, [&] {
            const u64 B = parse_count(max_s, "--max");
            const u64 D = parse_count(ymin_s, "--ymin");
            params()["B"] = B;
            params()["ymin"] = D;
            const auto t = load_or_build_table(B, cfg.cache);
            Json r;
            r["count"] = count_M(B, D, cfg.threads, &t).count;
            r["algorithm"] = "meet-in-the-middle";
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("boxes", "N(X,Y): solutions of sum x_i^2 y_i^3 = 0 in boxes");
        sub->add_option("--x", x_s, "X1,X2,X3,X4")->required();
        sub->add_option("--y", y_s, "Y1,Y2,Y3,Y4")->required();
        handlers.emplace_back(sub, [&] {
            const Vec4 X = parse_vec4(x_s, "--x"), Y = parse_vec4(y_s, "--y");
            std::array<u64, 4> ux{}, uy{};
            for (int i = 0; i < 4; ++i) {
                if (X[i] < 1 || Y[i] < 1) throw UsageError("boxes: bounds must be positive");
                ux[i] = static_cast<u64>(X[i]);
                uy[i] = static_cast<u64>(Y[i]);
            }
            params()["X"] = X;
            params()["Y"] = Y;
            Json r;
            r["count"] = count_NXY(ux, uy).count;
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("quadric", "N_a(B) for the diagonal quadric sum a_i x_i^2 = 0");
        sub->add_option("--a", a_s, "a1,a2,a3,a4")->required();
        sub->add_option("--max", max_s, "bound B")->required();
        sub->add_option("--tol", tol, "tolerance for the prediction");
        handlers.emplace_back(sub, [&] {
            const CoeffVector a(parse_vec4(a_s, "--a"));
            const u64 B = parse_count(max_s, "--max");
            params()["a"] = a.a();
            params()["B"] = B;
            params()["tol"] = tol;
            Json r;
            r["count"] = count_quadric(a, B).count;
            if (!is_square(a.A())) {
                const double pred = quadric_prediction(a, B, tol);
                r["predicted"] = pred;
                r["ratio"] = static_cast<double>(r["count"].get<u64>()) / pred;
            }
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("series", "singular series sum_q q^-4 S_q(0)");
        sub->add_option("--a", a_s, "a1,a2,a3,a4")->required();
        sub->add_option("--method", method, "euler | hybrid | qsum");
        sub->add_option("--tol", tol, "tolerance");
        handlers.emplace_back(sub, [&] {
            const CoeffVector a(parse_vec4(a_s, "--a"));
            const auto m = parse_series_method(method);
            params()["a"] = a.a();
            params()["method"] = to_string(m);
            params()["tol"] = tol;
            return to_json(singular_series(a, m, tol));
        });
    }
    {
        auto* sub = app.add_subcommand("density", "local density sigma_p(y), or M_N(y,p) at one level");
        sub->add_option("--y", y_s, "y1,y2,y3,y4 (squarefree)")->required();
        sub->add_option("--p", p, "prime")->required();
        sub->add_option("--level", level, "level N: report M_N(y,p) and M_N / p^{3N}");
        handlers.emplace_back(sub, [&] {
            const Vec4 y = parse_vec4(y_s, "--y");
            params()["y"] = y;
            params()["p"] = p;
            Json r;
            if (level > 0) {
                params()["level"] = level;
                const BigInt M = M_count(y, p, level);
                const Rational v = Rational(M) / Rational(big_pow(static_cast<i64>(p), 3 * level));
                r["M"] = to_string(M);
                r["normalized"] = to_string(v);
                r["normalized_value"] = to_double(v);
                return r;
            }
            const auto d = local_density(y, p);
            r["value"] = to_string(d.value);
            r["value_decimal"] = to_double(d.value);
            r["N_stable"] = d.N_stable;
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("sigma-inf", "singular integral sigma_inf(eps)");
        sub->add_option("--signs", signs_s, "four characters from +/-, e.g. +++-")->required();
        sub->add_option("--tol", tol, "quadrature tolerance");
        sub->add_flag("--monte-carlo", monte_carlo, "add the Monte Carlo cross-check");
        handlers.emplace_back(sub, [&] {
            const Signs e = parse_signs(signs_s);
            params()["signs"] = format_signs(e);
            params()["tol"] = tol;
            Json r = to_json(sigma_infinity(e, tol));
            if (monte_carlo) {
                params()["monte_carlo"] = true;
                MonteCarloOptions opt;
                opt.seed = cfg.seed;
                const auto mc = sigma_infinity_monte_carlo(e, opt, cfg.threads);
                r["monte_carlo"] = to_json(mc);
                r["agree"] = std::abs(mc.value - r["value"].get<double>()) <=
                             mc.error_estimate + r["error_estimate"].get<double>();
            }
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("constant", "leading constant c(D)");
        sub->add_option("--ymax", ymax_s, "cutoff D on |Y|")->required();
        sub->add_option("--tol", tol, "tolerance");
        handlers.emplace_back(sub, [&] {
            const u64 D = parse_count(ymax_s, "--ymax");
            params()["ymax"] = D;
            params()["tol"] = tol;
            const auto c = leading_constant(D, tol, cfg.threads);
            Json r;
            r["value"] = c.value;
            r["error_estimate"] = c.error_estimate;
            r["per_eps"] = c.per_eps;
            r["last_shell_mass"] = c.last_shell_mass;
            r["vectors"] = c.vectors;
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("compare", "N(B) against c(D) B");
        sub->add_option("--max", max_s, "bound B")->required();
        sub->add_option("--ymax", ymax_s, "cutoff D on |Y|")->required();
        sub->add_option("--tol", tol, "tolerance for c(D)");
        sub->add_option("--rows", rows_path, "append a CSV row to this file");
        handlers.emplace_back(sub, [&] {
            const u64 B = parse_count(max_s, "--max");
            const u64 D = parse_count(ymax_s, "--ymax");
            params()["B"] = B;
            params()["ymax"] = D;
            params()["tol"] = tol;
            std::optional<std::string> rows;
            if (!rows_path.empty()) rows = rows_path;
            const auto c = compare_empirical(B, D, tol, cfg.threads, rows);
            Json r;
            r["observed"] = c.observed;
            r["observed_ymax"] = c.observed_ymax;
            r["constant"] = c.constant;
            r["predicted"] = c.predicted;
            r["ratio"] = c.ratio;
            return r;
        });
    }
    {
        auto* sub = app.add_subcommand("verify", "identity checks");
        sub->add_option("--suite", suite, "inclusion-exclusion | multiplicativity | lemma56 | fibre")
            ->required()
            ->check(CLI::IsMember({"inclusion-exclusion", "multiplicativity", "lemma56", "fibre"}));
        sub->add_option("--max", max_s, "bound B (or q for multiplicativity)");
        sub->add_option("--ymax", ymax_s, "cutoff D on |Y|");
        sub->add_option("--a", a_s, "coefficients for multiplicativity (default 1,1,1,-1)");
        sub->add_option("--c", c_s, "frequency vector for multiplicativity (default 0)");
        sub->add_option("--tol", tol, "tolerance (lemma56 threshold is 1e-3)");
        handlers.emplace_back(sub, [&] {
            params()["suite"] = suite;
            Json r;
            bool pass = false;
            if (suite == "inclusion-exclusion") {
                const u64 B = parse_count(need(max_s, "--max"), "--max");
                const u64 D = parse_count(need(ymax_s, "--ymax"), "--ymax");
                params()["B"] = B;
                params()["ymax"] = D;
                const auto ie = verify_inclusion_exclusion(B, D, cfg.threads);
                r["lhs"] = ie.lhs;
                r["rhs"] = ie.rhs;
                r["equal"] = ie.equal;
                r["rhs_omega_repaired"] = ie.rhs_repaired;
                r["keys"] = ie.keys;
                pass = ie.equal;
            } else if (suite == "multiplicativity") {
                const u64 Q = parse_count(need(max_s, "--max"), "--max");
                const CoeffVector a(a_s.empty() ? Vec4{1, 1, 1, -1} : parse_vec4(a_s, "--a"));
                const Vec4 c = c_s.empty() ? Vec4{0, 0, 0, 0} : parse_vec4(c_s, "--c");
                params()["q_max"] = Q;
                params()["a"] = a.a();
                params()["c"] = c;
                double worst = 0;
                u64 pairs = 0;
                for (u64 q1 = 1; q1 <= Q; ++q1)
                    for (u64 q2 = 1; q2 <= Q; ++q2) {
                        if (std::gcd(q1, q2) != 1) continue;
                        worst = std::max(worst, check_multiplicativity(a, c, q1, q2).rel_error);
                        ++pairs;
                    }
                r["pairs"] = pairs;
                r["max_rel_error"] = worst;
                pass = worst <= 1e-8;
            } else if (suite == "lemma56") {
                const u64 D = parse_count(need(ymax_s, "--ymax"), "--ymax");
                params()["ymax"] = D;
                const auto l = check_density_lemma(D, 1e-3, tol, cfg.threads);
                r["vectors"] = l.vectors;
                r["failures"] = l.failures;
                r["max_diff"] = l.max_diff;
                r["worst_y"] = l.worst;
                r["max_diff_omega_repaired"] = l.max_diff_repaired;
                pass = l.failures == 0;
            } else {
                const u64 B = parse_count(need(max_s, "--max"), "--max");
                params()["B"] = B;
                const u64 lhs = 16 * count_N(B, std::nullopt, true, cfg.threads).count;
                const u64 rhs = fibre_sum(B);
                r["lhs"] = lhs;
                r["rhs"] = rhs;
                r["equal"] = lhs == rhs;
                pass = lhs == rhs;
            }
            r["pass"] = pass;
            if (!pass) exit_code = static_cast<int>(ExitCode::consistency);
            return r;
        });
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::usage);
    }
    cfg.format = format;

    try {
        for (auto& [sub, fn] : handlers) {
            if (!sub->parsed()) continue;
            cfg.subcommand = sub->get_name();
            detail::Stopwatch sw;
            Json result = fn();
            Json record;
            record["op"] = cfg.subcommand;
            record["version"] = tool_version;
            record["config"] = cfg.to_json();
            for (auto& [key, v] : result.items()) record[key] = v;
            if (cfg.timing) record["seconds"] = sw.seconds();
            emit(record, cfg.format, out);
            return exit_code;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::consistency);
    }
    return static_cast<int>(ExitCode::usage);
}

} // namespace squareful
