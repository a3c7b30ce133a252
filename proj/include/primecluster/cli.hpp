#pragma once

#include <chrono>
#include <complex>
#include <cstdint>
#include <ctime>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "primecluster/admissible.hpp"
#include "primecluster/arith.hpp"
#include "primecluster/characters.hpp"
#include "primecluster/clusters.hpp"
#include "primecluster/errors.hpp"
#include "primecluster/jsonout.hpp"
#include "primecluster/sieve.hpp"

namespace pcl::cli {

using std::uint64_t;

struct RunResult {
    int exit_code = 0; // 0 ok, 2 domain error / bad usage, 3 budget refusal
    std::string out;
    std::string err;
};

namespace detail {

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<uint64_t> parse_u64_list(const std::string& s) {
    std::vector<uint64_t> out;
    if (s.empty()) return out;
    for (const auto& f : split(s, ','))
        out.push_back(std::stoull(f));
    return out;
}

// Collects echoed parameters and deviations, then renders the envelope.
class Envelope {
public:
    Envelope(std::string command, bool timestamp)
        : command_(std::move(command)), timestamp_(timestamp) {}

    template <typename T>
    void param(const std::string& k, const T& v) {
        JsonWriter w;
        w.value(v);
        params_.emplace_back(k, w.str());
    }

    // Pre-rendered JSON token (array/object parameters).
    void param_raw(const std::string& k, const std::string& token) {
        params_.emplace_back(k, token);
    }

    void deviation(const std::string& note) { deviations_.push_back(note); }

    std::string render(const std::function<void(JsonWriter&)>& fill_results) const {
        JsonWriter w;
        w.begin_object();
        w.key("command").value(command_);
        w.key("parameters").begin_object();
        for (const auto& [k, v] : params_) {
            w.key(k);
            w.raw_token(v);
        }
        w.end_object();
        w.key("results").begin_object();
        fill_results(w);
        w.end_object();
        w.key("deviations").begin_array();
        for (const auto& d : deviations_) w.value(d);
        w.end_array();
        if (timestamp_) w.key("timestamp").value(utc_timestamp());
        w.end_object();
        return w.str();
    }

private:
    std::string command_;
    bool timestamp_;
    std::vector<std::pair<std::string, std::string>> params_;
    std::vector<std::string> deviations_;
};

inline std::string fmt(double v) { return JsonWriter::number(v); }
inline std::string fmt(uint64_t v) { return std::to_string(v); }

} // namespace detail

inline RunResult run(const std::vector<std::string>& args) {
    RunResult result;
    CLI::App app{"primecluster: multiplicative functions, prime counting in progressions, "
                 "Dirichlet characters, admissible tuples and consecutive-prime cluster scans"};
    app.require_subcommand(1);

    // Options common to every subcommand.
    struct Common {
        std::string format = "json";
        bool no_timestamp = false;
        unsigned threads = 1;
        uint64_t segment_size = uint64_t(1) << 20;
        std::string prime_cache;
    } common;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", common.format, "output format: json or csv")
            ->check(CLI::IsMember({"json", "csv", "line"}));
        sub->add_flag("--no-timestamp", common.no_timestamp, "omit the timestamp field");
        sub->add_option("--threads", common.threads, "worker threads (0 = hardware)");
        sub->add_option("--segment-size", common.segment_size, "sieve segment length");
        sub->add_option("--prime-cache", common.prime_cache,
                        "optional base-prime cache file (absence never changes results)");
    };

    // One argument holder per subcommand.
    struct {
        uint64_t n = 1;
    } a_factor, a_phi, a_mu;
    struct {
        uint64_t x = 0;
        uint64_t q = 0;
        std::int64_t a = 0;
        bool has_q = false;
    } a_pi;
    struct {
        uint64_t x = 0;
        uint64_t q = 0;
        std::int64_t a = 0;
        bool has_q = false;
        bool theta = false;
    } a_psi;
    struct {
        double x = 2.0;
    } a_li;
    struct {
        uint64_t lo = 0, hi = 0;
        bool count_only = false;
    } a_sieve;
    struct {
        uint64_t x = 0;
        double z = 2.0;
    } a_rough;
    struct {
        uint64_t q = 1;
        std::int64_t index = -1;
    } a_char, a_conductor, a_induce, a_decompose;
    struct {
        uint64_t q = 1;
        uint64_t index = 0;
        uint64_t u = 2;
        bool prime_variant = false;
    } a_psichi;
    struct {
        uint64_t q = 2;
        uint64_t u = 2;
        std::int64_t w = -1;
        bool has_w = false;
    } a_ortho;
    struct {
        uint64_t q = 1, a = 1;
        std::string b;
    } a_admissible;
    struct {
        uint64_t n = 0, k = 0;
    } a_omega;
    struct {
        uint64_t k = 0;
        double eta = 0.0;
        double y = 0.0;
        uint64_t q = 1, a = 1;
        uint64_t m = 0;
        double c6 = 1.0;
        double c_tilde = 1.0;
        bool has_k = false, has_eta = false;
    } a_tuple;
    struct {
        uint64_t a = 1;
        std::string b;
        double x = 0.0;
        double eta = 0.0;
    } a_delta;
    struct {
        uint64_t x = 4;
        double y = 1.0;
        unsigned m = 1;
        uint64_t q = 1, a = 1;
        double c = 1.0;
        bool has_c = false;
    } a_scan;
    struct {
        uint64_t x = 4;
        double y = 1.0;
        unsigned m = 1;
        uint64_t q = 1;
        double c = 1.0;
    } a_bound;
    struct {
        std::vector<std::string> points;
    } a_calibrate;
    struct {
        uint64_t x = 2;
        uint64_t q_max = 1;
        uint64_t b = 1;
        std::string mode = "psi";
        bool per_q = false;
    } a_bv;
    struct {
        std::vector<double> ts;
        std::string grid;
    } a_prep;

    CLI::App* c_factor = app.add_subcommand("factor", "standard form of n");
    c_factor->add_option("n", a_factor.n, "positive integer")->required();
    CLI::App* c_phi = app.add_subcommand("phi", "Euler totient of n");
    c_phi->add_option("n", a_phi.n, "positive integer")->required();
    CLI::App* c_mu = app.add_subcommand("mu", "Moebius function of n");
    c_mu->add_option("n", a_mu.n, "positive integer")->required();
    CLI::App* c_sieve = app.add_subcommand("sieve", "primes in [lo, hi)");
    c_sieve->add_option("--lo", a_sieve.lo, "lower bound (inclusive)")->required();
    c_sieve->add_option("--hi", a_sieve.hi, "upper bound (exclusive)")->required();
    c_sieve->add_flag("--count-only", a_sieve.count_only, "emit only the count");
    CLI::App* c_pi = app.add_subcommand("pi", "prime counting; --q/--a restricts to a progression");
    c_pi->add_option("x", a_pi.x, "bound")->required();
    c_pi->add_option("--q", a_pi.q, "modulus");
    c_pi->add_option("--a", a_pi.a, "residue");
    CLI::App* c_psi = app.add_subcommand("psi", "Chebyshev psi (or theta); --q/--a restricts");
    c_psi->add_option("x", a_psi.x, "bound")->required();
    c_psi->add_option("--q", a_psi.q, "modulus");
    c_psi->add_option("--a", a_psi.a, "residue");
    c_psi->add_flag("--theta", a_psi.theta, "sum ln p over primes only");
    CLI::App* c_li = app.add_subcommand("li", "logarithmic integral from 2");
    c_li->add_option("x", a_li.x, "bound, >= 2")->required();
    CLI::App* c_rough = app.add_subcommand("rough", "Phi(x, z): count of z-rough n <= x");
    c_rough->add_option("--x", a_rough.x, "bound")->required();
    c_rough->add_option("--z", a_rough.z, "roughness threshold, >= 2")->required();
    CLI::App* c_char = app.add_subcommand("char", "character group mod q (table or one character)");
    c_char->add_option("--q", a_char.q, "modulus")->required();
    c_char->add_option("--index", a_char.index, "character index (omit for the whole group)");
    CLI::App* c_conductor = app.add_subcommand("conductor", "conductor of a character");
    c_conductor->add_option("--q", a_conductor.q, "modulus")->required();
    c_conductor->add_option("--index", a_conductor.index, "character index")->required();
    CLI::App* c_induce = app.add_subcommand("induce", "primitive character inducing chi");
    c_induce->add_option("--q", a_induce.q, "modulus")->required();
    c_induce->add_option("--index", a_induce.index, "character index")->required();
    CLI::App* c_decompose =
        app.add_subcommand("decompose", "prime-power factorization of a character");
    c_decompose->add_option("--q", a_decompose.q, "modulus")->required();
    c_decompose->add_option("--index", a_decompose.index, "character index")->required();
    CLI::App* c_psichi = app.add_subcommand("psi-chi", "psi(u, chi) character sum");
    c_psichi->add_option("--q", a_psichi.q, "modulus")->required();
    c_psichi->add_option("--index", a_psichi.index, "character index")->required();
    c_psichi->add_option("--u", a_psichi.u, "bound")->required();
    c_psichi->add_flag("--prime", a_psichi.prime_variant,
                       "psi'(u, chi): subtract u for the principal character");
    CLI::App* c_ortho = app.add_subcommand(
        "ortho-check", "orthogonality reconstruction of psi(u; Q, W) vs the direct sum");
    c_ortho->add_option("--q", a_ortho.q, "modulus Q >= 2")->required();
    c_ortho->add_option("--u", a_ortho.u, "bound")->required();
    c_ortho->add_option("--w", a_ortho.w, "residue (omit to take the max over W)");
    CLI::App* c_admissible =
        app.add_subcommand("admissible", "admissibility of {q n + a + q b_i}");
    c_admissible->add_option("--q", a_admissible.q, "coefficient q")->required();
    c_admissible->add_option("--a", a_admissible.a, "shift a, coprime to q")->required();
    c_admissible->add_option("--b", a_admissible.b, "comma-separated ascending offsets")
        ->required();
    CLI::App* c_omega = app.add_subcommand("omega", "n <= N coprime to every prime <= k");
    c_omega->add_option("--n", a_omega.n, "bound N")->required();
    c_omega->add_option("--k", a_omega.k, "prime threshold k")->required();
    CLI::App* c_tuple =
        app.add_subcommand("tuple", "smallest admissible offsets from the rough set");
    c_tuple->add_option("--k", a_tuple.k, "tuple size (overrides --m/--c-tilde)");
    c_tuple->add_option("--eta", a_tuple.eta, "fraction eta (overrides --c6)");
    c_tuple->add_option("--y", a_tuple.y, "gap budget y")->required();
    c_tuple->add_option("--q", a_tuple.q, "modulus q")->required();
    c_tuple->add_option("--a", a_tuple.a, "residue a, coprime to q")->required();
    c_tuple->add_option("--m", a_tuple.m, "run length for the k recipe");
    c_tuple->add_option("--c6", a_tuple.c6, "eta recipe constant (default 1.0)");
    c_tuple->add_option("--c-tilde", a_tuple.c_tilde, "k recipe constant (default 1.0)");
    CLI::App* c_delta = app.add_subcommand("delta-sum", "sum of Delta_L/phi(Delta_L)");
    c_delta->add_option("--a", a_delta.a, "linear coefficient a")->required();
    c_delta->add_option("--b", a_delta.b, "comma-separated offsets b_i")->required();
    c_delta->add_option("--x", a_delta.x, "scale x (range is eta ln x)")->required();
    c_delta->add_option("--eta", a_delta.eta, "eta in [(ln x)^{-9/10}, 1]")->required();
    CLI::App* c_scan = app.add_subcommand("scan", "count congruent consecutive-prime runs");
    c_scan->add_option("--x", a_scan.x, "scan (x/2, x]")->required();
    c_scan->add_option("--y", a_scan.y, "gap budget")->required();
    c_scan->add_option("--m", a_scan.m, "runs of m+1 primes")->required();
    c_scan->add_option("--q", a_scan.q, "modulus")->required();
    c_scan->add_option("--a", a_scan.a, "residue")->required();
    c_scan->add_option("--C", a_scan.c, "attach the bound at this C");
    CLI::App* c_bound = app.add_subcommand("bound", "pi(x) (y/(2q ln x))^{exp(C m)}");
    c_bound->add_option("--x", a_bound.x, "bound x")->required();
    c_bound->add_option("--y", a_bound.y, "gap budget y")->required();
    c_bound->add_option("--m", a_bound.m, "run length m")->required();
    c_bound->add_option("--q", a_bound.q, "modulus q")->required();
    c_bound->add_option("--C", a_bound.c, "exponent constant C (default 1.0)");
    CLI::App* c_calibrate =
        app.add_subcommand("calibrate", "smallest C with bound <= count on a grid");
    c_calibrate
        ->add_option("--point", a_calibrate.points,
                     "grid point \"x,y,m,q,a\" (repeatable)")
        ->required();
    CLI::App* c_bv = app.add_subcommand(
        "bv", "aggregated worst-residue error of prime counts in progressions");
    c_bv->add_option("--x", a_bv.x, "evaluation point x")->required();
    c_bv->add_option("--q-max", a_bv.q_max, "largest modulus")->required();
    c_bv->add_option("--B", a_bv.b, "excluded modulus (default 1)");
    c_bv->add_option("--mode", a_bv.mode, "psi or pi")->check(CLI::IsMember({"psi", "pi"}));
    c_bv->add_flag("--per-q", a_bv.per_q, "include the per-modulus breakdown");
    CLI::App* c_prep =
        app.add_subcommand("prep-check", "elementary inequalities on a t grid (t >= 100)");
    c_prep->add_option("--t", a_prep.ts, "grid point (repeatable)");
    c_prep->add_option("--t-grid", a_prep.grid, "comma-separated grid");

    for (CLI::App* sub : app.get_subcommands(nullptr)) add_common(sub);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::ostringstream os;
        os << app.help();
        result.out = os.str();
        result.exit_code = 0;
        return result;
    } catch (const CLI::ParseError& e) {
        result.err = std::string(e.what()) + "\n" + app.help();
        result.exit_code = 2;
        return result;
    }

    sieve::SieveConfig cfg;
    cfg.threads = common.threads;
    cfg.segment_size = common.segment_size;
    if (!common.prime_cache.empty()) {
        try {
            sieve::use_prime_cache(sieve::read_prime_cache(common.prime_cache));
        } catch (const std::exception&) {
            // Cache absence or corruption never changes results; fall through.
        }
    }

    const bool ts = !common.no_timestamp;
    const bool csv = common.format == "csv";
    const bool line_format = common.format == "line";
    std::string csv_out;

    try {
        if (line_format && !app.got_subcommand(c_tuple))
            throw domain_error("--format line is only supported by the tuple subcommand");
        detail::Envelope env("", ts);
        auto finish = [&](const std::function<void(JsonWriter&)>& fill) {
            result.out = env.render(fill) + "\n";
        };
        auto echo_common = [&]() {
            env.param("format", common.format);
            env.param("threads", static_cast<uint64_t>(common.threads));
            env.param("segment_size", common.segment_size);
        };

        if (app.got_subcommand(c_factor)) {
            env = detail::Envelope("factor", ts);
            env.param("n", a_factor.n);
            echo_common();
            const auto f = arith::factorize(a_factor.n);
            if (csv) {
                csv_out = csv_row({"p", "e"});
                for (const auto& [p, e] : f.parts)
                    csv_out += csv_row({std::to_string(p), std::to_string(e)});
            }
            finish([&](JsonWriter& w) {
                w.key("value").value(f.value);
                w.key("parts").begin_array();
                for (const auto& [p, e] : f.parts) {
                    w.begin_object();
                    w.key("p").value(p);
                    w.key("e").value(static_cast<uint64_t>(e));
                    w.end_object();
                }
                w.end_array();
            });
        } else if (app.got_subcommand(c_phi)) {
            env = detail::Envelope("phi", ts);
            env.param("n", a_phi.n);
            echo_common();
            const uint64_t v = arith::phi(a_phi.n);
            if (csv) csv_out = csv_row({"key", "value"}) + csv_row({"phi", std::to_string(v)});
            finish([&](JsonWriter& w) { w.key("value").value(v); });
        } else if (app.got_subcommand(c_mu)) {
            env = detail::Envelope("mu", ts);
            env.param("n", a_mu.n);
            echo_common();
            const int v = arith::mu(a_mu.n);
            if (csv) csv_out = csv_row({"key", "value"}) + csv_row({"mu", std::to_string(v)});
            finish([&](JsonWriter& w) { w.key("value").value(v); });
        } else if (app.got_subcommand(c_sieve)) {
            env = detail::Envelope("sieve", ts);
            env.param("lo", a_sieve.lo);
            env.param("hi", a_sieve.hi);
            env.param("count_only", a_sieve.count_only);
            echo_common();
            if (a_sieve.count_only) {
                uint64_t count = 0;
                sieve::for_each_prime(a_sieve.lo, a_sieve.hi, cfg, [&](uint64_t) { ++count; });
                if (csv)
                    csv_out = csv_row({"key", "value"}) + csv_row({"count", std::to_string(count)});
                finish([&](JsonWriter& w) { w.key("count").value(count); });
            } else {
                const auto primes = sieve::primes_in(a_sieve.lo, a_sieve.hi, cfg);
                if (csv) {
                    csv_out = csv_row({"p"});
                    for (uint64_t p : primes) csv_out += csv_row({std::to_string(p)});
                }
                finish([&](JsonWriter& w) {
                    w.key("count").value(static_cast<uint64_t>(primes.size()));
                    w.key("primes").begin_array();
                    for (uint64_t p : primes) w.value(p);
                    w.end_array();
                });
            }
        } else if (app.got_subcommand(c_pi)) {
            env = detail::Envelope("pi", ts);
            a_pi.has_q = c_pi->count("--q") > 0;
            if (!a_pi.has_q && c_pi->count("--a") > 0)
                throw domain_error("pi: --a requires --q");
            env.param("x", a_pi.x);
            echo_common();
            uint64_t v;
            if (a_pi.has_q) {
                env.param("q", a_pi.q);
                env.param("a", a_pi.a);
                v = sieve::pi_ap(a_pi.x, a_pi.q, a_pi.a, cfg);
            } else {
                v = sieve::pi(a_pi.x, cfg);
            }
            if (csv) csv_out = csv_row({"key", "value"}) + csv_row({"pi", std::to_string(v)});
            finish([&](JsonWriter& w) { w.key("value").value(v); });
        } else if (app.got_subcommand(c_psi)) {
            env = detail::Envelope("psi", ts);
            a_psi.has_q = c_psi->count("--q") > 0;
            if (!a_psi.has_q && c_psi->count("--a") > 0)
                throw domain_error("psi: --a requires --q");
            env.param("x", a_psi.x);
            env.param("theta", a_psi.theta);
            echo_common();
            double v;
            if (a_psi.theta) {
                if (a_psi.has_q) throw domain_error("psi: --theta does not take --q");
                v = sieve::theta(a_psi.x, cfg);
            } else if (a_psi.has_q) {
                env.param("q", a_psi.q);
                env.param("a", a_psi.a);
                v = sieve::psi_ap(a_psi.x, a_psi.q, a_psi.a, cfg);
            } else {
                v = sieve::psi(a_psi.x, cfg);
            }
            if (csv) csv_out = csv_row({"key", "value"}) + csv_row({"value", detail::fmt(v)});
            finish([&](JsonWriter& w) { w.key("value").value(v); });
        } else if (app.got_subcommand(c_li)) {
            env = detail::Envelope("li", ts);
            env.param("x", a_li.x);
            echo_common();
            const double v = sieve::li(a_li.x);
            if (csv) csv_out = csv_row({"key", "value"}) + csv_row({"li", detail::fmt(v)});
            finish([&](JsonWriter& w) { w.key("value").value(v); });
        } else if (app.got_subcommand(c_rough)) {
            env = detail::Envelope("rough", ts);
            env.param("x", a_rough.x);
            env.param("z", a_rough.z);
            echo_common();
            const uint64_t v = sieve::phi_rough(a_rough.x, a_rough.z, cfg);
            if (csv) csv_out = csv_row({"key", "value"}) + csv_row({"count", std::to_string(v)});
            finish([&](JsonWriter& w) { w.key("value").value(v); });
        } else if (app.got_subcommand(c_char)) {
            env = detail::Envelope("char", ts);
            env.param("q", a_char.q);
            echo_common();
            if (csv) {
                std::ostringstream os;
                chars::write_char_table_csv(os, a_char.q);
                csv_out = os.str();
            }
            if (a_char.index >= 0) {
                env.param("index", static_cast<uint64_t>(a_char.index));
                const auto chi =
                    chars::character_at(a_char.q, static_cast<uint64_t>(a_char.index));
                finish([&](JsonWriter& w) {
                    w.key("exponents").begin_array();
                    for (auto e : chi.exponents) w.value(static_cast<uint64_t>(e));
                    w.end_array();
                    w.key("real").value(chars::is_real(chi));
                    w.key("principal").value(chars::is_principal(chi));
                    w.key("conductor").value(chars::conductor(chi));
                    w.key("primitive").value(chars::is_primitive(chi));
                    w.key("values").begin_array();
                    for (uint64_t n = 0; n < a_char.q; ++n)
                        w.value(chars::eval(chi, static_cast<std::int64_t>(n)).str());
                    w.end_array();
                });
            } else {
                const auto all = chars::enumerate(a_char.q);
                finish([&](JsonWriter& w) {
                    w.key("count").value(static_cast<uint64_t>(all.size()));
                    w.key("characters").begin_array();
                    for (std::size_t i = 0; i < all.size(); ++i) {
                        w.begin_object();
                        w.key("index").value(static_cast<uint64_t>(i));
                        w.key("exponents").begin_array();
                        for (auto e : all[i].exponents) w.value(static_cast<uint64_t>(e));
                        w.end_array();
                        w.key("real").value(chars::is_real(all[i]));
                        w.key("principal").value(chars::is_principal(all[i]));
                        w.end_object();
                    }
                    w.end_array();
                });
            }
        } else if (app.got_subcommand(c_conductor)) {
            env = detail::Envelope("conductor", ts);
            env.param("q", a_conductor.q);
            env.param("index", static_cast<uint64_t>(a_conductor.index));
            echo_common();
            const auto chi =
                chars::character_at(a_conductor.q, static_cast<uint64_t>(a_conductor.index));
            const uint64_t v = chars::conductor(chi);
            if (csv)
                csv_out = csv_row({"key", "value"}) + csv_row({"conductor", std::to_string(v)});
            finish([&](JsonWriter& w) {
                w.key("value").value(v);
                w.key("primitive").value(v == a_conductor.q);
            });
        } else if (app.got_subcommand(c_induce)) {
            env = detail::Envelope("induce", ts);
            env.param("q", a_induce.q);
            env.param("index", static_cast<uint64_t>(a_induce.index));
            echo_common();
            const auto chi =
                chars::character_at(a_induce.q, static_cast<uint64_t>(a_induce.index));
            const auto [cond, chi1] = chars::induce_primitive(chi);
            if (csv)
                csv_out = csv_row({"key", "value"}) +
                          csv_row({"conductor", std::to_string(cond)}) +
                          csv_row({"index", std::to_string(chars::character_index(chi1))});
            finish([&](JsonWriter& w) {
                w.key("conductor").value(cond);
                w.key("index").value(chars::character_index(chi1));
                w.key("exponents").begin_array();
                for (auto e : chi1.exponents) w.value(static_cast<uint64_t>(e));
                w.end_array();
            });
        } else if (app.got_subcommand(c_decompose)) {
            env = detail::Envelope("decompose", ts);
            env.param("q", a_decompose.q);
            env.param("index", static_cast<uint64_t>(a_decompose.index));
            echo_common();
            const auto chi =
                chars::character_at(a_decompose.q, static_cast<uint64_t>(a_decompose.index));
            const auto comps = chars::decompose(chi);
            if (csv) {
                csv_out = csv_row({"prime_power", "index"});
                for (const auto& c : comps)
                    csv_out += csv_row({std::to_string(c.group->modulus),
                                        std::to_string(chars::character_index(c))});
            }
            finish([&](JsonWriter& w) {
                w.key("components").begin_array();
                for (const auto& c : comps) {
                    w.begin_object();
                    w.key("prime_power").value(c.group->modulus);
                    w.key("index").value(chars::character_index(c));
                    w.key("exponents").begin_array();
                    for (auto e : c.exponents) w.value(static_cast<uint64_t>(e));
                    w.end_array();
                    w.end_object();
                }
                w.end_array();
            });
        } else if (app.got_subcommand(c_psichi)) {
            env = detail::Envelope("psi-chi", ts);
            env.param("q", a_psichi.q);
            env.param("index", a_psichi.index);
            env.param("u", a_psichi.u);
            env.param("prime_variant", a_psichi.prime_variant);
            echo_common();
            const auto chi = chars::character_at(a_psichi.q, a_psichi.index);
            const auto v = a_psichi.prime_variant ? chars::psi_prime_chi(a_psichi.u, chi, cfg)
                                                  : chars::psi_chi(a_psichi.u, chi, cfg);
            if (csv)
                csv_out = csv_row({"key", "value"}) + csv_row({"re", detail::fmt(v.real())}) +
                          csv_row({"im", detail::fmt(v.imag())});
            finish([&](JsonWriter& w) {
                w.key("re").value(v.real());
                w.key("im").value(v.imag());
            });
        } else if (app.got_subcommand(c_ortho)) {
            env = detail::Envelope("ortho-check", ts);
            a_ortho.has_w = c_ortho->count("--w") > 0;
            env.param("q", a_ortho.q);
            env.param("u", a_ortho.u);
            echo_common();
            const auto direct = sieve::psi_ap_all(a_ortho.u, a_ortho.q, cfg);
            std::vector<uint64_t> ws;
            if (a_ortho.has_w) {
                env.param("w", a_ortho.w);
                ws.push_back(arith::mod_reduce(a_ortho.w, a_ortho.q));
            } else {
                for (uint64_t w0 = 0; w0 < a_ortho.q; ++w0)
                    if (std::gcd(w0, a_ortho.q) == 1) ws.push_back(w0);
            }
            double max_err = 0.0;
            std::vector<std::pair<uint64_t, double>> rows;
            for (uint64_t w0 : ws) {
                const double recon = chars::psi_ap_via_characters(
                    a_ortho.u, a_ortho.q, static_cast<std::int64_t>(w0), cfg);
                const double err = std::abs(direct[w0] - recon);
                rows.emplace_back(w0, err);
                max_err = std::max(max_err, err);
            }
            if (csv) {
                csv_out = csv_row({"w", "abs_error"});
                for (const auto& [w0, err] : rows)
                    csv_out += csv_row({std::to_string(w0), detail::fmt(err)});
            }
            finish([&](JsonWriter& w) {
                w.key("max_abs_error").value(max_err);
                w.key("per_w").begin_array();
                for (const auto& [w0, err] : rows) {
                    w.begin_object();
                    w.key("w").value(w0);
                    w.key("abs_error").value(err);
                    w.end_object();
                }
                w.end_array();
            });
        } else if (app.got_subcommand(c_admissible)) {
            env = detail::Envelope("admissible", ts);
            env.param("q", a_admissible.q);
            env.param("a", a_admissible.a);
            env.param("b", a_admissible.b);
            echo_common();
            const admissible::LinearSet ls(a_admissible.q, a_admissible.a,
                                           detail::parse_u64_list(a_admissible.b));
            const bool by_def = admissible::is_admissible_definition(ls);
            const bool by_crit = admissible::is_admissible_criterion(ls);
            if (csv)
                csv_out = csv_row({"key", "value"}) +
                          csv_row({"definition", by_def ? "true" : "false"}) +
                          csv_row({"criterion", by_crit ? "true" : "false"});
            finish([&](JsonWriter& w) {
                w.key("definition").value(by_def);
                w.key("criterion").value(by_crit);
            });
        } else if (app.got_subcommand(c_omega)) {
            env = detail::Envelope("omega", ts);
            env.param("n", a_omega.n);
            env.param("k", a_omega.k);
            echo_common();
            const auto o = admissible::omega_set(a_omega.n, a_omega.k);
            if (csv) {
                csv_out = csv_row({"n"});
                for (uint64_t v : o) csv_out += csv_row({std::to_string(v)});
            }
            finish([&](JsonWriter& w) {
                w.key("count").value(static_cast<uint64_t>(o.size()));
                w.key("elements").begin_array();
                for (uint64_t v : o) w.value(v);
                w.end_array();
            });
        } else if (app.got_subcommand(c_tuple)) {
            env = detail::Envelope("tuple", ts);
            a_tuple.has_k = c_tuple->count("--k") > 0;
            a_tuple.has_eta = c_tuple->count("--eta") > 0;
            uint64_t k = a_tuple.k;
            if (!a_tuple.has_k) {
                if (a_tuple.m == 0)
                    throw domain_error("tuple: provide --k or --m (for the k recipe)");
                k = admissible::k_recipe(a_tuple.m, a_tuple.c_tilde);
            }
            double eta = a_tuple.eta;
            bool clamped = false;
            if (!a_tuple.has_eta) {
                const auto r = admissible::eta_recipe(std::max<uint64_t>(k, 3), a_tuple.q,
                                                      a_tuple.c6);
                eta = r.value;
                clamped = r.clamped;
            }
            env.param("k", k);
            env.param("eta", eta);
            env.param("eta_clamped", clamped);
            env.param("y", a_tuple.y);
            env.param("q", a_tuple.q);
            env.param("a", a_tuple.a);
            env.param("c6", a_tuple.c6);
            env.param("c_tilde", a_tuple.c_tilde);
            echo_common();
            const auto ls = admissible::choose_tuple(k, eta, a_tuple.y, a_tuple.q, a_tuple.a);
            std::string joined;
            for (std::size_t i = 0; i < ls.b.size(); ++i)
                joined += (i ? "," : "") + std::to_string(ls.b[i]);
            const std::string line =
                std::to_string(ls.q) + " " + std::to_string(ls.a) + " " + joined;
            if (csv) {
                csv_out = csv_row({"q", "a", "b"});
                csv_out += csv_row({std::to_string(ls.q), std::to_string(ls.a), joined});
            }
            if (line_format) csv_out = line + "\n";
            finish([&](JsonWriter& w) {
                w.key("q").value(ls.q);
                w.key("a").value(ls.a);
                w.key("b").begin_array();
                for (uint64_t v : ls.b) w.value(v);
                w.end_array();
                w.key("line").value(line);
            });
        } else if (app.got_subcommand(c_delta)) {
            env = detail::Envelope("delta-sum", ts);
            env.param("a", a_delta.a);
            env.param("b", a_delta.b);
            env.param("x", a_delta.x);
            env.param("eta", a_delta.eta);
            echo_common();
            const admissible::DeltaContext ctx(a_delta.a, detail::parse_u64_list(a_delta.b),
                                               a_delta.x, a_delta.eta);
            const auto s = admissible::sum_delta_ratio(ctx);
            if (csv)
                csv_out = csv_row({"key", "value"}) + csv_row({"sum", detail::fmt(s.sum)}) +
                          csv_row({"bound_ratio", detail::fmt(s.bound_ratio)}) +
                          csv_row({"terms", std::to_string(s.terms)});
            finish([&](JsonWriter& w) {
                w.key("sum").value(s.sum);
                w.key("bound_ratio").value(s.bound_ratio);
                w.key("terms").value(s.terms);
            });
        } else if (app.got_subcommand(c_scan)) {
            env = detail::Envelope("scan", ts);
            a_scan.has_c = c_scan->count("--C") > 0;
            clusters::ClusterQuery query;
            query.x = a_scan.x;
            query.y = a_scan.y;
            query.m = a_scan.m;
            query.q = a_scan.q;
            query.a = a_scan.a;
            env.param("x", query.x);
            env.param("y", query.y);
            env.param("m", static_cast<uint64_t>(query.m));
            env.param("q", query.q);
            env.param("a", query.a);
            env.param("C", a_scan.c);
            echo_common();
            auto report = clusters::scan(query, cfg);
            if (a_scan.has_c)
                report.bound_at_c = {a_scan.c, clusters::lower_bound(query.x, query.y, query.m,
                                                                     query.q, a_scan.c, cfg)};
            if (!report.y_in_theorem_range)
                env.deviation("y exceeds ln x: the query lies outside the bound's stated range");
            if (csv) csv_out = clusters::report_to_csv(report);
            finish([&](JsonWriter& w) { clusters::report_json_fields(w, report); });
        } else if (app.got_subcommand(c_bound)) {
            env = detail::Envelope("bound", ts);
            env.param("x", a_bound.x);
            env.param("y", a_bound.y);
            env.param("m", static_cast<uint64_t>(a_bound.m));
            env.param("q", a_bound.q);
            env.param("C", a_bound.c);
            echo_common();
            const double v =
                clusters::lower_bound(a_bound.x, a_bound.y, a_bound.m, a_bound.q, a_bound.c, cfg);
            if (csv) csv_out = csv_row({"key", "value"}) + csv_row({"bound", detail::fmt(v)});
            finish([&](JsonWriter& w) { w.key("value").value(v); });
        } else if (app.got_subcommand(c_calibrate)) {
            env = detail::Envelope("calibrate", ts);
            echo_common();
            std::vector<clusters::ClusterReport> reports;
            for (const auto& spec : a_calibrate.points) {
                const auto f = detail::split(spec, ',');
                if (f.size() != 5)
                    throw domain_error("calibrate: point must be \"x,y,m,q,a\"");
                clusters::ClusterQuery query;
                query.x = std::stoull(f[0]);
                query.y = std::stod(f[1]);
                query.m = static_cast<unsigned>(std::stoul(f[2]));
                query.q = std::stoull(f[3]);
                query.a = std::stoull(f[4]);
                reports.push_back(clusters::scan(query, cfg));
            }
            {
                JsonWriter pw;
                pw.begin_array();
                for (const auto& p : a_calibrate.points) pw.value(p);
                pw.end_array();
                env.param_raw("points", pw.str());
            }
            const auto cal = clusters::calibrate_c(reports, cfg);
            if (csv) {
                csv_out = csv_row({"x", "y", "m", "q", "a", "count", "ratio"});
                for (std::size_t i = 0; i < reports.size(); ++i)
                    csv_out += csv_row(
                        {std::to_string(cal.grid[i].x), detail::fmt(cal.grid[i].y),
                         std::to_string(cal.grid[i].m), std::to_string(cal.grid[i].q),
                         std::to_string(cal.grid[i].a), std::to_string(reports[i].count),
                         detail::fmt(cal.ratios[i])});
            }
            finish([&](JsonWriter& w) {
                w.key("c_min");
                if (cal.c_min)
                    w.value(*cal.c_min);
                else
                    w.null();
                w.key("tolerance").value(cal.tolerance);
                w.key("flagged").begin_array();
                for (auto i : cal.flagged) w.value(static_cast<uint64_t>(i));
                w.end_array();
                w.key("points").begin_array();
                for (std::size_t i = 0; i < reports.size(); ++i) {
                    w.begin_object();
                    w.key("x").value(cal.grid[i].x);
                    w.key("y").value(cal.grid[i].y);
                    w.key("m").value(static_cast<uint64_t>(cal.grid[i].m));
                    w.key("q").value(cal.grid[i].q);
                    w.key("a").value(cal.grid[i].a);
                    w.key("count").value(reports[i].count);
                    w.key("ratio").value(cal.ratios[i]);
                    w.end_object();
                }
                w.end_array();
            });
        } else if (app.got_subcommand(c_bv)) {
            env = detail::Envelope("bv", ts);
            env.param("x", a_bv.x);
            env.param("q_max", a_bv.q_max);
            env.param("B", a_bv.b);
            env.param("mode", a_bv.mode);
            echo_common();
            sieve::BVQuery query;
            query.x = a_bv.x;
            query.q_max = a_bv.q_max;
            query.excluded_modulus = a_bv.b;
            query.mode = a_bv.mode == "pi" ? sieve::BVMode::pi : sieve::BVMode::psi;
            const auto res = sieve::bv_error_sum(query, cfg);
            env.deviation(sieve::BVResult::kDeviation);
            if (csv) {
                csv_out = csv_row({"q", "worst_residue", "error"});
                for (const auto& row : res.per_q)
                    csv_out += csv_row({std::to_string(row.q), std::to_string(row.worst_residue),
                                        detail::fmt(row.error)});
            }
            finish([&](JsonWriter& w) {
                w.key("total").value(res.total);
                w.key("moduli").value(static_cast<uint64_t>(res.per_q.size()));
                if (a_bv.per_q) {
                    w.key("per_q").begin_array();
                    for (const auto& row : res.per_q) {
                        w.begin_object();
                        w.key("q").value(row.q);
                        w.key("worst_residue").value(row.worst_residue);
                        w.key("error").value(row.error);
                        w.end_object();
                    }
                    w.end_array();
                }
            });
        } else if (app.got_subcommand(c_prep)) {
            env = detail::Envelope("prep-check", ts);
            std::vector<double> ts_grid = a_prep.ts;
            if (!a_prep.grid.empty())
                for (const auto& f : detail::split(a_prep.grid, ','))
                    ts_grid.push_back(std::stod(f));
            if (ts_grid.empty()) throw domain_error("prep-check: provide --t or --t-grid");
            {
                std::string joined;
                for (std::size_t i = 0; i < ts_grid.size(); ++i)
                    joined += (i ? "," : "") + detail::fmt(ts_grid[i]);
                env.param("t_grid", joined);
            }
            echo_common();
            const auto rep = clusters::preparatory_checks(ts_grid);
            if (csv) {
                csv_out = csv_row({"t", "sqrt_margin", "log_half_margin", "loglog_half_margin",
                                   "one_minus_margin", "ok"});
                for (const auto& row : rep.rows)
                    csv_out += csv_row({detail::fmt(row.t), detail::fmt(row.margin_sqrt),
                                        detail::fmt(row.margin_log_half),
                                        detail::fmt(row.margin_loglog_half),
                                        detail::fmt(row.margin_one_minus),
                                        row.all_hold ? "true" : "false"});
            }
            finish([&](JsonWriter& w) {
                w.key("all_hold").value(rep.all_hold);
                w.key("rows").begin_array();
                for (const auto& row : rep.rows) {
                    w.begin_object();
                    w.key("t").value(row.t);
                    w.key("sqrt_margin").value(row.margin_sqrt);
                    w.key("log_half_margin").value(row.margin_log_half);
                    w.key("loglog_half_margin").value(row.margin_loglog_half);
                    w.key("one_minus_margin").value(row.margin_one_minus);
                    w.key("ok").value(row.all_hold);
                    w.end_object();
                }
                w.end_array();
            });
        }

        if (csv || line_format) result.out = csv_out;
        result.exit_code = 0;
        return result;
    } catch (const budget_error& e) {
        result.err = std::string("budget refused: ") + e.what() + "\n";
        result.exit_code = 3;
        return result;
    } catch (const domain_error& e) {
        result.err = std::string("domain error: ") + e.what() + "\n";
        result.exit_code = 2;
        return result;
    } catch (const std::exception& e) {
        result.err = std::string("error: ") + e.what() + "\n";
        result.exit_code = 2;
        return result;
    }
}

} // namespace pcl::cli
