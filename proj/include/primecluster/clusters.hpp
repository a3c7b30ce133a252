#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "primecluster/errors.hpp"
#include "primecluster/jsonout.hpp"
#include "primecluster/sieve.hpp"

namespace pcl::clusters {

using std::uint64_t;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::size_t kWitnessCap = 10;

// A query for runs of m+1 consecutive primes, all congruent to a (mod q),
// with p_{n+m} - p_n <= y and x/2 < p_n <= x.
struct ClusterQuery {
    uint64_t x = 4;
    double y = 1.0;
    unsigned m = 1;
    uint64_t q = 1;
    uint64_t a = 1;

    void validate() const {
        if (x < 4) throw domain_error("ClusterQuery: x must be >= 4");
        if (!(y >= 1.0)) throw domain_error("ClusterQuery: y must be >= 1");
        if (m < 1) throw domain_error("ClusterQuery: m must be >= 1");
        if (q == 0) throw domain_error("ClusterQuery: q must be positive");
        if (q != 1 && std::gcd(a % q, q) != 1)
            throw domain_error("ClusterQuery: (a, q) != 1");
    }
};

struct Witness {
    uint64_t first_prime = 0;
    uint64_t gap = 0;
};

struct ClusterReport {
    ClusterQuery query;
    uint64_t count = 0;
    std::optional<std::pair<double, double>> bound_at_c; // (C, bound value)
    std::vector<Witness> witnesses;                      // at most kWitnessCap
    uint64_t window_end = 0;                             // last integer sieved
    bool y_in_theorem_range = true;                      // advisory: y <= ln x
};

namespace detail {

// Primes in (lo, hi_target] extended far enough that the last prime <= x has
// at least m successors available.
inline std::vector<uint64_t> primes_for_scan(uint64_t x, unsigned m, const sieve::SieveConfig& cfg,
                                             uint64_t* window_end) {
    const double lx = std::log(static_cast<double>(x));
    uint64_t slack = static_cast<uint64_t>(static_cast<double>(m) * lx * lx) + 64;
    const uint64_t lo = x / 2 + 1;
    std::vector<uint64_t> primes = sieve::primes_in(lo, x + slack + 1, cfg);
    auto beyond_x = [&] {
        return static_cast<uint64_t>(
            std::distance(std::upper_bound(primes.begin(), primes.end(), x), primes.end()));
    };
    while (beyond_x() < m) {
        const uint64_t ext_lo = x + slack + 1;
        slack *= 2;
        auto more = sieve::primes_in(ext_lo, x + slack + 1, cfg);
        primes.insert(primes.end(), more.begin(), more.end());
    }
    if (window_end != nullptr) *window_end = x + slack;
    return primes;
}

} // namespace detail

// Counts the runs described by the query. "Consecutive" means consecutive in
// the full prime sequence; p_n must lie in (x/2, x] while p_{n+m} may exceed x.
inline ClusterReport scan(const ClusterQuery& query, const sieve::SieveConfig& cfg = {}) {
    query.validate();
    if (query.x > 10000000000ull) throw budget_error("scan: x exceeds 1e10 budget");
    ClusterReport report;
    report.query = query;
    report.y_in_theorem_range = query.y <= std::log(static_cast<double>(query.x));
    const auto primes = detail::primes_for_scan(query.x, query.m, cfg, &report.window_end);
    const uint64_t q = query.q;
    const uint64_t a_res = query.a % q;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (primes[i] > query.x) break;
        const std::size_t j = i + query.m;
        if (j >= primes.size()) break; // cannot happen after window extension
        const uint64_t gap = primes[j] - primes[i];
        if (static_cast<double>(gap) > query.y) continue;
        bool all_match = true;
        for (std::size_t t = i; t <= j; ++t) {
            if (primes[t] % q != a_res) {
                all_match = false;
                break;
            }
        }
        if (!all_match) continue;
        ++report.count;
        if (report.witnesses.size() < kWitnessCap)
            report.witnesses.push_back({primes[i], gap});
    }
    return report;
}

// pi(x) * (y / (2 q ln x))^{exp(C m)}.
inline double lower_bound(uint64_t x, double y, unsigned m, uint64_t q, double c,
                          const sieve::SieveConfig& cfg = {}) {
    if (x < 2) throw domain_error("lower_bound: x must be >= 2");
    if (q == 0) throw domain_error("lower_bound: q must be positive");
    if (!(y > 0.0)) throw domain_error("lower_bound: y must be positive");
    const double pi_x = static_cast<double>(sieve::pi(x, cfg));
    const double base = y / (2.0 * static_cast<double>(q) * std::log(static_cast<double>(x)));
    return pi_x * std::pow(base, std::exp(c * static_cast<double>(m)));
}

struct CalibrationResult {
    std::vector<ClusterQuery> grid;
    std::optional<double> c_min;          // empty = unbounded
    std::vector<double> ratios;           // count / bound at c_min, per point
    std::vector<std::size_t> flagged;     // indices with base >= 1
    double tolerance = 1e-3;
};

// Smallest C >= 0 with bound(C) <= count at every pre-scanned grid point,
// located by bisection to the stated tolerance. Points with base >= 1 are
// flagged; a zero count at such a point makes the result unbounded.
inline CalibrationResult calibrate_c(const std::vector<ClusterReport>& grid,
                                     const sieve::SieveConfig& cfg = {}) {
    if (grid.empty()) throw domain_error("calibrate_c: empty grid");
    CalibrationResult res;
    std::map<uint64_t, double> pi_cache;
    std::vector<double> pi_x(grid.size());
    std::vector<double> base(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& g = grid[i].query;
        res.grid.push_back(g);
        auto it = pi_cache.find(g.x);
        if (it == pi_cache.end())
            it = pi_cache.emplace(g.x, static_cast<double>(sieve::pi(g.x, cfg))).first;
        pi_x[i] = it->second;
        base[i] = g.y / (2.0 * static_cast<double>(g.q) * std::log(static_cast<double>(g.x)));
        if (base[i] >= 1.0) res.flagged.push_back(i);
    }
    auto bound_at = [&](std::size_t i, double c) {
        return pi_x[i] * std::pow(base[i], std::exp(c * static_cast<double>(grid[i].query.m)));
    };
    auto feasible = [&](double c) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (bound_at(i, c) > static_cast<double>(grid[i].count)) return false;
        return true;
    };
    for (std::size_t i : res.flagged) {
        if (grid[i].count == 0) {
            // bound stays >= pi(x) for every C: no finite C works.
            res.c_min.reset();
            for (std::size_t j = 0; j < grid.size(); ++j)
                res.ratios.push_back(0.0);
            return res;
        }
    }
    if (feasible(0.0)) {
        res.c_min = 0.0;
    } else {
        double lo = 0.0, hi = 1.0;
        int guard = 0;
        while (!feasible(hi)) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 60) {
                res.c_min.reset();
                for (std::size_t j = 0; j < grid.size(); ++j)
                    res.ratios.push_back(0.0);
                return res;
            }
        }
        while (hi - lo > res.tolerance) {
            const double mid = 0.5 * (lo + hi);
            if (feasible(mid))
                hi = mid;
            else
                lo = mid;
        }
        res.c_min = hi;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double b = bound_at(i, *res.c_min);
        res.ratios.push_back(b > 0.0 ? static_cast<double>(grid[i].count) / b : 0.0);
    }
    return res;
}

// The q = 1, a = 1 specialization.
inline ClusterReport corollary_scan(uint64_t x, double y, unsigned m,
                                    const sieve::SieveConfig& cfg = {}) {
    ClusterQuery q;
    q.x = x;
    q.y = y;
    q.m = m;
    q.q = 1;
    q.a = 1;
    return scan(q, cfg);
}

// The four elementary inequalities used to re-parametrize the main bound;
// all hold for t >= 100 and the report carries the margin of each.
struct PreparatoryRow {
    double t = 0.0;
    double margin_sqrt = 0.0;       // sqrt(t) - 2 ln t
    double margin_log_half = 0.0;   // ln(t / (2 ln t)) - (ln t)/2
    double margin_loglog_half = 0.0;// lnln(t / (2 ln t)) - (lnln t)/2
    double margin_one_minus = 0.0;  // (1 - ln(2 ln t)/ln t) - 1/2
    bool all_hold = false;
};

struct PreparatoryReport {
    std::vector<PreparatoryRow> rows;
    bool all_hold = true;
};

inline PreparatoryReport preparatory_checks(const std::vector<double>& t_grid) {
    PreparatoryReport rep;
    for (double t : t_grid) {
        if (!(t >= 100.0)) throw domain_error("preparatory_checks: t must be >= 100");
        PreparatoryRow row;
        row.t = t;
        const double lt = std::log(t);
        row.margin_sqrt = std::sqrt(t) - 2.0 * lt;
        row.margin_log_half = std::log(t / (2.0 * lt)) - 0.5 * lt;
        row.margin_loglog_half = std::log(std::log(t / (2.0 * lt))) - 0.5 * std::log(lt);
        row.margin_one_minus = (1.0 - std::log(2.0 * lt) / lt) - 0.5;
        row.all_hold = row.margin_sqrt >= 0.0 && row.margin_log_half >= 0.0 &&
                       row.margin_loglog_half >= 0.0 && row.margin_one_minus >= 0.0;
        rep.all_hold = rep.all_hold && row.all_hold;
        rep.rows.push_back(row);
    }
    return rep;
}

// ---- serialization ----------------------------------------------------------

inline void report_json_fields(JsonWriter& w, const ClusterReport& r) {
    w.key("schema_version").value(kReportSchemaVersion);
    w.key("query").begin_object();
    w.key("x").value(r.query.x);
    w.key("y").value(r.query.y);
    w.key("m").value(r.query.m);
    w.key("q").value(r.query.q);
    w.key("a").value(r.query.a);
    w.end_object();
    w.key("count").value(r.count);
    w.key("bound_at_C");
    if (r.bound_at_c) {
        w.begin_object();
        w.key("C").value(r.bound_at_c->first);
        w.key("bound").value(r.bound_at_c->second);
        w.end_object();
    } else {
        w.null();
    }
    w.key("witnesses").begin_array();
    for (const auto& wit : r.witnesses) {
        w.begin_object();
        w.key("first_prime").value(wit.first_prime);
        w.key("gap").value(wit.gap);
        w.end_object();
    }
    w.end_array();
    w.key("window_end").value(r.window_end);
    w.key("y_in_theorem_range").value(r.y_in_theorem_range);
}

inline std::string report_to_json(const ClusterReport& r) {
    JsonWriter w;
    w.begin_object();
    report_json_fields(w, r);
    w.end_object();
    return w.str();
}

inline std::string report_to_csv(const ClusterReport& r) {
    std::string out = csv_row({"schema_version", "x", "y", "m", "q", "a", "count", "bound_C",
                               "bound_value", "window_end"});
    out += csv_row({std::to_string(kReportSchemaVersion), std::to_string(r.query.x),
                    JsonWriter::number(r.query.y), std::to_string(r.query.m),
                    std::to_string(r.query.q), std::to_string(r.query.a),
                    std::to_string(r.count),
                    r.bound_at_c ? JsonWriter::number(r.bound_at_c->first) : "",
                    r.bound_at_c ? JsonWriter::number(r.bound_at_c->second) : "",
                    std::to_string(r.window_end)});
    return out;
}

} // namespace pcl::clusters
