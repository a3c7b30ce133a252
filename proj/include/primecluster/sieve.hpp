#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <future>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "primecluster/arith.hpp"
#include "primecluster/errors.hpp"

namespace pcl::sieve {

using std::uint64_t;

struct SieveConfig {
    uint64_t segment_size = uint64_t(1) << 20; // numbers per segment
    unsigned threads = 1;                      // 0 = hardware concurrency
};

inline unsigned resolve_threads(const SieveConfig& cfg) {
    if (cfg.threads != 0) return cfg.threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

inline uint64_t isqrt(uint64_t n) {
    if (n == 0) return 0;
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

// A sieved half-open block [lo, hi): bit j of the bitmap is set iff
// first_odd + 2j is prime. Even numbers are not represented (2 is handled by
// the enumeration helpers).
struct PrimeSegment {
    uint64_t lo = 0;
    uint64_t hi = 0;
    uint64_t first_odd = 1;
    uint64_t odd_count = 0;
    std::vector<uint64_t> bits;

    uint64_t count_odd_primes() const {
        uint64_t c = 0;
        for (uint64_t w : bits) c += static_cast<uint64_t>(__builtin_popcountll(w));
        return c;
    }

    bool is_prime_odd(uint64_t n) const {
        const uint64_t j = (n - first_odd) / 2;
        return (bits[j >> 6] >> (j & 63)) & 1;
    }

    template <typename Fn>
    void for_each_prime(Fn&& fn) const {
        for (std::size_t w = 0; w < bits.size(); ++w) {
            uint64_t word = bits[w];
            while (word != 0) {
                const unsigned b = static_cast<unsigned>(__builtin_ctzll(word));
                word &= word - 1;
                fn(first_odd + 2 * (64 * w + b));
            }
        }
    }
};

namespace detail {

// Lazily grown table of primes used to mark segments; grows to sqrt of the
// largest bound seen so far.
class BasePrimes {
public:
    static BasePrimes& instance() {
        static BasePrimes bp;
        return bp;
    }

    // Guarantees the table covers all primes <= limit; returns a snapshot
    // reference valid until the next growth (callers hold the lock-free
    // shared_ptr snapshot).
    std::shared_ptr<const std::vector<uint64_t>> ensure(uint64_t limit) {
        std::lock_guard<std::mutex> lock(mu_);
        if (limit > limit_) grow(limit);
        return primes_;
    }

    // Installs externally supplied primes (e.g. from the on-disk cache).
    // Rejects obviously malformed data; a valid table must start 2,3,5,7.
    void seed(const std::vector<uint64_t>& primes, uint64_t limit) {
        static const uint64_t head[4] = {2, 3, 5, 7};
        if (limit >= 7) {
            if (primes.size() < 4) throw domain_error("prime cache: too few primes");
            for (int i = 0; i < 4; ++i)
                if (primes[static_cast<std::size_t>(i)] != head[i])
                    throw domain_error("prime cache: bad leading primes");
        }
        for (std::size_t i = 1; i < primes.size(); ++i) {
            if (primes[i] <= primes[i - 1] || (primes[i] % 2 == 0))
                throw domain_error("prime cache: not an ascending odd sequence");
        }
        if (!primes.empty() && primes.back() > limit)
            throw domain_error("prime cache: entry beyond stated limit");
        std::lock_guard<std::mutex> lock(mu_);
        if (limit > limit_) {
            primes_ = std::make_shared<const std::vector<uint64_t>>(primes);
            limit_ = limit;
        }
    }

private:
    BasePrimes() : primes_(std::make_shared<const std::vector<uint64_t>>()), limit_(1) {}

    void grow(uint64_t limit) {
        // Simple odd-only sieve up to limit.
        const uint64_t n_odd = limit / 2 + 1; // odd numbers 1,3,...,<=limit
        std::vector<uint64_t> mark((n_odd + 63) / 64, 0);
        auto set = [&](uint64_t j) { mark[j >> 6] |= uint64_t(1) << (j & 63); };
        auto get = [&](uint64_t j) { return (mark[j >> 6] >> (j & 63)) & 1; };
        for (uint64_t v = 3; v * v <= limit; v += 2) {
            if (get((v - 1) / 2)) continue;
            for (uint64_t m = v * v; m <= limit; m += 2 * v) set((m - 1) / 2);
        }
        auto out = std::make_shared<std::vector<uint64_t>>();
        if (limit >= 2) out->push_back(2);
        for (uint64_t v = 3; v <= limit; v += 2)
            if (!get((v - 1) / 2)) out->push_back(v);
        primes_ = std::move(out);
        limit_ = limit;
    }

    std::mutex mu_;
    std::shared_ptr<const std::vector<uint64_t>> primes_;
    uint64_t limit_;
};

// Wheel-30 presieve over odd space: composite marks for multiples of 3 and 5,
// period 15 odd slots. One 15-word block per phase (960 bits = 64 periods).
struct Wheel30 {
    // blocks[phase][w]: composite bits when the segment's first odd number has
    // odd-space index == phase (mod 15).
    uint64_t blocks[15][15];

    Wheel30() {
        for (unsigned phase = 0; phase < 15; ++phase) {
            for (unsigned w = 0; w < 15; ++w) blocks[phase][w] = 0;
            for (unsigned j = 0; j < 960; ++j) {
                const uint64_t v30 = (2 * (j + phase) + 1) % 30;
                if (v30 % 3 == 0 || v30 % 5 == 0)
                    blocks[phase][j / 64] |= uint64_t(1) << (j % 64);
            }
        }
    }

    static const Wheel30& instance() {
        static const Wheel30 w;
        return w;
    }
};

} // namespace detail

inline PrimeSegment sieve_segment(uint64_t lo, uint64_t hi) {
    PrimeSegment seg;
    seg.lo = lo;
    seg.hi = hi;
    seg.first_odd = (lo % 2 == 0) ? lo + 1 : lo;
    if (seg.first_odd >= hi) {
        seg.odd_count = 0;
        return seg;
    }
    seg.odd_count = (hi - seg.first_odd + 1) / 2;
    const uint64_t n_words = (seg.odd_count + 63) / 64;
    seg.bits.assign(n_words, 0);

    // Composite marks first; inverted at the end.
    const auto& wheel = detail::Wheel30::instance();
    const unsigned phase = static_cast<unsigned>(((seg.first_odd - 1) / 2) % 15);
    for (uint64_t w = 0; w < n_words; ++w) seg.bits[w] = wheel.blocks[phase][w % 15];

    const uint64_t root = isqrt(hi - 1);
    auto primes = detail::BasePrimes::instance().ensure(root);
    for (uint64_t p : *primes) {
        if (p < 7) continue;
        if (p > root) break;
        uint64_t m = std::max(p * p, ((lo + p - 1) / p) * p);
        if (m % 2 == 0) m += p;
        for (; m < hi; m += 2 * p) {
            const uint64_t j = (m - seg.first_odd) / 2;
            seg.bits[j >> 6] |= uint64_t(1) << (j & 63);
        }
    }

    // 1 is not prime; 3 and 5 are (the wheel pattern marks them).
    auto set_composite = [&](uint64_t n) {
        if (n >= seg.first_odd && n < hi) {
            const uint64_t j = (n - seg.first_odd) / 2;
            seg.bits[j >> 6] |= uint64_t(1) << (j & 63);
        }
    };
    auto clear_composite = [&](uint64_t n) {
        if (n >= seg.first_odd && n < hi) {
            const uint64_t j = (n - seg.first_odd) / 2;
            seg.bits[j >> 6] &= ~(uint64_t(1) << (j & 63));
        }
    };
    set_composite(1);
    clear_composite(3);
    clear_composite(5);

    for (auto& w : seg.bits) w = ~w;
    const unsigned tail = static_cast<unsigned>(seg.odd_count % 64);
    if (tail != 0) seg.bits.back() &= (uint64_t(1) << tail) - 1;
    return seg;
}

// Calls fn(segment) for consecutive segments covering [lo, hi) in ascending
// order. Segments may be sieved in parallel but delivery order is fixed, so
// any order-dependent reduction the caller performs is reproducible.
template <typename Fn>
inline void for_each_segment(uint64_t lo, uint64_t hi, const SieveConfig& cfg, Fn&& fn) {
    if (hi <= lo) return;
    const uint64_t seg = std::max<uint64_t>(cfg.segment_size, 128);
    const unsigned threads = resolve_threads(cfg);
    if (threads <= 1) {
        for (uint64_t s = lo; s < hi; s += seg)
            fn(sieve_segment(s, std::min(hi, s + seg)));
        return;
    }
    uint64_t s = lo;
    while (s < hi) {
        std::vector<std::future<PrimeSegment>> wave;
        for (unsigned t = 0; t < threads && s < hi; ++t) {
            const uint64_t s_lo = s;
            const uint64_t s_hi = std::min(hi, s + seg);
            s = s_hi;
            wave.push_back(std::async(std::launch::async,
                                      [s_lo, s_hi] { return sieve_segment(s_lo, s_hi); }));
        }
        for (auto& f : wave) fn(f.get());
    }
}

// Visits every prime in [lo, hi) in ascending order.
template <typename Fn>
inline void for_each_prime(uint64_t lo, uint64_t hi, const SieveConfig& cfg, Fn&& fn) {
    if (hi < lo) throw domain_error("for_each_prime: hi < lo");
    if (lo <= 2 && hi > 2) fn(uint64_t(2));
    for_each_segment(lo, hi, cfg, [&](const PrimeSegment& s) { s.for_each_prime(fn); });
}

inline std::vector<uint64_t> primes_in(uint64_t lo, uint64_t hi, const SieveConfig& cfg = {}) {
    if (hi < lo) throw domain_error("primes_in: hi < lo");
    std::vector<uint64_t> out;
    if (hi > lo) {
        const double approx = static_cast<double>(hi - lo) /
                              std::max(1.0, std::log(static_cast<double>(hi)) - 1.0);
        out.reserve(static_cast<std::size_t>(approx * 1.1) + 16);
    }
    for_each_prime(lo, hi, cfg, [&](uint64_t p) { out.push_back(p); });
    return out;
}

inline uint64_t pi(uint64_t x, const SieveConfig& cfg = {}) {
    if (x < 2) return 0;
    uint64_t count = 1; // the prime 2
    for_each_segment(3, x == UINT64_MAX ? x : x + 1, cfg,
                     [&](const PrimeSegment& s) { count += s.count_odd_primes(); });
    return count;
}

namespace detail {

struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// Prime powers p^k <= x with k >= 2, ascending by value, with ln p attached.
inline std::vector<std::pair<uint64_t, double>> higher_prime_powers(uint64_t x) {
    std::vector<std::pair<uint64_t, double>> out;
    if (x < 4) return out;
    auto primes = BasePrimes::instance().ensure(isqrt(x));
    for (uint64_t p : *primes) {
        if (p > x / p) break;
        const double lp = std::log(static_cast<double>(p));
        uint64_t v = p * p;
        while (true) {
            out.emplace_back(v, lp);
            if (v > x / p) break;
            v *= p;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

// theta(x) = sum of ln p over primes p <= x (compensated).
inline double theta(uint64_t x, const SieveConfig& cfg = {}) {
    detail::Kahan total;
    for_each_prime(0, x == UINT64_MAX ? x : x + 1, cfg,
                   [&](uint64_t p) { total.add(std::log(static_cast<double>(p))); });
    return total.sum;
}

// psi(x) = sum of Mangoldt Lambda(n) for n <= x (compensated).
inline double psi(uint64_t x, const SieveConfig& cfg = {}) {
    detail::Kahan total;
    for_each_prime(0, x == UINT64_MAX ? x : x + 1, cfg,
                   [&](uint64_t p) { total.add(std::log(static_cast<double>(p))); });
    for (const auto& [v, lp] : detail::higher_prime_powers(x)) {
        (void)v;
        total.add(lp);
    }
    return total.sum;
}

// Per-residue Chebyshev psi values: result[r] = psi(x; q, r).
inline std::vector<double> psi_ap_all(uint64_t x, uint64_t q, const SieveConfig& cfg = {}) {
    if (q == 0) throw domain_error("psi_ap_all: q must be positive");
    if (q > 10000000ull) throw budget_error("psi_ap_all: q exceeds 1e7 table budget");
    std::vector<detail::Kahan> acc(q);
    for_each_prime(0, x == UINT64_MAX ? x : x + 1, cfg, [&](uint64_t p) {
        acc[p % q].add(std::log(static_cast<double>(p)));
    });
    for (const auto& [v, lp] : detail::higher_prime_powers(x)) acc[v % q].add(lp);
    std::vector<double> out(q);
    for (uint64_t r = 0; r < q; ++r) out[r] = acc[r].sum;
    return out;
}

inline double psi_ap(uint64_t x, uint64_t q, std::int64_t a, const SieveConfig& cfg = {}) {
    if (q == 0) throw domain_error("psi_ap: q must be positive");
    return psi_ap_all(x, q, cfg)[arith::mod_reduce(a, q)];
}

// Per-residue prime counts: result[r] = pi(x; q, r).
inline std::vector<uint64_t> pi_ap_all(uint64_t x, uint64_t q, const SieveConfig& cfg = {}) {
    if (q == 0) throw domain_error("pi_ap_all: q must be positive");
    if (q > 10000000ull) throw budget_error("pi_ap_all: q exceeds 1e7 table budget");
    std::vector<uint64_t> acc(q, 0);
    for_each_prime(0, x == UINT64_MAX ? x : x + 1, cfg, [&](uint64_t p) { ++acc[p % q]; });
    return acc;
}

inline uint64_t pi_ap(uint64_t x, uint64_t q, std::int64_t a, const SieveConfig& cfg = {}) {
    if (q == 0) throw domain_error("pi_ap: q must be positive");
    return pi_ap_all(x, q, cfg)[arith::mod_reduce(a, q)];
}

namespace detail {

inline double li_simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double li_adaptive(double a, double b, double fa, double fm, double fb, double whole,
                          double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = 1.0 / std::log(lm);
    const double frm = 1.0 / std::log(rm);
    const double left = li_simpson(a, m, fa, flm, fm);
    const double right = li_simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
        return left + right + delta / 15.0;
    return li_adaptive(a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           li_adaptive(m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

} // namespace detail

// li(x): the logarithmic integral from 2 to x, adaptive Simpson quadrature.
inline double li(double x) {
    if (!(x >= 2.0)) throw domain_error("li: x must be >= 2");
    if (x == 2.0) return 0.0;
    const double a = 2.0, b = x;
    const double fa = 1.0 / std::log(a);
    const double fb = 1.0 / std::log(b);
    const double m = 0.5 * (a + b);
    const double fm = 1.0 / std::log(m);
    const double whole = detail::li_simpson(a, b, fa, fm, fb);
    return detail::li_adaptive(a, b, fa, fm, fb, whole, 1e-10, 48);
}

// Phi(x, z): count of 1 <= n <= x whose least prime factor exceeds z
// (n = 1 counts for every z).
inline uint64_t phi_rough(uint64_t x, double z, const SieveConfig& cfg = {}) {
    if (!(z >= 2.0)) throw domain_error("phi_rough: z must be >= 2");
    if (x > 1000000000ull) throw budget_error("phi_rough: x exceeds 1e9 budget");
    if (x == 0) return 0;
    const uint64_t zi = static_cast<uint64_t>(z);
    auto primes = detail::BasePrimes::instance().ensure(std::min(zi, x));
    // Survivors are odd (or 1). Mark odd multiples of odd primes <= z,
    // including the primes themselves.
    uint64_t count = 0;
    const uint64_t seg = std::max<uint64_t>(cfg.segment_size, 128);
    for (uint64_t lo = 1; lo <= x; lo += seg) {
        const uint64_t hi = std::min(x, lo + seg - 1); // inclusive
        const uint64_t first_odd = (lo % 2 == 0) ? lo + 1 : lo;
        if (first_odd > hi) continue;
        const uint64_t n_odd = (hi - first_odd) / 2 + 1;
        std::vector<uint64_t> mark((n_odd + 63) / 64, 0);
        for (uint64_t p : *primes) {
            if (p > zi || p > hi) break;
            if (p == 2) continue;
            uint64_t m = std::max(p, ((first_odd + p - 1) / p) * p);
            if (m % 2 == 0) m += p;
            for (; m <= hi; m += 2 * p) {
                const uint64_t j = (m - first_odd) / 2;
                mark[j >> 6] |= uint64_t(1) << (j & 63);
            }
        }
        uint64_t marked = 0;
        for (uint64_t w : mark) marked += static_cast<uint64_t>(__builtin_popcountll(w));
        count += n_odd - marked;
    }
    return count;
}

enum class BVMode { psi, pi };

// Aggregated worst-residue error of prime counting in progressions.
struct BVQuery {
    uint64_t x = 0;
    uint64_t q_max = 1;
    uint64_t excluded_modulus = 1; // moduli sharing a factor with this are skipped
    BVMode mode = BVMode::psi;
};

struct BVPerQ {
    uint64_t q = 0;
    uint64_t worst_residue = 0;
    double error = 0.0;
};

struct BVResult {
    BVQuery query;
    double total = 0.0;
    std::vector<BVPerQ> per_q;
    // The theoretical sum takes a sup over an interval of evaluation points;
    // this computation fixes the single point u = x.
    static constexpr const char* kDeviation = "inner sup over u restricted to the single point u = x";
};

inline BVResult bv_error_sum(const BVQuery& query, const SieveConfig& cfg = {}) {
    if (query.q_max == 0 || query.excluded_modulus == 0)
        throw domain_error("bv_error_sum: q_max and excluded modulus must be positive");
    if (query.x > 100000000ull) throw budget_error("bv_error_sum: x exceeds 1e8 budget");
    if (query.q_max > 10000ull) throw budget_error("bv_error_sum: q_max exceeds 1e4 budget");

    // One pass to collect entries (primes, plus higher powers in psi mode).
    std::vector<uint64_t> values;
    std::vector<double> logs;
    for_each_prime(0, query.x + 1, cfg, [&](uint64_t p) {
        values.push_back(p);
        logs.push_back(std::log(static_cast<double>(p)));
    });
    if (query.mode == BVMode::psi) {
        const auto powers = detail::higher_prime_powers(query.x);
        std::vector<uint64_t> merged_v(values.size() + powers.size());
        std::vector<double> merged_l(values.size() + powers.size());
        std::size_t i = 0, j = 0, k = 0;
        while (i < values.size() || j < powers.size()) {
            if (j >= powers.size() || (i < values.size() && values[i] < powers[j].first)) {
                merged_v[k] = values[i];
                merged_l[k] = logs[i];
                ++i;
            } else {
                merged_v[k] = powers[j].first;
                merged_l[k] = powers[j].second;
                ++j;
            }
            ++k;
        }
        values = std::move(merged_v);
        logs = std::move(merged_l);
    }

    const double li_x = (query.mode == BVMode::pi && query.x >= 2)
                            ? li(static_cast<double>(query.x))
                            : 0.0;

    BVResult res;
    res.query = query;
    detail::Kahan total;
    std::vector<double> sums;
    std::vector<double> comps;
    std::vector<uint64_t> counts;
    for (uint64_t q = 1; q <= query.q_max; ++q) {
        if (std::gcd(q, query.excluded_modulus) != 1) continue;
        const uint64_t phi_q = arith::phi(q);
        double worst = -1.0;
        uint64_t worst_w = 0;
        if (query.mode == BVMode::psi) {
            sums.assign(q, 0.0);
            comps.assign(q, 0.0);
            uint64_t r = values.empty() ? 0 : values[0] % q;
            uint64_t prev = values.empty() ? 0 : values[0];
            for (std::size_t i = 0; i < values.size(); ++i) {
                r += values[i] - prev;
                prev = values[i];
                while (r >= q) r -= q;
                const double y = logs[i] - comps[r];
                const double t = sums[r] + y;
                comps[r] = (t - sums[r]) - y;
                sums[r] = t;
            }
            const double target = static_cast<double>(query.x) / static_cast<double>(phi_q);
            for (uint64_t w = 0; w < q; ++w) {
                if (std::gcd(w, q) != 1 && q != 1) continue;
                const double err = std::abs(sums[w] - target);
                if (err > worst) {
                    worst = err;
                    worst_w = w;
                }
            }
        } else {
            counts.assign(q, 0);
            uint64_t r = values.empty() ? 0 : values[0] % q;
            uint64_t prev = values.empty() ? 0 : values[0];
            for (std::size_t i = 0; i < values.size(); ++i) {
                r += values[i] - prev;
                prev = values[i];
                while (r >= q) r -= q;
                ++counts[r];
            }
            const double target = li_x / static_cast<double>(phi_q);
            for (uint64_t w = 0; w < q; ++w) {
                if (std::gcd(w, q) != 1 && q != 1) continue;
                const double err = std::abs(static_cast<double>(counts[w]) - target);
                if (err > worst) {
                    worst = err;
                    worst_w = w;
                }
            }
        }
        res.per_q.push_back({q, worst_w, worst});
        total.add(worst);
    }
    res.total = total.sum;
    return res;
}

// ---- on-disk cache of the base prime table ---------------------------------
//
// Layout (all little-endian): 8-byte magic "PCLPRIM1", u32 version, u64 limit,
// u64 count, then count u64 gaps (first entry is the first prime itself).

namespace detail {

inline void put_u64_le(std::ostream& os, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_u32_le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline uint64_t get_u64_le(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw domain_error("prime cache: truncated file");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
}

inline std::uint32_t get_u32_le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw domain_error("prime cache: truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}

inline constexpr char kCacheMagic[8] = {'P', 'C', 'L', 'P', 'R', 'I', 'M', '1'};
inline constexpr std::uint32_t kCacheVersion = 1;

} // namespace detail

inline void write_prime_cache(const std::string& path, uint64_t limit) {
    auto primes = detail::BasePrimes::instance().ensure(limit);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("prime cache: cannot open for writing: " + path);
    os.write(detail::kCacheMagic, 8);
    detail::put_u32_le(os, detail::kCacheVersion);
    detail::put_u64_le(os, limit);
    uint64_t count = 0;
    for (uint64_t p : *primes)
        if (p <= limit) ++count;
    detail::put_u64_le(os, count);
    uint64_t prev = 0;
    for (uint64_t p : *primes) {
        if (p > limit) break;
        detail::put_u64_le(os, p - prev);
        prev = p;
    }
    if (!os) throw std::runtime_error("prime cache: write failed: " + path);
}

struct PrimeCache {
    uint64_t limit = 0;
    std::vector<uint64_t> primes;
};

inline PrimeCache read_prime_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("prime cache: cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, detail::kCacheMagic, 8) != 0)
        throw domain_error("prime cache: bad magic");
    const std::uint32_t version = detail::get_u32_le(is);
    if (version != detail::kCacheVersion) throw domain_error("prime cache: unsupported version");
    PrimeCache cache;
    cache.limit = detail::get_u64_le(is);
    const uint64_t count = detail::get_u64_le(is);
    cache.primes.reserve(count);
    uint64_t prev = 0;
    for (uint64_t i = 0; i < count; ++i) {
        const uint64_t gap = detail::get_u64_le(is);
        if (gap == 0) throw domain_error("prime cache: zero gap");
        prev += gap;
        cache.primes.push_back(prev);
    }
    return cache;
}

// Installs a cache as the base prime table. Results never depend on whether a
// cache was loaded; a valid cache only skips the initial sieve work.
inline void use_prime_cache(const PrimeCache& cache) {
    detail::BasePrimes::instance().seed(cache.primes, cache.limit);
}

} // namespace pcl::sieve
