#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "primecluster/arith.hpp"
#include "primecluster/errors.hpp"
#include "primecluster/sieve.hpp"

namespace pcl::admissible {

using std::uint64_t;

// The linear functions L_i(n) = q n + a + q b_i given by (q, a, b_1 < ... < b_k).
struct LinearSet {
    uint64_t q = 1;
    uint64_t a = 1;
    std::vector<uint64_t> b;

    LinearSet(uint64_t q_, uint64_t a_, std::vector<uint64_t> b_) : q(q_), a(a_), b(std::move(b_)) {
        if (q == 0 || a == 0) throw domain_error("LinearSet: q and a must be positive");
        if (std::gcd(a, q) != 1) throw domain_error("LinearSet: (a, q) != 1");
        if (b.empty()) throw domain_error("LinearSet: need at least one offset");
        for (std::size_t i = 1; i < b.size(); ++i)
            if (b[i] <= b[i - 1]) throw domain_error("LinearSet: offsets must be strictly ascending");
    }

    std::size_t k() const { return b.size(); }
};

namespace detail {

inline void check_admissibility_budget(const LinearSet& ls) {
    if (ls.k() > 64) throw budget_error("admissibility: k exceeds 64");
    if (ls.b.back() > (uint64_t(1) << 40) / std::max<uint64_t>(ls.q, 1))
        throw budget_error("admissibility: q*b_max too large");
}

inline std::vector<uint64_t> primes_up_to(uint64_t n) {
    return sieve::primes_in(0, n + 1);
}

} // namespace detail

// Definition form: for every prime p there is n_p with p not dividing
// prod L_i(n_p). Only p <= k can obstruct (k residues cannot cover more than
// k classes), so the brute-force residue scan stops there.
inline bool is_admissible_definition(const LinearSet& ls) {
    detail::check_admissibility_budget(ls);
    for (uint64_t p : detail::primes_up_to(ls.k())) {
        bool found = false;
        for (uint64_t n = 0; n < p && !found; ++n) {
            bool hit = false;
            for (uint64_t bi : ls.b) {
                const uint64_t v = (ls.q % p) * (n % p) + (ls.a + ls.q * bi) % p;
                if (v % p == 0) {
                    hit = true;
                    break;
                }
            }
            if (!hit) found = true;
        }
        if (!found) return false;
    }
    return true;
}

// Criterion form: for every prime p not dividing q, some residue m_p avoids
// all b_i (mod p). Agrees with the definition form on every input.
inline bool is_admissible_criterion(const LinearSet& ls) {
    detail::check_admissibility_budget(ls);
    for (uint64_t p : detail::primes_up_to(ls.k())) {
        if (ls.q % p == 0) continue;
        std::vector<bool> covered(p, false);
        uint64_t n_covered = 0;
        for (uint64_t bi : ls.b) {
            const uint64_t r = bi % p;
            if (!covered[r]) {
                covered[r] = true;
                ++n_covered;
            }
        }
        if (n_covered == p) return false;
    }
    return true;
}

// The n <= N coprime to every prime <= k, ascending.
inline std::vector<uint64_t> omega_set(uint64_t n_max, uint64_t k) {
    if (n_max > 1000000000ull) throw budget_error("omega_set: N exceeds 1e9 budget");
    std::vector<uint64_t> out;
    if (n_max == 0) return out;
    std::vector<bool> bad(n_max + 1, false);
    for (uint64_t p : detail::primes_up_to(k))
        for (uint64_t m = p; m <= n_max; m += p) bad[m] = true;
    for (uint64_t n = 1; n <= n_max; ++n)
        if (!bad[n]) out.push_back(n);
    return out;
}

// The k smallest elements of Omega([eta*y/q], k) as offsets; admissibility of
// the result is guaranteed because Omega avoids residue 0 mod every p <= k.
inline LinearSet choose_tuple(uint64_t k, double eta, double y, uint64_t q, uint64_t a) {
    if (k == 0) throw domain_error("choose_tuple: k must be positive");
    if (q == 0 || a == 0 || std::gcd(a, q) != 1)
        throw domain_error("choose_tuple: need positive a, q with (a, q) = 1");
    if (!(eta > 0.0) || !(y > 0.0)) throw domain_error("choose_tuple: eta and y must be positive");
    const double cap = eta * y / static_cast<double>(q);
    const uint64_t n_max = cap < 1.0 ? 0 : static_cast<uint64_t>(cap);
    const auto omega = omega_set(n_max, k);
    if (omega.size() < k)
        throw insufficient_tuple_space(
            "choose_tuple: only " + std::to_string(omega.size()) + " candidates for k = " +
                std::to_string(k),
            omega.size());
    return LinearSet(q, a, std::vector<uint64_t>(omega.begin(), omega.begin() + k));
}

struct EtaRecipe {
    double value = 0.0;
    bool clamped = false;
};

// eta = 1 / (12 c6 k^4 (ln k)^2 lnln(q+2)), clamped to 1/2.
inline EtaRecipe eta_recipe(uint64_t k, uint64_t q, double c6) {
    if (k < 3) throw domain_error("eta_recipe: k must be >= 3");
    if (!(c6 > 0.0)) throw domain_error("eta_recipe: c6 must be positive");
    const double lk = std::log(static_cast<double>(k));
    const double raw = 1.0 / (12.0 * c6 * std::pow(static_cast<double>(k), 4.0) * lk * lk *
                              std::log(std::log(static_cast<double>(q) + 2.0)));
    EtaRecipe r;
    r.clamped = raw > 0.5;
    r.value = r.clamped ? 0.5 : raw;
    return r;
}

// k = ceil(exp(c_tilde * m)), guarded to 1e6.
inline uint64_t k_recipe(uint64_t m, double c_tilde) {
    if (m == 0) throw domain_error("k_recipe: m must be positive");
    if (!(c_tilde >= 0.0)) throw domain_error("k_recipe: c_tilde must be nonnegative");
    const double v = std::exp(c_tilde * static_cast<double>(m));
    if (!(v <= 1.0e6)) throw budget_error("k_recipe: result exceeds 1e6 guard");
    const double nearest = std::round(v);
    uint64_t k;
    if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, v))
        k = static_cast<uint64_t>(nearest);
    else
        k = static_cast<uint64_t>(std::ceil(v));
    return std::max<uint64_t>(k, 1);
}

// Context for the Delta_L sums: the set {a n + b_i} with 1 <= b_i <= ln x and
// (ln x)^{-9/10} <= eta <= 1.
struct DeltaContext {
    uint64_t a_coeff = 1;
    std::vector<uint64_t> b_list;
    double x_scale = 0.0;
    double eta = 0.0;

    DeltaContext(uint64_t a, std::vector<uint64_t> b, double x, double eta_)
        : a_coeff(a), b_list(std::move(b)), x_scale(x), eta(eta_) {
        if (a_coeff == 0) throw domain_error("DeltaContext: a must be positive");
        if (b_list.empty()) throw domain_error("DeltaContext: b_list must be nonempty");
        if (!(x_scale > 1.0)) throw domain_error("DeltaContext: x must exceed 1");
        const double lx = std::log(x_scale);
        for (uint64_t bi : b_list)
            if (bi == 0 || static_cast<double>(bi) > lx)
                throw domain_error("DeltaContext: offsets must satisfy 1 <= b_i <= ln x");
        const double lo = std::pow(lx, -0.9);
        if (!(eta >= lo && eta <= 1.0))
            throw domain_error("DeltaContext: eta outside [ (ln x)^{-9/10}, 1 ]");
    }

    std::size_t k() const { return b_list.size(); }
};

// Delta_L = a^{k+1} * prod |b_i - b|, exactly in 128 bits; overflow is an error.
inline uint128 delta_of(const DeltaContext& ctx, uint64_t b) {
    auto mul_checked = [](uint128 x, uint64_t y) {
        if (y != 0 && x > ~uint128(0) / y)
            throw domain_error("delta_of: 128-bit overflow");
        return x * y;
    };
    uint128 d = 1;
    for (std::size_t i = 0; i < ctx.k() + 1; ++i) d = mul_checked(d, ctx.a_coeff);
    for (uint64_t bi : ctx.b_list) {
        const uint64_t diff = bi > b ? bi - b : b - bi;
        if (diff == 0) return 0;
        d = mul_checked(d, diff);
    }
    return d;
}

namespace detail {

// Delta/phi(Delta) = prod over primes p | Delta of p/(p-1): only the radical
// matters, so the ratio comes from the union of the factors' prime sets.
inline double delta_phi_ratio(const DeltaContext& ctx, uint64_t b) {
    std::set<uint64_t> primes;
    for (const auto& [p, e] : arith::factorize(ctx.a_coeff).parts) {
        (void)e;
        primes.insert(p);
    }
    for (uint64_t bi : ctx.b_list) {
        const uint64_t diff = bi > b ? bi - b : b - bi;
        if (diff <= 1) continue;
        for (const auto& [p, e] : arith::factorize(diff).parts) {
            (void)e;
            primes.insert(p);
        }
    }
    double r = 1.0;
    for (uint64_t p : primes)
        r *= static_cast<double>(p) / static_cast<double>(p - 1);
    return r;
}

} // namespace detail

struct DeltaSum {
    double sum = 0.0;
    double bound_ratio = 0.0; // sum / (lnln(a+2) ln(k+1) eta ln x)
    uint64_t terms = 0;
};

// Sum of Delta_L / phi(Delta_L) over 1 <= b <= eta ln x with a n + b outside
// the set, plus the ratio against the reference envelope.
inline DeltaSum sum_delta_ratio(const DeltaContext& ctx) {
    const double lx = std::log(ctx.x_scale);
    const double range = ctx.eta * lx;
    if (range > 1e6) throw budget_error("sum_delta_ratio: eta ln x exceeds 1e6 term budget");
    DeltaSum out;
    if (range < 1.0) return out;
    const uint64_t b_max = static_cast<uint64_t>(range);
    sieve::detail::Kahan acc;
    for (uint64_t b = 1; b <= b_max; ++b) {
        if (std::find(ctx.b_list.begin(), ctx.b_list.end(), b) != ctx.b_list.end()) continue;
        acc.add(detail::delta_phi_ratio(ctx, b));
        ++out.terms;
    }
    out.sum = acc.sum;
    const double denom = std::log(std::log(static_cast<double>(ctx.a_coeff) + 2.0)) *
                         std::log(static_cast<double>(ctx.k()) + 1.0) * ctx.eta * lx;
    out.bound_ratio = (out.sum == 0.0) ? 0.0 : out.sum / denom;
    return out;
}

// N_0(d): #{1 <= b <= range_len : d | prod (b - b_i)} for squarefree d,
// counted per prime root set; full blocks contribute prod |roots mod p| each,
// the tail is scanned directly.
inline uint64_t count_roots_mod(const std::vector<uint64_t>& b_list, uint64_t d,
                                uint64_t range_len) {
    if (d == 0) throw domain_error("count_roots_mod: d must be positive");
    if (d > 1000000ull) throw budget_error("count_roots_mod: d exceeds 1e6");
    if (b_list.empty()) throw domain_error("count_roots_mod: empty offset list");
    const auto fac = arith::factorize(d);
    for (const auto& [p, e] : fac.parts)
        if (e > 1) throw domain_error("count_roots_mod: d must be squarefree");
    if (d == 1) return range_len;

    uint64_t roots_per_block = 1;
    for (const auto& [p, e] : fac.parts) {
        (void)e;
        std::set<uint64_t> residues;
        for (uint64_t bi : b_list) residues.insert(bi % p);
        roots_per_block *= residues.size();
    }
    const uint64_t full = range_len / d;
    uint64_t count = full * roots_per_block;
    for (uint64_t b = full * d + 1; b <= range_len; ++b) {
        uint64_t prod_mod = 1;
        for (uint64_t bi : b_list) {
            const uint64_t diff = (b + d - bi % d) % d;
            prod_mod = arith::mulmod(prod_mod, diff, d);
        }
        if (prod_mod == 0) ++count;
    }
    return count;
}

} // namespace pcl::admissible
