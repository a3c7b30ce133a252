#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "primecluster/errors.hpp"
#include "primecluster/rational.hpp"

namespace pcl::arith {

using std::uint64_t;

// A positive integer in standard form: ascending (prime, exponent) pairs whose
// product reconstructs the value. Empty parts <=> value 1.
struct Factorization {
    uint64_t value = 1;
    std::vector<std::pair<uint64_t, unsigned>> parts;
};

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((uint128(a) * b) % m);
}

inline uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
    if (m == 1) return 0;
    uint64_t r = 1;
    a %= m;
    while (e > 0) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Reduce an arbitrary integer into [0, m).
inline uint64_t mod_reduce(std::int64_t n, uint64_t m) {
    std::int64_t r = n % static_cast<std::int64_t>(m);
    if (r < 0) r += static_cast<std::int64_t>(m);
    return static_cast<uint64_t>(r);
}

namespace detail {

// Trial-division candidates: 2, 3, 5, then the mod-30 wheel.
inline constexpr unsigned kWheelSteps[8] = {4, 2, 4, 2, 4, 6, 2, 6};

template <typename Fn>
inline void for_each_candidate(uint64_t n, Fn&& fn) {
    for (uint64_t d : {2ull, 3ull, 5ull}) {
        if (d * d > n) return;
        if (!fn(d)) return;
    }
    uint64_t d = 7;
    unsigned i = 0;
    while (d <= n / d) {
        if (!fn(d)) return;
        d += kWheelSteps[i];
        i = (i + 1) & 7;
    }
}

} // namespace detail

inline Factorization factorize(uint64_t n) {
    if (n == 0) throw domain_error("factorize: n must be positive");
    Factorization f;
    f.value = n;
    uint64_t rem = n;
    detail::for_each_candidate(rem, [&](uint64_t d) {
        if (rem % d == 0) {
            unsigned e = 0;
            while (rem % d == 0) {
                rem /= d;
                ++e;
            }
            f.parts.emplace_back(d, e);
        }
        return true;
    });
    if (rem > 1) f.parts.emplace_back(rem, 1u);
    return f;
}

inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    bool composite = false;
    detail::for_each_candidate(n, [&](uint64_t d) {
        if (n % d == 0) {
            composite = true;
            return false;
        }
        return true;
    });
    return !composite;
}

inline uint64_t phi(uint64_t n) {
    if (n == 0) throw domain_error("phi: n must be positive");
    uint64_t r = n;
    for (const auto& [p, e] : factorize(n).parts) {
        (void)e;
        r -= r / p;
    }
    return r;
}

inline int mu(uint64_t n) {
    if (n == 0) throw domain_error("mu: n must be positive");
    const auto f = factorize(n);
    for (const auto& [p, e] : f.parts)
        if (e > 1) return 0;
    return (f.parts.size() % 2 == 0) ? 1 : -1;
}

// ln p when n = p^k, else 0 (n = 1 included).
inline double mangoldt(uint64_t n) {
    if (n == 0) throw domain_error("mangoldt: n must be positive");
    const auto f = factorize(n);
    if (f.parts.size() != 1) return 0.0;
    return std::log(static_cast<double>(f.parts.front().first));
}

// Sum over squarefree divisors d of n of 1/phi(d), exactly; equals n/phi(n).
inline Rational phi_identity_rhs(uint64_t n) {
    if (n == 0) throw domain_error("phi_identity_rhs: n must be positive");
    Rational r(1);
    for (const auto& [p, e] : factorize(n).parts) {
        (void)e;
        r = r * Rational(static_cast<int128>(p), static_cast<int128>(p - 1));
    }
    return r;
}

// Smallest d >= 1 with a^d == 1 (mod m); requires (a, m) = 1.
inline uint64_t order_mod(std::int64_t a, uint64_t m) {
    if (m < 2) throw domain_error("order_mod: modulus must exceed 1");
    const uint64_t ar = mod_reduce(a, m);
    if (std::gcd(ar, m) != 1) throw domain_error("order_mod: a not coprime to modulus");
    uint64_t d = phi(m);
    for (const auto& [p, e] : factorize(d).parts) {
        (void)e;
        while (d % p == 0 && powmod(ar, d / p, m) == 1) d /= p;
    }
    return d;
}

struct LinearSolution {
    std::int64_t x = 0;
    std::int64_t y = 0;
};

namespace detail {

// Extended gcd: returns g = gcd(|a|,|b|) and (x, y) with a*x + b*y = g.
inline uint64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    std::int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    std::int64_t r0 = a, r1 = b;
    while (r1 != 0) {
        std::int64_t qt = r0 / r1;
        std::int64_t r2 = r0 - qt * r1;
        std::int64_t x2 = x0 - qt * x1;
        std::int64_t y2 = y0 - qt * y1;
        r0 = r1; r1 = r2;
        x0 = x1; x1 = x2;
        y0 = y1; y1 = y2;
    }
    if (r0 < 0) {
        r0 = -r0;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return static_cast<uint64_t>(r0);
}

} // namespace detail

// Solves a*x + b*y = c. Among all solutions picks the one with minimal |x|
// (positive x on a tie) so output is deterministic.
inline LinearSolution egcd_solve(std::int64_t a, std::int64_t b, std::int64_t c) {
    if (a == 0 && b == 0) throw domain_error("egcd_solve: a and b both zero");
    std::int64_t x0, y0;
    const std::int64_t g = static_cast<std::int64_t>(detail::ext_gcd(a, b, x0, y0));
    if (c % g != 0) throw no_solution_error("egcd_solve: gcd(a,b) does not divide c");
    const std::int64_t s = c / g;
    int128 x = int128(x0) * s;
    int128 y = int128(y0) * s;
    if (b != 0) {
        const int128 step_x = (b / g < 0) ? -(b / g) : (b / g);
        // Shift x into (-step_x/2, step_x/2]; recompute y from the equation.
        int128 r = x % step_x;
        if (r < 0) r += step_x;
        int128 best = (r * 2 > step_x) ? r - step_x : r;
        x = best;
        y = (int128(c) - int128(a) * x) / b;
    }
    LinearSolution sol;
    sol.x = static_cast<std::int64_t>(x);
    sol.y = static_cast<std::int64_t>(y);
    return sol;
}

// Simultaneous congruences n == residue_i (mod modulus_i), moduli pairwise
// coprime (verified when solving).
struct CongruenceSystem {
    std::vector<std::pair<std::int64_t, uint64_t>> equations;
};

// Returns (residue, modulus): the unique residue in [0, prod moduli).
inline std::pair<uint64_t, uint64_t> crt_solve(const CongruenceSystem& sys) {
    if (sys.equations.empty()) throw domain_error("crt_solve: empty system");
    uint64_t r = 0, m = 1;
    for (const auto& [ri_raw, mi] : sys.equations) {
        if (mi == 0) throw domain_error("crt_solve: zero modulus");
        const uint64_t ri = mod_reduce(ri_raw, mi);
        const uint64_t g = std::gcd(m, mi);
        if (g != 1) throw domain_error("crt_solve: moduli not pairwise coprime");
        if (uint128(m) * mi > uint128(UINT64_MAX))
            throw domain_error("crt_solve: modulus product exceeds 64 bits");
        // r + m*t == ri (mod mi)  =>  t == (ri - r) * m^{-1} (mod mi)
        const uint64_t diff = (ri + mi - r % mi) % mi;
        std::int64_t inv_x, inv_y;
        detail::ext_gcd(static_cast<std::int64_t>(m % mi), static_cast<std::int64_t>(mi), inv_x, inv_y);
        const uint64_t minv = mod_reduce(inv_x, mi);
        const uint64_t t = mulmod(diff, minv, mi);
        r += m * t;
        m *= mi;
    }
    return {r, m};
}

// Smallest-constructed t with (n + t*a, b) = 1, following the congruence-system
// construction: t = 0 when (n, b) = 1 already, otherwise t solves
// n + t*a == 1 (mod p) for every prime p | b with p not dividing a.
// Requires a | b, a < b, (n, a) = 1.
inline uint64_t coprime_shift(std::int64_t n, uint64_t a, uint64_t b) {
    if (a == 0 || b == 0 || a >= b || b % a != 0)
        throw domain_error("coprime_shift: need 1 <= a < b with a | b");
    if (std::gcd(mod_reduce(n, a), a) != 1)
        throw domain_error("coprime_shift: (n, a) != 1");
    const uint64_t nb = mod_reduce(n, b);
    if (std::gcd(nb, b) == 1) return 0;
    CongruenceSystem sys;
    for (const auto& [p, e] : factorize(b).parts) {
        (void)e;
        if (a % p == 0) continue;
        // n + a*t == 1 (mod p)
        const uint64_t np = mod_reduce(n, p);
        std::int64_t inv_x, inv_y;
        detail::ext_gcd(static_cast<std::int64_t>(a % p), static_cast<std::int64_t>(p), inv_x, inv_y);
        const uint64_t ainv = mod_reduce(inv_x, p);
        const uint64_t rhs = (1 + p - np) % p;
        sys.equations.emplace_back(static_cast<std::int64_t>(mulmod(rhs, ainv, p)), p);
    }
    const auto [t, mod] = crt_solve(sys);
    (void)mod;
    return t;
}

// Smallest prime dividing n; empty optional encodes +infinity (n = 1).
inline std::optional<uint64_t> least_prime_factor(uint64_t n) {
    if (n == 0) throw domain_error("least_prime_factor: n must be positive");
    if (n == 1) return std::nullopt;
    std::optional<uint64_t> found;
    detail::for_each_candidate(n, [&](uint64_t d) {
        if (n % d == 0) {
            found = d;
            return false;
        }
        return true;
    });
    if (!found) found = n; // n itself is prime
    return found;
}

// Sum of ln p / p over the distinct primes dividing n (empty sum for n = 1).
inline double sum_logp_over_p(uint64_t n) {
    if (n == 0) throw domain_error("sum_logp_over_p: n must be positive");
    double s = 0.0;
    for (const auto& [p, e] : factorize(n).parts) {
        (void)e;
        s += std::log(static_cast<double>(p)) / static_cast<double>(p);
    }
    return s;
}

} // namespace pcl::arith
