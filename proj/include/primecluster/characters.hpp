#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "primecluster/arith.hpp"
#include "primecluster/errors.hpp"
#include "primecluster/sieve.hpp"

namespace pcl::chars {

using std::uint64_t;

// A character value: either zero or the root of unity exp(2*pi*i * num/den),
// stored as an exact reduced fraction of a turn with 0 <= num < den.
struct CharValue {
    bool is_zero = false;
    uint64_t num = 0;
    uint64_t den = 1;

    static CharValue zero() {
        CharValue v;
        v.is_zero = true;
        return v;
    }

    static CharValue root(uint64_t num, uint64_t den) {
        if (den == 0) throw domain_error("CharValue: zero denominator");
        CharValue v;
        v.num = num % den;
        v.den = den;
        const uint64_t g = std::gcd(v.num, v.den);
        if (g > 1) {
            v.num /= g;
            v.den /= g;
        }
        if (v.num == 0) v.den = 1;
        return v;
    }

    static CharValue one() { return root(0, 1); }

    bool is_one() const { return !is_zero && num == 0; }
    bool is_minus_one() const { return !is_zero && num == 1 && den == 2; }
    bool is_real() const { return is_zero || num == 0 || (num == 1 && den == 2); }

    CharValue operator*(const CharValue& o) const {
        if (is_zero || o.is_zero) return zero();
        const uint64_t l = den / std::gcd(den, o.den) * o.den;
        return root(num * (l / den) + o.num * (l / o.den), l);
    }

    CharValue conj() const {
        if (is_zero || num == 0) return *this;
        return root(den - num, den);
    }

    bool operator==(const CharValue& o) const {
        if (is_zero != o.is_zero) return false;
        if (is_zero) return true;
        return num == o.num && den == o.den;
    }
    bool operator!=(const CharValue& o) const { return !(*this == o); }

    std::complex<double> to_complex() const {
        if (is_zero) return {0.0, 0.0};
        const double t = 2.0 * M_PI * static_cast<double>(num) / static_cast<double>(den);
        return {std::cos(t), std::sin(t)};
    }

    std::string str() const {
        if (is_zero) return "zero";
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

namespace detail {

inline constexpr std::uint32_t kNoDlog = 0xFFFFFFFFu;

// Smallest primitive root modulo an odd prime power p^a.
inline uint64_t smallest_primitive_root(uint64_t pp, uint64_t p) {
    const uint64_t order = pp - pp / p; // phi(p^a)
    const auto fac = arith::factorize(order);
    for (uint64_t g = 2; g < pp; ++g) {
        if (std::gcd(g, pp) != 1) continue;
        bool primitive = true;
        for (const auto& [q, e] : fac.parts) {
            (void)e;
            if (arith::powmod(g, order / q, pp) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return g;
    }
    throw domain_error("smallest_primitive_root: none found");
}

} // namespace detail

// The unit group modulo one prime power, with generators, their orders and a
// full discrete-log table (dlog[n * g + j] = exponent of generator j for the
// residue n; entries for non-coprime n are kNoDlog).
struct GroupComponent {
    uint64_t prime = 0;
    uint64_t prime_power = 0;
    std::vector<uint64_t> generators;
    std::vector<uint64_t> orders;
    std::vector<std::uint32_t> dlog;

    std::size_t gen_count() const { return generators.size(); }
};

// Canonical generator presentation of (Z/q)^*: one component per prime power.
// For odd p^a a single smallest primitive root; for 4 the class of -1; for
// 2^e (e >= 3) the pair (-1, 5) with orders (2, 2^{e-2}).
struct CharacterGroup {
    uint64_t modulus = 1;
    uint64_t order = 1; // phi(q)
    std::vector<GroupComponent> components;

    std::size_t total_generators() const {
        std::size_t n = 0;
        for (const auto& c : components) n += c.gen_count();
        return n;
    }

    // lcm of all generator orders (1 for q <= 2).
    uint64_t exponent() const {
        uint64_t l = 1;
        for (const auto& c : components)
            for (uint64_t d : c.orders) l = std::lcm(l, d);
        return l;
    }
};

using GroupPtr = std::shared_ptr<const CharacterGroup>;

inline GroupPtr group_for(uint64_t q) {
    if (q == 0) throw domain_error("group_for: modulus must be positive");
    if (q > 1000000ull) throw budget_error("group_for: modulus exceeds 1e6 table budget");
    auto group = std::make_shared<CharacterGroup>();
    group->modulus = q;
    group->order = (q == 1) ? 1 : arith::phi(q);
    if (q == 1) return group;
    for (const auto& [p, e] : arith::factorize(q).parts) {
        GroupComponent comp;
        comp.prime = p;
        comp.prime_power = 1;
        for (unsigned i = 0; i < e; ++i) comp.prime_power *= p;
        const uint64_t pp = comp.prime_power;
        comp.dlog.assign(pp == 1 ? 1 : pp, detail::kNoDlog);
        if (p == 2) {
            if (e == 1) {
                // (Z/2)^* is trivial; no generators, dlog of 1 is the empty tuple.
            } else if (e == 2) {
                comp.generators = {3}; // the class of -1 mod 4
                comp.orders = {2};
                comp.dlog[1] = 0;
                comp.dlog[3] = 1;
            } else {
                comp.generators = {pp - 1, 5};
                comp.orders = {2, pp / 4};
                uint64_t v = 1;
                for (uint64_t g2 = 0; g2 < pp / 4; ++g2) {
                    comp.dlog[v] = static_cast<std::uint32_t>(2 * g2);     // (nu, gamma) packed below
                    comp.dlog[pp - v] = static_cast<std::uint32_t>(2 * g2 + 1);
                    v = (v * 5) % pp;
                }
                // Packing: entry = 2*gamma + nu. Unpacked on evaluation.
            }
        } else {
            const uint64_t g = detail::smallest_primitive_root(pp, p);
            comp.generators = {g};
            comp.orders = {pp - pp / p};
            uint64_t v = 1;
            for (uint64_t k = 0; k < comp.orders[0]; ++k) {
                comp.dlog[v] = static_cast<std::uint32_t>(k);
                v = (v * g) % pp;
            }
        }
        group->components.push_back(std::move(comp));
    }
    return group;
}

// Retrieves the generator exponents of n within one component; returns false
// when n is not coprime to the component's prime power.
inline bool component_dlog(const GroupComponent& comp, uint64_t n, uint64_t out[2]) {
    const uint64_t r = n % comp.prime_power;
    if (comp.gen_count() == 0) return (r % 2) == 1 || comp.prime_power == 1;
    const std::uint32_t d = comp.dlog[r];
    if (d == detail::kNoDlog) return false;
    if (comp.gen_count() == 1) {
        out[0] = d;
    } else {
        out[0] = d & 1;  // exponent of -1
        out[1] = d >> 1; // exponent of 5
    }
    return true;
}

// A Dirichlet character mod q encoded by exponents on the canonical
// generators; chi(n) = exp(2 pi i * sum exponents*dlog(n)/orders).
struct DirichletCharacter {
    GroupPtr group;
    std::vector<std::uint32_t> exponents;

    uint64_t modulus() const { return group->modulus; }
};

inline uint64_t character_count(uint64_t q) { return q == 1 ? 1 : arith::phi(q); }

// All phi(q) characters mod q; index 0 is the principal character, and the
// index is the mixed-radix rank of the exponent vector (last generator fastest).
inline std::vector<DirichletCharacter> enumerate(uint64_t q) {
    auto group = group_for(q);
    std::vector<DirichletCharacter> out;
    out.reserve(group->order);
    const std::size_t n_gen = group->total_generators();
    std::vector<uint64_t> radix;
    for (const auto& c : group->components)
        for (uint64_t d : c.orders) radix.push_back(d);
    std::vector<std::uint32_t> exps(n_gen, 0);
    while (true) {
        out.push_back(DirichletCharacter{group, exps});
        std::size_t i = n_gen;
        while (i > 0) {
            --i;
            if (++exps[i] < radix[i]) break;
            exps[i] = 0;
            if (i == 0) return out;
        }
        if (n_gen == 0) return out;
    }
}

inline DirichletCharacter character_at(uint64_t q, uint64_t index) {
    auto group = group_for(q);
    if (index >= group->order) throw domain_error("character_at: index out of range");
    std::vector<uint64_t> radix;
    for (const auto& c : group->components)
        for (uint64_t d : c.orders) radix.push_back(d);
    std::vector<std::uint32_t> exps(radix.size(), 0);
    for (std::size_t i = radix.size(); i-- > 0;) {
        exps[i] = static_cast<std::uint32_t>(index % radix[i]);
        index /= radix[i];
    }
    return DirichletCharacter{group, exps};
}

inline uint64_t character_index(const DirichletCharacter& chi) {
    uint64_t idx = 0;
    std::size_t pos = 0;
    for (const auto& c : chi.group->components)
        for (uint64_t d : c.orders) {
            idx = idx * d + chi.exponents[pos];
            ++pos;
        }
    return idx;
}

inline CharValue eval(const DirichletCharacter& chi, std::int64_t n) {
    const uint64_t q = chi.group->modulus;
    const uint64_t r = arith::mod_reduce(n, q);
    if (q == 1) return CharValue::one();
    if (std::gcd(r, q) != 1) return CharValue::zero();
    CharValue v = CharValue::one();
    std::size_t pos = 0;
    for (const auto& comp : chi.group->components) {
        uint64_t d[2] = {0, 0};
        component_dlog(comp, r, d);
        for (std::size_t j = 0; j < comp.gen_count(); ++j) {
            const uint64_t e = chi.exponents[pos + j];
            if (e != 0 && d[j] != 0)
                v = v * CharValue::root(e * d[j] % comp.orders[j], comp.orders[j]);
        }
        pos += comp.gen_count();
    }
    return v;
}

inline bool is_principal(const DirichletCharacter& chi) {
    for (auto e : chi.exponents)
        if (e != 0) return false;
    return true;
}

// Real <=> every value lies in {-1, 0, 1} <=> 2*e == 0 (mod order) per generator.
inline bool is_real(const DirichletCharacter& chi) {
    std::size_t pos = 0;
    for (const auto& comp : chi.group->components)
        for (std::size_t j = 0; j < comp.gen_count(); ++j, ++pos)
            if ((2 * static_cast<uint64_t>(chi.exponents[pos])) % comp.orders[j] != 0)
                return false;
    return true;
}

namespace detail {

// chi restricted to (n,q)=1 has period d iff chi(n) = 1 for every n == 1
// (mod d) with (n,q) = 1.
inline bool has_restricted_period(const DirichletCharacter& chi, uint64_t d) {
    const uint64_t q = chi.group->modulus;
    for (uint64_t n = 1 + d; n <= q; n += d) {
        if (std::gcd(n % q == 0 ? q : n % q, q) != 1) continue;
        if (!eval(chi, static_cast<std::int64_t>(n)).is_one()) return false;
    }
    return true;
}

} // namespace detail

// Least positive d (necessarily a divisor of q) that is a restricted period.
inline uint64_t conductor(const DirichletCharacter& chi) {
    const uint64_t q = chi.group->modulus;
    std::vector<uint64_t> divisors;
    for (uint64_t d = 1; d * d <= q; ++d) {
        if (q % d != 0) continue;
        divisors.push_back(d);
        if (d != q / d) divisors.push_back(q / d);
    }
    std::sort(divisors.begin(), divisors.end());
    for (uint64_t d : divisors)
        if (detail::has_restricted_period(chi, d)) return d;
    return q;
}

inline bool is_primitive(const DirichletCharacter& chi) {
    const uint64_t q = chi.group->modulus;
    if (q == 1) return true;
    for (const auto& [p, e] : arith::factorize(q).parts) {
        (void)e;
        if (detail::has_restricted_period(chi, q / p)) return false;
    }
    return true;
}

// The unique primitive character mod conductor(chi) agreeing with chi on
// (n, q) = 1. Values on residues not coprime to q are recovered through the
// coprime shift n -> n + t*c(chi).
inline std::pair<uint64_t, DirichletCharacter> induce_primitive(const DirichletCharacter& chi) {
    const uint64_t q = chi.group->modulus;
    const uint64_t cond = conductor(chi);
    if (cond == q) return {q, chi};
    auto group1 = group_for(cond);
    std::vector<std::uint32_t> exps;
    exps.reserve(group1->total_generators());
    for (const auto& comp : group1->components) {
        for (std::size_t j = 0; j < comp.gen_count(); ++j) {
            const uint64_t g = comp.generators[j];
            // The canonical generator as an element of (Z/cond)^*: equal to g
            // in its own component and 1 in every other one.
            uint64_t unit = g;
            if (cond != comp.prime_power) {
                arith::CongruenceSystem sys;
                sys.equations.emplace_back(static_cast<std::int64_t>(g), comp.prime_power);
                sys.equations.emplace_back(1, cond / comp.prime_power);
                unit = arith::crt_solve(sys).first;
            }
            // Lift to a residue coprime to q so chi can be evaluated.
            uint64_t lifted = unit;
            if (std::gcd(lifted, q) != 1) {
                const uint64_t t =
                    arith::coprime_shift(static_cast<std::int64_t>(unit), cond, q);
                lifted = unit + t * cond;
            }
            const CharValue v = eval(chi, static_cast<std::int64_t>(lifted));
            const uint64_t d = comp.orders[j];
            if (v.is_zero || d % v.den != 0)
                throw domain_error("induce_primitive: value order does not divide generator order");
            exps.push_back(static_cast<std::uint32_t>(v.num * (d / v.den) % d));
        }
    }
    return {cond, DirichletCharacter{group1, std::move(exps)}};
}

// Unique factorization of chi into characters modulo the prime powers of q,
// built from chi(n*A_i + sum_{j != i} A_j) with the A_i the CRT idempotents.
inline std::vector<DirichletCharacter> decompose(const DirichletCharacter& chi) {
    const uint64_t q = chi.group->modulus;
    std::vector<DirichletCharacter> out;
    if (q == 1) return out;
    const auto& comps = chi.group->components;
    const std::size_t r = comps.size();
    std::vector<uint64_t> big_a(r);
    for (std::size_t i = 0; i < r; ++i) {
        arith::CongruenceSystem sys;
        for (std::size_t j = 0; j < r; ++j)
            sys.equations.emplace_back(j == i ? 1 : 0, comps[j].prime_power);
        big_a[i] = arith::crt_solve(sys).first;
    }
    uint64_t sum_a = 0;
    for (uint64_t v : big_a) sum_a = (sum_a + v) % q;
    for (std::size_t i = 0; i < r; ++i) {
        const uint64_t pp = comps[i].prime_power;
        auto group_i = group_for(pp);
        const uint64_t rest = (sum_a + q - big_a[i]) % q;
        std::vector<std::uint32_t> exps;
        for (const auto& comp : group_i->components) {
            for (std::size_t j = 0; j < comp.gen_count(); ++j) {
                const uint64_t g = comp.generators[j];
                const uint64_t arg = (arith::mulmod(g % q, big_a[i], q) + rest) % q;
                const CharValue v = eval(chi, static_cast<std::int64_t>(arg));
                if (v.is_zero)
                    throw domain_error("decompose: unexpected zero at generator argument");
                const uint64_t d = comp.orders[j];
                if (d % v.den != 0)
                    throw domain_error("decompose: value order does not divide generator order");
                exps.push_back(static_cast<std::uint32_t>(v.num * (d / v.den) % d));
            }
        }
        out.push_back(DirichletCharacter{group_i, std::move(exps)});
    }
    return out;
}

// Pointwise equality on a full period; guards the canonical-exponent equality.
inline bool equal_pointwise(const DirichletCharacter& a, const DirichletCharacter& b) {
    const uint64_t q = std::lcm(a.group->modulus, b.group->modulus);
    for (uint64_t n = 0; n < q; ++n)
        if (eval(a, static_cast<std::int64_t>(n)) != eval(b, static_cast<std::int64_t>(n)))
            return false;
    return true;
}

inline bool equal_canonical(const DirichletCharacter& a, const DirichletCharacter& b) {
    return a.group->modulus == b.group->modulus && a.exponents == b.exponents;
}

// ---- psi sums over characters ----------------------------------------------

// psi(u, chi) = sum_{n <= u} Lambda(n) chi(n), compensated complex summation.
inline std::complex<double> psi_chi(uint64_t u, const DirichletCharacter& chi,
                                    const sieve::SieveConfig& cfg = {}) {
    if (u > 100000000ull) throw budget_error("psi_chi: u exceeds 1e8 budget");
    sieve::detail::Kahan re, im;
    const uint64_t q = chi.group->modulus;
    sieve::for_each_prime(0, u + 1, cfg, [&](uint64_t p) {
        const double lp = std::log(static_cast<double>(p));
        uint64_t pk = p;
        while (true) {
            const CharValue v = eval(chi, static_cast<std::int64_t>(pk % q));
            if (!v.is_zero) {
                const auto z = v.to_complex();
                re.add(lp * z.real());
                im.add(lp * z.imag());
            }
            if (pk > u / p) break;
            pk *= p;
        }
    });
    return {re.sum, im.sum};
}

// psi'(u, chi): psi(u, chi) minus u exactly when chi is principal.
inline std::complex<double> psi_prime_chi(uint64_t u, const DirichletCharacter& chi,
                                          const sieve::SieveConfig& cfg = {}) {
    auto v = psi_chi(u, chi, cfg);
    if (is_principal(chi)) v -= std::complex<double>(static_cast<double>(u), 0.0);
    return v;
}

// psi'(u, chi) for every character mod q at each checkpoint, in one pass over
// the prime powers. result[char_index][checkpoint_index].
inline std::vector<std::vector<std::complex<double>>>
psi_prime_profile(uint64_t q, const std::vector<uint64_t>& checkpoints,
                  const sieve::SieveConfig& cfg = {}) {
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] < checkpoints[i - 1])
            throw domain_error("psi_prime_profile: checkpoints must be ascending");
    const uint64_t u_max = checkpoints.empty() ? 0 : checkpoints.back();
    if (u_max > 100000000ull) throw budget_error("psi_prime_profile: u exceeds 1e8 budget");
    auto chars = enumerate(q);
    const auto group = chars.front().group;
    const uint64_t lambda = group->exponent();

    // Roots-of-unity table indexed by turn numerator over the group exponent.
    std::vector<std::complex<double>> roots(lambda);
    for (uint64_t k = 0; k < lambda; ++k) {
        const double t = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(lambda);
        roots[k] = {std::cos(t), std::sin(t)};
    }

    std::vector<std::pair<uint64_t, double>> entries; // (p^k, ln p)
    sieve::for_each_prime(0, u_max + 1, cfg, [&](uint64_t p) {
        const double lp = std::log(static_cast<double>(p));
        uint64_t pk = p;
        while (true) {
            entries.emplace_back(pk, lp);
            if (pk > u_max / p) break;
            pk *= p;
        }
    });
    std::sort(entries.begin(), entries.end());

    std::vector<sieve::detail::Kahan> re(chars.size()), im(chars.size());
    std::vector<std::vector<std::complex<double>>> result(
        chars.size(), std::vector<std::complex<double>>(checkpoints.size()));

    // Per-entry: weights w_j = dlog_j * (lambda / order_j); the character with
    // exponent vector e has turn index sum e_j w_j (mod lambda).
    const std::size_t n_gen = group->total_generators();
    std::vector<uint64_t> weights(n_gen);
    std::vector<uint64_t> orders;
    for (const auto& c : group->components)
        for (uint64_t d : c.orders) orders.push_back(d);

    std::size_t next_checkpoint = 0;
    auto snapshot = [&](std::size_t ci) {
        for (std::size_t k = 0; k < chars.size(); ++k)
            result[k][ci] = {re[k].sum, im[k].sum};
    };

    for (const auto& [value, lp] : entries) {
        while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] < value) {
            snapshot(next_checkpoint);
            ++next_checkpoint;
        }
        const uint64_t r = value % std::max<uint64_t>(q, 1);
        if (q > 1 && std::gcd(r, q) != 1) continue;
        bool coprime = true;
        std::size_t pos = 0;
        for (const auto& comp : group->components) {
            uint64_t d[2] = {0, 0};
            if (!component_dlog(comp, r, d)) {
                coprime = false;
                break;
            }
            for (std::size_t j = 0; j < comp.gen_count(); ++j, ++pos)
                weights[pos] = d[j] * (lambda / orders[pos]) % lambda;
        }
        if (!coprime) continue;
        for (std::size_t k = 0; k < chars.size(); ++k) {
            uint64_t idx = 0;
            for (std::size_t j = 0; j < n_gen; ++j)
                idx += chars[k].exponents[j] * weights[j] % lambda;
            idx %= lambda;
            const auto& z = roots[idx];
            re[k].add(lp * z.real());
            im[k].add(lp * z.imag());
        }
    }
    while (next_checkpoint < checkpoints.size()) {
        snapshot(next_checkpoint);
        ++next_checkpoint;
    }

    // Principal-character correction: subtract u exactly.
    for (std::size_t ci = 0; ci < checkpoints.size(); ++ci)
        result[0][ci] -= std::complex<double>(static_cast<double>(checkpoints[ci]), 0.0);
    return result;
}

// Reconstructs psi(u; Q, W) through the orthogonality identity
// psi(u;Q,W) = u/phi(Q) + (1/phi(Q)) sum_chi conj(chi(W)) psi'(u, chi).
inline double psi_ap_via_characters(uint64_t u, uint64_t big_q, std::int64_t w,
                                    const sieve::SieveConfig& cfg = {}) {
    if (big_q < 2) throw domain_error("psi_ap_via_characters: Q must exceed 1");
    if (u < 2) throw domain_error("psi_ap_via_characters: u must be >= 2");
    const uint64_t wr = arith::mod_reduce(w, big_q);
    if (std::gcd(wr, big_q) != 1) throw domain_error("psi_ap_via_characters: (W, Q) != 1");
    auto chars = enumerate(big_q);
    auto profile = psi_prime_profile(big_q, {u}, cfg);
    const double phi_q = static_cast<double>(arith::phi(big_q));
    std::complex<double> total{0.0, 0.0};
    for (std::size_t k = 0; k < chars.size(); ++k) {
        const CharValue cw = eval(chars[k], static_cast<std::int64_t>(wr));
        total += cw.conj().to_complex() * profile[k][0];
    }
    return static_cast<double>(u) / phi_q + total.real() / phi_q;
}

// Moduli up to the limit admitting a real primitive character, by exhaustive
// classification of the real characters.
inline std::vector<uint64_t> real_primitive_moduli_scan(uint64_t limit) {
    if (limit > 10000ull) throw budget_error("real_primitive_moduli_scan: limit exceeds 1e4");
    std::vector<uint64_t> out;
    for (uint64_t q = 1; q <= limit; ++q) {
        bool found = false;
        for (const auto& chi : enumerate(q)) {
            if (!is_real(chi)) continue;
            if (is_primitive(chi)) {
                found = true;
                break;
            }
        }
        if (found) out.push_back(q);
    }
    return out;
}

// CSV table of every character mod q: header then rows chi,n,value where value
// is a turn fraction ("num/den") or the literal "zero".
inline void write_char_table_csv(std::ostream& os, uint64_t q) {
    os << "chi,n,value\n";
    const auto chars = enumerate(q);
    for (std::size_t k = 0; k < chars.size(); ++k)
        for (uint64_t n = 0; n < q; ++n)
            os << k << ',' << n << ',' << eval(chars[k], static_cast<std::int64_t>(n)).str()
               << '\n';
}

} // namespace pcl::chars
