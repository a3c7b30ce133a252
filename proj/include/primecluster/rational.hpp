#pragma once

#include <cstdint>
#include <string>

#include "primecluster/errors.hpp"

namespace pcl {

using int128 = __int128;
using uint128 = unsigned __int128;

inline std::string to_string(uint128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    return s;
}

inline std::string to_string(int128 v) {
    if (v < 0) return "-" + to_string(static_cast<uint128>(-v));
    return to_string(static_cast<uint128>(v));
}

inline int128 gcd128(int128 a, int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Exact rational with 128-bit numerator/denominator, always reduced, den > 0.
// Intended for small exact identities; arguments are expected to stay well
// inside the 128-bit range and overflow is not detected.
struct Rational {
    int128 num = 0;
    int128 den = 1;

    Rational() = default;
    Rational(int128 n, int128 d) : num(n), den(d) { normalize(); }
    Rational(std::int64_t n) : num(n), den(1) {}

    void normalize() {
        if (den == 0) throw domain_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        int128 g = gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    Rational operator+(const Rational& o) const {
        return Rational(num * o.den + o.num * den, den * o.den);
    }
    Rational operator-(const Rational& o) const {
        return Rational(num * o.den - o.num * den, den * o.den);
    }
    Rational operator*(const Rational& o) const {
        return Rational(num * o.num, den * o.den);
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational& o) const { return !(*this == o); }

    double to_double() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    std::string str() const { return to_string(num) + "/" + to_string(den); }
};

} // namespace pcl
