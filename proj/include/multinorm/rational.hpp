#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace multinorm {

// Exact rational arithmetic over 64-bit integers with 128-bit intermediates.
// All lattice logic (cone membership, maximality, dominance classification)
// runs through this type; doubles appear only when evaluating norms of real
// points.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) { assign(n, d); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    double to_double() const { return double(num_) / double(den_); }

    // Largest integer <= value.
    long long floor() const {
        long long q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }
    long long ceil() const { return -(-(*this)).floor(); }

    Rational operator-() const { return Rational(-num_, den_, unchecked{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return make((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    static Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
    static Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    struct unchecked {};
    Rational(long long n, long long d, unchecked) : num_(n), den_(d) {}

    void assign(long long n, long long d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        num_ = n;
        den_ = d;
    }

    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        const __int128 lo = -((__int128)1 << 62), hi = (__int128)1 << 62;
        if (n <= lo || n >= hi || d >= hi)
            throw std::overflow_error("rational overflow");
        return Rational((long long)n, (long long)d, unchecked{});
    }

    long long num_;
    long long den_;
};

using RationalVec = std::vector<Rational>;

inline Rational rational_abs(const Rational& a) { return a < Rational(0) ? -a : a; }

// max_i |a_i - b_i| as an exact rational (sup distance on the scale lattice).
inline Rational sup_distance(const RationalVec& a, const RationalVec& b) {
    Rational m(0);
    for (std::size_t i = 0; i < a.size(); ++i) m = Rational::max(m, rational_abs(a[i] - b[i]));
    return m;
}

}  // namespace multinorm
