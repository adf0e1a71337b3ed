#pragma once
// Money as integer cents, plus an exact rational type for expectations.

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rankdep {

/// Dollar amounts stored as a signed count of cents.
class Cents {
public:
    constexpr Cents() = default;
    constexpr explicit Cents(std::int64_t v) : value_{v} {}

    static Cents from_dollars(double d) {
        return Cents{static_cast<std::int64_t>(std::llround(d * 100.0))};
    }

    /// Parses "16.56", "-0.69", "20", "$3.5". At most two decimals.
    static Cents parse(std::string_view text) {
        std::string_view s = text;
        bool neg = false;
        if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
            neg = s.front() == '-';
            s.remove_prefix(1);
        }
        if (!s.empty() && s.front() == '$') s.remove_prefix(1);
        if (s.empty()) throw std::invalid_argument("empty money value");
        std::int64_t whole = 0, frac = 0;
        int frac_digits = 0;
        bool seen_dot = false, any_digit = false;
        for (char c : s) {
            if (c == '.') {
                if (seen_dot) throw std::invalid_argument("bad money value: " + std::string(text));
                seen_dot = true;
            } else if (c >= '0' && c <= '9') {
                any_digit = true;
                if (seen_dot) {
                    if (++frac_digits > 2)
                        throw std::invalid_argument("more than two decimals: " + std::string(text));
                    frac = frac * 10 + (c - '0');
                } else {
                    whole = whole * 10 + (c - '0');
                }
            } else {
                throw std::invalid_argument("bad money value: " + std::string(text));
            }
        }
        if (!any_digit) throw std::invalid_argument("bad money value: " + std::string(text));
        if (frac_digits == 1) frac *= 10;
        const std::int64_t v = whole * 100 + frac;
        return Cents{neg ? -v : v};
    }

    constexpr std::int64_t value() const { return value_; }
    constexpr double dollars() const { return static_cast<double>(value_) / 100.0; }

    std::string str() const {
        const std::int64_t a = value_ < 0 ? -value_ : value_;
        std::string out = value_ < 0 ? "-" : "";
        out += std::to_string(a / 100);
        out += '.';
        const auto c = a % 100;
        if (c < 10) out += '0';
        out += std::to_string(c);
        return out;
    }

    constexpr auto operator<=>(const Cents&) const = default;
    constexpr Cents operator+(Cents o) const { return Cents{value_ + o.value_}; }
    constexpr Cents operator-(Cents o) const { return Cents{value_ - o.value_}; }
    constexpr Cents operator-() const { return Cents{-value_}; }
    constexpr Cents& operator+=(Cents o) { value_ += o.value_; return *this; }
    constexpr Cents& operator-=(Cents o) { value_ -= o.value_; return *this; }
    constexpr Cents operator*(std::int64_t k) const { return Cents{value_ * k}; }

private:
    std::int64_t value_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Cents c) { return os << c.str(); }

/// Exact fraction with 64-bit parts and 128-bit intermediates. Always reduced, den > 0.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_{n} {}  // NOLINT: implicit from integers
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    static Rational of(Cents c) { return Rational{c.value()}; }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_integer() const { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const std::int64_t g = std::gcd(a.den_, b.den_);
        const __int128 n = static_cast<__int128>(a.num_) * (b.den_ / g) +
                           static_cast<__int128>(b.num_) * (a.den_ / g);
        const __int128 d = static_cast<__int128>(a.den_ / g) * b.den_;
        return reduce(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return reduce(static_cast<__int128>(a.num_) * b.num_,
                      static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        __int128 n = static_cast<__int128>(a.num_) * b.den_;
        __int128 d = static_cast<__int128>(a.den_) * b.num_;
        if (d < 0) { n = -n; d = -d; }
        return reduce(n, d);
    }
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const __int128 l = static_cast<__int128>(a.num_) * b.den_;
        const __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l <=> r;
    }

    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        while (b != 0) { const __int128 t = a % b; a = b; b = t < 0 ? -t : t; }
        return a;
    }
    static Rational reduce(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        const __int128 g = gcd128(n, d);
        if (g > 1) { n /= g; d /= g; }
        constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
        if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }
    void assign(std::int64_t n, std::int64_t d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        *this = reduce(n, d);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace rankdep
