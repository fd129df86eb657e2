#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace idla {

/// Exact rational with 64-bit numerator/denominator, always normalized
/// (den > 0, gcd = 1). Intermediates use 128-bit; overflow past 64 bits
/// after reduction throws.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den) { assign(num, den); }
    Rational(std::int64_t num) : num_(num), den_(1) {} // NOLINT(google-explicit-constructor)

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        using i128 = __int128;
        return from128(static_cast<i128>(a.num_) * b.den_ +
                           static_cast<i128>(b.num_) * a.den_,
                       static_cast<i128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        using i128 = __int128;
        return from128(static_cast<i128>(a.num_) * b.den_ -
                           static_cast<i128>(b.num_) * a.den_,
                       static_cast<i128>(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        using i128 = __int128;
        return from128(static_cast<i128>(a.num_) * b.num_,
                       static_cast<i128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        using i128 = __int128;
        return from128(static_cast<i128>(a.num_) * b.den_,
                       static_cast<i128>(a.den_) * b.num_);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        using i128 = __int128;
        return static_cast<i128>(a.num_) * b.den_ <
               static_cast<i128>(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) {
        return a == b || a < b;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "a/b", an integer, or a decimal like "0.75" (converted exactly).
    static Rational parse(const std::string& text);

private:
    void assign(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        num_ = g ? num / g : num;
        den_ = g ? den / g : den;
    }

    static Rational from128(__int128 num, __int128 den) {
        if (den < 0) { num = -num; den = -den; }
        __int128 a = num < 0 ? -num : num;
        __int128 b = den;
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        if (a != 0) { num /= a; den /= a; }
        constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
        if (num > lim || num < -lim || den > lim)
            throw std::overflow_error("Rational: 64-bit overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace idla
