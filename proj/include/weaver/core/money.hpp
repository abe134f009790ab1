#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace weaver {

/// Exact fixed-point dollar amount with nine fractional digits.
///
/// Every ledger value, price, and budget is a Money. Arithmetic is integer
/// arithmetic on nano-dollars, so sums and comparisons are bit-exact on every
/// platform. Conversions from binary floating point exist only for display
/// ratios and for reading JSON numbers.
class Money {
public:
    static constexpr std::int64_t kNanosPerDollar = 1'000'000'000;

    constexpr Money() = default;

    static constexpr Money from_nanos(std::int64_t nanos) { return Money(nanos); }
    static constexpr Money from_micros(std::int64_t micros) { return Money(micros * 1000); }
    static constexpr Money dollars(std::int64_t whole) { return Money(whole * kNanosPerDollar); }

    // Parses "0.0008", "-1.5", "12". Rejects more than nine significant
    // fractional digits instead of rounding them away.
    static Money parse(std::string_view text);

    // Nearest nano-dollar; used for JSON numbers such as 0.003.
    static Money from_double(double dollars);

    constexpr std::int64_t nanos() const { return nanos_; }
    double to_double() const { return static_cast<double>(nanos_) / kNanosPerDollar; }

    // Number of fractional decimal digits needed to print this value exactly.
    int fractional_digits() const;

    // Exact rendering with at least four fractional digits and trailing zeros
    // trimmed beyond that: 0.018 -> "0.0180", 8e-7 -> "0.0000008".
    std::string str() const;

    constexpr bool is_zero() const { return nanos_ == 0; }
    constexpr bool is_negative() const { return nanos_ < 0; }
    constexpr bool is_positive() const { return nanos_ > 0; }

    constexpr Money operator-() const { return Money(-nanos_); }
    constexpr Money& operator+=(Money o) { nanos_ += o.nanos_; return *this; }
    constexpr Money& operator-=(Money o) { nanos_ -= o.nanos_; return *this; }
    friend constexpr Money operator+(Money a, Money b) { return a += b; }
    friend constexpr Money operator-(Money a, Money b) { return a -= b; }
    friend constexpr Money operator*(Money a, std::int64_t k) { return Money(a.nanos_ * k); }
    friend constexpr Money operator*(std::int64_t k, Money a) { return Money(a.nanos_ * k); }

    friend constexpr auto operator<=>(Money, Money) = default;
    friend constexpr bool operator==(Money, Money) = default;

private:
    constexpr explicit Money(std::int64_t nanos) : nanos_(nanos) {}
    std::int64_t nanos_ = 0;
};

// Round-half-even quotient of an exact sum by a positive count.
Money divide_rounded(Money total, std::int64_t count);

}  // namespace weaver
