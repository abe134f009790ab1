#include "weaver/core/money.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "weaver/core/errors.hpp"

namespace weaver {

Money Money::parse(std::string_view text) {
    auto fail = [&] { return InvalidArgument("not a decimal dollar amount: '" + std::string(text) + "'"); };
    std::string_view s = text;
    while (!s.empty() && (s.front() == ' ' || s.front() == '$')) s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) throw fail();

    bool negative = false;
    if (s.front() == '-' || s.front() == '+') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (char c : s) {
        if (c == '.') {
            if (seen_point) throw fail();
            seen_point = true;
            continue;
        }
        if (c < '0' || c > '9') throw fail();
        any_digit = true;
        int d = c - '0';
        if (!seen_point) {
            if (whole > (std::numeric_limits<std::int64_t>::max() / kNanosPerDollar) / 10) throw fail();
            whole = whole * 10 + d;
        } else if (frac_digits < 9) {
            frac = frac * 10 + d;
            ++frac_digits;
        } else if (d != 0) {
            throw InvalidArgument("more than nine fractional digits: '" + std::string(text) + "'");
        }
    }
    if (!any_digit) throw fail();
    for (int i = frac_digits; i < 9; ++i) frac *= 10;
    std::int64_t nanos = whole * kNanosPerDollar + frac;
    return Money(negative ? -nanos : nanos);
}

Money Money::from_double(double dollars) {
    if (!std::isfinite(dollars)) throw InvalidArgument("non-finite dollar amount");
    return Money(static_cast<std::int64_t>(std::llround(dollars * static_cast<double>(kNanosPerDollar))));
}

int Money::fractional_digits() const {
    std::int64_t frac = std::llabs(nanos_ % kNanosPerDollar);
    if (frac == 0) return 0;
    int digits = 9;
    while (frac % 10 == 0) {
        frac /= 10;
        --digits;
    }
    return digits;
}

std::string Money::str() const {
    std::int64_t abs = std::llabs(nanos_);
    std::int64_t whole = abs / kNanosPerDollar;
    std::int64_t frac = abs % kNanosPerDollar;
    std::string digits = std::to_string(frac);
    digits.insert(0, 9 - digits.size(), '0');
    int keep = fractional_digits();
    if (keep < 4) keep = 4;
    digits.resize(static_cast<std::size_t>(keep));
    std::string out = nanos_ < 0 ? "-" : "";
    out += std::to_string(whole);
    out += '.';
    out += digits;
    return out;
}

Money divide_rounded(Money total, std::int64_t count) {
    if (count <= 0) throw InvalidArgument("divide_rounded: count must be positive");
    std::int64_t n = total.nanos();
    std::int64_t q = n / count;
    std::int64_t r = n % count;
    // Round half to even; C++ division truncates toward zero.
    std::int64_t twice = 2 * std::llabs(r);
    if (twice > count || (twice == count && (q % 2 != 0))) q += (n < 0 ? -1 : 1);
    return Money::from_nanos(q);
}

}  // namespace weaver
