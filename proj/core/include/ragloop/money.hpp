#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ragloop {

/// Exact decimal dollar amount stored as integer nanodollars (1e-9 USD).
///
/// All ledger arithmetic happens in integers so token-cost totals are exact
/// and independent of summation order.
class Money {
public:
    Money() = default;

    static Money from_nanos(std::int64_t nanos) { return Money(nanos); }

    /// Parses a plain decimal string ("0.00527"). At most 9 fractional
    /// digits; anything else is a ConfigError.
    static Money parse(std::string_view text);

    std::int64_t nanos() const { return nanos_; }
    bool is_zero() const { return nanos_ == 0; }

    /// Decimal string with trailing zeros trimmed ("0.00527", "0", "-1.5").
    std::string str() const;

    double to_double() const { return static_cast<double>(nanos_) / 1e9; }

    Money operator+(Money rhs) const { return Money(nanos_ + rhs.nanos_); }
    Money operator-(Money rhs) const { return Money(nanos_ - rhs.nanos_); }
    Money& operator+=(Money rhs) {
        nanos_ += rhs.nanos_;
        return *this;
    }
    Money operator*(std::int64_t n) const { return Money(nanos_ * n); }

    friend bool operator==(Money a, Money b) { return a.nanos_ == b.nanos_; }
    friend bool operator!=(Money a, Money b) { return a.nanos_ != b.nanos_; }
    friend bool operator<(Money a, Money b) { return a.nanos_ < b.nanos_; }
    friend bool operator>(Money a, Money b) { return a.nanos_ > b.nanos_; }
    friend bool operator<=(Money a, Money b) { return a.nanos_ <= b.nanos_; }
    friend bool operator>=(Money a, Money b) { return a.nanos_ >= b.nanos_; }

private:
    explicit Money(std::int64_t nanos) : nanos_(nanos) {}

    std::int64_t nanos_ = 0;
};

} // namespace ragloop
