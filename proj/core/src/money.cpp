#include "ragloop/money.hpp"

#include "ragloop/error.hpp"

#include <cctype>
#include <cstdlib>

namespace ragloop {

namespace {
constexpr std::int64_t kScale = 1'000'000'000; // nanodollars per dollar
constexpr int kMaxFractionDigits = 9;
} // namespace

Money Money::parse(std::string_view text) {
    std::string_view rest = text;
    bool negative = false;
    if (!rest.empty() && (rest.front() == '-' || rest.front() == '+')) {
        negative = rest.front() == '-';
        rest.remove_prefix(1);
    }
    if (rest.empty()) {
        throw ConfigError("invalid money value: '" + std::string(text) + "'");
    }

    std::int64_t whole = 0;
    std::size_t i = 0;
    bool any_digit = false;
    for (; i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i])); ++i) {
        whole = whole * 10 + (rest[i] - '0');
        any_digit = true;
    }

    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < rest.size() && rest[i] == '.') {
        ++i;
        for (; i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i])); ++i) {
            if (++frac_digits > kMaxFractionDigits) {
                throw ConfigError("money value '" + std::string(text) +
                                  "' has more than 9 decimal places");
            }
            frac = frac * 10 + (rest[i] - '0');
            any_digit = true;
        }
    }
    if (!any_digit || i != rest.size()) {
        throw ConfigError("invalid money value: '" + std::string(text) + "'");
    }

    for (int d = frac_digits; d < kMaxFractionDigits; ++d) {
        frac *= 10;
    }
    std::int64_t nanos = whole * kScale + frac;
    return Money(negative ? -nanos : nanos);
}

std::string Money::str() const {
    std::int64_t n = nanos_;
    std::string sign;
    if (n < 0) {
        sign = "-";
        n = -n;
    }
    std::int64_t whole = n / kScale;
    std::int64_t frac = n % kScale;
    std::string out = sign + std::to_string(whole);
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(digits.begin(), kMaxFractionDigits - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') {
            digits.pop_back();
        }
        out += "." + digits;
    }
    return out;
}

} // namespace ragloop
