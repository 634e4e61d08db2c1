#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace ultra {

using Rational = mpq_class;

/// Parse an exact literal: an integer or p/q. Decimal notation is refused.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& q);

bool is_integer(const Rational& q);

Rational floor_of(const Rational& q);
Rational ceil_of(const Rational& q);

/// q^n for a non-negative or negative exponent (q != 0 when n < 0).
Rational power(const Rational& q, std::int64_t n);

} // namespace ultra
