#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace sg {

/// Exact rational number. Always kept in canonical form (coprime, positive denominator).
using Rational = mpq_class;

using ExactVector = std::vector<Rational>;

/// Parses "3/4", "2", or a decimal such as "0.125" (at most 18 fractional digits,
/// converted exactly). Returns nothing on any other shape, including negative numbers.
std::optional<Rational> parse_rational(const std::string& text);

/// Canonical text form: "num/den", or just "num" when the denominator is 1.
std::string rational_to_string(const Rational& q);

/// Nearest binary64. Correctly rounded whenever numerator and denominator fit in 53 bits,
/// which covers every probability this project produces; deterministic regardless.
double rational_to_double(const Rational& q);

/// Exact rational value of a binary64 (no rounding; doubles are dyadic rationals).
Rational rational_from_double(double x);

}  // namespace sg
