#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace credal {

using Rational = mpq_class;

/// Float mode uses doubles with tolerances; rational mode decides exactly.
enum class Mode { Float, Rational };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

/// Parses "p/q", an integer, or a decimal literal such as "0.35" exactly.
Rational parse_rational(std::string_view text);

/// Exact value of a finite double (every finite double is a dyadic rational).
Rational to_rational(double value);

/// Canonical "num/den" form; integers are written as "n/1".
std::string to_fraction_string(const Rational& value);

std::vector<Rational> to_rationals(const std::vector<double>& values);
std::vector<double> to_doubles(const std::vector<Rational>& values);

}  // namespace credal
