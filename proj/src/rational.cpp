#include "credal/rational.hpp"

#include <cctype>
#include <cmath>

#include "credal/error.hpp"

namespace credal {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

Rational parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) fail(ErrorCode::InvalidArgument, "empty number");
  if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) {
    fail(ErrorCode::InvalidArgument, "malformed rational literal '" + std::string(text) + "'");
  }
  mpz_class num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  Rational value(num, den);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::Rational ? "rational" : "float"; }

Mode parse_mode(std::string_view name) {
  if (name == "float") return Mode::Float;
  if (name == "rational") return Mode::Rational;
  fail(ErrorCode::InvalidArgument, "unknown mode '" + std::string(name) + "'");
}

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) fail(ErrorCode::InvalidArgument, "zero denominator in '" + std::string(text) + "'");
  Rational value = num / den;
  value.canonicalize();
  return value;
}

Rational to_rational(double value) {
  if (!std::isfinite(value)) fail(ErrorCode::InvalidArgument, "non-finite value has no rational form");
  return Rational(value);
}

std::string to_fraction_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::vector<Rational> to_rationals(const std::vector<double>& values) {
  std::vector<Rational> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(to_rational(v));
  return out;
}

std::vector<double> to_doubles(const std::vector<Rational>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.get_d());
  return out;
}

}  // namespace credal
