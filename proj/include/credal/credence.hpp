#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "credal/rational.hpp"

namespace credal {

/// Generator rules for credences on countable families. The argument of a
/// rule is the proposition id i = index + 1.
///   Zero                 c_i = 0
///   Constant             c_i = value
///   Geometric            c_i = scale * ratio^i
///   InvSqrt              c_i = 1 / sqrt(i + 1)
///   ComplementGeometric  c_i = 1 - scale * ratio^i
///   List                 c_i = values[i-1] for listed ids, tail afterwards
enum class RuleKind { Zero, Constant, Geometric, InvSqrt, ComplementGeometric, List };

std::string_view to_string(RuleKind kind);
RuleKind parse_rule_kind(std::string_view name);

/// How |c_i - target| behaves for large i, for series comparison tests.
enum class TailClass {
  FiniteSupport,  // eventually exactly zero
  Geometric,      // at most scale * ratio^i
  HarmonicLike,   // squared deviation is 1/(i+1)
  NonVanishing,   // does not tend to zero
  Unknown,
};

struct TailProfile {
  TailClass kind = TailClass::Unknown;
  std::size_t support = 0;  // FiniteSupport: deviation is zero for index >= support
  double scale = 0.0;       // Geometric
  double ratio = 0.0;
};

struct CredenceRule {
  RuleKind kind = RuleKind::Zero;
  Rational value;  // Constant
  Rational scale = 1;
  Rational ratio = Rational(1, 2);
  std::vector<Rational> values;  // List
  Rational tail;                 // List

  static CredenceRule zero();
  static CredenceRule constant(Rational v);
  static CredenceRule geometric(Rational scale, Rational ratio);
  static CredenceRule inv_sqrt();
  static CredenceRule complement_geometric(Rational scale, Rational ratio);
  static CredenceRule list(std::vector<Rational> values, Rational tail = 0);

  double at(std::size_t index) const;
  /// Exact value when the rule is rational-valued at this index.
  std::optional<Rational> exact_at(std::size_t index) const;
  Rational exact_limit() const;
  double limit() const { return exact_limit().get_d(); }
  /// +1 nondecreasing, -1 nonincreasing, 0 constant, 2 neither.
  int monotonicity() const;
  /// Sum over all ids when it is known in closed form.
  std::optional<Rational> analytic_sum() const;
  TailProfile tail_profile(double target) const;
  /// Throws invalid-credence if some value falls outside [0,1].
  void validate() const;
};

/// A credence function: a finite vector, or a rule total on the naturals.
class Credence {
 public:
  static Credence finite(std::vector<double> values);
  static Credence finite_exact(std::vector<Rational> values);
  /// `declared_limit`: nullopt keeps the rule's analytic limit; an explicit
  /// null (has_value() && !**) requests numeric limit detection.
  static Credence from_rule(CredenceRule rule,
                            std::optional<std::optional<double>> declared_limit = std::nullopt);

  bool is_rule() const { return rule_.has_value(); }
  std::size_t size() const { return exact_.size(); }
  const std::optional<CredenceRule>& rule() const { return rule_; }

  double at(std::size_t index) const;
  Rational exact_at(std::size_t index) const;
  std::vector<double> prefix(std::size_t count) const;
  std::vector<Rational> exact_prefix(std::size_t count) const;
  const std::vector<double>& values() const { return values_; }
  const std::vector<Rational>& exact_values() const { return exact_; }

  /// The credence as a rule; a finite vector becomes a List with tail 0.
  CredenceRule as_rule() const;

  /// Limit of c_i: declared, analytic, or detected from partial values at
  /// K, 2K, 4K. nullopt when undetermined.
  std::optional<double> limit(std::size_t truncation) const;
  /// Exact limit when it is declared or analytic; nullopt if only numeric.
  std::optional<Rational> exact_limit() const;
  bool limit_declared_null() const { return limit_null_; }

  void validate() const;

 private:
  Credence() = default;

  std::vector<double> values_;
  std::vector<Rational> exact_;
  std::optional<CredenceRule> rule_;
  std::optional<double> declared_limit_;
  bool limit_null_ = false;
};

}  // namespace credal
