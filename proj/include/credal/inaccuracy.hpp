#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "credal/coherence.hpp"
#include "credal/credence.hpp"
#include "credal/opinion_space.hpp"
#include "credal/rational.hpp"

namespace credal {

/// Nonnegative extended real: a finite value or +infinity. Infinity is a
/// separate state, never the result of overflow.
class ExtendedReal {
 public:
  static ExtendedReal finite(double v) { return ExtendedReal(v, false); }
  static ExtendedReal infinity() { return ExtendedReal(0.0, true); }

  bool is_infinite() const { return inf_; }
  double value() const { return value_; }  // meaningful only when finite

  ExtendedReal operator+(const ExtendedReal& o) const {
    if (inf_ || o.inf_) return infinity();
    return finite(value_ + o.value_);
  }
  /// Scaling by a positive factor.
  ExtendedReal scaled(double a) const { return inf_ ? infinity() : finite(a * value_); }

  /// -1, 0, +1; infinity equals infinity.
  friend int compare(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.inf_ || b.inf_) return static_cast<int>(a.inf_) - static_cast<int>(b.inf_);
    return (a.value_ > b.value_) - (a.value_ < b.value_);
  }

 private:
  ExtendedReal(double v, bool inf) : value_(v), inf_(inf) {}
  double value_;
  bool inf_;
};

std::string to_string(const ExtendedReal& x);

enum class GeneratorKind { Quadratic, ShiftedEntropy, Tabulated };
std::string_view to_string(GeneratorKind kind);

/// Strictly convex phi on [0,1], optionally plus a linear term a*x + b
/// (which leaves the divergence unchanged).
class ConvexGenerator {
 public:
  /// phi(x) = x^2
  static ConvexGenerator quadratic();
  /// phi(x) = x ln x + (1-x) ln(1-x); phi' is unbounded at both ends.
  static ConvexGenerator shifted_entropy();
  /// phi' piecewise linear through (knots[j], slopes[j]), phi(0) = 0.
  /// knots run from 0 to 1 and slopes must be strictly increasing.
  static ConvexGenerator tabulated(std::vector<double> knots, std::vector<double> slopes);
  /// A fixed non-quadratic tabulation used by experiments and tests.
  static ConvexGenerator default_tabulated();

  ConvexGenerator with_linear_shift(double a, double b) const;
  /// Subtract phi(0) + phi'(0) x so that phi(0) = phi'(0) = 0.
  ConvexGenerator normalized() const;

  GeneratorKind kind() const { return kind_; }
  bool is_normalized(double tol = 1e-12) const;
  bool bounded_derivative() const { return kind_ != GeneratorKind::ShiftedEntropy; }
  bool is_pure_quadratic() const { return kind_ == GeneratorKind::Quadratic; }

  double phi(double x) const;
  /// phi'(x); at the endpoints the one-sided limit, possibly infinite.
  double derivative(double x) const;
  double second_derivative(double x) const;
  /// Bounds on phi'' over [0,1] (finite only when the derivative is bounded).
  double curvature_min() const;
  double curvature_max() const;

  ExtendedReal divergence(double x, double y) const;
  /// Exact divergence, quadratic generators only: (x - y)^2.
  Rational exact_divergence(const Rational& x, const Rational& y) const;
  /// max over [0,1]^2 of the divergence: the larger of d(1,0) and d(0,1).
  double sup_divergence() const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& slopes() const { return slopes_; }
  double shift_a() const { return shift_a_; }
  double shift_b() const { return shift_b_; }

 private:
  ConvexGenerator() = default;
  double base_phi(double x) const;
  double base_derivative(double x) const;

  GeneratorKind kind_ = GeneratorKind::Quadratic;
  std::vector<double> knots_;
  std::vector<double> slopes_;
  std::vector<double> phi_at_knots_;
  double shift_a_ = 0.0;
  double shift_b_ = 0.0;
};

void validate_divergence_args(double x, double y);

enum class WeightRule { Const, Geometric, List };
std::string_view to_string(WeightRule rule);

/// Positive weights a_i indexed by proposition id i = index + 1.
struct Weights {
  WeightRule rule = WeightRule::Const;
  double value = 1.0;  // Const; also the tail value of List
  double scale = 1.0;  // Geometric: scale * ratio^i
  double ratio = 0.5;
  std::vector<double> list;

  static Weights constant(double v = 1.0);
  static Weights geometric(double scale, double ratio);
  static Weights from_list(std::vector<double> values);

  double at(std::size_t index) const;
  double sup() const;
  double inf() const;
  bool summable() const;
  /// sum over indices >= from (summable rules only).
  double tail_sum(std::size_t from) const;
  void validate() const;
};

struct InaccuracyMeasure {
  std::string name;
  ConvexGenerator generator = ConvexGenerator::quadratic();
  Weights weights;

  /// Unit-weight quadratic: the (generalized) Brier score.
  static InaccuracyMeasure brier();
  /// 2^{-i}-weighted quadratic.
  static InaccuracyMeasure walsh();
  static InaccuracyMeasure with(std::string name, ConvexGenerator g, Weights w);

  void validate() const;
  /// Countable use needs a bounded generator derivative.
  void require_countable() const;
};

/// Sum_i a_i d(v_i, c_i) for a finite vector of credences and a signature.
ExtendedReal score_values(const std::vector<double>& c, const InaccuracyMeasure& m,
                          const std::vector<std::uint8_t>& signature);
Rational score_values_exact(const std::vector<Rational>& c, const InaccuracyMeasure& m,
                            const std::vector<std::uint8_t>& signature);

/// I(c, w) on a finite space, or on the first `truncation` propositions of a
/// symbolic space.
ExtendedReal score(const Credence& c, const InaccuracyMeasure& m, const WorldPoint& world, const OpinionSpace& space,
                   std::size_t truncation = 0);
Rational score_exact(const Credence& c, const InaccuracyMeasure& m, const WorldPoint& world,
                     const OpinionSpace& space, std::size_t truncation = 0);

inline constexpr std::size_t kDefaultSeriesTruncation = 10'000;
inline constexpr double kDefaultSeriesTolerance = 1e-8;

struct SeriesPolicy {
  std::size_t truncation = kDefaultSeriesTruncation;
  double tolerance = kDefaultSeriesTolerance;
};

enum class SeriesStatus { Converged, Diverges, Partial };
std::string_view to_string(SeriesStatus status);

struct SeriesVerdict {
  SeriesStatus status = SeriesStatus::Partial;
  double value = 0.0;       // limit (Converged) or partial sum (Partial)
  double tail_bound = 0.0;  // Converged: |limit - value| bound
  std::string tag;          // Diverges: comparison test used
  std::size_t terms_used = 0;

  static SeriesVerdict converged(double v, double bound, std::size_t terms);
  static SeriesVerdict diverges(std::string tag, std::size_t terms);
  static SeriesVerdict partial(double v, std::size_t terms);

  bool is_infinite() const { return status == SeriesStatus::Diverges; }
  bool resolved() const { return status != SeriesStatus::Partial; }
  ExtendedReal as_extended() const;  // Partial maps to its partial sum
};

/// Family-aware evaluation of the infinite score series at one world.
SeriesVerdict score_countable(const Credence& c, const InaccuracyMeasure& m, const WorldPoint& world,
                              const OpinionSpace& space, const SeriesPolicy& policy = {});

/// Score at a point whose membership in every proposition is `bit`
/// (the point at infinity of tails, initial segments and partitions).
SeriesVerdict score_constant_signature(const Credence& c, const InaccuracyMeasure& m, bool bit,
                                       const SeriesPolicy& policy = {});

/// Sum over atoms of lambda_w I(c, w), plus the residual mass scored at the
/// point at infinity.
SeriesVerdict expected_inaccuracy(const Credence& c, const InaccuracyMeasure& m, const LambdaRepresentation& rep,
                                  const OpinionSpace& space, const SeriesPolicy& policy = {});

}  // namespace credal
