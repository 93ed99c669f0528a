#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "credal/credence.hpp"
#include "credal/opinion_space.hpp"
#include "credal/rational.hpp"

namespace credal {

inline constexpr double kCoherenceTolerance = 1e-9;

enum class CoherenceStatus { Coherent, CountablyCoherent, Incoherent, Undetermined };
std::string_view to_string(CoherenceStatus status);

/// lambda over the atoms of a quotient. `residual` is mass carried by no
/// world of the space: what a merely finitely additive extension leaves
/// "at infinity". It behaves like an extra atom whose membership in every
/// proposition is `residual_in_every_proposition`; on the compactified space
/// it is exactly the weight of the added point.
struct LambdaRepresentation {
  std::vector<double> weights;
  std::vector<Rational> exact_weights;  // filled when the weights are exact
  std::vector<WorldPoint> atoms;        // representative of each weight
  double residual = 0.0;
  Rational exact_residual;
  bool residual_in_every_proposition = false;

  double total() const;
};

struct PartialMeasureViolation {
  std::vector<std::size_t> phis;  // proposition indices; kWholeSpace denotes W
  std::vector<std::size_t> psis;
  double lhs_sum = 0.0;
  double rhs_sum = 0.0;
  Rational exact_lhs;
  Rational exact_rhs;

  static constexpr std::size_t kWholeSpace = static_cast<std::size_t>(-1);
};

struct SeparatingFunctional {
  std::vector<double> y;
  double threshold = 0.0;
  std::vector<Rational> exact_y;
  Rational exact_threshold;
};

struct CoherenceVerdict {
  CoherenceStatus status = CoherenceStatus::Undetermined;
  std::optional<LambdaRepresentation> witness;
  std::optional<PartialMeasureViolation> violation;
  std::optional<SeparatingFunctional> separation;
  bool exact = false;
  std::string note;
};

struct CoherenceOptions {
  Mode mode = Mode::Float;
  double tolerance = kCoherenceTolerance;
  std::optional<std::size_t> truncation;  // defaults to the space's
};

/// Finite additivity: c is a convex combination of omniscient credences.
CoherenceVerdict check_coherence(const Credence& c, const OpinionSpace& space,
                                 const CoherenceOptions& options = {});

/// Countable additivity. Coherent credences that are not countably coherent
/// come back with status Coherent.
CoherenceVerdict check_countable_coherence(const Credence& c, const OpinionSpace& space,
                                           const CoherenceOptions& options = {});

/// Largest tuple length accepted by the partial-measure oracle.
inline constexpr std::size_t kMaxTupleLength = 5;

/// Tarski partial-measure conditions on F u {W} for an explicit space.
/// Inclusion pairs depend only on the space and the length bound, so they
/// are computed once and reused across credences.
class TarskiOracle {
 public:
  TarskiOracle(const OpinionSpace& space, std::size_t max_tuple_len);

  std::vector<PartialMeasureViolation> violations(const Credence& c, Mode mode = Mode::Rational,
                                                  bool first_only = false) const;
  std::size_t inclusion_count() const { return pairs_.size(); }

  /// The tuple inclusion of the partial-measure definition, evaluated with
  /// unions of k-fold intersections over the atoms.
  static bool tuple_included(const std::vector<std::vector<bool>>& phis, const std::vector<std::vector<bool>>& psis);

 private:
  struct Pair {
    std::vector<std::size_t> phis;
    std::vector<std::size_t> psis;
  };
  std::size_t propositions_ = 0;
  std::vector<Pair> pairs_;
};

std::vector<PartialMeasureViolation> check_partial_measure(const Credence& c, const OpinionSpace& space,
                                                           std::size_t max_tuple_len, Mode mode = Mode::Rational);

}  // namespace credal
