#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "credal/coherence.hpp"
#include "credal/credence.hpp"
#include "credal/inaccuracy.hpp"
#include "credal/opinion_space.hpp"

namespace credal {

enum class Relation { StronglyDominates, WeaklyDominates, NoDominance, IncomparableUnresolved };
std::string_view to_string(Relation relation);

struct AtomComparison {
  std::size_t atom = 0;
  WorldPoint world;
  SeriesVerdict score_c;
  SeriesVerdict score_d;
  std::optional<Rational> exact_c;  // rational mode, quadratic generator
  std::optional<Rational> exact_d;
  int comparison = 0;  // sign of I(d,w) - I(c,w); 0 for ties
  bool resolved = true;
};

struct DominanceVerdict {
  Relation relation = Relation::NoDominance;  // of d over c
  std::vector<AtomComparison> per_atom;
  bool exact = false;
};

struct CompareOptions {
  Mode mode = Mode::Float;
  /// Differences within this band count as ties.
  double tie_tolerance = 0.0;
  std::size_t truncation = 0;  // symbolic spaces: atoms of the quotient at K
  SeriesPolicy series;
};

/// Does d dominate c relative to m on the space?
DominanceVerdict compare(const Credence& c, const Credence& d, const InaccuracyMeasure& m, const OpinionSpace& space,
                         const CompareOptions& options = {});

struct PythagoreanRecord {
  std::vector<double> slack;  // B(v_w,c) - gap - B(v_w,pi_c), per atom
  double worst_slack = 0.0;
  std::optional<Rational> exact_worst_slack;
  double projection_gap_check = 0.0;  // B(pi_c, c) - gap
  bool holds = false;
};

struct ProjectionResult {
  Credence pi_c = Credence::finite({});
  LambdaRepresentation lambda;
  double gap = 0.0;
  std::optional<Rational> exact_gap;
  std::vector<Rational> exact_pi;  // rational mode, quadratic generator
  bool converged = false;
  std::size_t iterations = 0;
  double fw_gap = 0.0;  // Frank-Wolfe gap: an upper bound on gap - optimum
  PythagoreanRecord pythagorean;
};

struct ProjectionOptions {
  Mode mode = Mode::Float;
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
  std::size_t truncation = 0;  // symbolic spaces: project on the quotient at K
  double pythagorean_tolerance = 1e-6;
};

/// pi_c = argmin over the coherent set E of D(s, c), solved over the
/// simplex of atom weights.
ProjectionResult project_coherent(const Credence& c, const InaccuracyMeasure& m, const OpinionSpace& space,
                                  const ProjectionOptions& options = {});

/// Checks B(v_w, c) >= gap + B(v_w, pi_c) - tol at every atom and
/// B(pi_c, c) <= gap + tol.
PythagoreanRecord verify_pythagorean(const Credence& c, const ProjectionResult& pr, const InaccuracyMeasure& m,
                                     const OpinionSpace& space, double tol, Mode mode = Mode::Float,
                                     std::size_t truncation = 0);

struct DominatorResult {
  Credence dominator = Credence::finite({});
  DominanceVerdict verdict;
  std::optional<ProjectionResult> projection;
  bool omniscient = false;  // every atom scored infinite: v_w is returned
};

DominatorResult find_dominator(const Credence& c, const InaccuracyMeasure& m, const OpinionSpace& space,
                               const ProjectionOptions& options = {});

/// Omniscient credence v_w as a credence on the space.
Credence omniscient_credence(const OpinionSpace& space, const WorldPoint& world);

}  // namespace credal
