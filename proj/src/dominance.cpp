#include "credal/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "credal/error.hpp"
#include "credal/min_norm.hpp"

namespace credal {

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::StronglyDominates:
      return "strongly_dominates";
    case Relation::WeaklyDominates:
      return "weakly_dominates";
    case Relation::NoDominance:
      return "no_dominance";
    case Relation::IncomparableUnresolved:
      return "incomparable_unresolved";
  }
  return "no_dominance";
}

namespace {

std::size_t symbolic_truncation(const OpinionSpace& space, std::size_t requested) {
  return requested > 0 ? requested : space.truncation_default();
}

/// The quotient on which a credence is compared or projected. Finite
/// spaces use all propositions.
Quotient working_quotient(const OpinionSpace& space, std::size_t truncation) {
  if (space.proposition_count()) return build_quotient(space);
  return build_quotient(space, symbolic_truncation(space, truncation));
}

void check_credence_length(const Credence& c, const OpinionSpace& space) {
  if (!c.is_rule() && space.proposition_count() && c.size() != *space.proposition_count()) {
    fail(ErrorCode::InvalidArgument, "credence has " + std::to_string(c.size()) + " values but the space has " +
                                         std::to_string(*space.proposition_count()) + " propositions");
  }
}

std::vector<double> values_at(const Credence& c, std::size_t count) {
  const CredenceRule rule = c.as_rule();
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = rule.at(k);
  return out;
}

std::vector<Rational> exact_values_at(const Credence& c, std::size_t count) {
  const CredenceRule rule = c.as_rule();
  std::vector<Rational> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto v = rule.exact_at(k);
    out[k] = v ? *v : to_rational(rule.at(k));
  }
  return out;
}

bool exact_capable(const Credence& c, std::size_t count) {
  const CredenceRule rule = c.as_rule();
  for (std::size_t k = 0; k < count; ++k) {
    if (!rule.exact_at(k)) return false;
  }
  return true;
}

/// Tail value that keeps a truncated coherent credence coherent on the
/// whole family and adds the same score to both sides of any comparison.
Rational canonical_tail(const OpinionSpace& space) {
  return space.kind() == SpaceKind::InitialSegments ? Rational(1) : Rational(0);
}

Credence credence_on_space(const OpinionSpace& space, std::vector<Rational> values) {
  if (space.proposition_count()) return Credence::finite_exact(std::move(values));
  return Credence::from_rule(CredenceRule::list(std::move(values), canonical_tail(space)));
}

int sign_of(double diff, double tol) {
  if (diff > tol) return 1;
  if (diff < -tol) return -1;
  return 0;
}

Relation summarize(const std::vector<AtomComparison>& rows) {
  bool any_better = false;
  bool all_better = !rows.empty();
  for (const auto& r : rows) {
    if (!r.resolved) return Relation::IncomparableUnresolved;
  }
  for (const auto& r : rows) {
    if (r.comparison > 0) return Relation::NoDominance;
    if (r.comparison < 0) any_better = true;
    if (r.comparison >= 0) all_better = false;
  }
  if (all_better) return Relation::StronglyDominates;
  if (any_better) return Relation::WeaklyDominates;
  return Relation::NoDominance;
}

}  // namespace

DominanceVerdict compare(const Credence& c, const Credence& d, const InaccuracyMeasure& m, const OpinionSpace& space,
                         const CompareOptions& options) {
  m.validate();
  c.validate();
  d.validate();
  check_credence_length(c, space);
  check_credence_length(d, space);

  DominanceVerdict verdict;
  const Quotient q = working_quotient(space, options.truncation);
  const bool finite = space.proposition_count().has_value();
  const std::size_t count = q.propositions;

  const bool exact = finite && options.mode == Mode::Rational && m.generator.is_pure_quadratic() &&
                     exact_capable(c, count) && exact_capable(d, count);
  verdict.exact = exact;
  std::vector<double> cv;
  std::vector<double> dv;
  std::vector<Rational> ce;
  std::vector<Rational> de;
  if (finite) {
    cv = values_at(c, count);
    dv = values_at(d, count);
    if (exact) {
      ce = exact_values_at(c, count);
      de = exact_values_at(d, count);
    }
  }

  for (const auto& atom : q.atoms) {
    AtomComparison row;
    row.atom = atom.id;
    row.world = atom.representative;
    if (finite) {
      if (exact) {
        row.exact_c = score_values_exact(ce, m, atom.signature);
        row.exact_d = score_values_exact(de, m, atom.signature);
        row.score_c = SeriesVerdict::converged(row.exact_c->get_d(), 0.0, count);
        row.score_d = SeriesVerdict::converged(row.exact_d->get_d(), 0.0, count);
        row.comparison = sgn(Rational(*row.exact_d - *row.exact_c));
      } else {
        const ExtendedReal sc = score_values(cv, m, atom.signature);
        const ExtendedReal sd = score_values(dv, m, atom.signature);
        row.score_c = sc.is_infinite() ? SeriesVerdict::diverges("infinite divergence term", count)
                                       : SeriesVerdict::converged(sc.value(), 0.0, count);
        row.score_d = sd.is_infinite() ? SeriesVerdict::diverges("infinite divergence term", count)
                                       : SeriesVerdict::converged(sd.value(), 0.0, count);
        if (sc.is_infinite() || sd.is_infinite()) {
          row.comparison = compare(sd, sc);
        } else {
          row.comparison = sign_of(sd.value() - sc.value(), options.tie_tolerance);
        }
      }
    } else {
      row.score_c = score_countable(c, m, atom.representative, space, options.series);
      row.score_d = score_countable(d, m, atom.representative, space, options.series);
      const bool inf_c = row.score_c.status == SeriesStatus::Diverges;
      const bool inf_d = row.score_d.status == SeriesStatus::Diverges;
      if (inf_c || inf_d) {
        // infinity against infinity is a tie; a partial sum is below infinity
        if (inf_c && inf_d) {
          row.comparison = 0;
        } else if (inf_c) {
          row.comparison = -1;
        } else {
          row.comparison = 1;
        }
      } else if (row.score_c.status == SeriesStatus::Partial || row.score_d.status == SeriesStatus::Partial) {
        row.resolved = false;
      } else {
        const double diff = row.score_d.value - row.score_c.value;
        const double band = row.score_c.tail_bound + row.score_d.tail_bound;
        if (std::abs(diff) <= band && band > options.tie_tolerance) {
          row.resolved = false;
        } else {
          row.comparison = sign_of(diff, options.tie_tolerance);
        }
      }
    }
    verdict.per_atom.push_back(std::move(row));
  }
  verdict.relation = summarize(verdict.per_atom);
  return verdict;
}

namespace {

double objective(const ConvexGenerator& g, const Weights& a, const std::vector<double>& s, const std::vector<double>& c) {
  double f = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) f += a.at(i) * g.divergence(std::clamp(s[i], 0.0, 1.0), c[i]).value();
  return f;
}

std::vector<double> combine_rows(const Quotient& q, const std::vector<double>& lambda) {
  std::vector<double> s(q.propositions, 0.0);
  for (std::size_t j = 0; j < q.atoms.size(); ++j) {
    if (lambda[j] == 0.0) continue;
    for (std::size_t i = 0; i < q.propositions; ++i) s[i] += lambda[j] * q.matrix.at(j, i);
  }
  return s;
}

struct FloatProjection {
  std::vector<double> lambda;
  std::size_t iterations = 0;
  double fw_gap = 0.0;
  bool converged = false;
};

/// Wolfe's algorithm in the metric diag(h) toward `target`.
FloatProjection quadratic_step(const Quotient& q, const std::vector<double>& target, const std::vector<double>& h,
                               std::size_t cap) {
  std::vector<std::vector<double>> pts;
  for (const auto& row : q.matrix.rows) {
    std::vector<double> p(q.propositions);
    for (std::size_t i = 0; i < q.propositions; ++i) p[i] = row[i] - target[i];
    pts.push_back(std::move(p));
  }
  auto r = min_norm_point<double>(pts, h, 1e-15, cap);
  FloatProjection out;
  out.lambda = r.lambda;
  out.iterations = r.major_iterations;
  out.converged = r.converged;
  return out;
}

double frank_wolfe_gap(const Quotient& q, const std::vector<double>& grad, const std::vector<double>& s) {
  double gs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) gs += grad[i] * s[i];
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : q.matrix.rows) {
    double v = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) v += grad[i] * row[i];
    best = std::min(best, v);
  }
  return gs - best;
}

/// Projected Newton for a general bounded generator: each step minimizes
/// the local quadratic model over E with Wolfe's algorithm, followed by an
/// exact line search on the convex objective.
FloatProjection newton_projection(const Quotient& q, const InaccuracyMeasure& m, const std::vector<double>& c,
                                  const ProjectionOptions& options) {
  const auto& g = m.generator;
  const auto& a = m.weights;
  const std::size_t n = q.propositions;

  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = a.at(i);
  FloatProjection state = quadratic_step(q, c, h, options.max_iterations);
  std::size_t iterations = state.iterations;
  std::vector<double> lambda = state.lambda;
  std::vector<double> s = combine_rows(q, lambda);

  std::vector<double> dphi_c(n);
  for (std::size_t i = 0; i < n; ++i) dphi_c[i] = g.derivative(c[i]);

  FloatProjection out;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) grad[i] = a.at(i) * (g.derivative(std::clamp(s[i], 0.0, 1.0)) - dphi_c[i]);
    out.fw_gap = frank_wolfe_gap(q, grad, s);
    if (out.fw_gap <= options.tolerance) {
      out.converged = true;
      break;
    }
    std::vector<double> hess(n);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
      hess[i] = a.at(i) * std::max(g.second_derivative(std::clamp(s[i], 0.0, 1.0)), 1e-12);
      target[i] = s[i] - grad[i] / hess[i];
    }
    FloatProjection sub = quadratic_step(q, target, hess, options.max_iterations);
    iterations += sub.iterations;
    std::vector<double> y = combine_rows(q, sub.lambda);
    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = y[i] - s[i];

    auto slope = [&](double tau) {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = std::clamp(s[i] + tau * dir[i], 0.0, 1.0);
        v += a.at(i) * (g.derivative(x) - dphi_c[i]) * dir[i];
      }
      return v;
    };
    if (slope(0.0) >= 0.0) {
      // the Newton model disagrees with the gradient; take a Frank-Wolfe step
      std::size_t best = 0;
      double best_v = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < q.atoms.size(); ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += grad[i] * q.matrix.at(j, i);
        if (v < best_v) {
          best_v = v;
          best = j;
        }
      }
      std::fill(sub.lambda.begin(), sub.lambda.end(), 0.0);
      sub.lambda[best] = 1.0;
      y = combine_rows(q, sub.lambda);
      for (std::size_t i = 0; i < n; ++i) dir[i] = y[i] - s[i];
    }
    double tau = 1.0;
    if (slope(1.0) > 0.0) {
      double lo = 0.0;
      double hi = 1.0;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) > 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      tau = 0.5 * (lo + hi);
    }
    for (std::size_t j = 0; j < lambda.size(); ++j) lambda[j] = (1.0 - tau) * lambda[j] + tau * sub.lambda[j];
    s = combine_rows(q, lambda);
    ++iterations;
    if (tau == 0.0) break;
  }
  out.lambda = lambda;
  out.iterations = iterations;
  return out;
}

}  // namespace

ProjectionResult project_coherent(const Credence& c, const InaccuracyMeasure& m, const OpinionSpace& space,
                                  const ProjectionOptions& options) {
  m.validate();
  c.validate();
  check_credence_length(c, space);
  if (!m.generator.bounded_derivative()) {
    fail(ErrorCode::UnsupportedMeasure, "projection needs a generator with finite endpoint derivatives");
  }
  std::size_t truncation = options.truncation;
  if (!space.proposition_count() && c.is_rule()) {
    truncation = std::max(symbolic_truncation(space, truncation), c.rule()->values.size());
  }
  const Quotient q = working_quotient(space, truncation);
  const std::size_t n = q.propositions;
  const std::vector<double> cv = values_at(c, n);

  ProjectionResult pr;
  pr.lambda.atoms.reserve(q.atoms.size());
  for (const auto& atom : q.atoms) pr.lambda.atoms.push_back(atom.representative);

  const bool exact = options.mode == Mode::Rational && m.generator.is_pure_quadratic() && exact_capable(c, n);
  if (exact) {
    const std::vector<Rational> ce = exact_values_at(c, n);
    std::vector<Rational> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = to_rational(m.weights.at(i));
    std::vector<std::vector<Rational>> pts;
    for (const auto& row : q.matrix.rows) {
      std::vector<Rational> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = Rational(row[i]) - ce[i];
      pts.push_back(std::move(p));
    }
    auto r = min_norm_point<Rational>(pts, h, 0.0, options.max_iterations);
    pr.converged = r.converged;
    pr.iterations = r.major_iterations;
    std::vector<Rational> pi(n);
    Rational gap = 0;
    for (std::size_t i = 0; i < n; ++i) {
      pi[i] = ce[i] + r.point[i];
      gap += h[i] * r.point[i] * r.point[i];
    }
    pr.exact_gap = gap;
    pr.gap = gap.get_d();
    pr.exact_pi = pi;
    pr.lambda.exact_weights = r.lambda;
    pr.lambda.weights = to_doubles(r.lambda);
    pr.pi_c = credence_on_space(space, pi);
    pr.fw_gap = 0.0;
  } else {
    FloatProjection fp;
    if (m.generator.is_pure_quadratic()) {
      std::vector<double> h(n);
      for (std::size_t i = 0; i < n; ++i) h[i] = m.weights.at(i);
      fp = quadratic_step(q, cv, h, options.max_iterations);
      std::vector<double> s = combine_rows(q, fp.lambda);
      std::vector<double> grad(n);
      for (std::size_t i = 0; i < n; ++i) grad[i] = 2.0 * h[i] * (s[i] - cv[i]);
      fp.fw_gap = frank_wolfe_gap(q, grad, s);
      fp.converged = fp.converged && fp.fw_gap <= std::max(options.tolerance, 1e-12);
    } else {
      fp = newton_projection(q, m, cv, options);
    }
    pr.converged = fp.converged;
    pr.iterations = fp.iterations;
    pr.fw_gap = fp.fw_gap;
    pr.lambda.weights = fp.lambda;
    std::vector<double> s = combine_rows(q, fp.lambda);
    for (auto& v : s) v = std::clamp(v, 0.0, 1.0);
    pr.gap = objective(m.generator, m.weights, s, cv);
    std::vector<Rational> pi = to_rationals(s);
    pr.pi_c = credence_on_space(space, pi);
  }
  pr.pythagorean = verify_pythagorean(c, pr, m, space, options.pythagorean_tolerance,
                                      exact ? Mode::Rational : Mode::Float, truncation);
  return pr;
}

PythagoreanRecord verify_pythagorean(const Credence& c, const ProjectionResult& pr, const InaccuracyMeasure& m,
                                     const OpinionSpace& space, double tol, Mode mode, std::size_t truncation) {
  if (!space.proposition_count() && c.is_rule()) {
    truncation = std::max(symbolic_truncation(space, truncation), c.rule()->values.size());
  }
  const Quotient q = working_quotient(space, truncation);
  const std::size_t n = q.propositions;
  PythagoreanRecord rec;
  rec.worst_slack = std::numeric_limits<double>::infinity();

  const bool exact = mode == Mode::Rational && m.generator.is_pure_quadratic() && pr.exact_gap &&
                     pr.exact_pi.size() == n && exact_capable(c, n);
  if (exact) {
    const std::vector<Rational> ce = exact_values_at(c, n);
    Rational worst;
    bool first = true;
    for (const auto& atom : q.atoms) {
      const Rational slack =
          score_values_exact(ce, m, atom.signature) - *pr.exact_gap - score_values_exact(pr.exact_pi, m, atom.signature);
      rec.slack.push_back(slack.get_d());
      if (first || slack < worst) worst = slack;
      first = false;
    }
    Rational self = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Rational d = pr.exact_pi[i] - ce[i];
      self += to_rational(m.weights.at(i)) * d * d;
    }
    rec.exact_worst_slack = worst;
    rec.worst_slack = worst.get_d();
    rec.projection_gap_check = Rational(self - *pr.exact_gap).get_d();
    rec.holds = sgn(worst) >= 0 && self == *pr.exact_gap;
    return rec;
  }

  const std::vector<double> cv = values_at(c, n);
  const std::vector<double> pv = values_at(pr.pi_c, n);
  for (const auto& atom : q.atoms) {
    const ExtendedReal bc = score_values(cv, m, atom.signature);
    const ExtendedReal bp = score_values(pv, m, atom.signature);
    double slack;
    if (bc.is_infinite()) {
      slack = std::numeric_limits<double>::infinity();
    } else if (bp.is_infinite()) {
      slack = -std::numeric_limits<double>::infinity();
    } else {
      slack = bc.value() - pr.gap - bp.value();
    }
    rec.slack.push_back(slack);
    rec.worst_slack = std::min(rec.worst_slack, slack);
  }
  double self = 0.0;
  for (std::size_t i = 0; i < n; ++i) self += m.weights.at(i) * m.generator.divergence(pv[i], cv[i]).value();
  rec.projection_gap_check = self - pr.gap;
  rec.holds = rec.worst_slack >= -tol && rec.projection_gap_check <= tol;
  return rec;
}

Credence omniscient_credence(const OpinionSpace& space, const WorldPoint& world) {
  if (auto n = space.proposition_count()) {
    std::vector<Rational> v(*n);
    for (std::size_t k = 0; k < *n; ++k) v[k] = space.contains(world, k) ? 1 : 0;
    return Credence::finite_exact(std::move(v));
  }
  if (world.is_added()) {
    return Credence::from_rule(CredenceRule::constant(space.added_points().at(*world.added).in_every_proposition ? 1 : 0));
  }
  const auto label = static_cast<std::size_t>(world.label);
  std::size_t head = 0;
  Rational tail = 0;
  switch (space.kind()) {
    case SpaceKind::TailSets:
      head = label;
      break;
    case SpaceKind::InitialSegments:
      head = label > 0 ? label - 1 : 0;
      tail = 1;
      break;
    case SpaceKind::CountablePartition:
      head = label + 1;
      break;
    case SpaceKind::ExplicitFinite:
      break;
  }
  std::vector<Rational> v(head);
  for (std::size_t k = 0; k < head; ++k) v[k] = space.contains(world, k) ? 1 : 0;
  return Credence::from_rule(CredenceRule::list(std::move(v), tail));
}

DominatorResult find_dominator(const Credence& c, const InaccuracyMeasure& m, const OpinionSpace& space,
                               const ProjectionOptions& options) {
  m.validate();
  c.validate();
  check_credence_length(c, space);
  CompareOptions cmp;
  cmp.mode = options.mode;
  cmp.truncation = options.truncation;

  CoherenceOptions co;
  co.mode = options.mode;
  if (options.truncation > 0) co.truncation = options.truncation;
  DominatorResult out;

  // infinite inaccuracy at every atom: any omniscient credence strongly
  // dominates, coherent or not
  const Quotient q = working_quotient(space, options.truncation);
  bool all_infinite = true;
  bool any_infinite = false;
  for (const auto& atom : q.atoms) {
    bool inf;
    if (space.proposition_count()) {
      inf = score(c, m, atom.representative, space).is_infinite();
    } else {
      inf = score_countable(c, m, atom.representative, space).status == SeriesStatus::Diverges;
    }
    all_infinite = all_infinite && inf;
    any_infinite = any_infinite || inf;
  }
  if (all_infinite) {
    out.omniscient = true;
    out.dominator = omniscient_credence(space, q.atoms.front().representative);
    out.verdict = compare(c, out.dominator, m, space, cmp);
    return out;
  }

  const CoherenceVerdict coherence = check_coherence(c, space, co);
  if (coherence.status != CoherenceStatus::Incoherent) {
    out.dominator = c;
    out.verdict = compare(c, c, m, space, cmp);
    return out;
  }

  if (!space.proposition_count()) {
    const CredenceRule rule = c.as_rule();
    if (rule.kind != RuleKind::List || rule.tail != canonical_tail(space) || any_infinite) {
      fail(ErrorCode::NotImplemented,
           "dominators on countable families are built only for finitely listed credences with the canonical tail");
    }
  }
  ProjectionResult pr = project_coherent(c, m, space, options);
  out.dominator = pr.pi_c;
  out.verdict = compare(c, pr.pi_c, m, space, cmp);
  out.projection = std::move(pr);
  return out;
}

}  // namespace credal
