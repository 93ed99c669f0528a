#include "credal/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "credal/error.hpp"
#include "credal/hull_lp.hpp"

namespace credal {

std::string_view to_string(CoherenceStatus status) {
  switch (status) {
    case CoherenceStatus::Coherent:
      return "coherent";
    case CoherenceStatus::CountablyCoherent:
      return "countably_coherent";
    case CoherenceStatus::Incoherent:
      return "incoherent";
    case CoherenceStatus::Undetermined:
      return "undetermined";
  }
  return "undetermined";
}

double LambdaRepresentation::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0) + residual;
}

namespace {

bool finite_kind(const OpinionSpace& space) { return space.proposition_count().has_value(); }

std::size_t truncation_of(const OpinionSpace& space, const CoherenceOptions& options) {
  return options.truncation.value_or(space.truncation_default());
}

/// Credence values on the propositions of a finite space.
std::vector<Rational> finite_values(const Credence& c, const OpinionSpace& space) {
  const std::size_t n = *space.proposition_count();
  if (!c.is_rule() && c.size() != n) {
    fail(ErrorCode::InvalidArgument, "credence has " + std::to_string(c.size()) + " values but the space has " +
                                         std::to_string(n) + " propositions");
  }
  return c.exact_prefix(n);
}

CoherenceVerdict explicit_coherence(const Credence& c, const OpinionSpace& space, const CoherenceOptions& options) {
  const Quotient q = build_quotient(space, truncation_of(space, options));
  const std::vector<Rational> values = finite_values(c, space);
  CoherenceVerdict verdict;

  LambdaRepresentation rep;
  for (const auto& atom : q.atoms) rep.atoms.push_back(atom.representative);

  if (options.mode == Mode::Rational) {
    verdict.exact = true;
    auto hull = hull_membership<Rational>(q.matrix, values);
    if (hull.member) {
      verdict.status = CoherenceStatus::Coherent;
      rep.exact_weights = hull.lambda;
      rep.weights = to_doubles(hull.lambda);
      verdict.witness = std::move(rep);
    } else {
      verdict.status = CoherenceStatus::Incoherent;
      SeparatingFunctional sep;
      sep.exact_y = hull.separation->y;
      sep.exact_threshold = hull.separation->threshold;
      sep.y = to_doubles(sep.exact_y);
      sep.threshold = sep.exact_threshold.get_d();
      verdict.separation = std::move(sep);
    }
    return verdict;
  }

  const std::vector<double> dv = to_doubles(values);
  auto hull = hull_membership<double>(q.matrix, dv, options.tolerance);
  if (hull.member) {
    // accept only if the witness reproduces c within tolerance
    double worst = 0.0;
    for (std::size_t i = 0; i < q.matrix.cols; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < q.atoms.size(); ++j) s += hull.lambda[j] * q.matrix.at(j, i);
      worst = std::max(worst, std::abs(s - dv[i]));
    }
    if (worst <= options.tolerance) {
      verdict.status = CoherenceStatus::Coherent;
      rep.weights = hull.lambda;
      verdict.witness = std::move(rep);
      return verdict;
    }
  }
  if (hull.separation) {
    verdict.status = CoherenceStatus::Incoherent;
    SeparatingFunctional sep;
    sep.y = hull.separation->y;
    sep.threshold = hull.separation->threshold;
    verdict.separation = std::move(sep);
    return verdict;
  }
  // float simplex disagreed with its own witness; settle exactly
  CoherenceOptions exact = options;
  exact.mode = Mode::Rational;
  verdict = explicit_coherence(c, space, exact);
  verdict.note = "float solve inconclusive, decided in rational arithmetic";
  return verdict;
}

struct SymbolicValues {
  std::vector<Rational> prefix;
  bool exact = true;
  std::optional<Rational> limit;
};

SymbolicValues symbolic_values(const Credence& c, std::size_t count) {
  SymbolicValues out;
  const CredenceRule rule = c.as_rule();
  out.prefix.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (auto v = rule.exact_at(k)) {
      out.prefix.push_back(*v);
    } else {
      out.exact = false;
      out.prefix.push_back(to_rational(rule.at(k)));
    }
  }
  out.limit = c.exact_limit();
  if (!out.limit) {
    if (auto numeric = c.limit(count)) {
      out.limit = to_rational(*numeric);
      out.exact = false;
    }
  }
  return out;
}

PartialMeasureViolation inclusion_violation(std::vector<std::size_t> phis, std::vector<std::size_t> psis,
                                            const Credence& c) {
  PartialMeasureViolation v;
  auto total = [&](const std::vector<std::size_t>& xs) {
    Rational s = 0;
    for (std::size_t i : xs) s += i == PartialMeasureViolation::kWholeSpace ? Rational(1) : c.exact_at(i);
    return s;
  };
  v.exact_lhs = total(phis);
  v.exact_rhs = total(psis);
  v.lhs_sum = v.exact_lhs.get_d();
  v.rhs_sum = v.exact_rhs.get_d();
  v.phis = std::move(phis);
  v.psis = std::move(psis);
  return v;
}

/// First index k with c_{k+1} > c_k (step = -1) or c_{k+1} < c_k (step = +1).
std::optional<std::size_t> first_monotone_break(const CredenceRule& rule, int wanted, std::size_t bound) {
  for (std::size_t k = 0; k + 1 < bound; ++k) {
    const double a = rule.at(k);
    const double b = rule.at(k + 1);
    auto ea = rule.exact_at(k);
    auto eb = rule.exact_at(k + 1);
    const int cmp = (ea && eb) ? sgn(Rational(*eb - *ea)) : (b > a) - (b < a);
    if (wanted < 0 && cmp > 0) return k;
    if (wanted > 0 && cmp < 0) return k;
  }
  return std::nullopt;
}

/// Size of the largest step against the wanted direction.
double largest_monotone_break(const CredenceRule& rule, int wanted, std::size_t bound) {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < bound; ++k) {
    const double step = rule.at(k + 1) - rule.at(k);
    worst = std::max(worst, wanted < 0 ? step : -step);
  }
  return worst;
}

CoherenceVerdict symbolic_coherence(const Credence& c, const OpinionSpace& space, const CoherenceOptions& options) {
  const std::size_t K = truncation_of(space, options);
  const CredenceRule rule = c.as_rule();
  CoherenceVerdict verdict;
  verdict.exact = true;
  const std::size_t scan = std::max<std::size_t>(K, rule.values.size() + 2);

  // incoherence first, from the family's closed-form rule
  switch (space.kind()) {
    case SpaceKind::TailSets:
    case SpaceKind::InitialSegments: {
      const int wanted = space.kind() == SpaceKind::TailSets ? -1 : 1;
      const int mono = rule.monotonicity();
      if (mono == 0 || mono == wanted) break;
      if (options.mode == Mode::Float && rule.kind == RuleKind::List &&
          largest_monotone_break(rule, wanted, scan) <= options.tolerance) {
        break;
      }
      verdict.status = CoherenceStatus::Incoherent;
      auto k = first_monotone_break(rule, wanted, scan);
      if (!k) k = 0;
      // tails shrink and initial segments grow with the index
      if (wanted < 0) {
        verdict.violation = inclusion_violation({*k + 1}, {*k}, c);
      } else {
        verdict.violation = inclusion_violation({*k}, {*k + 1}, c);
      }
      verdict.note = wanted < 0 ? "tail credences must be nonincreasing" : "initial-segment credences must be nondecreasing";
      return verdict;
    }
    case SpaceKind::CountablePartition: {
      auto sum = rule.analytic_sum();
      if (sum && *sum <= 1) break;
      if (sum && options.mode == Mode::Float && sum->get_d() <= 1.0 + options.tolerance) break;
      // the partial sums exceed 1 eventually: either the sum is known and
      // larger, or the terms do not vanish (or are 1/sqrt(i+1))
      verdict.status = CoherenceStatus::Incoherent;
      Rational partial = 0;
      std::vector<std::size_t> phis;
      for (std::size_t k = 0; k < 10'000'000; ++k) {
        partial += c.exact_at(k);
        phis.push_back(k);
        if (partial > 1) break;
      }
      verdict.violation = inclusion_violation(std::move(phis), {PartialMeasureViolation::kWholeSpace}, c);
      verdict.note = "disjoint cells carry total credence above 1";
      return verdict;
    }
    case SpaceKind::ExplicitFinite:
      break;
  }

  verdict.status = CoherenceStatus::Coherent;
  const Quotient q = build_quotient(space, K);
  const std::size_t count = q.propositions;
  SymbolicValues sv = symbolic_values(c, count);
  verdict.exact = sv.exact;

  Rational limit;
  bool limit_known = sv.limit.has_value();
  if (limit_known) {
    limit = *sv.limit;
  } else {
    // fall back to the last computed value; the witness is still valid at
    // the truncation, only the split between tail and residual is unknown
    limit = sv.prefix.back();
    verdict.note = "limit undetermined; residual bounded by the last truncated value";
  }
  const auto& cp = sv.prefix;

  std::map<WorldLabel, Rational> natural;
  Rational residual = 0;
  bool residual_everywhere = false;
  switch (space.kind()) {
    case SpaceKind::TailSets:
      natural[0] = 1 - cp[0];
      for (std::size_t n = 1; n < count; ++n) natural[static_cast<WorldLabel>(n)] = cp[n - 1] - cp[n];
      natural[static_cast<WorldLabel>(count)] = cp[count - 1] - limit;
      residual = limit;
      residual_everywhere = true;
      break;
    case SpaceKind::InitialSegments:
      natural[0] = cp[0];
      for (std::size_t n = 2; n <= count; ++n) natural[static_cast<WorldLabel>(n)] = cp[n - 1] - cp[n - 2];
      natural[static_cast<WorldLabel>(count + 1)] = limit - cp[count - 1];
      residual = 1 - limit;
      break;
    case SpaceKind::CountablePartition: {
      Rational listed = 0;
      for (std::size_t i = 0; i < count; ++i) {
        natural[static_cast<WorldLabel>(i)] = cp[i];
        listed += cp[i];
      }
      const Rational total = *rule.analytic_sum();
      natural[static_cast<WorldLabel>(count)] = total - listed;
      residual = 1 - total;
      break;
    }
    case SpaceKind::ExplicitFinite:
      break;
  }

  LambdaRepresentation rep;
  std::vector<Rational> weights;
  for (const auto& atom : q.atoms) {
    rep.atoms.push_back(atom.representative);
    Rational w = 0;
    if (!atom.representative.is_added()) {
      auto it = natural.find(atom.representative.label);
      if (it != natural.end()) w = it->second;
    }
    weights.push_back(w);
  }
  if (!space.added_points().empty()) {
    // the compactification point carries the mass at infinity
    const bool star_in = space.added_points().front().in_every_proposition;
    for (std::size_t j = 0; j < q.atoms.size(); ++j) {
      const auto& sig = q.atoms[j].signature;
      const bool match = std::all_of(sig.begin(), sig.end(), [&](std::uint8_t b) { return (b != 0) == star_in; });
      if (match) {
        weights[j] += residual;
        residual = 0;
        break;
      }
    }
  }
  bool clamped = false;
  for (auto& w : weights) {
    // float mode admits steps against the family order within tolerance
    if (sgn(w) < 0) {
      w = 0;
      clamped = true;
    }
  }
  if (sgn(residual) < 0) {
    residual = 0;
    clamped = true;
  }
  if (clamped) {
    sv.exact = false;
    verdict.exact = false;
  }
  rep.weights = to_doubles(weights);
  if (sv.exact) rep.exact_weights = weights;
  rep.exact_residual = residual;
  rep.residual = residual.get_d();
  rep.residual_in_every_proposition = residual_everywhere;
  verdict.witness = std::move(rep);
  if (!limit_known) verdict.exact = false;
  return verdict;
}

}  // namespace

CoherenceVerdict check_coherence(const Credence& c, const OpinionSpace& space, const CoherenceOptions& options) {
  c.validate();
  if (finite_kind(space)) return explicit_coherence(c, space, options);
  return symbolic_coherence(c, space, options);
}

CoherenceVerdict check_countable_coherence(const Credence& c, const OpinionSpace& space,
                                           const CoherenceOptions& options) {
  CoherenceVerdict verdict = check_coherence(c, space, options);
  if (verdict.status != CoherenceStatus::Coherent) return verdict;
  if (finite_kind(space)) {
    verdict.status = CoherenceStatus::CountablyCoherent;
    verdict.note = "finite spaces are compact: coherence and countable coherence coincide";
    return verdict;
  }
  if (!space.added_points().empty()) {
    verdict.status = CoherenceStatus::CountablyCoherent;
    verdict.note = "compactified space: mass at infinity sits on the added point";
    return verdict;
  }
  if (!c.exact_limit() && !c.limit(truncation_of(space, options))) {
    verdict.status = CoherenceStatus::Undetermined;
    verdict.note = "limit of the credence could not be established up to the truncation";
    return verdict;
  }
  const auto& rep = *verdict.witness;
  const bool zero = verdict.exact ? sgn(rep.exact_residual) == 0 : std::abs(rep.residual) <= options.tolerance;
  if (zero) {
    verdict.status = CoherenceStatus::CountablyCoherent;
  } else {
    verdict.note = "residual mass " + std::to_string(rep.residual) + " is not carried by any world";
  }
  return verdict;
}

bool TarskiOracle::tuple_included(const std::vector<std::vector<bool>>& phis,
                                  const std::vector<std::vector<bool>>& psis) {
  // S^{r,k}: union over (k+1)-element index sets of the intersection
  auto level_set = [](const std::vector<std::vector<bool>>& sets, std::size_t k) {
    const std::size_t r = sets.size();
    const std::size_t width = sets.empty() ? 0 : sets.front().size();
    std::vector<bool> out(width, false);
    if (k + 1 > r) return out;
    std::vector<bool> pick(r, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k + 1), true);
    do {
      for (std::size_t w = 0; w < width; ++w) {
        if (out[w]) continue;
        bool all = true;
        for (std::size_t i = 0; i < r && all; ++i) {
          if (pick[i]) all = sets[i][w];
        }
        if (all) out[w] = true;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
  };
  const std::size_t width = !phis.empty() ? phis.front().size() : (psis.empty() ? 0 : psis.front().size());
  for (std::size_t k = 0; k < phis.size(); ++k) {
    auto lhs = level_set(phis, k);
    auto rhs = psis.empty() ? std::vector<bool>(width, false) : level_set(psis, k);
    for (std::size_t w = 0; w < width; ++w) {
      if (lhs[w] && !rhs[w]) return false;
    }
  }
  return true;
}

TarskiOracle::TarskiOracle(const OpinionSpace& space, std::size_t max_tuple_len) {
  if (space.kind() != SpaceKind::ExplicitFinite) {
    fail(ErrorCode::InvalidArgument, "the partial-measure oracle needs an explicit finite space");
  }
  if (max_tuple_len > kMaxTupleLength) {
    fail(ErrorCode::InvalidArgument, "tuple length bound " + std::to_string(max_tuple_len) + " exceeds " +
                                         std::to_string(kMaxTupleLength));
  }
  const Quotient q = build_quotient(space);
  propositions_ = q.propositions;
  const std::size_t kinds = propositions_ + 1;  // last one is W
  auto set_of = [&](std::size_t i) {
    std::vector<bool> s(q.atoms.size(), true);
    if (i < propositions_) {
      for (std::size_t a = 0; a < q.atoms.size(); ++a) s[a] = q.matrix.at(a, i) != 0;
    }
    return s;
  };
  std::vector<std::vector<bool>> sets;
  for (std::size_t i = 0; i < kinds; ++i) sets.push_back(set_of(i));

  // nondecreasing index tuples stand for multisets; order is irrelevant to
  // the S^{m,k} sets and to the sums
  std::vector<std::vector<std::size_t>> tuples{{}};
  for (std::size_t len = 1; len <= max_tuple_len; ++len) {
    std::vector<std::size_t> t(len, 0);
    while (true) {
      tuples.push_back(t);
      std::size_t pos = len;
      while (pos > 0 && t[pos - 1] == kinds - 1) --pos;
      if (pos == 0) break;
      const std::size_t v = t[pos - 1] + 1;
      for (std::size_t j = pos - 1; j < len; ++j) t[j] = v;
    }
  }

  std::set<std::vector<long>> seen;
  for (const auto& phi : tuples) {
    if (phi.empty()) continue;
    std::vector<std::vector<bool>> phi_sets;
    for (std::size_t i : phi) phi_sets.push_back(sets[i]);
    for (const auto& psi : tuples) {
      std::vector<long> net(kinds, 0);
      for (std::size_t i : phi) ++net[i];
      for (std::size_t i : psi) --net[i];
      // the inequality only sees the net multiplicities
      if (std::none_of(net.begin(), net.end(), [](long v) { return v > 0; })) continue;
      if (seen.count(net)) continue;
      std::vector<std::vector<bool>> psi_sets;
      for (std::size_t i : psi) psi_sets.push_back(sets[i]);
      if (!tuple_included(phi_sets, psi_sets)) continue;
      seen.insert(net);
      Pair p;
      for (std::size_t i : phi) p.phis.push_back(i == propositions_ ? PartialMeasureViolation::kWholeSpace : i);
      for (std::size_t i : psi) p.psis.push_back(i == propositions_ ? PartialMeasureViolation::kWholeSpace : i);
      pairs_.push_back(std::move(p));
    }
  }
}

std::vector<PartialMeasureViolation> TarskiOracle::violations(const Credence& c, Mode mode, bool first_only) const {
  c.validate();
  if (!c.is_rule() && c.size() != propositions_) {
    fail(ErrorCode::InvalidArgument, "credence length does not match the space");
  }
  std::vector<PartialMeasureViolation> out;
  const std::vector<Rational> exact = c.exact_prefix(propositions_);
  const std::vector<double> approx = to_doubles(exact);
  for (const auto& p : pairs_) {
    if (mode == Mode::Rational) {
      Rational lhs = 0;
      Rational rhs = 0;
      for (std::size_t i : p.phis) lhs += i == PartialMeasureViolation::kWholeSpace ? Rational(1) : exact[i];
      for (std::size_t i : p.psis) rhs += i == PartialMeasureViolation::kWholeSpace ? Rational(1) : exact[i];
      if (lhs <= rhs) continue;
      PartialMeasureViolation v{p.phis, p.psis, lhs.get_d(), rhs.get_d(), lhs, rhs};
      out.push_back(std::move(v));
    } else {
      double lhs = 0.0;
      double rhs = 0.0;
      for (std::size_t i : p.phis) lhs += i == PartialMeasureViolation::kWholeSpace ? 1.0 : approx[i];
      for (std::size_t i : p.psis) rhs += i == PartialMeasureViolation::kWholeSpace ? 1.0 : approx[i];
      if (lhs <= rhs + kCoherenceTolerance) continue;
      PartialMeasureViolation v{p.phis, p.psis, lhs, rhs, to_rational(lhs), to_rational(rhs)};
      out.push_back(std::move(v));
    }
    if (first_only) break;
  }
  return out;
}

std::vector<PartialMeasureViolation> check_partial_measure(const Credence& c, const OpinionSpace& space,
                                                           std::size_t max_tuple_len, Mode mode) {
  return TarskiOracle(space, max_tuple_len).violations(c, mode);
}

}  // namespace credal
