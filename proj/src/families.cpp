#include "credal/families.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "credal/coherence.hpp"
#include "credal/error.hpp"

namespace credal {

bool ExampleReport::all_pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

void ExampleReport::check(std::string name, bool pass, std::string details) {
  assertions.push_back(Assertion{std::move(name), pass, std::move(details)});
}

std::vector<std::string> example_ids() { return {"ex4.1", "ex4.2", "walsh", "partition_theorem"}; }

std::string_view to_string(StabilityProperty p) { return p == StabilityProperty::WStable ? "w_stable" : "s_stable"; }

std::string_view to_string(StabilityStatus s) {
  switch (s) {
    case StabilityStatus::ProvenTrue:
      return "proven_true";
    case StabilityStatus::ProvenFalseWitness:
      return "proven_false_witness";
    case StabilityStatus::Unknown:
      return "unknown";
  }
  return "unknown";
}

PartitionBound partition_bound(const InaccuracyMeasure& m) {
  m.validate();
  m.require_countable();
  if (!m.generator.is_normalized()) {
    fail(ErrorCode::InvalidArgument, "partition bound needs a normalized generator (phi(0) = phi'(0) = 0)");
  }
  PartitionBound b;
  const double a = m.weights.sup();
  // d(1, y) decreases in y, so its maximum over [0,1] is d(1, 0)
  b.C = a * m.generator.divergence(1.0, 0.0).value();
  // y phi'(y) - phi(y) <= y phi'(1) <= phi'(1) by convexity
  b.D = a * m.generator.derivative(1.0);
  return b;
}

namespace {

std::vector<WorldLabel> sample_worlds(Rng& rng, std::size_t count, WorldLabel range) {
  std::vector<WorldLabel> out{0};
  while (out.size() < count) {
    const auto w = static_cast<WorldLabel>(rng.below(static_cast<std::uint64_t>(range)));
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
  return out;
}

std::string join_labels(const std::vector<WorldLabel>& xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

/// Random point of the grid {0, 1/q, ..., 1}^count.
std::vector<Rational> random_grid(Rng& rng, std::size_t count, long q) {
  std::vector<Rational> v(count);
  for (auto& x : v) x = Rational(static_cast<long>(rng.below(static_cast<std::uint64_t>(q + 1))), q);
  return v;
}

/// Random exact coherent credence on the first `count` cells of a
/// partition: integer masses on the cells and on the rest, normalized.
std::vector<Rational> random_partition_coherent(Rng& rng, std::size_t count) {
  std::vector<long> mass(count + 1);
  long total = 0;
  const bool sparse = rng.uniform() < 0.3;
  for (auto& x : mass) {
    x = static_cast<long>(rng.below(1000));
    if (sparse && rng.uniform() < 0.7) x = 0;
    total += x;
  }
  if (total == 0) {
    mass[0] = 1;
    total = 1;
  }
  std::vector<Rational> v(count);
  for (std::size_t k = 0; k < count; ++k) {
    v[k] = Rational(mass[k], total);
    v[k].canonicalize();
  }
  return v;
}

ExampleReport tails_inv_sqrt(const ReproduceOptions& options) {
  ExampleReport r;
  r.id = "ex4.1";
  Rng rng(options.seed);
  const std::size_t K = options.truncation.value_or(kFamilyTruncation);
  const OpinionSpace space = OpinionSpace::tail_sets(K);
  const InaccuracyMeasure brier = InaccuracyMeasure::brier();
  const Credence c = Credence::from_rule(CredenceRule::inv_sqrt());

  const CompactnessReport compact = search_compactness_witness(space);
  r.check("tail sets are not compact", compact.verdict == CompactnessVerdict::NonCompactWitness,
          compact.witness ? compact.witness->rule : compact.certificate);

  const CoherenceVerdict cc = check_countable_coherence(c, space);
  r.check("c(N) = 1/sqrt(N+1) is countably coherent", cc.status == CoherenceStatus::CountablyCoherent,
          std::string(to_string(cc.status)));

  const auto worlds = sample_worlds(rng, 10, 1000);
  bool all_div = true;
  nlohmann::ordered_json scores = nlohmann::ordered_json::array();
  for (WorldLabel w : worlds) {
    const SeriesVerdict s = score_countable(c, brier, WorldPoint::natural(w), space);
    all_div = all_div && s.status == SeriesStatus::Diverges && s.tag == "harmonic comparison";
    scores.push_back({{"world", w}, {"status", to_string(s.status)}, {"tag", s.tag}});
  }
  r.check("generalized Brier score diverges at every sampled world (harmonic comparison)", all_div,
          "worlds " + join_labels(worlds));

  const DominatorResult dom = find_dominator(c, brier, space);
  r.check("an omniscient credence strongly dominates c",
          dom.omniscient && dom.verdict.relation == Relation::StronglyDominates,
          std::string(to_string(dom.verdict.relation)));

  bool every_omniscient = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const Credence v = omniscient_credence(space, WorldPoint::natural(worlds[i]));
    every_omniscient = every_omniscient && compare(c, v, brier, space).relation == Relation::StronglyDominates;
  }
  r.check("other omniscient credences strongly dominate c as well", every_omniscient);

  r.data["truncation"] = K;
  r.data["first_values"] = {c.at(0), c.at(1), c.at(2)};
  r.data["scores"] = scores;
  return r;
}

ExampleReport initial_segments_zero(const ReproduceOptions& options) {
  ExampleReport r;
  r.id = "ex4.2";
  Rng rng(options.seed);
  const std::size_t K = options.truncation.value_or(kFamilyTruncation);
  const OpinionSpace space = OpinionSpace::initial_segments(K);
  const InaccuracyMeasure brier = InaccuracyMeasure::brier();
  const Credence c = Credence::from_rule(CredenceRule::zero());
  CoherenceOptions co;
  co.mode = Mode::Rational;

  const CoherenceVerdict fin = check_coherence(c, space, co);
  r.check("c = 0 is coherent", fin.status == CoherenceStatus::Coherent, std::string(to_string(fin.status)));
  const CoherenceVerdict cnt = check_countable_coherence(c, space, co);
  r.check("c = 0 is not countably coherent", cnt.status == CoherenceStatus::Coherent,
          cnt.witness ? "residual mass " + std::to_string(cnt.witness->residual) : cnt.note);

  const auto worlds = sample_worlds(rng, 10, 1000);
  bool all_inf = true;
  for (WorldLabel w : worlds) {
    all_inf = all_inf && score_countable(c, brier, WorldPoint::natural(w), space).is_infinite();
  }
  r.check("score is infinite at every sampled world", all_inf, "worlds " + join_labels(worlds));

  const Compactification comp = compactify(space);
  const bool one_point = comp.added_points.size() == 1 && !comp.star_signatures.front();
  r.check("compactification adds exactly one point, outside every segment", one_point,
          one_point ? comp.added_points.front().label : "");
  const CompactnessReport again = search_compactness_witness(comp.space);
  r.check("compactified space is certified compact", again.verdict == CompactnessVerdict::CompactCertified);

  const CoherenceVerdict star = check_countable_coherence(c, comp.space, co);
  double on_added = 0.0;
  if (star.witness) {
    for (std::size_t j = 0; j < star.witness->atoms.size(); ++j) {
      const auto& w = star.witness->atoms[j];
      // the added point merges with the worlds beyond the truncation
      if (w.is_added() || w.label == static_cast<WorldLabel>(K + 1)) on_added += star.witness->weights[j];
    }
  }
  r.check("c* is countably coherent with all mass at the added point",
          star.status == CoherenceStatus::CountablyCoherent && std::abs(on_added - 1.0) < 1e-12);
  const SeriesVerdict at_x = score_countable(c, brier, WorldPoint::added_point(0), comp.space);
  r.check("c* coincides with the omniscient credence of the added point",
          at_x.status == SeriesStatus::Converged && at_x.value == 0.0);

  r.data["truncation"] = K;
  r.data["added_points"] = comp.added_points.size();
  r.data["added_label"] = comp.added_points.empty() ? "" : comp.added_points.front().label;
  return r;
}

ExampleReport example_walsh(const ReproduceOptions& options) {
  ExampleReport r;
  r.id = "walsh";
  Rng rng(options.seed);
  const std::size_t K = options.truncation.value_or(16);
  const std::size_t samples = options.samples.value_or(100);
  const InaccuracyMeasure walsh = InaccuracyMeasure::walsh();
  const OpinionSpace partition = OpinionSpace::partition(std::nullopt, K);
  const OpinionSpace tails = OpinionSpace::tail_sets(K);

  double worst_score = 0.0;
  bool bounded = true;
  for (std::size_t s = 0; s < 20; ++s) {
    const OpinionSpace& space = s % 2 ? tails : partition;
    const Credence c = Credence::from_rule(CredenceRule::list(random_grid(rng, K, 20), 0));
    for (const auto& atom : build_quotient(space, K).atoms) {
      const SeriesVerdict v = score_countable(c, walsh, atom.representative, space);
      bounded = bounded && v.status == SeriesStatus::Converged && v.value + v.tail_bound <= 1.0;
      worst_score = std::max(worst_score, v.value);
    }
  }
  r.check("every Walsh score with the quadratic generator is at most 1", bounded,
          "largest observed " + std::to_string(worst_score));

  ProjectionOptions po;
  po.truncation = K;
  po.mode = options.mode;
  std::size_t dominated = 0;
  std::size_t tried = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  while (tried < samples) {
    const bool use_tails = tried % 2 == 1;
    const OpinionSpace& space = use_tails ? tails : partition;
    const Credence c = Credence::from_rule(CredenceRule::list(random_grid(rng, K, 20), 0));
    if (check_coherence(c, space).status != CoherenceStatus::Incoherent) continue;
    ++tried;
    const DominatorResult dom = find_dominator(c, walsh, space, po);
    const bool coherent_pi = check_coherence(dom.dominator, space).status == CoherenceStatus::Coherent;
    if (dom.verdict.relation == Relation::StronglyDominates && coherent_pi) ++dominated;
    if (dom.projection) worst_slack = std::min(worst_slack, dom.projection->pythagorean.worst_slack);
  }
  r.check("random incoherent truncated credences are strongly dominated by their projections", dominated == samples,
          std::to_string(dominated) + "/" + std::to_string(samples));

  const Credence small = Credence::from_rule(CredenceRule::list({Rational(9, 10), Rational(9, 10)}, 0));
  ProjectionOptions two = po;
  two.truncation = 2;
  const DominatorResult d2 = find_dominator(small, walsh, OpinionSpace::partition(std::nullopt, 2), two);
  r.check("c = (0.9, 0.9) padded with zeros is strongly dominated",
          d2.verdict.relation == Relation::StronglyDominates);

  r.data["truncation"] = K;
  r.data["samples"] = samples;
  r.data["dominated"] = dominated;
  r.data["largest_score"] = worst_score;
  r.data["pythagorean_worst_slack"] = worst_slack;
  return r;
}

/// Adversarial search for a weak dominator of a coherent credence on the
/// first K cells of a partition. Scores are compared through differences:
/// every world outside the listed cells (and the added point) sees the
/// same change, sum_k a_k (d(0, x_k) - d(0, c_k)).
struct PartitionSearch {
  const InaccuracyMeasure& m;
  std::vector<double> c;
  std::vector<double> zero_c;
  std::vector<double> one_c;
  std::size_t evaluations = 0;

  PartitionSearch(const InaccuracyMeasure& measure, std::vector<double> credence) : m(measure), c(std::move(credence)) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      zero_c.push_back(m.weights.at(k) * m.generator.divergence(0.0, c[k]).value());
      one_c.push_back(m.weights.at(k) * m.generator.divergence(1.0, c[k]).value());
    }
  }

  /// (max, min) over atoms of I(x, w) - I(c, w).
  std::pair<double, double> spread(const std::vector<double>& x) {
    ++evaluations;
    double base = 0.0;
    std::vector<double> zx(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      zx[k] = m.weights.at(k) * m.generator.divergence(0.0, x[k]).value();
      base += zx[k] - zero_c[k];
    }
    double hi = base;
    double lo = base;
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double d = base - (zx[n] - zero_c[n]) + (m.weights.at(n) * m.generator.divergence(1.0, x[n]).value() - one_c[n]);
      hi = std::max(hi, d);
      lo = std::min(lo, d);
    }
    return {hi, lo};
  }
};

ExampleReport example_partition(const ReproduceOptions& options) {
  ExampleReport r;
  r.id = "partition_theorem";
  Rng rng(options.seed);
  const std::size_t K = options.truncation.value_or(kFamilyTruncation);
  const std::size_t samples = options.samples.value_or(200);
  const std::size_t budget = options.search_budget;
  const InaccuracyMeasure brier = InaccuracyMeasure::brier();
  const OpinionSpace space = OpinionSpace::partition(std::nullopt, K);
  const Compactification comp = compactify(space);
  const PartitionBound bound = partition_bound(brier);
  r.check("C + D = 3 for unit-weight Brier", bound.C == 1.0 && bound.D == 2.0,
          "C=" + std::to_string(bound.C) + " D=" + std::to_string(bound.D));

  std::size_t found = 0;
  std::size_t evaluations = 0;
  double worst_score = 0.0;
  bool within = true;
  bool finite_expectation = true;
  double closest = std::numeric_limits<double>::infinity();
  const Quotient atoms = build_quotient(comp.space, K);

  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<Rational> exact = random_partition_coherent(rng, K);
    const Credence c = Credence::from_rule(CredenceRule::list(exact, 0));

    // bound at every atom, the point outside all cells included
    std::vector<WorldPoint> checked;
    for (const auto& a : atoms.atoms) checked.push_back(a.representative);
    checked.push_back(WorldPoint::added_point(0));
    for (const auto& w : checked) {
      const SeriesVerdict v = score_countable(c, brier, w, comp.space);
      within = within && v.status == SeriesStatus::Converged && v.value <= bound.bound();
      worst_score = std::max(worst_score, v.value);
    }
    const CoherenceVerdict cv = check_coherence(c, space);
    if (cv.witness) {
      finite_expectation = finite_expectation &&
                           expected_inaccuracy(c, brier, *cv.witness, space).status == SeriesStatus::Converged;
    }

    PartitionSearch search(brier, to_doubles(exact));
    auto consider = [&](const std::vector<double>& x) {
      auto [hi, lo] = search.spread(x);
      closest = std::min(closest, hi);
      if (hi <= 1e-12 && lo < -1e-12) {
        // confirm exactly before counting a dominator
        const Credence d = Credence::from_rule(CredenceRule::list(to_rationals(x), 0));
        CompareOptions co;
        co.truncation = K;
        const auto verdict = compare(c, d, brier, space, co).relation;
        if (verdict == Relation::StronglyDominates || verdict == Relation::WeaklyDominates) ++found;
      }
      return hi;
    };

    // projections of random perturbations
    ProjectionOptions po;
    po.truncation = K;
    const std::size_t projections = std::max<std::size_t>(1, budget / 100);
    for (std::size_t p = 0; p < projections && search.evaluations < budget; ++p) {
      std::vector<Rational> noisy(K);
      for (std::size_t k = 0; k < K; ++k) {
        double v = exact[k].get_d() + (rng.uniform() - 0.5) * 0.2;
        noisy[k] = to_rational(std::clamp(v, 0.0, 1.0));
      }
      const Credence d0 = Credence::from_rule(CredenceRule::list(noisy, 0));
      const ProjectionResult pr = project_coherent(d0, brier, space, po);
      consider(pr.pi_c.prefix(K));
    }
    // random restarts with coordinate-wise descent on the worst atom
    while (search.evaluations < budget) {
      const double sigma = std::pow(10.0, -1.0 - 2.0 * rng.uniform());
      std::vector<double> x = search.c;
      for (auto& v : x) v = std::clamp(v + (rng.uniform() - 0.5) * 2.0 * sigma, 0.0, 1.0);
      double fx = consider(x);
      for (int step = 0; step < 100 && search.evaluations < budget; ++step) {
        std::vector<double> y = x;
        const std::size_t k = rng.below(K);
        y[k] = std::clamp(y[k] + (rng.uniform() - 0.5) * sigma, 0.0, 1.0);
        const double fy = consider(y);
        if (fy < fx) {
          x = std::move(y);
          fx = fy;
        }
      }
    }
    evaluations += search.evaluations;
  }

  r.check("no weak dominator found for any sampled coherent credence", found == 0,
          std::to_string(evaluations) + " evaluations, smallest worst-atom change " + std::to_string(closest));
  r.check("scores stay within C + D at every atom and at the added point", within,
          "largest observed " + std::to_string(worst_score));
  r.check("sampled coherent credences have finite expected inaccuracy", finite_expectation);

  r.data["truncation"] = K;
  r.data["samples"] = samples;
  r.data["evaluations"] = evaluations;
  r.data["C"] = bound.C;
  r.data["D"] = bound.D;
  r.data["largest_score"] = worst_score;
  r.data["dominators_found"] = found;
  return r;
}

}  // namespace

ExampleReport reproduce_example(std::string_view id, const ReproduceOptions& options) {
  ExampleReport r;
  if (id == "ex4.1") {
    r = tails_inv_sqrt(options);
  } else if (id == "ex4.2") {
    r = initial_segments_zero(options);
  } else if (id == "walsh") {
    r = example_walsh(options);
  } else if (id == "partition_theorem") {
    r = example_partition(options);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown example '" + std::string(id) + "'");
  }
  r.data["seed"] = options.seed;
  return r;
}

std::vector<StabilityFact> stability_report(const OpinionSpace& space, const InaccuracyMeasure& m,
                                            std::size_t search_budget, std::uint64_t seed) {
  std::vector<StabilityFact> facts;
  if (space.proposition_count()) {
    for (auto prop : {StabilityProperty::WStable, StabilityProperty::SStable}) {
      StabilityFact f;
      f.space_kind = space.kind();
      f.property = prop;
      f.status = StabilityStatus::ProvenTrue;
      f.source = "finite spaces are compact; the compactification is the identity";
      facts.push_back(std::move(f));
    }
    return facts;
  }
  if (space.kind() == SpaceKind::CountablePartition) {
    StabilityFact f;
    f.space_kind = space.kind();
    f.property = StabilityProperty::WStable;
    f.status = StabilityStatus::ProvenTrue;
    f.source = "partitions are W-stable: the compactification adds one point outside every cell";
    facts.push_back(std::move(f));
    return facts;
  }

  // tails and initial segments: falsification search. A witness needs a
  // coherent c that is dominated on W while c* is provably undominated on
  // W*; c* equal to the omniscient credence of the added point qualifies,
  // since only v_x itself scores 0 at x.
  const Compactification comp = compactify(space);
  const bool star_bit = comp.star_signatures.front();
  Rng rng(seed);
  std::vector<StabilityWitness> witnesses;
  std::size_t searched = 0;
  const std::size_t K = space.truncation_default();

  auto try_candidate = [&](const Credence& c) {
    ++searched;
    if (check_coherence(c, space).status == CoherenceStatus::Incoherent) return;
    const CredenceRule rule = c.as_rule();
    const bool at_added =
        rule.kind == RuleKind::Constant ? rule.value == (star_bit ? 1 : 0) : (rule.kind == RuleKind::Zero && !star_bit);
    if (!at_added) return;
    // an omniscient credence is the natural dominator when scores diverge
    const Credence d = omniscient_credence(space, WorldPoint::natural(0));
    CompareOptions co;
    co.truncation = K;
    DominanceVerdict base = compare(c, d, m, space, co);
    if (base.relation != Relation::StronglyDominates && base.relation != Relation::WeaklyDominates) return;
    DominanceVerdict lifted = compare(c, d, m, comp.space, co);
    if (lifted.relation == Relation::StronglyDominates || lifted.relation == Relation::WeaklyDominates) return;
    witnesses.push_back(StabilityWitness{c, d, std::move(base), std::move(lifted),
                                         "c* is the omniscient credence of the added point, so nothing dominates it"});
  };

  // constant credences first, then random coherent ones
  try_candidate(Credence::from_rule(CredenceRule::constant(star_bit ? 1 : 0)));
  try_candidate(Credence::from_rule(CredenceRule::constant(star_bit ? 0 : 1)));
  while (searched < search_budget) {
    std::vector<Rational> v = random_grid(rng, 8, 10);
    std::sort(v.begin(), v.end());
    if (space.kind() == SpaceKind::TailSets) std::reverse(v.begin(), v.end());
    const Rational tail = rng.uniform() < 0.5 ? v.back() : Rational(star_bit ? 1 : 0);
    if (space.kind() == SpaceKind::TailSets ? tail > v.back() : tail < v.back()) {
      ++searched;
      continue;
    }
    if (std::all_of(v.begin(), v.end(), [&](const Rational& x) { return x == tail; })) {
      try_candidate(Credence::from_rule(CredenceRule::constant(tail)));
    } else {
      try_candidate(Credence::from_rule(CredenceRule::list(v, tail)));
    }
  }

  for (auto prop : {StabilityProperty::WStable, StabilityProperty::SStable}) {
    StabilityFact f;
    f.space_kind = space.kind();
    f.property = prop;
    f.searched = searched;
    bool any = false;
    for (const auto& w : witnesses) {
      // S-stability needs a strong dominance on W that fails to lift
      if (prop == StabilityProperty::SStable && w.base.relation != Relation::StronglyDominates) continue;
      f.witnesses.push_back(w);
      any = true;
    }
    f.status = any ? StabilityStatus::ProvenFalseWitness : StabilityStatus::Unknown;
    f.source = any ? "falsification search" : "no witness found; not a proof";
    facts.push_back(std::move(f));
  }
  return facts;
}

}  // namespace credal
