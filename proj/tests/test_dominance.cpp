#include <gtest/gtest.h>

#include <random>

#include "credal/dominance.hpp"
#include "credal/error.hpp"
#include "oracles.hpp"

using namespace credal;

namespace {

const OpinionSpace& two_partition() {
  static const OpinionSpace s = OpinionSpace::explicit_finite({1, 2}, {{1}, {2}});
  return s;
}

ProjectionOptions rational_projection() {
  ProjectionOptions o;
  o.mode = Mode::Rational;
  return o;
}

}  // namespace

TEST(Compare, HandComputedPartition) {
  const auto c = Credence::finite({0.7, 0.7});
  const auto d = Credence::finite({0.5, 0.5});
  const auto v = compare(c, d, InaccuracyMeasure::brier(), two_partition());
  EXPECT_EQ(v.relation, Relation::StronglyDominates);
  ASSERT_EQ(v.per_atom.size(), 2u);
  for (const auto& a : v.per_atom) {
    EXPECT_NEAR(a.score_c.value, 0.58, 1e-12);
    EXPECT_NEAR(a.score_d.value, 0.5, 1e-12);
  }
  EXPECT_EQ(compare(c, c, InaccuracyMeasure::brier(), two_partition()).relation, Relation::NoDominance);
  EXPECT_EQ(compare(d, c, InaccuracyMeasure::brier(), two_partition()).relation, Relation::NoDominance);
}

TEST(Compare, ExactModeSeesTinyDifferences) {
  // d differs from c by 1e-30 in one coordinate; only exact arithmetic sees it
  const Rational eps(mpz_class(1), mpz_class("1000000000000000000000000000000"));
  const auto c = Credence::finite_exact({Rational(1, 2), Rational(1, 2)});
  const auto d = Credence::finite_exact({Rational(1, 2) + eps, Rational(1, 2) - eps});
  CompareOptions o;
  o.mode = Mode::Rational;
  const auto v = compare(c, d, InaccuracyMeasure::brier(), two_partition(), o);
  EXPECT_TRUE(v.exact);
  EXPECT_EQ(v.relation, Relation::NoDominance);
  int strict = 0;
  for (const auto& a : v.per_atom) strict += a.comparison != 0;
  EXPECT_EQ(strict, 2);
}

TEST(Compare, WeakWhenInfiniteScoresTie) {
  // entropy generator: c = (0, 0) scores infinity at both cells; d = (0, 1/2)
  // still scores infinity at cell 1 but is finite at cell 2
  const auto m = InaccuracyMeasure::with("log", ConvexGenerator::shifted_entropy(), Weights::constant(1.0));
  const auto v = compare(Credence::finite({0.0, 0.0}), Credence::finite({0.0, 0.5}), m, two_partition());
  EXPECT_EQ(v.relation, Relation::WeaklyDominates);
}

TEST(Compare, InfiniteScoresTieAndDominate) {
  const auto tails = OpinionSpace::tail_sets(8);
  const auto c = Credence::from_rule(CredenceRule::inv_sqrt());
  const auto v0 = omniscient_credence(tails, WorldPoint::natural(0));
  CompareOptions o;
  o.truncation = 8;
  EXPECT_EQ(compare(c, v0, InaccuracyMeasure::brier(), tails, o).relation, Relation::StronglyDominates);
  EXPECT_EQ(compare(c, c, InaccuracyMeasure::brier(), tails, o).relation, Relation::NoDominance);
}

TEST(Projection, PartitionOfTwo) {
  const auto c = Credence::finite({0.7, 0.7});
  const auto pr = project_coherent(c, InaccuracyMeasure::brier(), two_partition(), rational_projection());
  ASSERT_EQ(pr.exact_pi.size(), 2u);
  EXPECT_EQ(pr.exact_pi[0], Rational(1, 2));
  EXPECT_EQ(pr.exact_pi[1], Rational(1, 2));
  // 0.7 as a double is not 7/10; compare against the oracle on the same input
  const auto o = oracle::quadratic_projection({{1, 0}, {0, 1}}, c.exact_values(), {1, 1});
  EXPECT_EQ(*pr.exact_gap, o.distance);
  EXPECT_NEAR(pr.gap, 0.08, 1e-12);
  EXPECT_TRUE(pr.pythagorean.holds);
  ASSERT_TRUE(pr.pythagorean.exact_worst_slack);
  EXPECT_EQ(*pr.pythagorean.exact_worst_slack, 0);
}

TEST(Projection, ComplementPairNotASegmentEndpoint) {
  const auto c = Credence::finite_exact(oracle::rationals({"0.6", "0.5"}));
  const auto pr = project_coherent(c, InaccuracyMeasure::brier(), two_partition(), rational_projection());
  EXPECT_EQ(pr.exact_pi, oracle::rationals({"0.55", "0.45"}));
  EXPECT_EQ(*pr.exact_gap, Rational(1, 200));
  // residual is orthogonal to the segment direction (1,-1)
  EXPECT_EQ((c.exact_at(0) - pr.exact_pi[0]) - (c.exact_at(1) - pr.exact_pi[1]), 0);
  EXPECT_GE(*pr.pythagorean.exact_worst_slack, 0);

  const auto fl = project_coherent(Credence::finite({0.6, 0.5}), InaccuracyMeasure::brier(), two_partition());
  EXPECT_NEAR(fl.pi_c.at(0), 0.55, 1e-9);
  EXPECT_NEAR(fl.gap, 0.005, 1e-9);
  EXPECT_GE(fl.pythagorean.worst_slack, -1e-9);
}

TEST(Projection, GridOracleForTabulatedGenerator) {
  // E is the segment between (1,0) and (0,1): minimize D(s, c) over lambda
  const auto m = InaccuracyMeasure::with("tab", ConvexGenerator::default_tabulated(), Weights::constant(1.0));
  const auto c = Credence::finite({0.7, 0.6});
  const auto pr = project_coherent(c, m, two_partition());
  double best = 1e9;
  for (int k = 0; k <= 10000; ++k) {
    const double l = k / 10000.0;
    const double v = m.generator.divergence(l, 0.7).value() + m.generator.divergence(1 - l, 0.6).value();
    best = std::min(best, v);
  }
  EXPECT_NEAR(pr.gap, best, 1e-6);
  EXPECT_LE(pr.gap, best + 1e-12);
  EXPECT_TRUE(pr.pythagorean.holds);
}

TEST(Projection, CoherentInputIsFixed) {
  const auto space = OpinionSpace::explicit_finite({1, 2, 3}, {{1}, {1, 2}, {2, 3}});
  const auto c = Credence::finite_exact(oracle::rationals({"0.2", "0.7", "0.8"}));
  const auto pr = project_coherent(c, InaccuracyMeasure::brier(), space, rational_projection());
  EXPECT_EQ(*pr.exact_gap, 0);
  EXPECT_EQ(pr.exact_pi, c.exact_values());
}

TEST(Projection, MatchesExactQuadraticOracle) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t nw = 2 + rng() % 5;
    const std::size_t np = 1 + rng() % 3;
    std::vector<WorldLabel> worlds(nw);
    for (std::size_t i = 0; i < nw; ++i) worlds[i] = static_cast<WorldLabel>(i);
    std::vector<std::vector<WorldLabel>> props(np);
    for (auto& p : props) {
      for (auto w : worlds) {
        if (rng() % 2) p.push_back(w);
      }
    }
    const auto space = OpinionSpace::explicit_finite(worlds, props);
    std::vector<Rational> c(np);
    std::vector<Rational> h(np);
    std::vector<double> hd(np);
    for (std::size_t i = 0; i < np; ++i) {
      c[i] = Rational(static_cast<long>(rng() % 21), 20);
      c[i].canonicalize();
      hd[i] = 1.0 + static_cast<double>(rng() % 3);
      h[i] = Rational(static_cast<long>(hd[i]));
    }
    const auto m = InaccuracyMeasure::with("w", ConvexGenerator::quadratic(), Weights::from_list(hd));
    const auto expect = oracle::quadratic_projection(oracle::valuation_rows(space), c, h);
    const auto exact = project_coherent(Credence::finite_exact(c), m, space, rational_projection());
    EXPECT_EQ(*exact.exact_gap, expect.distance);
    EXPECT_EQ(exact.exact_pi, expect.point);
    const auto fl = project_coherent(Credence::finite_exact(c), m, space);
    EXPECT_NEAR(fl.gap, expect.distance.get_d(), 1e-8);
    for (std::size_t i = 0; i < np; ++i) EXPECT_NEAR(fl.pi_c.at(i), expect.point[i].get_d(), 1e-6);
  }
}

TEST(Projection, EntropyRejected) {
  const auto m = InaccuracyMeasure::with("log", ConvexGenerator::shifted_entropy(), Weights::constant(1.0));
  try {
    project_coherent(Credence::finite({0.7, 0.7}), m, two_partition());
    FAIL();
  } catch (const CredalError& e) {
    EXPECT_EQ(e.name(), "unsupported-measure");
  }
}

TEST(Projection, SingleAtomSpace) {
  const auto space = OpinionSpace::explicit_finite({1}, {{1}});
  const auto pr = project_coherent(Credence::finite({0.25}), InaccuracyMeasure::brier(), space, rational_projection());
  EXPECT_EQ(pr.exact_pi, std::vector<Rational>{1});
  EXPECT_EQ(*pr.exact_gap, Rational(9, 16));
}

TEST(FindDominator, PartitionOfTwo) {
  const auto r = find_dominator(Credence::finite({0.7, 0.7}), InaccuracyMeasure::brier(), two_partition(),
                                rational_projection());
  EXPECT_EQ(r.verdict.relation, Relation::StronglyDominates);
  EXPECT_FALSE(r.omniscient);
  EXPECT_EQ(r.dominator.exact_values(), (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
}

TEST(FindDominator, CoherentInputIsReturned) {
  const auto c = Credence::finite({0.3, 0.7});
  const auto r = find_dominator(c, InaccuracyMeasure::brier(), two_partition());
  EXPECT_EQ(r.verdict.relation, Relation::NoDominance);
  EXPECT_EQ(r.dominator.values(), c.values());
}

TEST(FindDominator, AllScoresInfiniteGivesOmniscient) {
  // inverse square root on tails: coherent, yet every world scores infinity
  const auto r = find_dominator(Credence::from_rule(CredenceRule::inv_sqrt()), InaccuracyMeasure::brier(),
                                OpinionSpace::tail_sets(8));
  EXPECT_TRUE(r.omniscient);
  EXPECT_EQ(r.verdict.relation, Relation::StronglyDominates);

  // finite analogue with the entropy generator: c = (0, 0) on a 2-partition.
  // v_1 scores 0 at cell 1 but is also infinite at cell 2, so only weakly
  const auto m = InaccuracyMeasure::with("log", ConvexGenerator::shifted_entropy(), Weights::constant(1.0));
  const auto f = find_dominator(Credence::finite({0.0, 0.0}), m, two_partition());
  EXPECT_TRUE(f.omniscient);
  EXPECT_EQ(f.verdict.relation, Relation::WeaklyDominates);
}

TEST(FindDominator, SymbolicListCredence) {
  const auto part = OpinionSpace::partition(std::nullopt, 6);
  const auto c = Credence::from_rule(CredenceRule::list(oracle::rationals({"0.5", "0.4", "0.3"}), 0));
  ProjectionOptions o;
  o.truncation = 6;
  const auto r = find_dominator(c, InaccuracyMeasure::walsh(), part, o);
  EXPECT_EQ(r.verdict.relation, Relation::StronglyDominates);
  EXPECT_EQ(check_coherence(r.dominator, part).status, CoherenceStatus::Coherent);
  EXPECT_THROW(find_dominator(Credence::from_rule(CredenceRule::constant(Rational(1, 2))), InaccuracyMeasure::walsh(),
                              part, o),
               CredalError);
}

TEST(Omniscient, ScoresZeroAtItsWorld) {
  const auto space = OpinionSpace::partition(std::nullopt, 10);
  const auto v = omniscient_credence(space, WorldPoint::natural(3));
  const auto s = score_countable(v, InaccuracyMeasure::brier(), WorldPoint::natural(3), space);
  ASSERT_EQ(s.status, SeriesStatus::Converged);
  EXPECT_EQ(s.value, 0.0);
}
