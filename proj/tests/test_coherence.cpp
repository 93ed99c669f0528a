#include <gtest/gtest.h>

#include <random>

#include "credal/coherence.hpp"
#include "credal/error.hpp"
#include "credal/hull_lp.hpp"
#include "oracles.hpp"

using namespace credal;

namespace {

CoherenceOptions rational_mode() {
  CoherenceOptions o;
  o.mode = Mode::Rational;
  return o;
}

Credence exact(std::initializer_list<const char*> xs) { return Credence::finite_exact(oracle::rationals(xs)); }

void expect_witness_reproduces(const CoherenceVerdict& v, const Credence& c, const OpinionSpace& space) {
  ASSERT_TRUE(v.witness);
  const auto& w = *v.witness;
  EXPECT_NEAR(w.total(), 1.0, 1e-9);
  for (double x : w.weights) EXPECT_GE(x, -1e-12);
  for (std::size_t i = 0; i < c.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.weights.size(); ++k) s += w.weights[k] * space.contains(w.atoms[k], i);
    EXPECT_NEAR(s, c.at(i), kCoherenceTolerance);
  }
}

}  // namespace

TEST(Coherence, PartitionOfThreeWorlds) {
  const auto space = OpinionSpace::explicit_finite({1, 2, 3}, {{1}, {2}, {3}});
  const auto c = exact({"0.2", "0.3", "0.5"});
  const auto v = check_coherence(c, space, rational_mode());
  EXPECT_EQ(v.status, CoherenceStatus::Coherent);
  ASSERT_TRUE(v.witness);
  ASSERT_EQ(v.witness->exact_weights.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto label = v.witness->atoms[k].label;
    EXPECT_EQ(v.witness->exact_weights[k], c.exact_at(static_cast<std::size_t>(label - 1)));
  }
  expect_witness_reproduces(v, c, space);

  const auto bad = check_coherence(exact({"0.5", "0.6", "0.2"}), space, rational_mode());
  EXPECT_EQ(bad.status, CoherenceStatus::Incoherent);
  EXPECT_TRUE(bad.separation);
}

TEST(Coherence, ComplementPairOutsideSegment) {
  const auto space = OpinionSpace::explicit_finite({1, 2}, {{1}, {2}});
  const auto c = exact({"0.6", "0.5"});
  const auto rows = oracle::valuation_rows(space);
  EXPECT_FALSE(oracle::in_hull(rows, c.exact_values()));
  const auto v = check_coherence(c, space, rational_mode());
  EXPECT_EQ(v.status, CoherenceStatus::Incoherent);
  ASSERT_TRUE(v.separation);
  // separating functional: y . v_w <= t < y . c
  const auto& s = *v.separation;
  for (const auto& r : rows) {
    Rational dot = 0;
    for (std::size_t i = 0; i < r.size(); ++i) dot += s.exact_y[i] * r[i];
    EXPECT_LE(dot, s.exact_threshold);
  }
  Rational dc = 0;
  for (std::size_t i = 0; i < 2; ++i) dc += s.exact_y[i] * c.exact_at(i);
  EXPECT_GT(dc, s.exact_threshold);
}

TEST(Coherence, OutOfRangeRejected) {
  const auto space = OpinionSpace::explicit_finite({1, 2}, {{1}});
  try {
    check_coherence(Credence::finite({1.2}), space);
    FAIL();
  } catch (const CredalError& e) {
    EXPECT_EQ(e.name(), "invalid-credence");
  }
}

TEST(Coherence, LpAgreesWithHullOracle) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t nw = 1 + rng() % 6;
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
    for (auto& x : c) {
      x = Rational(static_cast<long>(rng() % 11), 10);
      x.canonicalize();
    }
    const bool member = oracle::in_hull(oracle::valuation_rows(space), c);
    const auto v = check_coherence(Credence::finite_exact(c), space, rational_mode());
    EXPECT_EQ(v.status == CoherenceStatus::Coherent, member);
    const auto f = check_coherence(Credence::finite_exact(c), space);
    EXPECT_EQ(f.status == CoherenceStatus::Coherent, member);
    if (member) expect_witness_reproduces(f, Credence::finite_exact(c), space);
  }
}

TEST(Coherence, HullTemplateMatchesInBothArithmetics) {
  ValuationMatrix m;
  m.cols = 2;
  m.rows = {{1, 0}, {0, 1}, {1, 1}};
  auto in = hull_membership<Rational>(m, {Rational(1, 2), Rational(3, 4)}, 0.0);
  EXPECT_TRUE(in.member);
  auto out = hull_membership<Rational>(m, {Rational(1, 4), Rational(1, 4)}, 0.0);
  EXPECT_FALSE(out.member);
  auto fin = hull_membership<double>(m, {0.25, 0.25}, 1e-9);
  EXPECT_FALSE(fin.member);
}

TEST(Coherence, SymbolicFamilyRules) {
  const auto tails = OpinionSpace::tail_sets(16);
  EXPECT_EQ(check_coherence(Credence::from_rule(CredenceRule::inv_sqrt()), tails).status, CoherenceStatus::Coherent);
  EXPECT_EQ(check_coherence(Credence::from_rule(CredenceRule::complement_geometric(1, Rational(1, 2))), tails).status,
            CoherenceStatus::Incoherent);
  const auto init = OpinionSpace::initial_segments(16);
  EXPECT_EQ(check_coherence(Credence::from_rule(CredenceRule::zero()), init).status, CoherenceStatus::Coherent);
  EXPECT_EQ(check_coherence(Credence::from_rule(CredenceRule::geometric(1, Rational(1, 2))), init).status,
            CoherenceStatus::Incoherent);
  const auto part = OpinionSpace::partition(std::nullopt, 16);
  EXPECT_EQ(check_coherence(Credence::from_rule(CredenceRule::geometric(1, Rational(1, 2))), part).status,
            CoherenceStatus::Coherent);
  const auto over = check_coherence(Credence::from_rule(CredenceRule::constant(Rational(1, 3))), part);
  EXPECT_EQ(over.status, CoherenceStatus::Incoherent);
  ASSERT_TRUE(over.violation);
  EXPECT_GT(over.violation->exact_lhs, over.violation->exact_rhs);
}

TEST(Coherence, CountableCoherenceExamples) {
  const auto ex41 = check_countable_coherence(Credence::from_rule(CredenceRule::inv_sqrt()), OpinionSpace::tail_sets());
  EXPECT_EQ(ex41.status, CoherenceStatus::CountablyCoherent);

  const auto ex42 =
      check_countable_coherence(Credence::from_rule(CredenceRule::zero()), OpinionSpace::initial_segments());
  EXPECT_EQ(ex42.status, CoherenceStatus::Coherent);
  ASSERT_TRUE(ex42.witness);
  EXPECT_EQ(ex42.witness->residual, 1.0);

  const auto geo = check_countable_coherence(Credence::from_rule(CredenceRule::geometric(1, Rational(1, 2))),
                                             OpinionSpace::partition());
  EXPECT_EQ(geo.status, CoherenceStatus::CountablyCoherent);

  const auto half = check_countable_coherence(Credence::from_rule(CredenceRule::geometric(Rational(1, 2), Rational(1, 2))),
                                              OpinionSpace::partition());
  EXPECT_EQ(half.status, CoherenceStatus::Coherent);
}

TEST(Coherence, UndeclaredLimitIsUndetermined) {
  // a rule whose limit is requested numerically but never settles is never
  // promoted to countable coherence
  const auto c = Credence::from_rule(CredenceRule::inv_sqrt(), std::optional<double>{});
  const auto v = check_countable_coherence(c, OpinionSpace::tail_sets(8));
  EXPECT_NE(v.status, CoherenceStatus::CountablyCoherent);
}

TEST(Coherence, CompactifiedSpaceCarriesResidualOnAddedPoint) {
  const auto comp = compactify(OpinionSpace::initial_segments(8));
  const auto v = check_countable_coherence(Credence::from_rule(CredenceRule::zero()), comp.space, rational_mode());
  EXPECT_EQ(v.status, CoherenceStatus::CountablyCoherent);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->residual, 0.0);
}

TEST(Coherence, MonotoneRuleMatchesTruncatedLp) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t K = 1 + rng() % 8;
    const bool tails = trial % 2 == 0;
    std::vector<Rational> v(K);
    for (auto& x : v) {
      x = Rational(static_cast<long>(rng() % 11), 10);
      x.canonicalize();
    }
    if (rng() % 2) {
      std::sort(v.begin(), v.end());
      if (tails) std::reverse(v.begin(), v.end());
    }
    const Rational tail = tails ? Rational(0) : Rational(1);
    const auto symbolic = tails ? OpinionSpace::tail_sets(K) : OpinionSpace::initial_segments(K);
    const auto c = Credence::from_rule(CredenceRule::list(v, tail));
    const auto sv = check_coherence(c, symbolic, rational_mode());

    // the same family as an explicit space on worlds 0..K+1, plus the tail value
    std::vector<WorldLabel> worlds;
    for (WorldLabel w = 0; w <= static_cast<WorldLabel>(K + 1); ++w) worlds.push_back(w);
    std::vector<std::vector<WorldLabel>> props(K);
    for (std::size_t k = 0; k < K; ++k) {
      for (auto w : worlds) {
        if (symbolic.contains(WorldPoint::natural(w), k)) props[k].push_back(w);
      }
    }
    const auto explicit_space = OpinionSpace::explicit_finite(worlds, props);
    const auto ev = check_coherence(Credence::finite_exact(v), explicit_space, rational_mode());
    EXPECT_EQ(sv.status == CoherenceStatus::Incoherent, ev.status == CoherenceStatus::Incoherent) << "trial " << trial;
  }
}

TEST(PartialMeasure, ComplementPair) {
  // worlds 1, 2; F = {W, p, p^c}
  const auto space = OpinionSpace::explicit_finite({1, 2}, {{1, 2}, {1}, {2}});
  const auto bad = check_partial_measure(exact({"1", "0.6", "0.5"}), space, 2);
  ASSERT_FALSE(bad.empty());
  bool found = false;
  for (const auto& v : bad) {
    if (v.exact_lhs == Rational(11, 10) && v.exact_rhs == 1) found = true;
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(check_partial_measure(exact({"1", "0.6", "0.4"}), space, 4).empty());
  EXPECT_TRUE(check_partial_measure(exact({"1"}), OpinionSpace::explicit_finite({1}, {{1}}), 2).empty());
}

TEST(PartialMeasure, LengthBound) {
  const auto space = OpinionSpace::explicit_finite({1, 2}, {{1}});
  EXPECT_THROW(check_partial_measure(exact({"0.5"}), space, kMaxTupleLength + 1), CredalError);
  EXPECT_THROW(check_partial_measure(exact({"0.5"}), OpinionSpace::tail_sets(), 2), CredalError);
}

TEST(PartialMeasure, InclusionMatchesCounting) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t worlds = 1 + rng() % 6;
    auto random_sets = [&](std::size_t count) {
      std::vector<std::vector<bool>> s(count, std::vector<bool>(worlds));
      for (auto& set : s) {
        for (std::size_t w = 0; w < worlds; ++w) set[w] = rng() % 2;
      }
      return s;
    };
    const auto phis = random_sets(1 + rng() % 4);
    const auto psis = random_sets(rng() % 5);
    EXPECT_EQ(TarskiOracle::tuple_included(phis, psis), oracle::tuple_included(phis, psis, worlds));
  }
}
