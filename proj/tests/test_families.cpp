#include <gtest/gtest.h>

#include "credal/coherence.hpp"
#include "credal/error.hpp"
#include "credal/families.hpp"

using namespace credal;

namespace {

void expect_all_pass(const ExampleReport& r) {
  EXPECT_FALSE(r.assertions.empty());
  for (const auto& a : r.assertions) EXPECT_TRUE(a.pass) << r.id << ": " << a.name << " " << a.details;
}

}  // namespace

TEST(Examples, TailsInvSqrt) { expect_all_pass(reproduce_example("ex4.1")); }

TEST(Examples, PartitionZeroCredence) { expect_all_pass(reproduce_example("ex4.2")); }

TEST(Examples, WalshWeights) { expect_all_pass(reproduce_example("walsh")); }

TEST(Examples, PartitionBoundSmallBudget) {
  ReproduceOptions o;
  o.samples = 40;
  o.search_budget = 2000;
  expect_all_pass(reproduce_example("partition_theorem", o));
}

TEST(Examples, UnknownIdRejected) { EXPECT_THROW(reproduce_example("nope"), CredalError); }

TEST(Examples, DeterministicUnderSeed) {
  ReproduceOptions o;
  o.seed = 77;
  o.samples = 20;
  o.search_budget = 500;
  const auto a = reproduce_example("partition_theorem", o);
  const auto b = reproduce_example("partition_theorem", o);
  EXPECT_EQ(a.data.dump(), b.data.dump());
  EXPECT_EQ(reproduce_example("walsh", o).data.dump(), reproduce_example("walsh", o).data.dump());
}

TEST(PartitionBound, Presets) {
  const auto brier = partition_bound(InaccuracyMeasure::brier());
  EXPECT_DOUBLE_EQ(brier.C, 1.0);
  EXPECT_DOUBLE_EQ(brier.D, 2.0);
  EXPECT_DOUBLE_EQ(brier.bound(), 3.0);
  const auto walsh = partition_bound(InaccuracyMeasure::walsh());
  EXPECT_DOUBLE_EQ(walsh.C, 0.5);
  EXPECT_DOUBLE_EQ(walsh.D, 1.0);
}

TEST(PartitionBound, Preconditions) {
  const auto shifted = InaccuracyMeasure::with("s", ConvexGenerator::quadratic().with_linear_shift(0.5, 0.0),
                                               Weights::constant(1.0));
  EXPECT_THROW(partition_bound(shifted), CredalError);
  const auto entropy = InaccuracyMeasure::with("log", ConvexGenerator::shifted_entropy(), Weights::constant(1.0));
  EXPECT_THROW(partition_bound(entropy), CredalError);
  EXPECT_THROW(Weights::constant(0.0).validate(), CredalError);
}

TEST(PartitionBound, HoldsOnSampledCoherentCredences) {
  // independent of the example driver: geometric and listed masses
  const auto space = OpinionSpace::partition(std::nullopt, 32);
  Rng rng(5);
  for (const auto& m : {InaccuracyMeasure::brier(), InaccuracyMeasure::walsh(),
                        InaccuracyMeasure::with("tab", ConvexGenerator::default_tabulated().normalized(),
                                                Weights::constant(1.0))}) {
    const double bound = partition_bound(m).bound();
    for (int t = 0; t < 1000; ++t) {
      std::vector<Rational> v(8);
      Rational left = 1;
      for (auto& x : v) {
        x = left * Rational(static_cast<long>(rng.below(11)), 10);
        left -= x;
      }
      const Credence c = Credence::from_rule(CredenceRule::list(v, 0));
      ASSERT_NE(check_coherence(c, space).status, CoherenceStatus::Incoherent);
      for (WorldLabel w : {0, 1, 5, 9, 100}) {
        const auto s = score_countable(c, m, WorldPoint::natural(w), space);
        ASSERT_TRUE(s.resolved());
        EXPECT_LE(s.value, bound + 1e-9);
      }
      const auto star = score_constant_signature(c, m, false);
      EXPECT_LE(star.value, bound + 1e-9);
    }
  }
}

TEST(Stability, FiniteSpacesProvenTrue) {
  const auto facts = stability_report(OpinionSpace::explicit_finite({1, 2}, {{1}}), InaccuracyMeasure::brier(), 10);
  ASSERT_EQ(facts.size(), 2u);
  for (const auto& f : facts) EXPECT_EQ(f.status, StabilityStatus::ProvenTrue);
}

TEST(Stability, PartitionWStable) {
  const auto facts = stability_report(OpinionSpace::partition(), InaccuracyMeasure::brier(), 10);
  ASSERT_EQ(facts.size(), 1u);
  EXPECT_EQ(facts[0].property, StabilityProperty::WStable);
  EXPECT_EQ(facts[0].status, StabilityStatus::ProvenTrue);
}

TEST(Stability, TailWitnessesReverify) {
  for (const auto& space : {OpinionSpace::tail_sets(12), OpinionSpace::initial_segments(12)}) {
    const auto facts = stability_report(space, InaccuracyMeasure::brier(), 200, 9);
    ASSERT_EQ(facts.size(), 2u);
    const auto comp = compactify(space);
    for (const auto& f : facts) {
      EXPECT_LE(f.searched, 200u);
      // c identical to the added point's valuation is always found
      ASSERT_EQ(f.status, StabilityStatus::ProvenFalseWitness);
      ASSERT_FALSE(f.witnesses.empty());
      for (const auto& w : f.witnesses) {
        EXPECT_NE(check_coherence(w.c, space).status, CoherenceStatus::Incoherent);
        CompareOptions co;
        co.truncation = 12;
        const auto base = compare(w.c, w.d, InaccuracyMeasure::brier(), space, co).relation;
        EXPECT_TRUE(base == Relation::StronglyDominates || base == Relation::WeaklyDominates);
        const auto lifted = compare(w.c, w.d, InaccuracyMeasure::brier(), comp.space, co).relation;
        EXPECT_TRUE(lifted == Relation::NoDominance || lifted == Relation::IncomparableUnresolved);
      }
    }
  }
}

TEST(Stability, Deterministic) {
  const auto a = stability_report(OpinionSpace::tail_sets(10), InaccuracyMeasure::brier(), 100, 4);
  const auto b = stability_report(OpinionSpace::tail_sets(10), InaccuracyMeasure::brier(), 100, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].status, b[i].status);
    EXPECT_EQ(a[i].witnesses.size(), b[i].witnesses.size());
    EXPECT_EQ(a[i].searched, b[i].searched);
  }
}
