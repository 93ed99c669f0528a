#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "credal/coherence.hpp"
#include "credal/dominance.hpp"
#include "oracles.hpp"

using namespace credal;

namespace {

struct Instance {
  OpinionSpace space;
  std::vector<Rational> c;
};

Instance random_instance(std::mt19937& rng, std::size_t max_props = 4, std::size_t max_worlds = 7) {
  const std::size_t nw = 1 + rng() % max_worlds;
  const std::size_t np = 1 + rng() % max_props;
  std::vector<WorldLabel> worlds(nw);
  for (std::size_t i = 0; i < nw; ++i) worlds[i] = static_cast<WorldLabel>(i + 1);
  std::vector<std::vector<WorldLabel>> props(np);
  for (auto& p : props) {
    for (auto w : worlds) {
      if (rng() % 2) p.push_back(w);
    }
  }
  std::vector<Rational> c(np);
  for (auto& x : c) {
    x = Rational(static_cast<long>(rng() % 11), 10);
    x.canonicalize();
  }
  return {OpinionSpace::explicit_finite(worlds, props), c};
}

const std::vector<InaccuracyMeasure>& measures() {
  static const std::vector<InaccuracyMeasure> ms = {
      InaccuracyMeasure::brier(),
      InaccuracyMeasure::with("tab", ConvexGenerator::default_tabulated(), Weights::constant(1.0)),
      InaccuracyMeasure::with("wq", ConvexGenerator::quadratic(), Weights::from_list({1.0, 2.0, 0.5, 3.0})),
  };
  return ms;
}

bool dominates(Relation r) { return r == Relation::StronglyDominates || r == Relation::WeaklyDominates; }

}  // namespace

TEST(Property, GapZeroIffCoherent) {
  std::mt19937 rng(21);
  for (int t = 0; t < 300; ++t) {
    const auto inst = random_instance(rng);
    const bool coherent = oracle::in_hull(oracle::valuation_rows(inst.space), inst.c);
    ProjectionOptions o;
    o.mode = Mode::Rational;
    const auto pr = project_coherent(Credence::finite_exact(inst.c), InaccuracyMeasure::brier(), inst.space, o);
    EXPECT_EQ(*pr.exact_gap == 0, coherent);
  }
}

TEST(Property, ProjectionIsIdempotent) {
  std::mt19937 rng(22);
  for (int t = 0; t < 200; ++t) {
    const auto inst = random_instance(rng);
    for (const auto& m : measures()) {
      const auto pr = project_coherent(Credence::finite_exact(inst.c), m, inst.space);
      const auto again = project_coherent(pr.pi_c, m, inst.space);
      EXPECT_LE(again.gap, 1e-8);
      for (std::size_t i = 0; i < inst.c.size(); ++i) EXPECT_NEAR(again.pi_c.at(i), pr.pi_c.at(i), 1e-5);
    }
  }
}

TEST(Property, ProjectionLandsInCoherentSet) {
  std::mt19937 rng(23);
  for (int t = 0; t < 200; ++t) {
    const auto inst = random_instance(rng);
    ProjectionOptions o;
    o.mode = Mode::Rational;
    const auto pr = project_coherent(Credence::finite_exact(inst.c), InaccuracyMeasure::brier(), inst.space, o);
    EXPECT_TRUE(oracle::in_hull(oracle::valuation_rows(inst.space), pr.exact_pi));
  }
}

TEST(Property, PythagoreanInequality) {
  std::mt19937 rng(24);
  for (int t = 0; t < 200; ++t) {
    const auto inst = random_instance(rng);
    for (const auto& m : measures()) {
      const auto pr = project_coherent(Credence::finite_exact(inst.c), m, inst.space);
      EXPECT_GE(pr.pythagorean.worst_slack, -1e-6) << m.name;
      EXPECT_TRUE(pr.pythagorean.holds);
    }
  }
}

TEST(Property, IncoherentIsStrictlyDominatedByProjection) {
  std::mt19937 rng(25);
  int incoherent = 0;
  for (int t = 0; t < 300; ++t) {
    const auto inst = random_instance(rng);
    if (oracle::in_hull(oracle::valuation_rows(inst.space), inst.c)) continue;
    ++incoherent;
    ProjectionOptions o;
    o.mode = Mode::Rational;
    const auto r = find_dominator(Credence::finite_exact(inst.c), InaccuracyMeasure::brier(), inst.space, o);
    EXPECT_EQ(r.verdict.relation, Relation::StronglyDominates);
    // the oracle agrees at every world
    const auto rows = oracle::valuation_rows(inst.space);
    const std::vector<Rational> h(inst.c.size(), Rational(1));
    for (const auto& row : rows) {
      EXPECT_LT(oracle::brier(r.dominator.exact_values(), row, h), oracle::brier(inst.c, row, h));
    }
  }
  EXPECT_GT(incoherent, 50);
}

TEST(Property, CompareIsIrreflexiveAndAsymmetric) {
  std::mt19937 rng(26);
  for (int t = 0; t < 200; ++t) {
    auto inst = random_instance(rng);
    std::vector<Rational> d(inst.c.size());
    for (auto& x : d) {
      x = Rational(static_cast<long>(rng() % 11), 10);
      x.canonicalize();
    }
    const auto c = Credence::finite_exact(inst.c);
    const auto dc = Credence::finite_exact(d);
    CompareOptions o;
    o.mode = Mode::Rational;
    for (const auto& m : measures()) {
      EXPECT_EQ(compare(c, c, m, inst.space, o).relation, Relation::NoDominance);
      const bool ab = dominates(compare(c, dc, m, inst.space, o).relation);
      const bool ba = dominates(compare(dc, c, m, inst.space, o).relation);
      EXPECT_FALSE(ab && ba);
    }
  }
}

TEST(Property, StrongDominanceIsTransitive) {
  std::mt19937 rng(27);
  const auto space = OpinionSpace::explicit_finite({1, 2, 3}, {{1}, {2}, {1, 2}});
  std::vector<Credence> pool;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> v(3);
    for (auto& x : v) x = static_cast<double>(rng() % 11) / 10.0;
    pool.push_back(Credence::finite(v));
  }
  const auto m = InaccuracyMeasure::brier();
  std::vector<std::vector<bool>> strong(pool.size(), std::vector<bool>(pool.size()));
  for (std::size_t a = 0; a < pool.size(); ++a) {
    for (std::size_t b = 0; b < pool.size(); ++b) {
      strong[a][b] = compare(pool[a], pool[b], m, space).relation == Relation::StronglyDominates;
    }
  }
  for (std::size_t a = 0; a < pool.size(); ++a) {
    for (std::size_t b = 0; b < pool.size(); ++b) {
      for (std::size_t c = 0; c < pool.size(); ++c) {
        if (strong[a][b] && strong[b][c]) EXPECT_TRUE(strong[a][c]);
      }
    }
  }
}

TEST(Property, CoherentIsNeverDominated) {
  // coherent c against random d: no d beats c at every world
  std::mt19937 rng(28);
  for (int t = 0; t < 150; ++t) {
    const auto inst = random_instance(rng, 3, 5);
    if (!oracle::in_hull(oracle::valuation_rows(inst.space), inst.c)) continue;
    const auto c = Credence::finite_exact(inst.c);
    CompareOptions o;
    o.mode = Mode::Rational;
    for (int k = 0; k < 30; ++k) {
      std::vector<Rational> d(inst.c.size());
      for (auto& x : d) {
        x = Rational(static_cast<long>(rng() % 21), 20);
        x.canonicalize();
      }
      EXPECT_FALSE(dominates(compare(c, Credence::finite_exact(d), InaccuracyMeasure::brier(), inst.space, o).relation));
    }
  }
}

TEST(Property, CoherenceInvariantUnderPropositionOrder) {
  std::mt19937 rng(29);
  for (int t = 0; t < 200; ++t) {
    const auto inst = random_instance(rng);
    const std::size_t n = inst.c.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<WorldLabel>> props(n);
    std::vector<Rational> c(n);
    for (std::size_t i = 0; i < n; ++i) {
      props[i] = inst.space.proposition(perm[i]).members;
      c[i] = inst.c[perm[i]];
    }
    const auto permuted = OpinionSpace::explicit_finite(inst.space.worlds(), props);
    CoherenceOptions o;
    o.mode = Mode::Rational;
    EXPECT_EQ(check_coherence(Credence::finite_exact(inst.c), inst.space, o).status,
              check_coherence(Credence::finite_exact(c), permuted, o).status);
  }
}

TEST(Property, FloatAndRationalCoherenceAgree) {
  std::mt19937 rng(30);
  for (int t = 0; t < 300; ++t) {
    const auto inst = random_instance(rng);
    CoherenceOptions exact;
    exact.mode = Mode::Rational;
    const auto a = check_coherence(Credence::finite_exact(inst.c), inst.space, exact).status;
    const auto b = check_coherence(Credence::finite_exact(inst.c), inst.space).status;
    EXPECT_EQ(a, b);
  }
}
