// Seeded property tests over random spaces, functions and ball families.

#include "covlab/builders.hpp"
#include "covlab/constants.hpp"
#include "covlab/covering.hpp"
#include "covlab/maximal.hpp"
#include "generators.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace covlab;

namespace {

Space random_space(std::mt19937_64& rng, int rep, std::size_t n = 14) {
  switch (rep % 3) {
    case 0: return gen::random_cloud(rng, n, 2, 5, 0.2);
    case 1: return gen::random_cloud(rng, n, 1, 8, 0.1, Norm::l1);
    default: return gen::random_graph_metric(rng, n);
  }
}

Space full_support(std::mt19937_64& rng, int rep) { return gen::random_cloud(rng, 12, 2, 5, 0.0, rep % 2 ? Norm::l2 : Norm::linf); }

SampleFunction random_function(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  std::bernoulli_distribution zero(0.3);
  SampleFunction f;
  for (std::size_t i = 0; i < n; ++i) f.values.push_back(zero(rng) ? Rational(0) : Rational(num(rng), den(rng)));
  return f;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace

TEST(Properties, StrongDominatesComparabilityAndMicro) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Space s = random_space(rng, rep);
    const Rational t(1, 1 + rep % 4);
    const auto r = constants_report(s, t, Rational(2));
    EXPECT_GE(r.k_strong.value, r.c_mu.value) << rep;
    EXPECT_GE(r.k_strong.value, r.k_micro.value) << rep;
    EXPECT_GE(r.k_micro.value, Extended(Rational(1))) << rep;
    EXPECT_GE(r.k_blossom.value, Extended(Rational(1))) << rep;
  }
}

TEST(Properties, MicrodoublingIsRelativeIncrementOnFullSupport) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 15; ++rep) {
    const Space s = full_support(rng, rep);
    for (const Rational& t : {Rational(1, 3), Rational(1)})
      EXPECT_EQ(microdoubling(s, t, false).value, sup_max_relative_increment(s, 1 + t).value) << rep;
  }
}

TEST(Properties, BlossomMonotoneInT) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 15; ++rep) {
    const Space s = random_space(rng, rep, 12);
    Extended prev(Rational(1));
    for (const Rational& t : {Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)}) {
      const Extended k = microblossom(s, t).value;
      EXPECT_GE(k, prev) << rep;
      prev = k;
    }
    EXPECT_EQ(prev, bounded_blossom(s).value);
  }
}

// Covering theorems on random families: every check passes (or is vacuous)
// with constants computed on the family's window, and the selection agrees
// with the literal oracle.
TEST(Properties, CoveringTheoremsHold) {
  std::mt19937_64 rng(14);
  std::size_t checked = 0, vacuous = 0;
  for (int rep = 0; rep < 120; ++rep) {
    const Space s = random_space(rng, rep, 12);
    const auto m = oracle::from_space(s);
    BallFamily fam;
    fam.t = Rational(1, 2);
    fam.T = 2;
    const FamilyMode mode = static_cast<FamilyMode>(rep % 3);
    fam.mode = mode;
    std::vector<Rational> radii;
    if (mode == FamilyMode::sparse) {
      fam.radii = make_lacunary(Rational(1, 2), Rational(2), Rational(1, 2), Rational(4));
      radii = fam.radii->radii;
    } else if (mode == FamilyMode::bounded) {
      fam.r = 1;
      radii = {Rational(1), Rational(5, 4), Rational(3, 2), Rational(7, 4)};
    } else {
      radii = {Rational(1, 2), Rational(3, 4), Rational(2), Rational(7, 2)};
    }
    fam.balls = gen::random_balls(rng, s, radii, 2 + rep % 10);
    SelectionOutcome out;
    Theorem th = Theorem::combined;
    K2Mode k2 = K2Mode::combined;
    switch (mode) {
      case FamilyMode::sparse: out = sparse_select(s, fam); th = Theorem::sparse; break;
      case FamilyMode::combined: out = full_select(s, fam); break;
      case FamilyMode::bounded: out = bounded_collection(s, fam); th = Theorem::bounded; k2 = K2Mode::bounded; break;
    }
    const auto report = constants_report(s, fam.t, fam.T, covering_window(fam), k2);
    const auto vr = verify_covering_bounds(s, out, report, th);
    ASSERT_TRUE(vr.passed()) << rep << " " << mode_name(mode) << " " << vr.failures().front();
    ++checked;
    vacuous += vr.vacuous();
    if (mode != FamilyMode::bounded) {
      std::vector<std::pair<std::size_t, Rational>> pairs;
      for (const auto& b : fam.balls) pairs.emplace_back(b.center, b.radius);
      const auto sel = oracle::select(m, pairs, fam.t);
      ASSERT_EQ(out.accepted, sel.accepted) << rep;
      ASSERT_EQ(out.density, sel.density) << rep;
    }
  }
  EXPECT_EQ(checked, 120u);
  EXPECT_LT(vacuous, checked);
}

TEST(Properties, ScaleSequenceStepsBoundedByIncrement) {
  std::mt19937_64 rng(15);
  for (int rep = 0; rep < 30; ++rep) {
    const Space s = full_support(rng, rep);
    const std::size_t y = rep % s.size();
    const Rational start(1, 2), end = Rational(4) + rep % 3;
    for (const double K : {std::numbers::e, 4.0}) {
      const auto diag = scale_sequence(s, y, start, end, K);
      ASSERT_EQ(diag.radii.front(), start);
      ASSERT_EQ(diag.radii.back(), end);
      for (std::size_t i = 1; i < diag.radii.size(); ++i) ASSERT_GT(diag.radii[i], diag.radii[i - 1]);
      const double k2 = relative_increment(s, y, start, end / start).as_double();
      EXPECT_LE(std::pow(K, static_cast<double>(diag.steps)), k2 * (1 + 1e-12)) << rep;
    }
  }
}

TEST(Properties, MaximalFunctionAlgebra) {
  std::mt19937_64 rng(16);
  for (int rep = 0; rep < 20; ++rep) {
    const Space s = random_space(rng, rep, 12);
    const SampleFunction f = random_function(rng, s.size()), g = random_function(rng, s.size());
    SampleFunction sum, scaled;
    for (std::size_t i = 0; i < s.size(); ++i) {
      sum.values.push_back(f.values[i] + g.values[i]);
      scaled.values.push_back(Rational(-5, 2) * f.values[i]);
    }
    const auto mf = maximal_function(s, f), mg = maximal_function(s, g);
    const auto msum = maximal_function(s, sum), mscaled = maximal_function(s, scaled);
    const std::vector<Rational> R{Rational(1), Rational(3)};
    const auto mr = maximal_function(s, f, R);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ASSERT_LE(msum.values[i], mf.values[i] + mg.values[i]) << rep;
      ASSERT_EQ(mscaled.values[i], Rational(5, 2) * mf.values[i]) << rep;
      ASSERT_LE(mr.values[i], mf.values[i]) << rep;
      if (s.in_support(i)) {
        ASSERT_GE(mf.values[i], abs(f.values[i])) << rep;
      }
    }
    if (l1_norm(s, f) == 0) continue;
    EXPECT_EQ(weak_type_profile(s, f).supremum, weak_type_profile(s, scaled).supremum) << rep;
    EXPECT_GE(weak_type_profile(s, f).supremum, 1) << rep;
  }
}

// Mf computed on breakpoint representatives agrees with a sup over a much
// finer radius sample.
TEST(Properties, MaximalFunctionAgainstFineRadii) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 6; ++rep) {
    const Space s = random_space(rng, rep, 10);
    const auto m = oracle::from_space(s);
    const SampleFunction f = random_function(rng, s.size());
    std::vector<Rational> fine;
    const Rational top = s.distance_values().back() + 1;
    for (int k = 1; k <= 40 * static_cast<int>(to_double(top)) * 2; ++k) fine.emplace_back(k, 80);
    EXPECT_EQ(maximal_function(s, f, fine).values, maximal_function(s, f).values) << rep;
    EXPECT_EQ(oracle::maximal(m, f.values, fine), maximal_function(s, f).values) << rep;
  }
}
