#include "covlab/builders.hpp"
#include "covlab/constants.hpp"
#include "generators.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace covlab;

namespace {

Space grid(int d, int hw, Rational w0 = 1) { return build_grid(GridZd{d, hw, w0}); }

std::size_t at(const Space& s, const std::string& label) { return s.find_label(label).value(); }

const Extended kInf = Extended::infinity();

RadiusInterval interval(Rational lo, Rational hi) { return {lo, hi, lo}; }

}  // namespace

// Examples with witnesses. Ties go to the smallest (x, y, interval) index;
// grid points are indexed with the origin first.

TEST(LocalComparability, ThreePointDeltaIsInfinite) {
  const Space s = build_three_point_delta();
  const auto c = local_comparability(s);
  EXPECT_EQ(c.value, kInf);
  ASSERT_TRUE(c.witness);
  EXPECT_EQ(s.label(c.witness->x), "1");
  EXPECT_EQ(s.label(*c.witness->y), "0");
  EXPECT_EQ(c.witness->interval, interval(2, 3));
}

TEST(LocalComparability, SinglePoint) { EXPECT_EQ(local_comparability(grid(1, 0)).value, Extended(Rational(1))); }

TEST(LocalComparability, GridOneTwo) {
  const Space s = grid(1, 2);
  const auto c = local_comparability(s);
  EXPECT_EQ(c.value, Extended(Rational(5, 3)));
  ASSERT_TRUE(c.witness);
  EXPECT_EQ(s.label(c.witness->x), "0");
  EXPECT_EQ(s.label(*c.witness->y), "2");
  EXPECT_EQ(c.witness->interval, interval(2, 3));
}

TEST(Microdoubling, GridTwoThreeAtLeastNine) {
  const Space s = grid(2, 3);
  const auto k = microdoubling(s, Rational(1, 2), false);
  EXPECT_GE(k.value, Extended(Rational(9)));
  // the ratio 9 is attained on (2/3, 1] at the origin
  EXPECT_EQ(s.ball_mass(at(s, "(0,0)"), s.open_level(Rational(3, 2))), 9);
  EXPECT_EQ(s.ball_mass(at(s, "(0,0)"), s.open_level(Rational(1))), 1);
  const auto in = microdoubling(s, Rational(1, 2), false, RadiusWindow{Rational(2, 3), Rational(1)});
  EXPECT_EQ(in.value, Extended(Rational(9)));
  EXPECT_EQ(in.witness->interval, interval(Rational(2, 3), 1));
}

TEST(Microdoubling, SinglePoint) {
  EXPECT_EQ(microdoubling(grid(1, 0), Rational(1, 2), false).value, Extended(Rational(1)));
  EXPECT_EQ(microdoubling(grid(1, 0), Rational(1, 2), true).value, Extended(Rational(1)));
}

TEST(Microdoubling, GridOneTwoTenth) {
  const Space s = grid(1, 2);
  const auto k = microdoubling(s, Rational(1, 10), false);
  EXPECT_EQ(k.value, Extended(Rational(3)));
  EXPECT_EQ(s.label(k.witness->x), "0");
  EXPECT_FALSE(k.witness->y.has_value());
  EXPECT_EQ(k.witness->interval, interval(Rational(10, 11), 1));
}

TEST(Microdoubling, RejectsNonPositiveT) { EXPECT_THROW(microdoubling(grid(1, 1), Rational(0), false), std::invalid_argument); }

TEST(Microblossom, ThreePointDeltaHalf) {
  EXPECT_EQ(microblossom(build_three_point_delta(), Rational(1, 2)).value, Extended(Rational(1)));
}

TEST(Microblossom, GridThreeFourSmallRadii) {
  const auto k = microblossom(grid(3, 4), Rational(1, 3), RadiusWindow{0, Rational(3)});
  EXPECT_EQ(k.value, Extended(Rational(1)));
}

TEST(Microblossom, SinglePointAndRange) {
  EXPECT_EQ(microblossom(grid(1, 0), Rational(1, 2)).value, Extended(Rational(1)));
  EXPECT_THROW(microblossom(grid(1, 1), Rational(3, 2)), std::invalid_argument);
  EXPECT_THROW(microblossom(grid(1, 1), Rational(0)), std::invalid_argument);
}

TEST(RelativeIncrement, Examples) {
  const Space g = grid(1, 2);
  EXPECT_EQ(relative_increment(g, at(g, "1"), Rational(7, 5), Rational(1)), Extended(Rational(1)));
  EXPECT_EQ(max_relative_increment(g, Rational(3, 4), Rational(2)).value, Extended(Rational(3)));
  const Space nu = grid(2, 3, Rational(1, 4));
  const auto m = max_relative_increment(nu, Rational(5, 6), Rational(3));
  EXPECT_EQ(m.value, Extended(Rational(97)));
  EXPECT_EQ(nu.label(m.witness->x), "(0,0)");
  EXPECT_EQ(relative_increment(nu, at(nu, "(0,0)"), Rational(1), Rational(3)), Extended(Rational(97)));
}

TEST(RelativeIncrement, OffSupportIsDomainError) {
  const Space s = build_three_point_delta();
  EXPECT_THROW(relative_increment(s, at(s, "0"), Rational(1), Rational(2)), std::domain_error);
  EXPECT_NO_THROW(relative_increment(s, at(s, "3"), Rational(1), Rational(2)));
}

TEST(Report, ThreePointDelta) {
  const auto r = constants_report(build_three_point_delta(), Rational(1, 2), Rational(2));
  EXPECT_EQ(r.c_mu.value, kInf);
  EXPECT_EQ(r.k_blossom.value, Extended(Rational(1)));
}

TEST(Report, SinglePointAllOne) {
  const auto r = constants_report(grid(1, 0), Rational(1, 2), Rational(2));
  for (const auto* c : {&r.c_mu, &r.k_micro, &r.k_strong, &r.k_blossom, &r.k_blossom_bounded, &r.k2})
    EXPECT_EQ(c->value, Extended(Rational(1)));
}

// Values fixed from the brute-force oracle (see OracleAgreement below).
TEST(Report, GridOneTwoFrozen) {
  const auto r = constants_report(grid(1, 2), Rational(1, 2), Rational(2));
  EXPECT_EQ(r.c_mu.value, Extended(Rational(5, 3)));
  EXPECT_EQ(r.k_micro.value, Extended(Rational(3)));
  EXPECT_EQ(r.k_strong.value, Extended(Rational(3)));
  EXPECT_EQ(r.k_blossom.value, Extended(Rational(5, 3)));
  EXPECT_EQ(r.k_blossom_bounded.value, Extended(Rational(2)));
  EXPECT_EQ(r.k2.value, Extended(Rational(3)));
  EXPECT_EQ(r.k2_ratio(), 2);
  const auto b = constants_report(grid(1, 2), Rational(1, 4), Rational(3), RadiusWindow::full(), K2Mode::bounded);
  EXPECT_EQ(b.k2_ratio(), 3);
}

TEST(Report, Validation) {
  EXPECT_THROW(constants_report(grid(1, 1), Rational(0), Rational(2)), std::invalid_argument);
  EXPECT_THROW(constants_report(grid(1, 1), Rational(1, 2), Rational(1)), std::invalid_argument);
}

// Brute-force agreement on small random spaces, full and windowed.

TEST(OracleAgreement, RandomSpaces) {
  std::mt19937_64 rng(101);
  const Rational ts[] = {Rational(1, 3), Rational(1, 2), Rational(1)};
  for (int rep = 0; rep < 12; ++rep) {
    const Space s = rep % 3 == 2 ? gen::random_graph_metric(rng, 8) : gen::random_cloud(rng, 9, 2, 4, 0.25);
    const auto m = oracle::from_space(s);
    const Rational t = ts[rep % 3];
    const RadiusWindow w = rep % 2 ? RadiusWindow{Rational(1, 2), Rational(5, 2)} : RadiusWindow::full();
    const oracle::Window ow{w.lo, w.hi};
    ASSERT_EQ(local_comparability(s, w).value, oracle::local_comparability(m, ow)) << rep;
    ASSERT_EQ(microdoubling(s, t, false, w).value, oracle::microdoubling(m, t, false, ow)) << rep;
    ASSERT_EQ(microdoubling(s, t, true, w).value, oracle::microdoubling(m, t, true, ow)) << rep;
    ASSERT_EQ(microblossom(s, t, w).value, oracle::microblossom(m, t, ow)) << rep;
    ASSERT_EQ(sup_max_relative_increment(s, 1 / t + 1, w).value, oracle::sup_max_relative_increment(m, 1 / t + 1, ow))
        << rep;
  }
}

TEST(OracleAgreement, Examples) {
  for (const Space& s : {grid(1, 2), grid(2, 2), grid(2, 2, Rational(1, 4)), build_three_point_delta(),
                         build_lshape(LShapeNet{Rational(1, 4)})}) {
    const auto m = oracle::from_space(s);
    for (const Rational& t : {Rational(1, 10), Rational(1, 2)}) {
      EXPECT_EQ(local_comparability(s).value, oracle::local_comparability(m));
      EXPECT_EQ(microdoubling(s, t, false).value, oracle::microdoubling(m, t, false));
      EXPECT_EQ(microdoubling(s, t, true).value, oracle::microdoubling(m, t, true));
      EXPECT_EQ(microblossom(s, t).value, oracle::microblossom(m, t));
    }
  }
}

// Witnesses realize the reported value.
TEST(Witness, RealizesValue) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const Space s = gen::random_cloud(rng, 12);
    const Rational t(1, 2);
    const auto c = local_comparability(s);
    if (c.witness) {
      const Rational r = c.witness->interval.representative;
      const auto num = s.ball_mass(c.witness->x, s.open_level(r)), den = s.ball_mass(*c.witness->y, s.open_level(r));
      ASSERT_LT(s.distance(c.witness->x, *c.witness->y), r);
      ASSERT_EQ(MassRatio(num, den).extended(), c.value);
    }
    const auto k = microblossom(s, t);
    if (k.witness) {
      const Rational r = k.witness->interval.representative;
      const PointSet b = s.ball_at_level(k.witness->x, s.open_level(r));
      ASSERT_EQ(MassRatio(s.mass(uncentered_blossom(s, b, t * r)), s.mass(b)).extended(), k.value);
    }
  }
}
