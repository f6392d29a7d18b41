#include "covlab/builders.hpp"
#include "covlab/constants.hpp"
#include "covlab/covering.hpp"
#include "generators.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace covlab;

namespace {

Space grid(int d, int hw, Rational w0 = 1) { return build_grid(GridZd{d, hw, w0}); }

std::size_t at(const Space& s, const std::string& label) { return s.find_label(label).value(); }

PointSet points(const Space& s, std::initializer_list<const char*> labels) {
  PointSet p(s.size());
  for (auto l : labels) p.insert(at(s, l));
  return p;
}

Ball open(std::size_t c, Rational r) { return Ball{c, r, Closure::open}; }

BallFamily sparse_example(const Space& g) {
  BallFamily f;
  f.t = Rational(1, 2);
  f.mode = FamilyMode::sparse;
  f.radii = make_lacunary(Rational(1), Rational(2), Rational(1), Rational(4));
  f.balls = {open(at(g, "0"), 4), open(at(g, "2"), 2), open(at(g, "-2"), 2)};
  return f;
}

std::vector<std::pair<std::size_t, Rational>> as_pairs(const BallFamily& f) {
  std::vector<std::pair<std::size_t, Rational>> out;
  for (const auto& b : f.balls) out.emplace_back(b.center, b.radius);
  return out;
}

}  // namespace

TEST(Disjointify, Examples) {
  auto d = disjointify({PointSet(4, {1, 2}), PointSet(4, {2, 3})});
  EXPECT_EQ(d[0], PointSet(4, {1, 2}));
  EXPECT_EQ(d[1], PointSet(4, {3}));
  const PointSet a(4, {0, 3});
  d = disjointify({a, a});
  EXPECT_EQ(d[0], a);
  EXPECT_TRUE(d[1].empty());
  d = disjointify({PointSet(4), PointSet(4, {1})});
  EXPECT_TRUE(d[0].empty());
  EXPECT_EQ(d[1], PointSet(4, {1}));
  EXPECT_TRUE(disjointify({}).empty());
}

TEST(Lacunary, Examples) {
  EXPECT_EQ(make_lacunary(1, 2, 1, 8).radii, (std::vector<Rational>{1, 2, 4, 8}));
  EXPECT_EQ(make_lacunary(1, 3, 1, 10).radii, (std::vector<Rational>{1, 3, 9}));
  EXPECT_THROW(make_lacunary(5, 2, 1, 4), std::invalid_argument);
  EXPECT_THROW(make_lacunary(1, 1, 1, 4), std::invalid_argument);
  EXPECT_TRUE(make_lacunary(1, 2, 1, 8).is_lacunary());
}

TEST(SparseSelect, GridExampleTrace) {
  const Space g = grid(1, 2);
  const auto out = sparse_select(g, sparse_example(g));
  EXPECT_EQ(out.accepted, (std::vector<std::size_t>{0, 1, 2}));
  ASSERT_EQ(out.disjoint.size(), 3u);
  EXPECT_EQ(out.disjoint[0], points(g, {"-1", "0", "1"}));
  EXPECT_EQ(out.disjoint[1], points(g, {"2"}));
  EXPECT_EQ(out.disjoint[2], points(g, {"-2"}));
  EXPECT_EQ(out.density[at(g, "2")], Rational(11, 10));
  EXPECT_EQ(measure(g, out.u_set), 5);
  const auto o = oracle::select(oracle::from_space(g), as_pairs(out.family), Rational(1, 2));
  EXPECT_EQ(o.accepted, out.accepted);
  EXPECT_EQ(o.density, out.density);
}

TEST(SparseSelect, SingleBall) {
  const Space g = grid(1, 3);
  BallFamily f;
  f.t = Rational(1, 2);
  f.mode = FamilyMode::sparse;
  f.radii = make_lacunary(1, 2, 1, 4);
  f.balls = {open(at(g, "1"), 4)};
  const auto out = sparse_select(g, f);
  EXPECT_EQ(out.accepted, (std::vector<std::size_t>{0}));
  EXPECT_EQ(out.disjoint[0], ball(g, open(at(g, "1"), 2)));
}

TEST(SparseSelect, Preconditions) {
  const Space g = grid(1, 2);
  BallFamily f = sparse_example(g);
  f.t = Rational(1, 4);  // T t < 1
  EXPECT_THROW(sparse_select(g, f), FamilyError);
  f = sparse_example(g);
  std::swap(f.balls[0], f.balls[1]);  // increasing radii
  EXPECT_THROW(sparse_select(g, f), FamilyError);
  f = sparse_example(g);
  f.balls[1].radius = 3;  // not in R
  EXPECT_THROW(sparse_select(g, f), FamilyError);
  const Space d = build_three_point_delta();
  BallFamily z;
  z.mode = FamilyMode::combined;
  z.balls = {open(at(d, "0"), 1)};  // zero measure
  EXPECT_THROW(full_select(d, z), FamilyError);
}

TEST(FullSelect, SameAsSparseOnSparseFamilies) {
  const Space g = grid(1, 2);
  BallFamily f = sparse_example(g);
  const auto a = sparse_select(g, f);
  f.mode = FamilyMode::combined;
  const auto b = full_select(g, f);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.density, b.density);
}

TEST(FullSelect, ThreeBallExample) {
  const Space g = grid(1, 2);
  BallFamily f;
  f.t = Rational(1, 2);
  f.mode = FamilyMode::combined;
  const Rational r(3, 2);
  f.balls = {open(at(g, "-1"), r), open(at(g, "0"), r), open(at(g, "1"), r)};
  const auto out = full_select(g, f);
  EXPECT_EQ(out.accepted, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(out.density[at(g, "0")], 1);
}

TEST(FullSelect, EmptyFamily) {
  const Space g = grid(1, 2);
  BallFamily f;
  f.mode = FamilyMode::combined;
  const auto out = full_select(g, f);
  EXPECT_TRUE(out.accepted.empty());
  for (const auto& v : out.density) EXPECT_EQ(v, 0);
}

TEST(DensitySum, Examples) {
  const Space g = grid(1, 3);
  const Ball b = open(at(g, "0"), 2);
  const PointSet red = ball(g, open(at(g, "0"), 1));
  auto v = density_sum(g, {{b, red}});
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_EQ(v[i], ball(g, b).contains(i) ? Rational(1, 3) : Rational(0));
  v = density_sum(g, {{b, PointSet(g.size())}});
  for (const auto& x : v) EXPECT_EQ(x, 0);
  const Space d = build_three_point_delta();
  EXPECT_THROW(density_sum(d, {{open(at(d, "0"), 1), PointSet(3)}}), std::invalid_argument);
}

TEST(ScaleSequence, SinglePoint) {
  const auto sd = scale_sequence(grid(1, 0), 0, Rational(1), Rational(2), std::numbers::e);
  EXPECT_EQ(sd.radii, (std::vector<Rational>{1, 2}));
  EXPECT_EQ(sd.steps, 0u);
}

TEST(ScaleSequence, GridOneEight) {
  const Space g = grid(1, 8);
  const std::size_t y = at(g, "0");
  const auto sd = scale_sequence(g, y, Rational(1), Rational(8), std::numbers::e);
  EXPECT_EQ(sd.radii, (std::vector<Rational>{1, 4, 8}));
  EXPECT_EQ(sd.steps, 1u);
  // oracle: each step obeys the defining inequality, radii increase
  const double ratio = static_cast<double>(g.ball_mass(y, g.open_level(Rational(8)))) / g.ball_mass(y, g.open_level(Rational(1)));
  EXPECT_LE(sd.steps, std::log(ratio));
  for (std::size_t i = 1; i < sd.radii.size(); ++i) {
    ASSERT_GT(sd.radii[i], sd.radii[i - 1]);
    ASSERT_LE(g.ball_mass(y, g.open_level(sd.radii[i])), std::numbers::e * g.ball_mass(y, g.closed_level(sd.radii[i - 1])));
  }
}

TEST(ScaleSequence, OneStep) {
  const Space g = grid(1, 4);
  const auto sd = scale_sequence(g, at(g, "0"), Rational(3), Rational(4), std::numbers::e);
  EXPECT_EQ(sd.steps, 0u);
  EXPECT_EQ(sd.radii.back(), 4);
}

TEST(ScaleSequence, Preconditions) {
  const Space g = grid(1, 2);
  EXPECT_THROW(scale_sequence(g, 0, Rational(2), Rational(1), 3.0), std::invalid_argument);
  EXPECT_THROW(scale_sequence(g, 0, Rational(1), Rational(2), 2.0), std::invalid_argument);
  const Space d = build_three_point_delta();
  EXPECT_THROW(scale_sequence(d, at(d, "0"), Rational(1, 2), Rational(1), 3.0), std::invalid_argument);
}

TEST(Verify, SparseGridExample) {
  const Space g = grid(1, 2);
  const auto f = sparse_example(g);
  const auto out = sparse_select(g, f);
  const auto rep = constants_report(g, f.t, Rational(2), covering_window(f));
  const auto vr = verify_covering_bounds(g, out, rep, Theorem::sparse);
  EXPECT_TRUE(vr.passed());
  ASSERT_NE(vr.find("set"), nullptr);
  EXPECT_EQ(vr.find("set")->lhs, "5");
  ASSERT_NE(vr.find("bound"), nullptr);
  EXPECT_EQ(vr.find("bound")->lhs, "1.1");
}

TEST(Verify, ThreePointDeltaVacuous) {
  const Space d = build_three_point_delta();
  BallFamily f;
  f.t = Rational(1, 2);
  f.mode = FamilyMode::sparse;
  f.radii = make_lacunary(Rational(4), Rational(2), Rational(4), Rational(4));
  f.balls = {open(at(d, "0"), 4)};
  const auto out = sparse_select(d, f);
  const auto rep = constants_report(d, f.t, Rational(2), covering_window(f));
  ASSERT_EQ(rep.c_mu.value, Extended::infinity());
  const auto vr = verify_covering_bounds(d, out, rep, Theorem::sparse);
  EXPECT_TRUE(vr.passed());
  EXPECT_TRUE(vr.vacuous());
  EXPECT_EQ(vr.find("bound")->verdict, CheckResult::Verdict::vacuous);
}

TEST(Verify, BoundedThreeBall) {
  const Space g = grid(1, 2);
  BallFamily f;
  f.t = Rational(1, 2);
  f.mode = FamilyMode::bounded;
  f.r = Rational(3, 2);
  f.T = Rational(2);
  f.balls = {open(at(g, "-1"), Rational(3, 2)), open(at(g, "0"), Rational(3, 2)), open(at(g, "1"), Rational(3, 2))};
  const auto out = bounded_collection(g, f);
  EXPECT_EQ(out.density[at(g, "0")], 1);
  const auto rep = constants_report(g, f.t, f.T, covering_window(f), K2Mode::bounded);
  const auto vr = verify_covering_bounds(g, out, rep, Theorem::bounded);
  EXPECT_TRUE(vr.passed());
  ASSERT_NE(vr.find("sum"), nullptr);
  EXPECT_EQ(vr.find("sum")->lhs, "1");
}

TEST(Verify, DeclaredConstantsTooSmallFail) {
  // B(0,4) and B(3,4) in {-4..4}: density at 1 is 3/7 + 3/5 = 36/35 > 1.
  const Space g = grid(1, 4);
  BallFamily f;
  f.t = Rational(1, 2);
  f.mode = FamilyMode::sparse;
  f.radii = make_lacunary(4, 2, 4, 4);
  f.balls = {open(at(g, "0"), 4), open(at(g, "3"), 4)};
  const auto out = sparse_select(g, f);
  EXPECT_EQ(out.density[at(g, "1")], Rational(36, 35));
  auto rep = constants_report(g, f.t, Rational(2), covering_window(f));
  EXPECT_TRUE(verify_covering_bounds(g, out, rep, Theorem::sparse).passed());
  rep.c_mu.value = Rational(0);
  rep.k_blossom.value = Rational(0);
  const auto vr = verify_covering_bounds(g, out, rep, Theorem::sparse);
  EXPECT_FALSE(vr.passed());
  EXPECT_EQ(vr.find("bound")->verdict, CheckResult::Verdict::fail);
  ASSERT_EQ(vr.failures().size(), 1u);
  EXPECT_EQ(vr.failures()[0], "bound: 36/35 > 1");
}

TEST(Verify, Preconditions) {
  const Space g = grid(1, 2);
  const auto f = sparse_example(g);
  const auto out = sparse_select(g, f);
  EXPECT_THROW(verify_covering_bounds(g, out, constants_report(g, Rational(1, 3), Rational(2)), Theorem::sparse),
               std::invalid_argument);
  EXPECT_THROW(verify_covering_bounds(g, out, constants_report(g, f.t, Rational(2), RadiusWindow{Rational(2), Rational(3)}),
                                      Theorem::sparse),
               std::invalid_argument);
}

TEST(Selection, MatchesOracleOnRandomFamilies) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const Space s = gen::random_cloud(rng, 14, 2, 5);
    BallFamily f;
    f.mode = FamilyMode::combined;
    f.t = rep % 2 ? Rational(1, 2) : Rational(1, 3);
    f.balls = gen::random_balls(rng, s, {Rational(1), Rational(3, 2), Rational(5, 2), Rational(4)}, 12);
    const auto out = full_select(s, f);
    const auto o = oracle::select(oracle::from_space(s), as_pairs(f), f.t);
    ASSERT_EQ(out.accepted, o.accepted) << rep;
    ASSERT_EQ(out.density, o.density) << rep;
    for (std::size_t j = 0; j < o.d.size(); ++j) ASSERT_EQ(oracle::to_set(out.disjoint[j]), o.d[j]);
  }
}

TEST(Selection, ThresholdIsTunable) {
  std::mt19937_64 rng(2);
  const Space s = gen::random_cloud(rng, 20, 2, 4);
  BallFamily f;
  f.mode = FamilyMode::combined;
  f.balls = gen::random_balls(rng, s, {Rational(2), Rational(3)}, 30);
  const auto loose = full_select(s, f, Rational(100));
  EXPECT_EQ(loose.accepted.size(), f.balls.size());
  const auto strict = full_select(s, f, Rational(-1));
  EXPECT_EQ(strict.accepted, (std::vector<std::size_t>{0}));
}
