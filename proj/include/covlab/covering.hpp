#pragma once

// Greedy ball selection: disjointification, the acceptance
// rule, density sums, the adaptive scale sequence of the bounded-radii
// argument, and exact verification of the covering inequalities.

#include "covlab/constants.hpp"
#include "covlab/numeric.hpp"
#include "covlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace covlab {

// D_1 = A_1, D_{n+1} = A_{n+1} minus the union of A_1..A_n.
inline std::vector<PointSet> disjointify(const std::vector<PointSet>& sets) {
  std::vector<PointSet> out;
  out.reserve(sets.size());
  if (sets.empty()) return out;
  PointSet seen(sets.front().universe());
  for (const auto& a : sets) {
    out.push_back(a - seen);
    seen |= a;
  }
  return out;
}

struct RadiiSet {
  std::vector<Rational> radii;  // increasing
  Rational T{2};

  bool contains(const Rational& r) const { return std::binary_search(radii.begin(), radii.end(), r); }
  bool is_lacunary() const {
    for (std::size_t k = 1; k < radii.size(); ++k)
      if (radii[k] < T * radii[k - 1]) return false;
    return T > 1;
  }
};

// {r0 T^k : k >= 0} intersected with [r_min, r_max].
inline RadiiSet make_lacunary(const Rational& r0, const Rational& T, const Rational& r_min, const Rational& r_max) {
  if (r0 <= 0) throw std::invalid_argument("r0 must be positive");
  if (T <= 1) throw std::invalid_argument("lacunarity T must exceed 1");
  RadiiSet out;
  out.T = T;
  for (Rational r = r0; r <= r_max; r *= T)
    if (r >= r_min) out.radii.push_back(r);
  if (out.radii.empty())
    throw std::invalid_argument("no radius r0*T^k lies in [" + to_string(r_min) + ", " + to_string(r_max) + "]");
  return out;
}

enum class FamilyMode { sparse, bounded, combined };

inline const char* mode_name(FamilyMode m) {
  switch (m) {
    case FamilyMode::sparse: return "sparse";
    case FamilyMode::bounded: return "bounded";
    case FamilyMode::combined: return "combined";
  }
  return "?";
}

struct BallFamily {
  std::vector<Ball> balls;  // open balls, in the caller's order
  Rational t{Rational(1, 2)};
  FamilyMode mode = FamilyMode::combined;
  std::optional<RadiiSet> radii;  // sparse mode
  Rational r{1};                  // bounded mode: radii in [r, T r)
  Rational T{2};
};

class FamilyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void validate_family(const Space& space, const BallFamily& f) {
  if (f.t <= 0 || f.t > 1) throw FamilyError("t must lie in (0, 1]");
  for (std::size_t i = 0; i < f.balls.size(); ++i) {
    const Ball& b = f.balls[i];
    space.check_index(b.center);
    if (b.closure != Closure::open) throw FamilyError("family balls must be open");
    if (b.radius <= 0) throw FamilyError("ball " + std::to_string(i) + " has non-positive radius");
    if (space.ball_mass(b.center, space.open_level(b.radius)) == 0)
      throw FamilyError("ball " + std::to_string(i) + " (center " + space.label(b.center) + ") has zero measure");
    if (f.mode != FamilyMode::bounded && i > 0 && b.radius > f.balls[i - 1].radius)
      throw FamilyError("radii must be non-increasing along the order (ball " + std::to_string(i) + ")");
  }
  if (f.mode == FamilyMode::sparse) {
    if (!f.radii) throw FamilyError("sparse family needs a radii set");
    if (!f.radii->is_lacunary()) throw FamilyError("radii set is not T-lacunary");
    if (f.radii->T * f.t < 1) throw FamilyError("sparse selection needs T*t >= 1");
    for (std::size_t i = 0; i < f.balls.size(); ++i)
      if (!f.radii->contains(f.balls[i].radius))
        throw FamilyError("ball " + std::to_string(i) + " radius " + to_string(f.balls[i].radius) + " not in radii set");
  }
  if (f.mode == FamilyMode::bounded) {
    if (f.T <= 1 || f.r <= 0) throw FamilyError("bounded family needs r > 0 and T > 1");
    for (std::size_t i = 0; i < f.balls.size(); ++i)
      if (f.balls[i].radius < f.r || f.balls[i].radius >= f.T * f.r)
        throw FamilyError("ball " + std::to_string(i) + " radius outside [r, T r)");
  }
}

// Radii at which the covering arguments invoke the constants: every family
// radius, and for the scale argument everything up to the largest radius
// divided by t (or T r for bounded families).
inline std::pair<Rational, Rational> required_radius_range(const BallFamily& f, bool scales) {
  if (f.balls.empty()) throw std::invalid_argument("empty family has no radius range");
  Rational lo = f.balls.front().radius, hi = lo;
  for (const auto& b : f.balls) {
    lo = std::min(lo, b.radius);
    hi = std::max(hi, b.radius);
  }
  if (scales) hi = f.mode == FamilyMode::bounded ? std::max<Rational>(hi / f.t, f.T * f.r) : hi / f.t;
  return {lo, hi};
}

// A window (t lo / 2, hi] covering the required radius range.
inline RadiusWindow covering_window(const BallFamily& f) {
  if (f.balls.empty()) return RadiusWindow::full();
  auto [lo, hi] = required_radius_range(f, true);
  return RadiusWindow{f.t * lo / 2, hi};
}

struct SelectionOutcome {
  BallFamily family;
  std::vector<std::size_t> accepted;   // family indices, in acceptance order
  std::vector<PointSet> disjoint;      // D for each accepted ball
  PointSet u_set;                      // union of all reduced balls
  PointSet v_set;                      // union of accepted reduced balls
  std::vector<Rational> density;       // sum of mu D / mu B * 1_B over accepted balls
};

// sum_j (mu D_j / mu B_j) 1_{B_j} at every point.
inline std::vector<Rational> density_sum(const Space& space, const std::vector<std::pair<Ball, PointSet>>& entries) {
  std::vector<Rational> out(space.size(), Rational(0));
  for (const auto& [b, d] : entries) {
    const PointSet region = ball(space, b);
    const std::int64_t mb = space.mass(region);
    if (mb == 0) throw std::invalid_argument("density_sum: ball around " + space.label(b.center) + " has zero measure");
    const std::int64_t md = space.mass(d);
    if (md == 0) continue;
    const Rational coef(md, mb);
    region.for_each([&](std::size_t i) { out[i] += coef; });
  }
  return out;
}

namespace detail {

inline PointSet reduced_ball(const Space& space, const Ball& b, const Rational& t) {
  return space.ball_at_level(b.center, space.open_level(t * b.radius));
}

inline SelectionOutcome make_outcome(const Space& space, const BallFamily& family,
                                     std::vector<std::size_t> accepted) {
  SelectionOutcome out;
  out.family = family;
  out.accepted = std::move(accepted);
  out.u_set = PointSet(space.size());
  for (const auto& b : family.balls) out.u_set |= reduced_ball(space, b, family.t);
  std::vector<PointSet> reduced;
  for (std::size_t i : out.accepted) reduced.push_back(reduced_ball(space, family.balls[i], family.t));
  out.disjoint = disjointify(reduced);
  out.v_set = PointSet(space.size());
  for (const auto& r : reduced) out.v_set |= r;
  std::vector<std::pair<Ball, PointSet>> entries;
  for (std::size_t j = 0; j < out.accepted.size(); ++j) entries.emplace_back(family.balls[out.accepted[j]], out.disjoint[j]);
  out.density = density_sum(space, entries);
  return out;
}

}  // namespace detail

// The greedy selection: the first ball is accepted; a later ball centered at
// x is accepted iff sum over accepted j of (mu D_j / mu B_j) 1_{Bl(B_j, t s_j)}(x)
// is at most `threshold` (1 in the covering theorems).
inline SelectionOutcome select_balls(const Space& space, const BallFamily& family,
                                     const Rational& threshold = Rational(1)) {
  validate_family(space, family);
  std::vector<std::size_t> accepted;
  std::vector<Rational> coef;
  std::vector<PointSet> blooms;
  PointSet covered(space.size());
  for (std::size_t i = 0; i < family.balls.size(); ++i) {
    const Ball& b = family.balls[i];
    if (!accepted.empty()) {
      Rational load = 0;
      for (std::size_t j = 0; j < accepted.size(); ++j)
        if (blooms[j].contains(b.center)) load += coef[j];
      if (load > threshold) continue;
    }
    const PointSet reduced = detail::reduced_ball(space, b, family.t);
    const PointSet d = reduced - covered;
    covered |= reduced;
    const PointSet full = ball(space, b);
    accepted.push_back(i);
    coef.emplace_back(space.mass(d), space.mass(full));
    blooms.push_back(blossom(space, full, family.t * b.radius));
  }
  return detail::make_outcome(space, family, std::move(accepted));
}

inline SelectionOutcome sparse_select(const Space& space, const BallFamily& family,
                                      const Rational& threshold = Rational(1)) {
  if (family.mode != FamilyMode::sparse) throw FamilyError("sparse_select needs a sparse family");
  return select_balls(space, family, threshold);
}

inline SelectionOutcome full_select(const Space& space, const BallFamily& family,
                                    const Rational& threshold = Rational(1)) {
  if (family.mode != FamilyMode::combined && family.mode != FamilyMode::sparse)
    throw FamilyError("full_select needs a family ordered by non-increasing radii");
  return select_balls(space, family, threshold);
}

// Bounded-radii families involve no selection: every ball is kept and the
// reduced balls are disjointified in the given order.
inline SelectionOutcome bounded_collection(const Space& space, const BallFamily& family) {
  if (family.mode != FamilyMode::bounded) throw FamilyError("bounded_collection needs a bounded family");
  validate_family(space, family);
  std::vector<std::size_t> all(family.balls.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return detail::make_outcome(space, family, std::move(all));
}

struct ScaleDiagnostic {
  Rational start;
  Rational end;
  std::vector<Rational> radii;       // rho_0 = start < rho_1 < ... = end
  std::vector<Rational> increments;  // h_i = rho_i / rho_{i-1} - 1
  std::size_t steps = 0;             // N: number of increments minus one
  double K = std::numbers::e;
};

// Adaptive radii from s to r_max: each step moves to the largest radius rho'
// with mu B(y, rho') <= K mu B^cl(y, rho), capped at r_max. The supremum is
// attained at a distance value or at r_max, so it is computed exactly.
inline ScaleDiagnostic scale_sequence(const Space& space, std::size_t y, const Rational& s, const Rational& r_max,
                                      double K) {
  space.check_index(y);
  if (s <= 0 || s >= r_max) throw std::invalid_argument("scale_sequence needs 0 < s < r_max");
  if (K < std::numbers::e) throw std::invalid_argument("scale_sequence needs K >= e");
  if (space.ball_mass(y, space.open_level(r_max)) == 0)
    throw std::invalid_argument("scale_sequence: mu B(y, r_max) = 0");
  const auto& values = space.distance_values();
  ScaleDiagnostic out;
  out.start = s;
  out.end = r_max;
  out.K = K;
  out.radii.push_back(s);
  Rational rho = s;
  while (rho < r_max) {
    const long double cap = static_cast<long double>(K) * space.ball_mass(y, space.closed_level(rho));
    Rational next = r_max;
    for (std::size_t k = space.closed_level(rho); k < values.size() && values[k] < r_max; ++k) {
      if (static_cast<long double>(space.ball_mass(y, k + 1)) > cap) {
        next = values[k];
        break;
      }
    }
    out.increments.push_back(next / rho - 1);
    out.radii.push_back(next);
    rho = next;
  }
  out.steps = out.increments.size() - 1;
  return out;
}

enum class Theorem { sparse, bounded, combined };

struct CheckResult {
  enum class Verdict { pass, fail, vacuous };
  std::string name;
  std::string lhs;
  std::string rhs;
  Verdict verdict = Verdict::pass;
};

inline const char* verdict_name(CheckResult::Verdict v) {
  switch (v) {
    case CheckResult::Verdict::pass: return "pass";
    case CheckResult::Verdict::fail: return "fail";
    case CheckResult::Verdict::vacuous: return "vacuous";
  }
  return "?";
}

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.verdict == CheckResult::Verdict::fail; });
  }
  bool vacuous() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.verdict == CheckResult::Verdict::vacuous; });
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (c.verdict == CheckResult::Verdict::fail) out.push_back(c.name + ": " + c.lhs + " > " + c.rhs);
    return out;
  }
};

// Slack applied to floating right-hand sides that involve logarithms.
inline constexpr double kLogBoundSlack = 1e-12;

// C K1 K (2 + log K2 / log K) with K = max(K1, e).
inline double scale_sum_bound(double c, double k1, double k2) {
  const double k = std::max(k1, std::numbers::e);
  return c * k1 * k * (2 + std::log(k2) / std::log(k));
}

namespace detail {

inline Rational max_over(const std::vector<Rational>& v, const PointSet* restrict_to) {
  Rational best = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if ((!restrict_to || restrict_to->contains(i)) && v[i] > best) best = v[i];
  return best;
}

inline CheckResult exact_check(std::string name, const Rational& lhs, const Rational& rhs) {
  return {std::move(name), to_string(lhs), to_string(rhs),
          lhs <= rhs ? CheckResult::Verdict::pass : CheckResult::Verdict::fail};
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline CheckResult float_check(std::string name, const Rational& lhs, double rhs) {
  const double l = to_double(lhs);
  const bool ok = l <= rhs + kLogBoundSlack * std::max(1.0, std::fabs(rhs));
  return {std::move(name), to_string(lhs), fmt(rhs), ok ? CheckResult::Verdict::pass : CheckResult::Verdict::fail};
}

inline CheckResult vacuous(std::string name, const std::string& why) {
  return {std::move(name), "-", why, CheckResult::Verdict::vacuous};
}

}  // namespace detail

// Evaluates both sides of every inequality the chosen covering theorem
// asserts for this outcome, plus the structural invariants of the
// disjointification. Infinite constants make the bound vacuous, not failed.
inline VerificationReport verify_covering_bounds(const Space& space, const SelectionOutcome& out,
                                                 const ConstantsReport& report, Theorem theorem) {
  const BallFamily& fam = out.family;
  if (report.t != fam.t) throw std::invalid_argument("constants report t differs from the family t");
  if (!fam.balls.empty()) {
    auto [need_lo, need_hi] = required_radius_range(fam, theorem != Theorem::sparse);
    if (!(report.window.lo < need_lo) || (report.window.hi && *report.window.hi < need_hi))
      throw std::invalid_argument("constants window " + report.window.str() + " does not cover the family radii");
  }

  VerificationReport vr;
  using V = CheckResult::Verdict;
  auto structural = [&](std::string name, bool ok) {
    vr.checks.push_back({std::move(name), ok ? "true" : "false", "true", ok ? V::pass : V::fail});
  };
  bool disjoint = true, inside = true;
  PointSet uni(space.size());
  for (std::size_t j = 0; j < out.disjoint.size(); ++j) {
    if (out.disjoint[j].intersects(uni)) disjoint = false;
    uni |= out.disjoint[j];
    const Ball& b = fam.balls[out.accepted[j]];
    if (!out.disjoint[j].is_subset_of(detail::reduced_ball(space, b, fam.t))) inside = false;
  }
  structural("disjoint", disjoint);
  structural("union_is_v", uni == out.v_set);
  structural("d_in_reduced_ball", inside);
  if (theorem != Theorem::bounded)
    structural("first_accepted", fam.balls.empty() || (!out.accepted.empty() && out.accepted.front() == 0));

  const ExtendedConstant& c = report.c_mu;
  const ExtendedConstant& k1 = report.k_blossom;
  const PointSet support = space.support();
  const Rational mu_u = measure(space, out.u_set), mu_v = measure(space, out.v_set);

  if (theorem == Theorem::sparse || theorem == Theorem::combined) {
    const std::string set_name = theorem == Theorem::sparse ? "set" : "set2";
    if (k1.finite())
      vr.checks.push_back(detail::exact_check(set_name, mu_u, (k1.value.value() + 1) * mu_v));
    else
      vr.checks.push_back(detail::vacuous(set_name, "K=inf"));
  }
  if (theorem == Theorem::sparse) {
    if (c.finite() && k1.finite())
      vr.checks.push_back(detail::exact_check("bound", detail::max_over(out.density, nullptr),
                                              c.value.value() * k1.value.value() + 1));
    else
      vr.checks.push_back(detail::vacuous("bound", "C or K infinite"));
  } else {
    Extended k2 = report.k2.value;
    if (theorem == Theorem::bounded) {
      // The theorem's K2 is mri(r, T) at the family's base radius.
      k2 = max_relative_increment(space, fam.r, fam.T).value;
    }
    const std::string name = theorem == Theorem::bounded ? "sum" : "bound2";
    if (c.finite() && k1.finite() && k2.is_finite()) {
      double rhs = scale_sum_bound(c.as_double(), k1.as_double(), k2.as_double());
      if (theorem == Theorem::combined) rhs += 1;
      vr.checks.push_back(detail::float_check(name, detail::max_over(out.density, &support), rhs));
    } else {
      vr.checks.push_back(detail::vacuous(name, "C, K1 or K2 infinite"));
    }
  }
  return vr;
}

}  // namespace covlab
