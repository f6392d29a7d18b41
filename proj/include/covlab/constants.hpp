#pragma once

// Regularity constants of a finite metric measure space: local comparability
// C(mu), (strong) t-microdoubling, t-microblossoming, bounded blossoming and
// the maximal relative increment. Each supremum over r > 0 is evaluated on
// one representative per interval of the merged breakpoints, since every
// open-ball set function involved is constant on those intervals.

#include "covlab/numeric.hpp"
#include "covlab/parallel.hpp"
#include "covlab/space.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace covlab {

struct Witness {
  std::size_t x = 0;
  std::optional<std::size_t> y;
  RadiusInterval interval;
};

struct ExtendedConstant {
  Extended value{Rational(1)};
  std::optional<Witness> witness;

  bool finite() const { return value.is_finite(); }
  double as_double() const { return value.as_double(); }
};

namespace detail {

constexpr std::size_t kNoPoint = std::numeric_limits<std::size_t>::max();

struct Candidate {
  MassRatio ratio;
  std::size_t x = kNoPoint;
  std::size_t y = kNoPoint;
  std::size_t interval = kNoPoint;
  bool valid = false;
};

// Larger ratio wins; ties go to the lexicographically smallest (x, y, interval).
inline bool better(const Candidate& a, const Candidate& b) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  const int c = compare(a.ratio, b.ratio);
  if (c != 0) return c > 0;
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.interval < b.interval;
}

inline void offer(Candidate& best, std::int64_t num, std::int64_t den, std::size_t x, std::size_t y,
                  std::size_t interval) {
  if (num == 0 && den == 0) return;  // 0/0: any constant satisfies the inequality
  Candidate c{MassRatio{num, den}, x, y, interval, true};
  if (better(c, best)) best = c;
}

inline Candidate reduce(const std::vector<Candidate>& per_center) {
  Candidate best;
  for (const auto& c : per_center)
    if (better(c, best)) best = c;
  return best;
}

inline ExtendedConstant finish(const Candidate& best, const std::vector<RadiusInterval>& intervals,
                               bool with_y) {
  ExtendedConstant out;
  if (!best.valid) return out;
  Extended v = best.ratio.extended();
  if (v < Extended(Rational(1))) return out;
  out.value = v;
  Witness w{best.x, std::nullopt, intervals[best.interval]};
  if (with_y) w.y = best.y;
  out.witness = w;
  return out;
}

// masses[k][x] = mass of the open ball around x at radius factor * rep_k.
inline std::vector<std::vector<std::int64_t>> ball_masses(const Space& space,
                                                          const std::vector<RadiusInterval>& intervals,
                                                          const Rational& factor) {
  std::vector<std::vector<std::int64_t>> out(intervals.size(), std::vector<std::int64_t>(space.size()));
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const std::size_t level = space.open_level(intervals[k].representative * factor);
    for (std::size_t x = 0; x < space.size(); ++x) out[k][x] = space.ball_mass(x, level);
  }
  return out;
}

}  // namespace detail

// sup of mu B(x,r) / mu B(y,r) over d(x,y) < r.
inline ExtendedConstant local_comparability(const Space& space, const RadiusWindow& window = RadiusWindow::full()) {
  const auto intervals = radius_intervals(space, {Rational(1)}, window);
  const auto mass = detail::ball_masses(space, intervals, Rational(1));
  std::vector<detail::Candidate> per_center(space.size());
  parallel_for(space.size(), [&](std::size_t x) {
    auto neighbors = space.neighbors_by_distance(x);
    detail::Candidate best;
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      const std::int64_t mx = mass[k][x];
      if (mx == 0) continue;  // ratios are 0 or 0/0
      const std::size_t count = space.ball_count(x, space.open_level(intervals[k].representative));
      std::size_t arg = detail::kNoPoint;
      for (std::size_t q = 0; q < count; ++q) {
        const std::size_t y = neighbors[q];
        if (arg == detail::kNoPoint || mass[k][y] < mass[k][arg] || (mass[k][y] == mass[k][arg] && y < arg)) arg = y;
      }
      detail::offer(best, mx, mass[k][arg], x, arg, k);
    }
    per_center[x] = best;
  });
  return detail::finish(detail::reduce(per_center), intervals, true);
}

// sup of mu B(x,(1+t)r) / mu B(x,r); with `strong`, sup of
// mu B(y,(1+t)r) / mu B(x,r) over y in B(x,r).
inline ExtendedConstant microdoubling(const Space& space, const Rational& t, bool strong,
                                      const RadiusWindow& window = RadiusWindow::full()) {
  if (t <= 0) throw std::invalid_argument("microdoubling parameter t must be positive");
  const Rational grow = 1 + t;
  const auto intervals = radius_intervals(space, {Rational(1), grow}, window);
  const auto inner = detail::ball_masses(space, intervals, Rational(1));
  const auto outer = detail::ball_masses(space, intervals, grow);
  std::vector<detail::Candidate> per_center(space.size());
  parallel_for(space.size(), [&](std::size_t x) {
    auto neighbors = space.neighbors_by_distance(x);
    detail::Candidate best;
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      if (!strong) {
        detail::offer(best, outer[k][x], inner[k][x], x, detail::kNoPoint, k);
        continue;
      }
      const std::size_t count = space.ball_count(x, space.open_level(intervals[k].representative));
      std::size_t arg = detail::kNoPoint;
      for (std::size_t q = 0; q < count; ++q) {
        const std::size_t y = neighbors[q];
        if (arg == detail::kNoPoint || outer[k][y] > outer[k][arg] || (outer[k][y] == outer[k][arg] && y < arg)) arg = y;
      }
      detail::offer(best, outer[k][arg], inner[k][x], x, arg, k);
    }
    per_center[x] = best;
  });
  return detail::finish(detail::reduce(per_center), intervals, strong);
}

// sup of mu Blu(B(x,r), t r) / mu B(x,r), 0 < t <= 1.
inline ExtendedConstant microblossom(const Space& space, const Rational& t,
                                     const RadiusWindow& window = RadiusWindow::full()) {
  if (t <= 0 || t > 1) throw std::invalid_argument("microblossom parameter t must lie in (0, 1]");
  const auto intervals = radius_intervals(space, {Rational(1), t, 1 + t}, window);
  const auto inner = detail::ball_masses(space, intervals, Rational(1));
  BallTables tables(space);
  std::vector<std::size_t> levels;
  for (const auto& iv : intervals) levels.push_back(space.open_level(iv.representative * t));
  tables.prepare(levels);
  std::vector<detail::Candidate> per_center(space.size());
  parallel_for(space.size(), [&](std::size_t x) {
    detail::Candidate best;
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      const PointSet b = space.ball_at_level(x, space.open_level(intervals[k].representative));
      const PointSet bloom = uncentered_blossom_at_level(tables.prepared(levels[k]), b);
      detail::offer(best, space.mass(bloom), inner[k][x], x, detail::kNoPoint, k);
    }
    per_center[x] = best;
  });
  return detail::finish(detail::reduce(per_center), intervals, false);
}

// mu Blu(B(x,r), r) <= K mu B(x,r): the t = 1 case.
inline ExtendedConstant bounded_blossom(const Space& space, const RadiusWindow& window = RadiusWindow::full()) {
  return microblossom(space, Rational(1), window);
}

// mu B(x, t r) / mu B(x, r) for x in the support.
inline Extended relative_increment(const Space& space, std::size_t x, const Rational& r, const Rational& t) {
  space.check_index(x);
  if (r <= 0 || t <= 0) throw std::invalid_argument("relative_increment needs r, t > 0");
  if (!space.in_support(x))
    throw std::domain_error("relative increment is defined on the support only; point " + space.label(x) +
                            " has zero weight");
  return Extended(Rational(space.ball_mass(x, space.open_level(t * r)), space.ball_mass(x, space.open_level(r))));
}

// sup over support points of the relative increment; witness carries x.
inline ExtendedConstant max_relative_increment(const Space& space, const Rational& r, const Rational& t) {
  if (r <= 0 || t <= 0) throw std::invalid_argument("max_relative_increment needs r, t > 0");
  const std::size_t lo = space.open_level(r), hi = space.open_level(t * r);
  detail::Candidate best;
  for (std::size_t x = 0; x < space.size(); ++x) {
    if (!space.in_support(x)) continue;
    detail::offer(best, space.ball_mass(x, hi), space.ball_mass(x, lo), x, detail::kNoPoint, 0);
  }
  ExtendedConstant out;
  if (!best.valid) throw std::domain_error("measure has empty support");
  out.value = best.ratio.extended();
  out.witness = Witness{best.x, std::nullopt, RadiusInterval{r, r, r}};
  return out;
}

// sup over r in the window of mri(r, ratio).
inline ExtendedConstant sup_max_relative_increment(const Space& space, const Rational& ratio,
                                                   const RadiusWindow& window = RadiusWindow::full()) {
  if (ratio <= 0) throw std::invalid_argument("ratio must be positive");
  const auto intervals = radius_intervals(space, {Rational(1), ratio}, window);
  const auto inner = detail::ball_masses(space, intervals, Rational(1));
  const auto outer = detail::ball_masses(space, intervals, ratio);
  detail::Candidate best;
  for (std::size_t x = 0; x < space.size(); ++x) {
    if (!space.in_support(x)) continue;
    for (std::size_t k = 0; k < intervals.size(); ++k) detail::offer(best, outer[k][x], inner[k][x], x, detail::kNoPoint, k);
  }
  return detail::finish(best, intervals, false);
}

// Which ratio K2 = sup_r mri(r, .) uses: 1/t for the combined covering
// theorem, T for the bounded-radii theorem.
enum class K2Mode { combined, bounded };

struct ConstantsReport {
  Rational t{Rational(1, 2)};
  Rational T{2};
  K2Mode k2_mode = K2Mode::combined;
  RadiusWindow window;
  ExtendedConstant c_mu;
  ExtendedConstant k_micro;
  ExtendedConstant k_strong;
  ExtendedConstant k_blossom;
  ExtendedConstant k_blossom_bounded;
  ExtendedConstant k2;

  Rational k2_ratio() const { return k2_mode == K2Mode::combined ? Rational(1 / t) : T; }
};

inline ConstantsReport constants_report(const Space& space, const Rational& t, const Rational& T,
                                        const RadiusWindow& window = RadiusWindow::full(),
                                        K2Mode mode = K2Mode::combined) {
  if (t <= 0 || t > 1) throw std::invalid_argument("t must lie in (0, 1]");
  if (T <= 1) throw std::invalid_argument("T must exceed 1");
  ConstantsReport r;
  r.t = t;
  r.T = T;
  r.k2_mode = mode;
  r.window = window;
  r.c_mu = local_comparability(space, window);
  r.k_micro = microdoubling(space, t, false, window);
  r.k_strong = microdoubling(space, t, true, window);
  r.k_blossom = microblossom(space, t, window);
  r.k_blossom_bounded = bounded_blossom(space, window);
  r.k2 = sup_max_relative_increment(space, r.k2_ratio(), window);
  return r;
}

}  // namespace covlab
