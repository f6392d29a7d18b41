#pragma once

// Centered Hardy-Littlewood maximal function on a finite space, its weak
// type (1,1) level profile, and the weak-type bound formulas.

#include "covlab/constants.hpp"
#include "covlab/covering.hpp"
#include "covlab/numeric.hpp"
#include "covlab/parallel.hpp"
#include "covlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace covlab {

struct SampleFunction {
  std::vector<Rational> values;

  static SampleFunction indicator(std::size_t n, std::size_t at) {
    SampleFunction f{std::vector<Rational>(n, Rational(0))};
    f.values.at(at) = 1;
    return f;
  }
  static SampleFunction constant(std::size_t n, const Rational& c) {
    return SampleFunction{std::vector<Rational>(n, c)};
  }
};

inline Rational l1_norm(const Space& space, const SampleFunction& f) {
  if (f.values.size() != space.size()) throw std::invalid_argument("function length differs from point count");
  Rational acc = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) acc += abs(f.values[i]) * space.weight(i);
  return acc;
}

struct MaximalValues {
  std::vector<Rational> values;
  std::vector<bool> undefined;  // no ball around the point has positive measure; value set to 0
};

// sup over balls B(x,r) of positive measure of the mean of |f| on B(x,r);
// with `radii`, r ranges over that set only. Only points where f != 0 can
// raise an average, so the unrestricted sup is taken at the radii where such
// a point enters the ball.
inline MaximalValues maximal_function(const Space& space, const SampleFunction& f,
                                      const std::optional<std::vector<Rational>>& radii = std::nullopt) {
  const std::size_t n = space.size();
  if (f.values.size() != n) throw std::invalid_argument("function length differs from point count");
  if (radii && radii->empty()) throw std::invalid_argument("restricted maximal function needs at least one radius");
  std::vector<Rational> weighted(n);  // |f| in weight units
  std::vector<std::size_t> nonzero;
  for (std::size_t i = 0; i < n; ++i) {
    weighted[i] = abs(f.values[i]) * space.weight_units(i);
    if (weighted[i] != 0) nonzero.push_back(i);
  }
  std::vector<std::size_t> levels;
  if (radii)
    for (const Rational& r : *radii) levels.push_back(space.open_level(r));

  MaximalValues out{std::vector<Rational>(n, Rational(0)), std::vector<bool>(n, true)};
  parallel_for(n, [&](std::size_t x) {
    Rational best = 0;
    bool defined = false;
    auto consider = [&](const Rational& integral, std::int64_t mass) {
      Rational avg = integral / mass;
      if (avg > best) best = std::move(avg);
    };
    if (!radii) {
      defined = space.total_units() > 0;
      std::vector<std::pair<std::uint32_t, std::size_t>> order;
      for (std::size_t y : nonzero) order.emplace_back(space.rank(x, y), y);
      std::sort(order.begin(), order.end());
      Rational integral = 0;
      for (std::size_t q = 0; q < order.size(); ++q) {
        integral += weighted[order[q].second];
        if (q + 1 < order.size() && order[q + 1].first == order[q].first) continue;
        consider(integral, space.ball_mass(x, order[q].first + std::size_t{1}));
      }
    } else {
      for (std::size_t level : levels) {
        const std::int64_t mass = space.ball_mass(x, level);
        if (mass == 0) continue;
        defined = true;
        Rational integral = 0;
        for (std::size_t y : nonzero)
          if (space.rank(x, y) < level) integral += weighted[y];
        consider(integral, mass);
      }
    }
    if (defined) {
      out.values[x] = std::move(best);
      out.undefined[x] = false;
    }
  });
  return out;
}

struct LevelRow {
  Rational level;       // a distinct positive value v of Mf
  Rational measure;     // mu{Mf >= v} = lim of mu{Mf > a} as a -> v from below
  Rational ratio;       // v * mu{Mf >= v} / ||f||_1
};

struct WeakTypeProfile {
  std::vector<LevelRow> rows;  // decreasing levels
  Rational norm;
  Rational supremum{0};
  Rational argmax_level{0};
};

// sup over a > 0 of a mu{Mf > a} / ||f||_1, attained as a approaches a value
// of Mf from below.
inline WeakTypeProfile weak_type_profile(const Space& space, const SampleFunction& f,
                                         const std::optional<std::vector<Rational>>& radii = std::nullopt) {
  WeakTypeProfile prof;
  prof.norm = l1_norm(space, f);
  if (prof.norm == 0) throw std::invalid_argument("weak-type profile needs a function with positive L1 norm");
  const MaximalValues mf = maximal_function(space, f, radii);
  std::vector<std::size_t> idx(space.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mf.values[a] > mf.values[b]; });
  std::int64_t mass = 0;
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const Rational& v = mf.values[idx[q]];
    if (v <= 0) break;
    mass += space.weight_units(idx[q]);
    if (q + 1 < idx.size() && mf.values[idx[q + 1]] == v) continue;
    LevelRow row{v, space.to_measure(mass), Rational(0)};
    row.ratio = v * row.measure / prof.norm;
    if (row.ratio > prof.supremum) {
      prof.supremum = row.ratio;
      prof.argmax_level = v;
    }
    prof.rows.push_back(std::move(row));
  }
  return prof;
}

struct BoundValue {
  bool vacuous = true;
  double value = std::numeric_limits<double>::infinity();
};

struct BoundsReport {
  BoundValue sparse_bound;     // (K+1)(C K+1)
  BoundValue naor_tao_bound;   // N K^{1/2} (K+1)(C K^{1/2}+1)
  BoundValue full_bound;       // (K1+1)(1 + C K1 K (2 + log K2 / log K))
  std::optional<int> d;
  std::optional<double> lebesgue_sparse_bound;  // (e^{1/d}+1)(1+2 e^{1/d})
  double cube_sparse_bound = 6;
  unsigned naor_tao_steps = 0;
};

// Plain-number inputs; +infinity marks a failed condition.
struct BoundInputs {
  double c_mu = 1;
  double k_blossom = 1;  // K for the sparse bound, K1 for the full bound
  double k_micro = 1;    // K^{1/2} in the Naor-Tao bound
  double k2 = 1;
  Rational t{Rational(1, 2)};
};

inline double lebesgue_sparse_bound(double d) {
  const double g = std::exp(1.0 / d);
  return (g + 1) * (1 + 2 * g);
}

// Least N >= 0 with (1+t)^N >= 1/t.
inline unsigned naor_tao_steps(const Rational& t) {
  if (t <= 0) throw std::invalid_argument("t must be positive");
  const Rational target = 1 / t;
  Rational p = 1;
  unsigned n = 0;
  while (p < target) {
    p *= 1 + t;
    ++n;
  }
  return n;
}

inline BoundsReport theoretical_bounds(const BoundInputs& in, std::optional<int> d = std::nullopt) {
  BoundsReport b;
  auto finite = [](std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
  };
  const double C = in.c_mu, K = in.k_blossom;
  if (finite({C, K})) b.sparse_bound = {false, (K + 1) * (C * K + 1)};
  b.naor_tao_steps = naor_tao_steps(in.t);
  if (finite({C, in.k_micro})) {
    const double root = in.k_micro, k = root * root;
    b.naor_tao_bound = {false, b.naor_tao_steps * root * (k + 1) * (C * root + 1)};
  }
  if (finite({C, K, in.k2})) b.full_bound = {false, (K + 1) * (1 + scale_sum_bound(C, K, in.k2))};
  if (d) {
    if (*d < 1) throw std::invalid_argument("dimension must be positive");
    b.d = d;
    b.lebesgue_sparse_bound = lebesgue_sparse_bound(*d);
  }
  return b;
}

inline BoundsReport theoretical_bounds(const ConstantsReport& report, std::optional<int> d = std::nullopt) {
  return theoretical_bounds(BoundInputs{report.c_mu.as_double(), report.k_blossom.as_double(),
                                        report.k_micro.as_double(), report.k2.as_double(), report.t},
                            d);
}

struct DeltaScan {};
struct RandomProbe {
  std::size_t count = 100;
  std::uint64_t seed = 1;
};
using Probe = std::variant<DeltaScan, RandomProbe>;

struct WeakNormResult {
  Rational ratio{0};  // certified lower bound for the weak-type norm
  SampleFunction witness;
  std::size_t probes = 0;
};

inline WeakNormResult empirical_weak_norm(const Space& space, const Probe& probe,
                                          const std::optional<std::vector<Rational>>& radii = std::nullopt) {
  if (space.total_units() == 0) throw std::invalid_argument("space has zero total measure");
  WeakNormResult best;
  auto try_f = [&](SampleFunction f) {
    ++best.probes;
    const WeakTypeProfile prof = weak_type_profile(space, f, radii);
    if (best.probes == 1 || prof.supremum > best.ratio) {
      best.ratio = prof.supremum;
      best.witness = std::move(f);
    }
  };
  const PointSet support = space.support();
  if (std::holds_alternative<DeltaScan>(probe)) {
    support.for_each([&](std::size_t x) { try_f(SampleFunction::indicator(space.size(), x)); });
    return best;
  }
  const auto& rp = std::get<RandomProbe>(probe);
  std::mt19937_64 rng(rp.seed);
  std::uniform_int_distribution<int> coin(0, 1), num(1, 10), den(1, 4);
  const std::vector<std::size_t> supp = support.indices();
  std::uniform_int_distribution<std::size_t> pick(0, supp.size() - 1);
  for (std::size_t k = 0; k < rp.count; ++k) {
    SampleFunction f{std::vector<Rational>(space.size(), Rational(0))};
    for (auto& v : f.values)
      if (coin(rng)) v = Rational(num(rng), den(rng));
    if (l1_norm(space, f) == 0) f.values[supp[pick(rng)]] = 1;
    try_f(std::move(f));
  }
  return best;
}

}  // namespace covlab
