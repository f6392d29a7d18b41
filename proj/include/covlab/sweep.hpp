#pragma once

// Dimension sweep on lattice cubes: sparse selection with t = 1/d^2 over a
// lacunary radii set, observed density maxima and weak-type ratios against
// the bound formulas.

#include "covlab/builders.hpp"
#include "covlab/constants.hpp"
#include "covlab/covering.hpp"
#include "covlab/maximal.hpp"
#include "covlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace covlab {

struct SweepConfig {
  std::vector<int> dims;
  int half_width = 4;
  std::size_t families = 20;        // random ball families per dimension
  std::size_t max_family_size = 0;  // 0: twice the point count
  std::uint64_t seed = 1;
  std::size_t point_budget = 2'000'000;
};

struct SweepRow {
  int d = 1;
  int half_width = 0;
  std::size_t points = 0;
  Rational t;
  Rational T;  // lacunarity actually used; always >= d and >= 1/t
  std::vector<Rational> radii;
  std::size_t families = 0;
  std::size_t verified = 0;   // outcomes passing every check
  Rational max_density{0};    // over all families
  ExtendedConstant c_mu;
  ExtendedConstant k_blossom;
  Extended density_bound;     // C K + 1
  Rational weak_norm{0};      // delta-scan lower bound for the M_R weak norm
  BoundsReport bounds;
  double d_log_d = 0;

  bool consistent() const {
    if (verified != families) return false;
    if (density_bound.is_finite() && max_density > density_bound.value()) return false;
    return !bounds.sparse_bound.vacuous ? to_double(weak_norm) <= bounds.sparse_bound.value * (1 + kLogBoundSlack)
                                        : true;
  }
};

// Radii start at 2: open balls of radius 1 in the lattice are singletons.
// Lacunarity for dimension d: the d-lacunary choice, raised to 1/t
// when needed so that T t >= 1 (a d^2-lacunary set is also d-lacunary).
inline Rational sweep_lacunarity(int d) { return std::max(Rational(d) * d, Rational(2)); }

inline BallFamily random_sparse_family(const Space& space, const RadiiSet& radii, const Rational& t,
                                       std::size_t size, std::mt19937_64& rng) {
  BallFamily f;
  f.t = t;
  f.mode = FamilyMode::sparse;
  f.radii = radii;
  std::uniform_int_distribution<std::size_t> center(0, space.size() - 1), radius(0, radii.radii.size() - 1);
  for (std::size_t k = 0; k < size; ++k) f.balls.push_back(Ball{center(rng), radii.radii[radius(rng)], Closure::open});
  std::stable_sort(f.balls.begin(), f.balls.end(), [](const Ball& a, const Ball& b) { return a.radius > b.radius; });
  return f;
}

inline SweepRow sweep_dimension(int d, const SweepConfig& cfg, std::uint64_t seed) {
  const std::size_t points = grid_point_count(d, cfg.half_width);
  if (points > cfg.point_budget)
    throw std::length_error("d=" + std::to_string(d) + " needs " + std::to_string(points) +
                            " points, over the budget of " + std::to_string(cfg.point_budget));
  const Space space = build_grid(GridZd{d, cfg.half_width, Rational(1)});
  SweepRow row;
  row.d = d;
  row.half_width = cfg.half_width;
  row.points = points;
  row.t = Rational(1, d * d);
  row.T = sweep_lacunarity(d);
  const RadiiSet radii = make_lacunary(Rational(2), row.T, Rational(2), Rational(2 * cfg.half_width + 1));
  row.radii = radii.radii;
  const RadiusWindow window{row.t * radii.radii.front() / 2, radii.radii.back()};
  const ConstantsReport report = constants_report(space, row.t, row.T, window, K2Mode::combined);
  row.c_mu = report.c_mu;
  row.k_blossom = report.k_blossom;
  row.density_bound = report.c_mu.finite() && report.k_blossom.finite()
                          ? Extended(report.c_mu.value.value() * report.k_blossom.value.value() + 1)
                          : Extended::infinity();

  std::mt19937_64 rng(seed);
  const std::size_t cap = cfg.max_family_size ? cfg.max_family_size : 2 * points;
  std::uniform_int_distribution<std::size_t> size(1, cap);
  for (std::size_t k = 0; k < cfg.families; ++k) {
    const BallFamily fam = random_sparse_family(space, radii, row.t, size(rng), rng);
    const SelectionOutcome out = sparse_select(space, fam);
    ++row.families;
    if (verify_covering_bounds(space, out, report, Theorem::sparse).passed()) ++row.verified;
    for (const auto& v : out.density) row.max_density = std::max(row.max_density, v);
  }
  row.weak_norm = empirical_weak_norm(space, DeltaScan{}, radii.radii).ratio;
  row.bounds = theoretical_bounds(report, d);
  row.d_log_d = d * std::log(static_cast<double>(d));
  return row;
}

inline std::vector<SweepRow> sweep(const SweepConfig& cfg) {
  if (cfg.half_width < 1) throw std::invalid_argument("sweep half-width must be at least 1");
  for (int d : cfg.dims) {
    if (d < 1) throw std::invalid_argument("sweep dimensions must be positive");
    const std::size_t points = grid_point_count(d, cfg.half_width);
    if (points > cfg.point_budget)
      throw std::length_error("d=" + std::to_string(d) + " needs " + std::to_string(points) +
                              " points, over the budget of " + std::to_string(cfg.point_budget));
    if (points > Space::kMaxPoints)
      throw std::length_error("d=" + std::to_string(d) + " needs " + std::to_string(points) +
                              " points, over the dense limit of " + std::to_string(Space::kMaxPoints));
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cfg.dims.size(); ++i) rows.push_back(sweep_dimension(cfg.dims[i], cfg, cfg.seed + i));
  return rows;
}

inline std::string sweep_tsv(const std::vector<SweepRow>& rows) {
  auto bound = [](const BoundValue& b) {
    if (b.vacuous) return std::string("vacuous");
    std::ostringstream os;
    os.precision(15);
    os << b.value;
    return os.str();
  };
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
  };
  std::string out =
      "d\thalf_width\tpoints\tt\tT\tfamilies\tverified\tmax_density\tc_mu\tk_blossom\tdensity_bound\t"
      "weak_norm\tsparse_bound\tfull_bound\tlebesgue_sparse_bound\td_log_d\tconsistent\n";
  for (const auto& r : rows) {
    out += std::to_string(r.d) + "\t" + std::to_string(r.half_width) + "\t" + std::to_string(r.points) + "\t" +
           to_string(r.t) + "\t" + to_string(r.T) + "\t" + std::to_string(r.families) + "\t" +
           std::to_string(r.verified) + "\t" + to_string(r.max_density) + "\t" + r.c_mu.value.str() + "\t" +
           r.k_blossom.value.str() + "\t" + r.density_bound.str() + "\t" + to_string(r.weak_norm) + "\t" +
           bound(r.bounds.sparse_bound) + "\t" + bound(r.bounds.full_bound) + "\t" +
           num(*r.bounds.lebesgue_sparse_bound) + "\t" + num(r.d_log_d) + "\t" + (r.consistent() ? "yes" : "no") +
           "\n";
  }
  return out;
}

}  // namespace covlab
