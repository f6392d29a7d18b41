#pragma once

// Finite metric measure spaces: balls, blossoms and the critical radii that
// reduce suprema over r > 0 to finitely many evaluations.
//
// Distances are stored once as a sorted list of distinct exact values plus an
// n x n matrix of ranks into that list. Every ball query turns its radius into
// a "level" (number of distinct distances below the radius) with one exact
// comparison chain, after which membership is integer comparison.

#include "covlab/numeric.hpp"
#include "covlab/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace covlab {

enum class Closure { open, closed };

struct Ball {
  std::size_t center = 0;
  Rational radius{1};
  Closure closure = Closure::open;
};

// Raised when a distance matrix is not a metric; names the offending points.
class MetricError : public std::invalid_argument {
 public:
  MetricError(const std::string& what, std::size_t i, std::size_t j, std::size_t k)
      : std::invalid_argument(what), i_(i), j_(j), k_(k) {}
  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }
  std::size_t k() const { return k_; }

 private:
  std::size_t i_, j_, k_;
};

// Half-open radius window (lo, hi]; hi unset means unbounded.
struct RadiusWindow {
  Rational lo{0};
  std::optional<Rational> hi;

  static RadiusWindow full() { return {}; }
  bool contains(const Rational& r) const { return r > lo && (!hi || r <= *hi); }
  bool is_full() const { return lo == 0 && !hi; }
  std::string str() const {
    return "(" + to_string(lo) + "," + (hi ? to_string(*hi) : std::string("inf")) + "]";
  }
  friend bool operator==(const RadiusWindow& a, const RadiusWindow& b) { return a.lo == b.lo && a.hi == b.hi; }
};

// Interval (lo, hi] of radii on which the evaluated set functions are
// constant, with a representative strictly inside.
struct RadiusInterval {
  Rational lo{0};
  std::optional<Rational> hi;  // unset: unbounded
  Rational representative{1};

  std::string str() const {
    return "(" + to_string(lo) + "," + (hi ? to_string(*hi) : std::string("inf")) + "]";
  }
  friend bool operator==(const RadiusInterval& a, const RadiusInterval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

class Space {
 public:
  // Largest space stored densely; rank matrix and per-point sorted rows take
  // about 20 n^2 bytes.
  static constexpr std::size_t kMaxPoints = 4096;
  // Relative tolerance for floating-point distance input.
  static constexpr double kFloatTolerance = 1e-9;

  Space() = default;

  // Exact rational distance matrix; fully validated.
  static Space from_distances(const std::vector<std::vector<Rational>>& dist,
                              std::vector<Rational> weights,
                              std::vector<std::string> labels = {}) {
    const std::size_t n = dist.size();
    check_shape(n, dist, weights);
    std::vector<Rational> values{Rational(0)};
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i][i] != 0) throw MetricError("d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0", i, i, i);
      for (std::size_t j = i + 1; j < n; ++j) {
        if (dist[i][j] != dist[j][i])
          throw MetricError("asymmetric distance between points " + std::to_string(i) + " and " + std::to_string(j), i, j, j);
        if (dist[i][j] <= 0)
          throw MetricError("non-positive distance between distinct points " + std::to_string(i) + " and " + std::to_string(j), i, j, j);
        values.push_back(dist[i][j]);
      }
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<std::uint32_t> rank(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        rank[i * n + j] = static_cast<std::uint32_t>(
            std::lower_bound(values.begin(), values.end(), dist[i][j]) - values.begin());

    // Triangle inequality: floating prefilter, exact check only near equality.
    std::vector<double> approx(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) approx[k] = to_double(values[k]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dij = approx[rank[i * n + j]];
        for (std::size_t k = 0; k < n; ++k) {
          const double sum = approx[rank[i * n + k]] + approx[rank[k * n + j]];
          if (dij < sum * (1 - 1e-12)) continue;
          const Rational& exact_ij = values[rank[i * n + j]];
          if (exact_ij > values[rank[i * n + k]] + values[rank[k * n + j]]) {
            throw MetricError("triangle inequality violated: d(" + std::to_string(i) + "," + std::to_string(j) +
                                  ") > d(" + std::to_string(i) + "," + std::to_string(k) + ") + d(" +
                                  std::to_string(k) + "," + std::to_string(j) + ")",
                              i, j, k);
          }
        }
      }
    return from_ranks(std::move(values), std::move(rank), std::move(weights), std::move(labels), true);
  }

  // Floating-point distance matrix. Values within relative kFloatTolerance are
  // merged into one canonical distance (the smallest of the cluster), which is
  // then stored exactly; metric axioms are checked to the same tolerance.
  static Space from_float_distances(const std::vector<std::vector<double>>& dist,
                                    std::vector<Rational> weights,
                                    std::vector<std::string> labels = {},
                                    double rel_tol = kFloatTolerance) {
    const std::size_t n = dist.size();
    check_shape(n, dist, weights);
    std::vector<double> raw;
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i][i] != 0.0) throw MetricError("d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0", i, i, i);
      for (std::size_t j = 0; j < n; ++j) {
        const double d = dist[i][j];
        if (!std::isfinite(d)) throw MetricError("non-finite distance at (" + std::to_string(i) + "," + std::to_string(j) + ")", i, j, j);
        if (i == j) continue;
        if (std::fabs(d - dist[j][i]) > rel_tol * std::max(std::fabs(d), std::fabs(dist[j][i])))
          throw MetricError("asymmetric distance between points " + std::to_string(i) + " and " + std::to_string(j), i, j, j);
        if (d <= 0.0)
          throw MetricError("non-positive distance between distinct points " + std::to_string(i) + " and " + std::to_string(j), i, j, j);
        raw.push_back(d);
      }
    }
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    std::vector<double> cluster_rep;   // canonical value per cluster
    std::vector<std::uint32_t> cluster_of(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
      if (cluster_rep.empty() || raw[k] > cluster_rep.back() * (1 + rel_tol)) cluster_rep.push_back(raw[k]);
      cluster_of[k] = static_cast<std::uint32_t>(cluster_rep.size());  // rank 0 is the zero distance
    }
    std::vector<std::uint32_t> rank(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        auto it = std::lower_bound(raw.begin(), raw.end(), dist[i][j]);
        rank[i * n + j] = cluster_of[static_cast<std::size_t>(it - raw.begin())];
      }
    // Symmetrize ranks: both orientations may straddle a cluster boundary.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto r = std::min(rank[i * n + j], rank[j * n + i]);
        rank[i * n + j] = rank[j * n + i] = r;
      }
    std::vector<double> canon{0.0};
    canon.insert(canon.end(), cluster_rep.begin(), cluster_rep.end());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const double lhs = canon[rank[i * n + j]];
          const double rhs = canon[rank[i * n + k]] + canon[rank[k * n + j]];
          if (lhs > rhs * (1 + rel_tol))
            throw MetricError("triangle inequality violated: d(" + std::to_string(i) + "," + std::to_string(j) +
                                  ") > d(" + std::to_string(i) + "," + std::to_string(k) + ") + d(" +
                                  std::to_string(k) + "," + std::to_string(j) + ")",
                              i, j, k);
        }
    std::vector<Rational> values;
    values.reserve(canon.size());
    for (double d : canon) values.emplace_back(d);
    return from_ranks(std::move(values), std::move(rank), std::move(weights), std::move(labels), false);
  }

  // Trusted construction used by builders whose metric is known to be valid:
  // `values` are the distinct distances in increasing order with values[0] == 0,
  // `rank` is the row-major n x n matrix of indices into `values`.
  static Space from_ranks(std::vector<Rational> values, std::vector<std::uint32_t> rank,
                          std::vector<Rational> weights, std::vector<std::string> labels, bool exact,
                          std::vector<std::vector<Rational>> coordinates = {}) {
    Space s;
    const std::size_t n = weights.size();
    if (n > kMaxPoints)
      throw std::length_error("space with " + std::to_string(n) + " points exceeds the dense limit of " +
                              std::to_string(kMaxPoints));
    if (rank.size() != n * n) throw std::invalid_argument("rank matrix size mismatch");
    if (values.empty() || values.front() != 0) throw std::invalid_argument("distance values must start at 0");
    if (!coordinates.empty() && coordinates.size() != n) throw std::invalid_argument("coordinate count mismatch");
    s.n_ = n;
    s.values_ = std::move(values);
    s.rank_ = std::move(rank);
    s.exact_ = exact;
    s.coords_ = std::move(coordinates);
    if (labels.empty()) {
      labels.reserve(n);
      for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    }
    if (labels.size() != n) throw std::invalid_argument("label count mismatch");
    s.labels_ = std::move(labels);
    s.set_weights(std::move(weights));
    s.build_rows();
    return s;
  }

  static Space with_coordinates(Space s, std::vector<std::vector<Rational>> coordinates) {
    if (coordinates.size() != s.n_) throw std::invalid_argument("coordinate count mismatch");
    s.coords_ = std::move(coordinates);
    return s;
  }

  std::size_t size() const { return n_; }
  bool exact_distances() const { return exact_; }

  std::uint32_t rank(std::size_t i, std::size_t j) const { return rank_[i * n_ + j]; }
  const Rational& distance(std::size_t i, std::size_t j) const { return values_[rank(i, j)]; }
  // Distinct distances in increasing order, starting with 0.
  const std::vector<Rational>& distance_values() const { return values_; }

  const Rational& weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Rational>& weights() const { return weights_; }
  // Weights scaled by a common denominator, so that masses add as integers.
  std::int64_t weight_units(std::size_t i) const { return units_[i]; }
  const Integer& unit_denominator() const { return unit_den_; }
  Rational to_measure(std::int64_t units) const { return Rational(Integer(units), unit_den_); }
  std::int64_t total_units() const { return total_units_; }

  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<Rational>>& coordinates() const { return coords_; }

  std::optional<std::size_t> find_label(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }
  std::optional<std::size_t> find_coordinates(const std::vector<Rational>& c) const {
    auto it = std::find(coords_.begin(), coords_.end(), c);
    if (it == coords_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - coords_.begin());
  }

  void check_index(std::size_t i) const {
    if (i >= n_) throw std::out_of_range("point index " + std::to_string(i) + " out of range (n=" + std::to_string(n_) + ")");
  }

  // Number of distinct distances strictly below r: the open ball of radius r
  // is {y : rank(x, y) < open_level(r)}.
  std::size_t open_level(const Rational& r) const {
    return static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), r) - values_.begin());
  }
  // Number of distinct distances at most r (closed-ball level).
  std::size_t closed_level(const Rational& r) const {
    return static_cast<std::size_t>(std::upper_bound(values_.begin(), values_.end(), r) - values_.begin());
  }
  std::size_t level(const Rational& r, Closure c) const {
    return c == Closure::open ? open_level(r) : closed_level(r);
  }

  // Points sorted by distance from x (ties by index).
  std::span<const std::uint32_t> neighbors_by_distance(std::size_t x) const {
    return {order_.data() + x * n_, n_};
  }
  // Number of points in the ball of the given level around x.
  std::size_t ball_count(std::size_t x, std::size_t level) const {
    const std::uint32_t* row = sorted_rank_.data() + x * n_;
    return static_cast<std::size_t>(std::lower_bound(row, row + n_, static_cast<std::uint32_t>(
                                                                          std::min<std::size_t>(level, UINT32_MAX))) - row);
  }
  // Mass (in weight units) of the ball of the given level around x.
  std::int64_t ball_mass(std::size_t x, std::size_t level) const {
    return prefix_[x * (n_ + 1) + ball_count(x, level)];
  }
  PointSet ball_at_level(std::size_t x, std::size_t level) const {
    PointSet s(n_);
    auto nb = neighbors_by_distance(x);
    const std::size_t count = ball_count(x, level);
    for (std::size_t k = 0; k < count; ++k) s.insert(nb[k]);
    return s;
  }

  std::int64_t mass(const PointSet& s) const {
    std::int64_t total = 0;
    s.for_each([&](std::size_t i) { total += units_[i]; });
    return total;
  }

  PointSet support() const {
    PointSet s(n_);
    for (std::size_t i = 0; i < n_; ++i)
      if (units_[i] > 0) s.insert(i);
    return s;
  }
  bool in_support(std::size_t i) const { return units_[i] > 0; }

 private:
  template <typename Matrix>
  static void check_shape(std::size_t n, const Matrix& dist, const std::vector<Rational>& weights) {
    if (n == 0) throw std::invalid_argument("space must have at least one point");
    for (const auto& row : dist)
      if (row.size() != n) throw std::invalid_argument("distance matrix is not square");
    if (weights.size() != n) throw std::invalid_argument("weights length differs from point count");
  }

  void set_weights(std::vector<Rational> weights) {
    Integer den = 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] < 0) throw std::invalid_argument("negative weight at point " + std::to_string(i));
      den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(weights[i]));
    }
    const Integer limit = Integer(1) << 62;
    Integer total = 0;
    units_.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      Integer u = boost::multiprecision::numerator(weights[i]) * (den / boost::multiprecision::denominator(weights[i]));
      total += u;
      if (total >= limit) throw std::overflow_error("weights too large or too finely divided for exact integer masses");
      units_[i] = static_cast<std::int64_t>(u);
    }
    unit_den_ = den;
    total_units_ = static_cast<std::int64_t>(total);
    weights_ = std::move(weights);
  }

  void build_rows() {
    order_.resize(n_ * n_);
    sorted_rank_.resize(n_ * n_);
    prefix_.assign(n_ * (n_ + 1), 0);
    std::vector<std::uint32_t> idx(n_);
    for (std::size_t x = 0; x < n_; ++x) {
      std::iota(idx.begin(), idx.end(), 0u);
      const std::uint32_t* row = rank_.data() + x * n_;
      std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return row[a] < row[b]; });
      std::int64_t acc = 0;
      for (std::size_t k = 0; k < n_; ++k) {
        order_[x * n_ + k] = idx[k];
        sorted_rank_[x * n_ + k] = row[idx[k]];
        prefix_[x * (n_ + 1) + k] = acc;
        acc += units_[idx[k]];
      }
      prefix_[x * (n_ + 1) + n_] = acc;
    }
  }

  std::size_t n_ = 0;
  std::vector<Rational> values_;
  std::vector<std::uint32_t> rank_;
  bool exact_ = true;
  std::vector<Rational> weights_;
  std::vector<std::int64_t> units_;
  Integer unit_den_{1};
  std::int64_t total_units_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::vector<Rational>> coords_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> sorted_rank_;
  std::vector<std::int64_t> prefix_;
};

inline PointSet ball(const Space& space, const Ball& b) {
  space.check_index(b.center);
  if (b.radius <= 0) throw std::invalid_argument("ball radius must be positive");
  return space.ball_at_level(b.center, space.level(b.radius, b.closure));
}

inline Rational measure(const Space& space, const PointSet& s) {
  return space.to_measure(space.mass(s));
}

// Per-level tables of all open balls, shared by the blossom computations.
class BallTables {
 public:
  explicit BallTables(const Space& space) : space_(&space) {}

  const std::vector<PointSet>& at_level(std::size_t level) {
    auto it = tables_.find(level);
    if (it != tables_.end()) return it->second;
    std::vector<PointSet> balls;
    balls.reserve(space_->size());
    for (std::size_t x = 0; x < space_->size(); ++x) balls.push_back(space_->ball_at_level(x, level));
    return tables_.emplace(level, std::move(balls)).first->second;
  }
  // Fills the tables up front so that const lookups can run concurrently.
  void prepare(const std::vector<std::size_t>& levels) {
    for (std::size_t l : levels) at_level(l);
  }
  const std::vector<PointSet>& prepared(std::size_t level) const {
    auto it = tables_.find(level);
    if (it == tables_.end()) throw std::logic_error("ball table level not prepared");
    return it->second;
  }

 private:
  const Space* space_;
  std::map<std::size_t, std::vector<PointSet>> tables_;
};

// Union of the open balls of the given level centered at points of s.
inline PointSet blossom_at_level(const std::vector<PointSet>& balls, const PointSet& s) {
  PointSet out(s.universe());
  s.for_each([&](std::size_t x) { out |= balls[x]; });
  return out;
}

// On a finite space a y-ball meets s iff y lies in the blossom of s, so the
// uncentered blossom is the blossom of the blossom.
inline PointSet uncentered_blossom_at_level(const std::vector<PointSet>& balls, const PointSet& s) {
  return blossom_at_level(balls, blossom_at_level(balls, s));
}

inline PointSet blossom(const Space& space, const PointSet& s, const Rational& radius) {
  if (radius <= 0) throw std::invalid_argument("blossom radius must be positive");
  const std::size_t level = space.open_level(radius);
  PointSet out(space.size());
  s.for_each([&](std::size_t x) { out |= space.ball_at_level(x, level); });
  return out;
}

inline PointSet uncentered_blossom(const Space& space, const PointSet& s, const Rational& radius) {
  return blossom(space, blossom(space, s, radius), radius);
}

// Sorted distinct positive pairwise distances.
inline std::vector<Rational> critical_radii(const Space& space) {
  const auto& v = space.distance_values();
  return {v.begin() + 1, v.end()};
}

// One radius strictly inside each interval (0,b1], (b1,b2], ..., (bk, inf)
// of the given breakpoints, restricted to the window.
inline std::vector<RadiusInterval> sample_intervals(std::vector<Rational> breakpoints,
                                                    const RadiusWindow& window = RadiusWindow::full()) {
  if (window.lo > 0) breakpoints.push_back(window.lo);
  if (window.hi) breakpoints.push_back(*window.hi);
  std::erase_if(breakpoints, [](const Rational& b) { return b <= 0; });
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  std::vector<RadiusInterval> out;
  Rational lo = 0;
  auto keep = [&](const Rational& a, const std::optional<Rational>& b) {
    return a >= window.lo && (!window.hi || (b && *b <= *window.hi));
  };
  for (const Rational& b : breakpoints) {
    if (keep(lo, b)) out.push_back({lo, b, (lo + b) / 2});
    lo = b;
  }
  if (keep(lo, std::nullopt)) out.push_back({lo, std::nullopt, lo == 0 ? Rational(1) : Rational(lo * 2)});
  return out;
}

// Intervals on which every open-ball set function of r, r*f1, r*f2, ... is
// constant: breakpoints are the critical radii divided by each factor.
inline std::vector<RadiusInterval> radius_intervals(const Space& space, const std::vector<Rational>& factors,
                                                    const RadiusWindow& window = RadiusWindow::full()) {
  std::vector<Rational> breakpoints;
  const auto radii = critical_radii(space);
  for (const Rational& f : factors) {
    if (f <= 0) throw std::invalid_argument("radius factor must be positive");
    for (const Rational& d : radii) breakpoints.push_back(d / f);
  }
  return sample_intervals(std::move(breakpoints), window);
}

// min_z max(d(x,z), d(z,y)) - d(x,y)/2; zero iff an exact midpoint exists.
inline Rational midpoint_defect(const Space& space, std::size_t x, std::size_t y) {
  space.check_index(x);
  space.check_index(y);
  if (x == y) throw std::invalid_argument("midpoint_defect needs distinct points");
  std::uint32_t best = UINT32_MAX;
  for (std::size_t z = 0; z < space.size(); ++z) best = std::min(best, std::max(space.rank(x, z), space.rank(z, y)));
  return space.distance_values()[best] - space.distance(x, y) / 2;
}

}  // namespace covlab
