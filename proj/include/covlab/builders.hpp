#pragma once

// Named example spaces and point-cloud construction.

#include "covlab/numeric.hpp"
#include "covlab/space.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace covlab {

// Lattice {-h..h}^d with the l-infinity metric and counting measure, except
// that the origin carries `origin_weight`. Points are indexed by coordinates
// taken modulo 2h+1 (first coordinate most significant), so the origin is
// point 0 and nonnegative coordinates precede negative ones.
struct GridZd {
  int d = 1;
  int half_width = 1;
  Rational origin_weight{1};
};

struct DistanceMatrixSpec {
  std::variant<std::vector<std::vector<Rational>>, std::vector<std::vector<double>>> dist;
  std::vector<Rational> weights;
  std::vector<std::string> labels;
};

enum class Norm { linf, l1, l2 };

// Points of R^k with a norm metric; l-infinity and l1 distances of rational
// coordinates are exact, l2 distances go through the floating-point path.
struct PointCloud {
  std::vector<std::vector<Rational>> points;
  Norm norm = Norm::linf;
  std::vector<Rational> weights;
  std::vector<std::string> labels;
};

// Net {0, p, 2p, ..., 1} on both legs of {0}x[0,1] u [0,1]x{0}, l-infinity
// metric, counting measure. 1/pitch must be an integer.
struct LShapeNet {
  Rational pitch{Rational(1, 12)};
};

// n equally spaced points on the unit circle with chordal distances
// 2 sin(pi k / n), counting measure.
struct NgonChordal {
  int n = 6;
};

// X = {0, 1, 3} in R with the unit mass at 3.
struct ThreePointDelta {};

using SpaceSpec = std::variant<GridZd, DistanceMatrixSpec, PointCloud, LShapeNet, NgonChordal, ThreePointDelta>;

inline std::size_t grid_point_count(int d, int half_width) {
  if (d < 1) throw std::invalid_argument("grid dimension must be at least 1");
  if (half_width < 0) throw std::invalid_argument("grid half-width must be nonnegative");
  const double count = std::pow(2.0 * half_width + 1, d);
  if (count > 1e15) throw std::length_error("grid too large");
  return static_cast<std::size_t>(count);
}

inline std::string coordinate_label(const std::vector<Rational>& c) {
  if (c.size() == 1) return to_string(c[0]);
  std::string out = "(";
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) out += ",";
    out += to_string(c[k]);
  }
  return out + ")";
}

inline Space build_grid(const GridZd& g) {
  const std::size_t n = grid_point_count(g.d, g.half_width);
  if (n > Space::kMaxPoints)
    throw std::length_error("grid with " + std::to_string(n) + " points exceeds the dense limit of " +
                            std::to_string(Space::kMaxPoints));
  if (g.origin_weight < 0) throw std::invalid_argument("origin weight must be nonnegative");
  const int w = 2 * g.half_width + 1;
  std::vector<std::vector<int>> coords(n, std::vector<int>(g.d));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (int k = g.d - 1; k >= 0; --k) {
      const int digit = static_cast<int>(rest % w);
      rest /= w;
      coords[i][k] = digit <= g.half_width ? digit : digit - w;
    }
  }
  std::vector<std::uint32_t> rank(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      int m = 0;
      for (int k = 0; k < g.d; ++k) m = std::max(m, std::abs(coords[i][k] - coords[j][k]));
      rank[i * n + j] = static_cast<std::uint32_t>(m);
    }
  std::vector<Rational> values;
  for (int k = 0; k <= 2 * g.half_width; ++k) values.emplace_back(k);
  std::vector<Rational> weights(n, Rational(1));
  weights[0] = g.origin_weight;
  std::vector<std::vector<Rational>> rc(n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c : coords[i]) rc[i].emplace_back(c);
    labels[i] = coordinate_label(rc[i]);
  }
  return Space::from_ranks(std::move(values), std::move(rank), std::move(weights), std::move(labels), true,
                           std::move(rc));
}

inline Space build_point_cloud(const PointCloud& pc) {
  const std::size_t n = pc.points.size();
  if (n == 0) throw std::invalid_argument("point cloud is empty");
  const std::size_t dim = pc.points[0].size();
  for (const auto& p : pc.points)
    if (p.size() != dim) throw std::invalid_argument("points have differing dimensions");
  std::vector<std::string> labels = pc.labels;
  if (labels.empty())
    for (const auto& p : pc.points) labels.push_back(coordinate_label(p));
  Space s;
  if (pc.norm == Norm::l2) {
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double diff = to_double(pc.points[i][k] - pc.points[j][k]);
          acc += diff * diff;
        }
        dist[i][j] = std::sqrt(acc);
      }
    s = Space::from_float_distances(dist, pc.weights, labels);
  } else {
    std::vector<std::vector<Rational>> dist(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Rational acc = 0;
        for (std::size_t k = 0; k < dim; ++k) {
          Rational diff = abs(pc.points[i][k] - pc.points[j][k]);
          if (pc.norm == Norm::l1) acc += diff;
          else if (diff > acc) acc = diff;
        }
        dist[i][j] = dist[j][i] = acc;
      }
    s = Space::from_distances(dist, pc.weights, labels);
  }
  return Space::with_coordinates(std::move(s), pc.points);
}

inline Space build_lshape(const LShapeNet& spec) {
  if (spec.pitch <= 0) throw std::invalid_argument("pitch must be positive");
  const Rational inv = 1 / spec.pitch;
  if (boost::multiprecision::denominator(inv) != 1) throw std::invalid_argument("pitch must divide 1");
  const long m = static_cast<long>(boost::multiprecision::numerator(inv));
  if (2 * m + 1 > static_cast<long>(Space::kMaxPoints)) throw std::length_error("pitch too fine");
  // Point 0 is the corner, then (0, k p) for k = 1..m, then (k p, 0).
  const std::size_t n = static_cast<std::size_t>(2 * m + 1);
  std::vector<long> vert(n, 0), horiz(n, 0);
  for (long k = 1; k <= m; ++k) {
    vert[static_cast<std::size_t>(k)] = k;
    horiz[static_cast<std::size_t>(m + k)] = k;
  }
  std::vector<std::uint32_t> rank(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      rank[i * n + j] = static_cast<std::uint32_t>(std::max(std::labs(vert[i] - vert[j]), std::labs(horiz[i] - horiz[j])));
  std::vector<Rational> values;
  for (long k = 0; k <= m; ++k) values.push_back(spec.pitch * k);
  std::vector<std::vector<Rational>> coords(n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    coords[i] = {spec.pitch * horiz[i], spec.pitch * vert[i]};
    labels[i] = coordinate_label(coords[i]);
  }
  return Space::from_ranks(std::move(values), std::move(rank), std::vector<Rational>(n, Rational(1)),
                           std::move(labels), true, std::move(coords));
}

inline Space build_ngon(const NgonChordal& spec) {
  if (spec.n < 3) throw std::invalid_argument("ngon needs at least 3 points");
  const std::size_t n = static_cast<std::size_t>(spec.n);
  if (n > Space::kMaxPoints) throw std::length_error("ngon too large");
  std::vector<Rational> values;
  for (std::size_t k = 0; k <= n / 2; ++k)
    values.emplace_back(2.0 * std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] > values[k - 1])) throw std::runtime_error("chord lengths not separable in double precision");
  std::vector<std::uint32_t> rank(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i > j ? i - j : j - i;
      rank[i * n + j] = static_cast<std::uint32_t>(std::min(k, n - k));
    }
  return Space::from_ranks(std::move(values), std::move(rank), std::vector<Rational>(n, Rational(1)), {}, false);
}

inline Space build_three_point_delta() {
  std::vector<Rational> values{0, 1, 2, 3};
  // Points 0, 1, 3 on the line: d = 1, 3, 2.
  std::vector<std::uint32_t> rank{0, 1, 3,  //
                                  1, 0, 2,  //
                                  3, 2, 0};
  return Space::from_ranks(std::move(values), std::move(rank), {Rational(0), Rational(0), Rational(1)},
                           {"0", "1", "3"}, true, {{Rational(0)}, {Rational(1)}, {Rational(3)}});
}

inline Space build_space(const SpaceSpec& spec) {
  return std::visit(
      [](const auto& s) -> Space {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GridZd>) {
          return build_grid(s);
        } else if constexpr (std::is_same_v<T, DistanceMatrixSpec>) {
          return std::visit(
              [&](const auto& m) -> Space {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, std::vector<std::vector<Rational>>>)
                  return Space::from_distances(m, s.weights, s.labels);
                else
                  return Space::from_float_distances(m, s.weights, s.labels);
              },
              s.dist);
        } else if constexpr (std::is_same_v<T, PointCloud>) {
          return build_point_cloud(s);
        } else if constexpr (std::is_same_v<T, LShapeNet>) {
          return build_lshape(s);
        } else if constexpr (std::is_same_v<T, NgonChordal>) {
          return build_ngon(s);
        } else {
          return build_three_point_delta();
        }
      },
      spec);
}

}  // namespace covlab
