#pragma once

// Metric rho-lattices: greedy maximal (rho/2)-separated node sets, their
// certification on probe grids, Voronoi cell measures and point-count rates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mcub/detail/node_index.hpp"
#include "mcub/errors.hpp"
#include "mcub/manifold.hpp"

namespace mcub {

/// Relative slack on the rho/2 separation test, so that nodes exactly rho/2
/// apart on a candidate grid are not rejected by rounding.
inline constexpr double kSeparationSlack = 1e-12;

struct Lattice {
  ManifoldDescriptor manifold;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::vector<Point> points;

  std::size_t size() const noexcept { return points.size(); }
};

struct LatticeReport {
  double min_separation = 0.0;
  double covering_radius = 0.0;
  int multiplicity = 0;
  std::size_t point_count = 0;
  double probe_spacing = 0.0;
};

struct VoronoiWeights {
  Lattice lattice;
  Eigen::VectorXd measures;
  int resolution = 0;
};

// ---------------------------------------------------------------------------
// Probe and candidate grids

/// Regular grid with `density` points per 2 pi (circle, torus axes) or
/// `density` colatitude steps on [0, pi] (sphere; rings of equal spacing,
/// one point at each pole).
inline std::vector<Point> probe_grid(const ManifoldDescriptor& m, int density) {
  if (density < 2) throw std::invalid_argument("probe_grid: density must be >= 2");
  std::vector<Point> pts;
  switch (m.kind) {
    case ManifoldKind::circle: {
      const double h = kTwoPi / density;
      for (int i = 0; i < density; ++i) pts.push_back({i * h, 0.0});
      break;
    }
    case ManifoldKind::torus2: {
      const double h = kTwoPi / density;
      pts.reserve(static_cast<std::size_t>(density) * density);
      for (int i = 0; i < density; ++i)
        for (int j = 0; j < density; ++j) pts.push_back({i * h, j * h});
      break;
    }
    case ManifoldKind::sphere2: {
      for (int i = 0; i <= density; ++i) {
        const double colat = kPi * i / density;
        if (i == 0 || i == density) {
          pts.push_back({colat, 0.0});
          continue;
        }
        const int ring = std::max(1, static_cast<int>(std::ceil(2.0 * density * std::sin(colat))));
        const double h = kTwoPi / ring;
        for (int j = 0; j < ring; ++j) pts.push_back({colat, j * h});
      }
      break;
    }
  }
  return pts;
}

/// Grid step of probe_grid(m, density) along each coordinate direction.
inline double probe_spacing(const ManifoldDescriptor& m, int density) {
  return m.kind == ManifoldKind::sphere2 ? kPi / density : kTwoPi / density;
}

/// Density giving a step of at most rho/16. Periodic grids use a power of two
/// so that equispaced lattices land exactly on grid points.
inline int default_probe_density(const ManifoldDescriptor& m, double rho) {
  if (m.kind == ManifoldKind::sphere2) return static_cast<int>(std::ceil(16.0 * kPi / rho));
  const double need = 16.0 * kTwoPi / rho;
  int d = 8;
  while (d < need) d *= 2;
  return d;
}

namespace detail {

/// Uniform draw in [0, bound) by rejection; independent of the standard
/// library's distribution implementations so streams are portable.
inline std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return x % bound;
}

/// Candidate visiting order: natural grid order for seed 0, otherwise a
/// Fisher-Yates shuffle driven by mt19937_64(seed).
inline std::vector<std::size_t> candidate_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (seed == 0) return order;
  std::mt19937_64 gen(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_draw(gen, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Construction and certification

/// Greedy maximal (rho/2)-separated subset of a dense candidate grid.
/// `candidate_density` of 0 selects default_probe_density(m, rho).
inline Lattice build_lattice(const ManifoldDescriptor& m, double rho, std::uint64_t seed,
                             int candidate_density = 0) {
  if (!(rho > 0.0)) throw std::invalid_argument("build_lattice: rho must be positive");
  if (rho > m.diameter()) throw RhoTooLarge("rho exceeds the manifold diameter");
  if (candidate_density == 0) candidate_density = default_probe_density(m, rho);

  const auto candidates = probe_grid(m, candidate_density);
  const auto order = detail::candidate_order(candidates.size(), seed);
  const double threshold = 0.5 * rho * (1.0 - kSeparationSlack);
  detail::NodeIndex index(m, 0.5 * rho);

  bool accepted = true;
  while (accepted) {
    accepted = false;
    for (std::size_t idx : order) {
      const Point& c = candidates[idx];
      if (!index.any_closer_than(c, threshold)) {
        index.insert(normalize(m, c));
        accepted = true;
      }
    }
  }
  return {m, rho, seed, index.points()};
}

/// Measures separation, probe covering radius and ball multiplicity.
inline LatticeReport measure_lattice(const Lattice& lat, int probe_density) {
  const auto& m = lat.manifold;
  LatticeReport rep;
  rep.point_count = lat.size();
  rep.probe_spacing = probe_spacing(m, probe_density);
  if (lat.points.empty()) {
    rep.covering_radius = std::numeric_limits<double>::infinity();
    return rep;
  }

  rep.min_separation = std::numeric_limits<double>::infinity();
  {
    detail::NodeIndex sep_index(m, lat.rho);
    for (const auto& p : lat.points) sep_index.insert(p);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      sep_index.for_each_candidate(lat.points[i], [&](int id) {
        if (static_cast<std::size_t>(id) != i)
          rep.min_separation = std::min(
              rep.min_separation, geodesic_distance(m, lat.points[i], lat.points[static_cast<std::size_t>(id)]));
      });
    }
    // Pairs farther apart than the bucket radius may be skipped, so a value
    // above rho is not trustworthy.
    if (!(rep.min_separation <= lat.rho)) {
      rep.min_separation = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < lat.size(); ++i)
        for (std::size_t j = i + 1; j < lat.size(); ++j)
          rep.min_separation = std::min(rep.min_separation, geodesic_distance(m, lat.points[i], lat.points[j]));
    }
  }

  detail::NodeIndex index(m, lat.rho);
  for (const auto& p : lat.points) index.insert(p);
  const double open_rho = lat.rho * (1.0 - kSeparationSlack);
  for (const auto& probe : probe_grid(m, probe_density)) {
    rep.covering_radius = std::max(rep.covering_radius, index.nearest(probe).distance);
    rep.multiplicity = std::max(rep.multiplicity, index.count_closer_than(probe, open_rho));
  }
  return rep;
}

/// Certifies the two lattice invariants; throws NotALattice on failure.
inline LatticeReport verify_lattice(const Lattice& lat, int probe_density = 0) {
  if (probe_density == 0) probe_density = default_probe_density(lat.manifold, lat.rho);
  if (!(probe_spacing(lat.manifold, probe_density) < lat.rho / 10.0))
    throw std::invalid_argument("verify_lattice: probe spacing must be below rho/10");
  const auto rep = measure_lattice(lat, probe_density);
  const double half = 0.5 * lat.rho;
  if (lat.size() > 1 && rep.min_separation < half * (1.0 - kSeparationSlack))
    throw NotALattice("minimum separation " + std::to_string(rep.min_separation) +
                      " below rho/2 = " + std::to_string(half));
  if (rep.covering_radius > half + rep.probe_spacing)
    throw NotALattice("covering radius " + std::to_string(rep.covering_radius) +
                      " exceeds rho/2 = " + std::to_string(half));
  return rep;
}

// ---------------------------------------------------------------------------
// Voronoi measures

inline int default_voronoi_resolution(const Lattice& lat) {
  const double target = lat.rho / 20.0;
  switch (lat.manifold.kind) {
    case ManifoldKind::sphere2: return std::clamp(static_cast<int>(std::ceil(kPi / target)), 16, 512);
    case ManifoldKind::circle: return std::clamp(static_cast<int>(std::ceil(kTwoPi / target)), 64, 1 << 16);
    case ManifoldKind::torus2: return std::clamp(static_cast<int>(std::ceil(kTwoPi / target)), 32, 1024);
  }
  return 64;
}

/// Assigns every reference quadrature node to its nearest lattice node (ties
/// to the lowest index) and sums the quadrature weights per node.
inline VoronoiWeights voronoi_measures(const Lattice& lat, int resolution = 0) {
  if (lat.points.empty()) throw NotALattice("empty lattice");
  if (resolution == 0) resolution = default_voronoi_resolution(lat);
  const auto grid = reference_grid(lat.manifold, resolution);
  detail::NodeIndex index(lat.manifold, lat.rho);
  for (const auto& p : lat.points) index.insert(p);
  Eigen::VectorXd measures = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lat.size()));
  for (std::size_t i = 0; i < grid.nodes.size(); ++i)
    measures(index.nearest(grid.nodes[i]).id) += grid.weights[i];
  return {lat, std::move(measures), resolution};
}

// ---------------------------------------------------------------------------
// Point-count rates

struct PackingBounds {
  double lower = 0.0;  // Vol / sup Vol(B(x, rho/2))
  double upper = 0.0;  // Vol / inf Vol(B(x, rho/4))
};

inline PackingBounds packing_bounds(const ManifoldDescriptor& m, double rho) {
  return {m.volume / ball_volume(m, rho / 2.0), m.volume / ball_volume(m, rho / 4.0)};
}

struct WeylRow {
  double omega = 0.0;
  double rho = 0.0;
  std::size_t point_count = 0;
  double ratio = 0.0;  // |M_rho| / omega^(n/2)
};

struct WeylTable {
  std::vector<WeylRow> rows;

  /// max ratio / min ratio across the rows.
  double spread() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& r : rows) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    return rows.empty() ? 1.0 : hi / lo;
  }
  bool bounded(double limit = 4.0) const { return spread() <= limit; }
};

inline WeylTable weyl_count_check(const ManifoldDescriptor& m, const std::vector<double>& omegas,
                                  double c0, std::uint64_t seed) {
  WeylTable table;
  for (double omega : omegas) {
    if (!(omega > 0.0)) throw std::invalid_argument("weyl_count_check: omega must be positive");
    const double rho = c0 / std::sqrt(omega);
    const auto lat = build_lattice(m, rho, seed);
    table.rows.push_back({omega, rho, lat.size(),
                          static_cast<double>(lat.size()) / std::pow(omega, 0.5 * m.n)});
  }
  return table;
}

}  // namespace mcub
