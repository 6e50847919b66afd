#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "mcub/manifold.hpp"

namespace mcub::detail {

/// Uniform bucket grid over lattice nodes. Buckets are at least `radius`
/// wide, so every node within geodesic distance `radius` of a query lies in
/// the 3^dim block of buckets around it. Periodic angles are bucketed
/// directly; sphere points are bucketed by their embedding in R^3 (chordal
/// distance never exceeds geodesic distance).
class NodeIndex {
public:
  NodeIndex(const ManifoldDescriptor& m, double radius) : m_(m), radius_(radius) {
    switch (m.kind) {
      case ManifoldKind::circle:
        dims_ = {cells_for(kTwoPi, radius, 1 << 16), 1, 1};
        break;
      case ManifoldKind::torus2: {
        const int c = cells_for(kTwoPi, radius, 512);
        dims_ = {c, c, 1};
        break;
      }
      case ManifoldKind::sphere2: {
        const double chord = 2.0 * std::sin(std::min(radius, kPi) / 2.0);
        const int c = cells_for(2.0, chord, 64);
        dims_ = {c, c, c};
        break;
      }
    }
    buckets_.resize(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2]);
  }

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Point>& points() const noexcept { return points_; }

  void insert(const Point& p) {
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    buckets_[flat(cell_of(p))].push_back(id);
  }

  /// Calls f(id) for every node that might lie within `radius` of p.
  template <class F>
  void for_each_candidate(const Point& p, F&& f) const {
    const auto c = cell_of(p);
    std::array<int, 3> lo{};
    std::array<int, 3> hi{};
    for (int a = 0; a < 3; ++a) {
      if (dims_[a] <= 3) {
        lo[a] = 0;
        hi[a] = dims_[a] - 1;
      } else {
        lo[a] = c[a] - 1;
        hi[a] = c[a] + 1;
      }
    }
    const bool periodic = m_.kind != ManifoldKind::sphere2;
    for (int i = lo[0]; i <= hi[0]; ++i) {
      for (int j = lo[1]; j <= hi[1]; ++j) {
        for (int k = lo[2]; k <= hi[2]; ++k) {
          std::array<int, 3> q{i, j, k};
          bool inside = true;
          for (int a = 0; a < 3; ++a) {
            if (q[a] < 0 || q[a] >= dims_[a]) {
              if (periodic) {
                q[a] = (q[a] + dims_[a]) % dims_[a];
              } else {
                inside = false;
              }
            }
          }
          if (!inside) continue;
          for (int id : buckets_[flat(q)]) f(id);
        }
      }
    }
  }

  /// True if some node lies at distance < threshold (threshold <= radius).
  bool any_closer_than(const Point& p, double threshold) const {
    bool found = false;
    for_each_candidate(p, [&](int id) {
      if (!found && geodesic_distance(m_, p, points_[static_cast<std::size_t>(id)]) < threshold) found = true;
    });
    return found;
  }

  /// Number of nodes at distance < threshold (threshold <= radius).
  int count_closer_than(const Point& p, double threshold) const {
    int count = 0;
    for_each_candidate(p, [&](int id) {
      if (geodesic_distance(m_, p, points_[static_cast<std::size_t>(id)]) < threshold) ++count;
    });
    return count;
  }

  struct Nearest {
    int id = -1;
    double distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest node; ties go to the lowest index.
  Nearest nearest(const Point& p) const {
    Nearest best;
    auto consider = [&](int id) {
      const double d = geodesic_distance(m_, p, points_[static_cast<std::size_t>(id)]);
      if (d < best.distance || (d == best.distance && id < best.id)) best = {id, d};
    };
    for_each_candidate(p, consider);
    if (best.distance <= radius_) return best;
    best = {};
    for (int id = 0; id < static_cast<int>(points_.size()); ++id) consider(id);
    return best;
  }

private:
  static int cells_for(double extent, double width, int cap) {
    if (!(width > 0.0)) return 1;
    const double c = std::floor(extent / width);
    return static_cast<int>(std::clamp(c, 1.0, static_cast<double>(cap)));
  }

  std::array<int, 3> cell_of(const Point& p) const {
    auto bin = [](double x, double lo, double extent, int n) {
      int b = static_cast<int>(std::floor((x - lo) / extent * n));
      return std::clamp(b, 0, n - 1);
    };
    switch (m_.kind) {
      case ManifoldKind::circle: return {bin(wrap_angle(p.first), 0.0, kTwoPi, dims_[0]), 0, 0};
      case ManifoldKind::torus2:
        return {bin(wrap_angle(p.first), 0.0, kTwoPi, dims_[0]),
                bin(wrap_angle(p.second), 0.0, kTwoPi, dims_[1]), 0};
      case ManifoldKind::sphere2: {
        const auto x = sphere_cartesian(p);
        return {bin(x[0], -1.0, 2.0, dims_[0]), bin(x[1], -1.0, 2.0, dims_[1]),
                bin(x[2], -1.0, 2.0, dims_[2])};
      }
    }
    return {0, 0, 0};
  }

  std::size_t flat(const std::array<int, 3>& c) const {
    return (static_cast<std::size_t>(c[0]) * dims_[1] + c[1]) * dims_[2] + c[2];
  }

  ManifoldDescriptor m_;
  double radius_;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<Point> points_;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace mcub::detail
