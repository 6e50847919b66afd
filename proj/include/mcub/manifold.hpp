#pragma once

// Built-in compact manifolds (circle, flat 2-torus, unit 2-sphere) with their
// Laplace-Beltrami eigenbases, geodesic metric and a reference quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "mcub/detail/legendre.hpp"
#include "mcub/errors.hpp"

namespace mcub {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ManifoldKind { circle, torus2, sphere2 };

inline std::string_view to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::circle: return "circle";
    case ManifoldKind::torus2: return "torus2";
    case ManifoldKind::sphere2: return "sphere2";
  }
  return "unknown";
}

inline ManifoldKind parse_manifold_kind(std::string_view name) {
  if (name == "circle") return ManifoldKind::circle;
  if (name == "torus2" || name == "torus") return ManifoldKind::torus2;
  if (name == "sphere2" || name == "sphere") return ManifoldKind::sphere2;
  throw FormatError("unknown manifold kind '" + std::string(name) + "'");
}

/// A concrete compact manifold. `group_dim` is the dimension of the compact
/// group acting transitively on it: U(1), T^2 and SO(3) respectively.
struct ManifoldDescriptor {
  ManifoldKind kind = ManifoldKind::circle;
  int n = 1;
  double volume = kTwoPi;
  int group_dim = 1;

  static ManifoldDescriptor make(ManifoldKind kind) {
    switch (kind) {
      case ManifoldKind::circle: return {kind, 1, kTwoPi, 1};
      case ManifoldKind::torus2: return {kind, 2, kTwoPi * kTwoPi, 2};
      case ManifoldKind::sphere2: return {kind, 2, 4.0 * kPi, 3};
    }
    throw std::invalid_argument("unknown manifold kind");
  }
  static ManifoldDescriptor circle() { return make(ManifoldKind::circle); }
  static ManifoldDescriptor torus2() { return make(ManifoldKind::torus2); }
  static ManifoldDescriptor sphere2() { return make(ManifoldKind::sphere2); }

  /// Largest geodesic distance between two points.
  double diameter() const {
    return kind == ManifoldKind::torus2 ? kPi * std::numbers::sqrt2 : kPi;
  }

  bool is_canonical() const { return *this == make(kind); }

  friend bool operator==(const ManifoldDescriptor&, const ManifoldDescriptor&) = default;
};

/// Chart coordinates. Circle: (theta, unused). Torus: (theta1, theta2).
/// Sphere: (colatitude in [0, pi], longitude in [0, 2 pi)).
struct Point {
  double first = 0.0;
  double second = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

namespace detail {

inline double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Shortest signed-free distance between two angles on the unit circle.
inline double angle_gap(double a, double b) {
  const double d = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

inline std::array<double, 3> sphere_cartesian(const Point& p) {
  const double s = std::sin(p.first);
  return {s * std::cos(p.second), s * std::sin(p.second), std::cos(p.first)};
}

}  // namespace detail

/// Maps coordinates into canonical ranges; pole longitudes become 0.
inline Point normalize(const ManifoldDescriptor& m, Point p) {
  switch (m.kind) {
    case ManifoldKind::circle: return {detail::wrap_angle(p.first), 0.0};
    case ManifoldKind::torus2:
      return {detail::wrap_angle(p.first), detail::wrap_angle(p.second)};
    case ManifoldKind::sphere2: {
      double colat = std::fmod(p.first, kTwoPi);
      if (colat < 0.0) colat += kTwoPi;
      double lon = p.second;
      if (colat > kPi) {
        colat = kTwoPi - colat;
        lon += kPi;
      }
      if (colat == 0.0 || colat == kPi) lon = 0.0;
      return {colat, detail::wrap_angle(lon)};
    }
  }
  return p;
}

inline double geodesic_distance(const ManifoldDescriptor& m, const Point& p, const Point& q) {
  switch (m.kind) {
    case ManifoldKind::circle: return detail::angle_gap(p.first, q.first);
    case ManifoldKind::torus2:
      return std::hypot(detail::angle_gap(p.first, q.first),
                        detail::angle_gap(p.second, q.second));
    case ManifoldKind::sphere2: {
      const auto a = detail::sphere_cartesian(p);
      const auto b = detail::sphere_cartesian(q);
      const double cx = a[1] * b[2] - a[2] * b[1];
      const double cy = a[2] * b[0] - a[0] * b[2];
      const double cz = a[0] * b[1] - a[1] * b[0];
      const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
      return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
    }
  }
  return 0.0;
}

/// Volume of the open metric ball of radius r (valid for r up to the
/// injectivity radius, which covers every radius used by the lattice code).
inline double ball_volume(const ManifoldDescriptor& m, double r) {
  switch (m.kind) {
    case ManifoldKind::circle: return std::min(2.0 * r, kTwoPi);
    case ManifoldKind::torus2: return kPi * r * r;
    case ManifoldKind::sphere2: return kTwoPi * (1.0 - std::cos(std::min(r, kPi)));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Eigenbasis

/// Identifies one real eigenfunction.
///   circle: a = m, type 0 = cos, 1 = sin (m = 0 is the constant).
///   torus:  a = m1, b = m2, type = 2*t1 + t2 with t = 0 cos, 1 sin.
///   sphere: a = degree l, b = order m in [-l, l].
struct Mode {
  int a = 0;
  int b = 0;
  int type = 0;

  friend bool operator==(const Mode&, const Mode&) = default;
};

namespace detail {

inline double circle_factor(int m, int type, double theta) {
  if (m == 0) return 1.0 / std::sqrt(kTwoPi);
  const double norm = 1.0 / std::sqrt(kPi);
  return type == 0 ? norm * std::cos(m * theta) : norm * std::sin(m * theta);
}

inline int sphere_max_degree(double cutoff) {
  if (cutoff < 0.0) return -1;
  int l = static_cast<int>(std::floor(std::sqrt(cutoff + 0.25) - 0.5));
  while ((l + 1) * (l + 2) <= cutoff) ++l;
  while (l >= 0 && l * (l + 1) > cutoff) --l;
  return l;
}

inline int circle_max_mode(double cutoff) {
  if (cutoff < 0.0) return -1;
  int m = static_cast<int>(std::floor(std::sqrt(cutoff)));
  while ((m + 1) * (m + 1) <= cutoff) ++m;
  while (m >= 0 && m * m > cutoff) --m;
  return m;
}

}  // namespace detail

/// One orthonormal eigenpair of the Laplace-Beltrami operator.
struct EigenPair {
  std::size_t index = 0;
  double eigenvalue = 0.0;
  Mode mode;
  ManifoldKind kind = ManifoldKind::circle;

  /// Value of the eigenfunction at `p` (single-mode evaluation path).
  double operator()(const Point& p) const {
    switch (kind) {
      case ManifoldKind::circle: return detail::circle_factor(mode.a, mode.type, p.first);
      case ManifoldKind::torus2:
        return detail::circle_factor(mode.a, mode.type / 2, p.first) *
               detail::circle_factor(mode.b, mode.type % 2, p.second);
      case ManifoldKind::sphere2: {
        const int l = mode.a;
        const int m = std::abs(mode.b);
        detail::NormalizedLegendre table(l);
        std::vector<double> values;
        table.evaluate(p.first, values);
        const double plm = values[detail::NormalizedLegendre::at(l, m)];
        if (mode.b == 0) return plm;
        const double trig = mode.b > 0 ? std::cos(m * p.second) : std::sin(m * p.second);
        return std::numbers::sqrt2 * plm * trig;
      }
    }
    return 0.0;
  }
};

/// The ordered eigenbasis of E_cutoff. Batch evaluation shares the Legendre
/// recurrence on the sphere.
class Basis {
public:
  Basis(const ManifoldDescriptor& m, double cutoff) : manifold_(m), cutoff_(cutoff) {
    if (!(cutoff >= 0.0)) throw std::invalid_argument("eigen_basis: cutoff must be >= 0");
    switch (m.kind) {
      case ManifoldKind::circle: {
        max_mode_ = detail::circle_max_mode(cutoff);
        push(0.0, {0, 0, 0});
        for (int k = 1; k <= max_mode_; ++k) {
          push(k * k, {k, 0, 0});
          push(k * k, {k, 0, 1});
        }
        break;
      }
      case ManifoldKind::torus2: {
        max_mode_ = detail::circle_max_mode(cutoff);
        std::vector<std::tuple<int, int, int, int>> entries;  // (lambda, m1, m2, type)
        for (int m1 = 0; m1 <= max_mode_; ++m1) {
          for (int m2 = 0; m2 <= max_mode_; ++m2) {
            const int lambda = m1 * m1 + m2 * m2;
            if (lambda > cutoff) continue;
            for (int t1 = 0; t1 <= (m1 > 0 ? 1 : 0); ++t1) {
              for (int t2 = 0; t2 <= (m2 > 0 ? 1 : 0); ++t2) {
                entries.emplace_back(lambda, m1, m2, 2 * t1 + t2);
              }
            }
          }
        }
        std::sort(entries.begin(), entries.end());
        for (const auto& [lambda, m1, m2, type] : entries) push(lambda, {m1, m2, type});
        break;
      }
      case ManifoldKind::sphere2: {
        max_mode_ = detail::sphere_max_degree(cutoff);
        for (int l = 0; l <= max_mode_; ++l) {
          for (int mm = -l; mm <= l; ++mm) push(static_cast<double>(l) * (l + 1), {l, mm, 0});
        }
        if (max_mode_ >= 0) legendre_ = detail::NormalizedLegendre(max_mode_);
        break;
      }
    }
  }

  const ManifoldDescriptor& manifold() const noexcept { return manifold_; }
  double cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  const std::vector<EigenPair>& pairs() const noexcept { return pairs_; }
  const EigenPair& operator[](std::size_t j) const { return pairs_[j]; }

  /// Largest mode number: |m| (circle, per torus axis) or degree l (sphere).
  int max_mode() const noexcept { return max_mode_; }

  Eigen::VectorXd eigenvalues() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
    for (std::size_t j = 0; j < size(); ++j) out(static_cast<Eigen::Index>(j)) = pairs_[j].eigenvalue;
    return out;
  }

  /// All basis values at one point, written into `out` (length size()).
  void evaluate(const Point& p, Eigen::Ref<Eigen::VectorXd> out) const {
    switch (manifold_.kind) {
      case ManifoldKind::circle:
        for (std::size_t j = 0; j < size(); ++j) out(static_cast<Eigen::Index>(j)) = pairs_[j](p);
        break;
      case ManifoldKind::torus2: {
        const int mm = max_mode_;
        std::vector<double> f1(static_cast<std::size_t>(2 * mm + 1));
        std::vector<double> f2(f1.size());
        for (int k = 0; k <= mm; ++k) {
          f1[static_cast<std::size_t>(2 * k)] = detail::circle_factor(k, 0, p.first);
          f2[static_cast<std::size_t>(2 * k)] = detail::circle_factor(k, 0, p.second);
          if (k > 0) {
            f1[static_cast<std::size_t>(2 * k - 1)] = detail::circle_factor(k, 1, p.first);
            f2[static_cast<std::size_t>(2 * k - 1)] = detail::circle_factor(k, 1, p.second);
          }
        }
        auto slot = [](int m, int t) { return static_cast<std::size_t>(t == 0 ? 2 * m : 2 * m - 1); };
        for (std::size_t j = 0; j < size(); ++j) {
          const Mode& md = pairs_[j].mode;
          out(static_cast<Eigen::Index>(j)) =
              f1[slot(md.a, md.type / 2)] * f2[slot(md.b, md.type % 2)];
        }
        break;
      }
      case ManifoldKind::sphere2: {
        legendre_.evaluate(p.first, scratch_);
        for (int l = 0; l <= max_mode_; ++l) {
          const Eigen::Index base = static_cast<Eigen::Index>(l) * (l + 1);
          out(base) = scratch_[detail::NormalizedLegendre::at(l, 0)];
          for (int m = 1; m <= l; ++m) {
            const double plm = std::numbers::sqrt2 * scratch_[detail::NormalizedLegendre::at(l, m)];
            out(base + m) = plm * std::cos(m * p.second);
            out(base - m) = plm * std::sin(m * p.second);
          }
        }
        break;
      }
    }
  }

  Eigen::VectorXd evaluate(const Point& p) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
    evaluate(p, out);
    return out;
  }

  /// Matrix with entry (j, k) = u_j(points[k]).
  Eigen::MatrixXd evaluate(const std::vector<Point>& points) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(points.size()));
    for (std::size_t k = 0; k < points.size(); ++k) evaluate(points[k], out.col(static_cast<Eigen::Index>(k)));
    return out;
  }

private:
  void push(double lambda, Mode mode) {
    pairs_.push_back({pairs_.size(), lambda, mode, manifold_.kind});
  }

  ManifoldDescriptor manifold_;
  double cutoff_;
  int max_mode_ = 0;
  std::vector<EigenPair> pairs_;
  detail::NormalizedLegendre legendre_{0};
  mutable std::vector<double> scratch_;
};

/// Eigenpairs with eigenvalue <= cutoff in canonical order.
inline std::vector<EigenPair> eigen_basis(const ManifoldDescriptor& m, double cutoff) {
  return Basis(m, cutoff).pairs();
}

/// Number of eigenfunctions with eigenvalue <= cutoff.
inline std::size_t eigen_count(const ManifoldDescriptor& m, double cutoff) {
  return Basis(m, cutoff).size();
}

/// Smallest cutoff (an eigenvalue) whose space has at least `count` functions.
inline double cutoff_for_count(const ManifoldDescriptor& m, std::size_t count) {
  double lambda = 0.0;
  for (int q = 0;; ++q) {
    // Eigenvalues are integers on all three built-ins.
    lambda = q;
    if (eigen_count(m, lambda) >= count) return lambda;
  }
}

// ---------------------------------------------------------------------------
// Reference quadrature

struct QuadratureGrid {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

/// Product rule. Circle: `resolution` trapezoid nodes. Torus: resolution^2
/// trapezoid nodes. Sphere: `resolution` Gauss-Legendre colatitudes times
/// 2*resolution longitudes, exact for spherical polynomials of degree
/// <= 2*resolution - 1.
inline QuadratureGrid reference_grid(const ManifoldDescriptor& m, int resolution) {
  if (resolution < 2) throw std::invalid_argument("reference_grid: resolution must be >= 2");
  QuadratureGrid grid;
  const double h = kTwoPi / resolution;
  switch (m.kind) {
    case ManifoldKind::circle:
      for (int i = 0; i < resolution; ++i) {
        grid.nodes.push_back({i * h, 0.0});
        grid.weights.push_back(h);
      }
      break;
    case ManifoldKind::torus2:
      for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
          grid.nodes.push_back({i * h, j * h});
          grid.weights.push_back(h * h);
        }
      }
      break;
    case ManifoldKind::sphere2: {
      const auto gl = detail::gauss_legendre(resolution);
      const int nlon = 2 * resolution;
      const double hl = kTwoPi / nlon;
      for (int i = 0; i < resolution; ++i) {
        const double colat = std::acos(gl.nodes[static_cast<std::size_t>(i)]);
        for (int j = 0; j < nlon; ++j) {
          grid.nodes.push_back({colat, j * hl});
          grid.weights.push_back(gl.weights[static_cast<std::size_t>(i)] * hl);
        }
      }
      break;
    }
  }
  return grid;
}

using Evaluator = std::function<double(const Point&)>;

inline double reference_integral(const ManifoldDescriptor& m, const Evaluator& f, int resolution) {
  const auto grid = reference_grid(m, resolution);
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) sum += grid.weights[i] * f(grid.nodes[i]);
  return sum;
}

/// Smallest power-of-two resolution (from 8) whose integral agrees with the
/// doubled resolution to 1e-12, capped at 512 per axis.
inline int stable_resolution(const ManifoldDescriptor& m, const Evaluator& f, int cap = 512) {
  int r = 8;
  double current = reference_integral(m, f, r);
  while (r < cap) {
    const double doubled = reference_integral(m, f, 2 * r);
    if (std::abs(doubled - current) <= 1e-12 * std::max(1.0, std::abs(doubled))) return r;
    r *= 2;
    current = doubled;
  }
  return cap;
}

inline double adaptive_reference_integral(const ManifoldDescriptor& m, const Evaluator& f) {
  return reference_integral(m, f, stable_resolution(m, f));
}

/// Resolution at which the reference rule integrates exactly any product of
/// band-limited factors whose mode numbers add up to `total_mode`
/// (|m| on circle/torus axes, degree on the sphere).
inline int exact_resolution(const ManifoldDescriptor& m, int total_mode) {
  total_mode = std::max(total_mode, 0);
  switch (m.kind) {
    case ManifoldKind::circle:
    case ManifoldKind::torus2: return std::max(2, total_mode + 1);
    case ManifoldKind::sphere2: return std::max(2, total_mode / 2 + 1);
  }
  return 2;
}

}  // namespace mcub
