#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mcub::detail {

struct GaussLegendre {
  std::vector<double> nodes;    // ascending in [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendre rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th largest root.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    rule.weights[static_cast<std::size_t>(i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

/// Fully normalized associated Legendre functions without the Condon-Shortley
/// phase, scaled so that Pbar(l, m, cos phi) * {1, sqrt2 cos, sqrt2 sin}(m theta)
/// is orthonormal on the unit sphere. Table layout: index l*(l+1)/2 + m.
class NormalizedLegendre {
public:
  explicit NormalizedLegendre(int max_degree) : lmax_(max_degree) {
    const auto size = static_cast<std::size_t>((lmax_ + 1) * (lmax_ + 2) / 2);
    a_.assign(size, 0.0);
    b_.assign(size, 0.0);
    for (int m = 0; m <= lmax_; ++m) {
      for (int l = m + 2; l <= lmax_; ++l) {
        const double ll = l;
        const double mm = m;
        a_[at(l, m)] = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
        b_[at(l, m)] = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                 (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      }
    }
  }

  int max_degree() const noexcept { return lmax_; }

  static std::size_t at(int l, int m) noexcept {
    return static_cast<std::size_t>(l * (l + 1) / 2 + m);
  }

  /// Fills `out` (resized) with Pbar_l^m(cos phi) for 0 <= m <= l <= lmax.
  void evaluate(double colatitude, std::vector<double>& out) const {
    out.assign(a_.size(), 0.0);
    const double x = std::cos(colatitude);
    const double s = std::sin(colatitude);
    double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    for (int m = 0; m <= lmax_; ++m) {
      if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
      out[at(m, m)] = pmm;
      if (m + 1 <= lmax_) out[at(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
      for (int l = m + 2; l <= lmax_; ++l) {
        out[at(l, m)] =
            a_[at(l, m)] * (x * out[at(l - 1, m)] - b_[at(l, m)] * out[at(l - 2, m)]);
      }
    }
  }

private:
  int lmax_;
  std::vector<double> a_;
  std::vector<double> b_;
};

}  // namespace mcub::detail
