#pragma once

// Products of band-limited functions on the built-in homogeneous manifolds
// and the exact discrete Fourier transform they enable.

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "mcub/cubature.hpp"
#include "mcub/errors.hpp"
#include "mcub/manifold.hpp"
#include "mcub/spectral.hpp"

namespace mcub {

/// Cutoff 4 d omega below which the product of two E_omega functions lies.
inline double product_bound(const ManifoldDescriptor& m, double omega) {
  return 4.0 * m.group_dim * omega;
}

/// Projection of the pointwise product f g onto E_{cutoff_out}, computed with a
/// reference rule that integrates every f g u_j exactly.
inline SpectralFunction product_coefficients(const SpectralFunction& f, const SpectralFunction& g,
                                             double cutoff_out) {
  if (!(f.manifold == g.manifold)) throw std::invalid_argument("product_coefficients: manifolds differ");
  const auto& m = f.manifold;
  const int total = f.basis().max_mode() + g.basis().max_mode() + Basis(m, cutoff_out).max_mode();
  const auto ef = evaluator(f);
  const auto eg = evaluator(g);
  return analyze(m, [&](const Point& p) { return ef(p) * eg(p); }, cutoff_out, exact_resolution(m, total));
}

struct ProductReport {
  double omega = 0.0;
  double bound = 0.0;            // 4 d omega
  double max_leakage = 0.0;      // max |coefficient| above bound, relative to ||f g||
  double empirical_cutoff = 0.0; // largest eigenvalue with relative coefficient > 1e-10
  double probe_cutoff = 0.0;

  bool holds(double tol = 1e-10) const { return max_leakage <= tol; }
};

inline ProductReport product_bandlimit_check(const SpectralFunction& f, const SpectralFunction& g,
                                             double probe_cutoff) {
  ProductReport rep;
  rep.omega = std::max(f.cutoff, g.cutoff);
  rep.bound = product_bound(f.manifold, rep.omega);
  rep.probe_cutoff = probe_cutoff;
  if (probe_cutoff < 1.5 * rep.bound)
    throw std::invalid_argument("product_bandlimit_check: probe cutoff must be >= 1.5 * 4 d omega");
  const auto fg = product_coefficients(f, g, probe_cutoff);
  const double norm = fg.norm();
  if (norm == 0.0) return rep;
  const Eigen::VectorXd lambda = fg.basis().eigenvalues();
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double rel = std::abs(fg.coefficients(j)) / norm;
    if (lambda(j) > rep.bound) rep.max_leakage = std::max(rep.max_leakage, rel);
    if (rel > 1e-10) rep.empirical_cutoff = std::max(rep.empirical_cutoff, lambda(j));
  }
  return rep;
}

/// c_j = sum_k f(x_k) u_j(x_k) w_k for eigenvalues <= omega. The rule must be
/// exact on E_{4 d omega} unless `enforce_exactness` is false.
inline SpectralFunction discrete_fourier_transform(const CubatureRule& rule, const std::vector<double>& samples,
                                                   double omega, bool enforce_exactness = true) {
  if (samples.size() != static_cast<std::size_t>(rule.weights.size()))
    throw LengthMismatch("sample count does not match the rule");
  const double needed = product_bound(rule.manifold(), omega);
  if (enforce_exactness && rule.omega < needed)
    throw InsufficientExactness("rule is exact on E_" + std::to_string(rule.omega) + " but E_" +
                                std::to_string(needed) + " is required");
  const Eigen::MatrixXd U = Basis(rule.manifold(), omega).evaluate(rule.lattice.points);
  const Eigen::Map<const Eigen::VectorXd> y(samples.data(), static_cast<Eigen::Index>(samples.size()));
  return {rule.manifold(), omega, U * rule.weights.cwiseProduct(y)};
}

struct DerivativeIdentity {
  double derivative_energy = 0.0;  // sum over index tuples of ||D_i1 ... D_is f||^2
  double spectral_energy = 0.0;    // sum_j lambda_j^s c_j^2
  double residual = 0.0;           // relative difference
};

namespace detail {

/// Applies d/d(theta_axis) to a circle/torus coefficient vector.
inline Eigen::VectorXd differentiate(const Basis& basis, const Eigen::VectorXd& c, int axis) {
  const auto kind = basis.manifold().kind;
  std::map<std::tuple<int, int, int>, Eigen::Index> lookup;
  for (const auto& p : basis.pairs())
    lookup[{p.mode.a, p.mode.b, p.mode.type}] = static_cast<Eigen::Index>(p.index);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(c.size());
  for (const auto& p : basis.pairs()) {
    const Eigen::Index j = static_cast<Eigen::Index>(p.index);
    if (c(j) == 0.0) continue;
    Mode target = p.mode;
    int freq = 0;
    int trig = 0;  // 0 cos, 1 sin on the differentiated axis
    if (kind == ManifoldKind::circle) {
      freq = p.mode.a;
      trig = p.mode.type;
      target.type = 1 - trig;
    } else if (axis == 0) {
      freq = p.mode.a;
      trig = p.mode.type / 2;
      target.type = 2 * (1 - trig) + p.mode.type % 2;
    } else {
      freq = p.mode.b;
      trig = p.mode.type % 2;
      target.type = 2 * (p.mode.type / 2) + (1 - trig);
    }
    if (freq == 0) continue;
    // (cos m t)' = -m sin m t, (sin m t)' = m cos m t; normalizations agree for m > 0.
    const double factor = trig == 0 ? -freq : freq;
    out(lookup.at({target.a, target.b, target.type})) += factor * c(j);
  }
  return out;
}

}  // namespace detail

/// Checks ||L^{s/2} f||^2 = sum over index tuples of ||D_i1 ... D_is f||^2 with
/// D_i = d/d(theta_i), s in {1, 2}, by spectral differentiation.
inline DerivativeIdentity derivative_identity_check(const SpectralFunction& f, int s) {
  if (f.manifold.kind == ManifoldKind::sphere2)
    throw UnsupportedManifold("invariant vector fields are implemented for circle and torus only");
  if (s != 1 && s != 2) throw std::invalid_argument("derivative_identity_check: s must be 1 or 2");
  const Basis basis = f.basis();
  const int axes = f.manifold.kind == ManifoldKind::circle ? 1 : 2;

  DerivativeIdentity out;
  for (int i = 0; i < axes; ++i) {
    const Eigen::VectorXd di = detail::differentiate(basis, f.coefficients, i);
    if (s == 1) {
      out.derivative_energy += di.squaredNorm();
      continue;
    }
    for (int j = 0; j < axes; ++j)
      out.derivative_energy += detail::differentiate(basis, di, j).squaredNorm();
  }
  out.spectral_energy = apply_laplacian_power(f, 0.5 * s).coefficients.squaredNorm();
  const double scale = std::max(out.spectral_energy, out.derivative_energy);
  out.residual = scale > 0.0 ? std::abs(out.derivative_energy - out.spectral_energy) / scale : 0.0;
  return out;
}

}  // namespace mcub
