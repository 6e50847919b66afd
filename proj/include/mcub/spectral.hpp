#pragma once

// Band-limited functions as coefficient vectors over the canonical eigenbasis.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mcub/errors.hpp"
#include "mcub/manifold.hpp"

namespace mcub {

/// f = sum_j c_j u_j with all eigenvalues <= cutoff.
struct SpectralFunction {
  ManifoldDescriptor manifold;
  double cutoff = 0.0;
  Eigen::VectorXd coefficients;

  SpectralFunction() = default;
  SpectralFunction(const ManifoldDescriptor& m, double cut, Eigen::VectorXd c)
      : manifold(m), cutoff(cut), coefficients(std::move(c)) {
    if (static_cast<std::size_t>(coefficients.size()) != eigen_count(m, cut))
      throw LengthMismatch("coefficient count does not match the eigenbasis of the cutoff");
  }

  static SpectralFunction zero(const ManifoldDescriptor& m, double cut) {
    return {m, cut, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(eigen_count(m, cut)))};
  }

  Basis basis() const { return Basis(manifold, cutoff); }

  /// L2 norm (Plancherel).
  double norm() const { return coefficients.norm(); }
};

inline std::vector<double> synthesize(const SpectralFunction& f, const std::vector<Point>& pts) {
  const Basis basis = f.basis();
  Eigen::VectorXd values(static_cast<Eigen::Index>(basis.size()));
  std::vector<double> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    basis.evaluate(p, values);
    out.push_back(values.dot(f.coefficients));
  }
  return out;
}

inline double synthesize(const SpectralFunction& f, const Point& p) {
  return f.basis().evaluate(p).dot(f.coefficients);
}

/// Evaluator wrapping a spectral function (basis built once).
inline Evaluator evaluator(const SpectralFunction& f) {
  auto basis = std::make_shared<Basis>(f.basis());
  Eigen::VectorXd c = f.coefficients;
  return [basis, c](const Point& p) { return basis->evaluate(p).dot(c); };
}

/// c_j = reference integral of f * u_j for every eigenvalue <= cutoff.
inline SpectralFunction analyze(const ManifoldDescriptor& m, const Evaluator& f, double cutoff,
                                int resolution) {
  const Basis basis(m, cutoff);
  const auto grid = reference_grid(m, resolution);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd values(c.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    basis.evaluate(grid.nodes[i], values);
    c.noalias() += (grid.weights[i] * f(grid.nodes[i])) * values;
  }
  return {m, cutoff, std::move(c)};
}

/// Restriction (cutoff lowered) or zero extension (cutoff raised). The
/// canonical ordering makes every eigenbasis a prefix of any larger one.
inline SpectralFunction with_cutoff(const SpectralFunction& f, double cutoff) {
  SpectralFunction g = SpectralFunction::zero(f.manifold, cutoff);
  const Eigen::Index shared = std::min(g.coefficients.size(), f.coefficients.size());
  g.coefficients.head(shared) = f.coefficients.head(shared);
  return g;
}

/// Coefficients of L^s f, i.e. lambda_j^s c_j.
inline SpectralFunction apply_laplacian_power(const SpectralFunction& f, double s) {
  const Eigen::VectorXd lambda = f.basis().eigenvalues();
  Eigen::VectorXd c = f.coefficients;
  for (Eigen::Index j = 0; j < c.size(); ++j)
    c(j) *= std::pow(lambda(j), s);
  return {f.manifold, f.cutoff, std::move(c)};
}

struct BernsteinReport {
  double laplacian_norm = 0.0;  // ||L^s f||
  double bound = 0.0;           // omega^s ||f||
  double ratio = 0.0;           // laplacian_norm / bound
  bool holds = true;
};

/// ||L^s f|| <= omega^s ||f|| for f in E_omega.
inline BernsteinReport bernstein_check(const SpectralFunction& f, double omega, double s) {
  const Eigen::VectorXd lambda = f.basis().eigenvalues();
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    if (lambda(j) > omega && f.coefficients(j) != 0.0)
      throw CutoffExceeded("function has energy above omega");
  BernsteinReport rep;
  rep.laplacian_norm = apply_laplacian_power(f, s).norm();
  rep.bound = std::pow(omega, s) * f.norm();
  rep.ratio = rep.bound > 0.0 ? rep.laplacian_norm / rep.bound : 0.0;
  rep.holds = rep.laplacian_norm <= rep.bound * (1.0 + 1e-12);
  return rep;
}

/// ||f - f_omega||.
inline double projection_tail(const SpectralFunction& f, double omega) {
  const Eigen::VectorXd lambda = f.basis().eigenvalues();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    if (lambda(j) > omega) sum += f.coefficients(j) * f.coefficients(j);
  return std::sqrt(sum);
}

/// Orthogonal projection onto E_omega, kept at the original cutoff.
inline SpectralFunction project(const SpectralFunction& f, double omega) {
  SpectralFunction g = f;
  const Eigen::VectorXd lambda = f.basis().eigenvalues();
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    if (lambda(j) > omega) g.coefficients(j) = 0.0;
  return g;
}

/// ||Delta_tau^r f|| with the spectral difference multiplier
/// |e^{i tau lambda} - 1|^r = (2 |sin(tau lambda / 2)|)^r.
inline double difference_norm(const Eigen::VectorXd& lambda, const Eigen::VectorXd& c, int r, double tau) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const double mult = std::pow(2.0 * std::abs(std::sin(0.5 * tau * lambda(j))), r);
    sum += mult * mult * c(j) * c(j);
  }
  return std::sqrt(sum);
}

/// Omega_r(f, s): max of ||Delta_tau^r f|| over a uniform grid of [0, s]
/// (the multiplier is even in tau) plus the stationary points
/// tau * lambda = pi (mod 2 pi) of the dominant mode.
inline double modulus_of_continuity(const SpectralFunction& f, int r, double s, int tau_grid = 256) {
  if (r < 1) throw std::invalid_argument("modulus_of_continuity: r must be >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("modulus_of_continuity: s must be positive");
  if (tau_grid < 64) throw std::invalid_argument("modulus_of_continuity: tau_grid must be >= 64");
  const Eigen::VectorXd lambda = f.basis().eigenvalues();
  const Eigen::VectorXd& c = f.coefficients;

  double best = 0.0;
  for (int i = 0; i <= tau_grid; ++i)
    best = std::max(best, difference_norm(lambda, c, r, s * i / tau_grid));

  Eigen::Index dominant = -1;
  for (Eigen::Index j = 0; j < c.size(); ++j)
    if (lambda(j) > 0.0 && (dominant < 0 || std::abs(c(j)) > std::abs(c(dominant)))) dominant = j;
  if (dominant >= 0 && c(dominant) != 0.0) {
    const double lam = lambda(dominant);
    for (int q = 0; (2.0 * q + 1.0) * kPi / lam <= s; ++q)
      best = std::max(best, difference_norm(lambda, c, r, (2.0 * q + 1.0) * kPi / lam));
  }
  return best;
}

}  // namespace mcub
