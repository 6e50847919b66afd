#pragma once

// Cubature rules on lattice nodes: minimal-norm weights exact on E_omega,
// strictly positive exact weights built from Voronoi measures, and the error
// reports for non-band-limited integrands.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mcub/errors.hpp"
#include "mcub/frames.hpp"
#include "mcub/lattice.hpp"
#include "mcub/spectral.hpp"

namespace mcub {

enum class Construction { min_norm, positive_corrected, voronoi_plain, spline };

inline std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::min_norm: return "min_norm";
    case Construction::positive_corrected: return "positive_corrected";
    case Construction::voronoi_plain: return "voronoi_plain";
    case Construction::spline: return "spline";
  }
  return "unknown";
}

inline Construction parse_construction(std::string_view s) {
  if (s == "min_norm") return Construction::min_norm;
  if (s == "positive_corrected") return Construction::positive_corrected;
  if (s == "voronoi_plain") return Construction::voronoi_plain;
  if (s == "spline") return Construction::spline;
  throw FormatError("unknown construction '" + std::string(s) + "'");
}

struct CubatureRule {
  Lattice lattice;
  Eigen::VectorXd weights;
  double omega = 0.0;  // exactness order
  bool positive = false;
  Construction construction = Construction::min_norm;

  const ManifoldDescriptor& manifold() const noexcept { return lattice.manifold; }
};

/// Integrals of the eigenfunctions: (sqrt(Vol), 0, ..., 0).
inline Eigen::VectorXd eigen_moments(const ManifoldDescriptor& m, double omega) {
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(eigen_count(m, omega)));
  moments(0) = std::sqrt(m.volume);
  return moments;
}

/// Minimal l2-norm solution of U w = moments.
inline CubatureRule exact_weights(const SamplingMatrix& S) {
  if (!frame_bounds(S).is_frame()) throw NotAFrame("sampling matrix is not of full row rank");
  const Eigen::VectorXd moments = eigen_moments(S.manifold(), S.omega);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(S.U, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd w = svd.solve(moments);
  const bool positive = (w.array() > 0.0).all();
  return {S.lattice, std::move(w), S.omega, positive, Construction::min_norm};
}

/// nu_k = integral of Theta_k = sum_j moments_j Theta(j, k).
inline Eigen::VectorXd dual_frame_weights(const SamplingMatrix& S) {
  return dual_frame(S).transpose() * eigen_moments(S.manifold(), S.omega);
}

/// mu = v + (I - P) w, with v the minimal-norm exact weights, P the
/// orthogonal projector onto range(U^T) and w the Voronoi measures.
/// Throws PositivityFailed (carrying mu) if some mu_k <= 0.
inline CubatureRule positive_weights(const SamplingMatrix& S, const VoronoiWeights& V) {
  if (V.measures.size() != S.cols()) throw LengthMismatch("Voronoi measures do not match the lattice");
  const CubatureRule v = exact_weights(S);

  // Orthonormal basis of range(U^T); full row rank was established above.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(S.U.transpose());
  const Eigen::MatrixXd Q =
      qr.householderQ() * Eigen::MatrixXd::Identity(S.cols(), S.rows());
  const Eigen::VectorXd& w = V.measures;
  Eigen::VectorXd mu = v.weights + w - Q * (Q.transpose() * w);

  if (!(mu.array() > 0.0).all()) {
    // Build the message first: argument evaluation order is unspecified.
    std::string what = "corrected weights are not all positive (min " + std::to_string(mu.minCoeff()) + ")";
    throw PositivityFailed(std::move(what), std::move(mu));
  }
  return {S.lattice, std::move(mu), S.omega, true, Construction::positive_corrected};
}

/// Plain Voronoi-measure weights; exact only on constants.
inline CubatureRule voronoi_rule(const VoronoiWeights& V) {
  return {V.lattice, V.measures, 0.0, (V.measures.array() > 0.0).all(), Construction::voronoi_plain};
}

inline double integrate(const CubatureRule& rule, const std::vector<double>& samples) {
  if (samples.size() != static_cast<std::size_t>(rule.weights.size()))
    throw LengthMismatch("sample count does not match the rule");
  double sum = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) sum += rule.weights(static_cast<Eigen::Index>(k)) * samples[k];
  return sum;
}

/// Integral of a spectral function: sqrt(Vol) * c_0.
inline double exact_integral(const SpectralFunction& f) {
  return std::sqrt(f.manifold.volume) * f.coefficients(0);
}

/// max_j |sum_k w_k u_j(x_k) - integral u_j| over eigenvalues <= omega.
inline double exactness_residual(const CubatureRule& rule, double omega) {
  const Eigen::MatrixXd U = Basis(rule.manifold(), omega).evaluate(rule.lattice.points);
  return (U * rule.weights - eigen_moments(rule.manifold(), omega)).cwiseAbs().maxCoeff();
}

struct WeightEnvelope {
  double c1 = 0.0;  // min w_k / rho^n
  double c2 = 0.0;  // max w_k / rho^n
};

inline WeightEnvelope weight_envelope(const Eigen::VectorXd& weights, const Lattice& lat) {
  const double scale = std::pow(lat.rho, lat.manifold.n);
  return {weights.minCoeff() / scale, weights.maxCoeff() / scale};
}

struct CubatureErrorReport {
  double lhs = 0.0;          // |int f - sum f_omega(x_j) w_j|, samples of the projection
  double lhs_sampled = 0.0;  // |int f - sum f(x_j) w_j|, samples of f itself
  double rhs = 0.0;          // Omega_{m-k}(L^k f, 1/omega) / omega^k
  double ratio = 0.0;        // lhs / rhs
  double ratio_sampled = 0.0;
};

/// Error of a rule exact on E_omega applied to a function with a longer
/// spectrum. `k` and `m_order` (0 <= k < m_order) select the modulus bound.
inline CubatureErrorReport error_report(const CubatureRule& rule, const SpectralFunction& f, int k,
                                        int m_order, int tau_grid = 256) {
  if (k < 0 || m_order <= k) throw std::invalid_argument("error_report: need 0 <= k < m_order");
  const double integral = exact_integral(f);
  const auto projected = project(f, rule.omega);

  CubatureErrorReport rep;
  rep.lhs = std::abs(integral - integrate(rule, synthesize(projected, rule.lattice.points)));
  rep.lhs_sampled = std::abs(integral - integrate(rule, synthesize(f, rule.lattice.points)));
  if (rule.omega > 0.0) {
    const auto lk = apply_laplacian_power(f, k);
    rep.rhs = modulus_of_continuity(lk, m_order - k, 1.0 / rule.omega, tau_grid) / std::pow(rule.omega, k);
  } else {
    rep.rhs = std::numeric_limits<double>::quiet_NaN();
  }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  rep.ratio_sampled = rep.rhs > 0.0 ? rep.lhs_sampled / rep.rhs : 0.0;
  return rep;
}

struct VoronoiDiscrepancy {
  double lhs = 0.0;    // |sum mu(M_k) f(x_k) - int f|
  double shape = 0.0;  // rho^n (rho sqrt(1 + omega)) (sum f(x_k)^2)^(1/2)
  double ratio = 0.0;
};

/// Voronoi-weighted sampling error against its rho-scaling shape for
/// f in E_omega (omega = f.cutoff).
inline VoronoiDiscrepancy voronoi_discrepancy(const VoronoiWeights& V, const SpectralFunction& f) {
  const auto samples = synthesize(f, V.lattice.points);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    sum += V.measures(static_cast<Eigen::Index>(k)) * samples[k];
    sq += samples[k] * samples[k];
  }
  VoronoiDiscrepancy d;
  d.lhs = std::abs(sum - exact_integral(f));
  const double rho = V.lattice.rho;
  d.shape = std::pow(rho, f.manifold.n) * rho * std::sqrt(1.0 + f.cutoff) * std::sqrt(sq);
  d.ratio = d.shape > 0.0 ? d.lhs / d.shape : 0.0;
  return d;
}

}  // namespace mcub
