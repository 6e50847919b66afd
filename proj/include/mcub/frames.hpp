#pragma once

// Sampling on E_omega: the node-evaluation matrix, its frame bounds, the dual
// frame and exact reconstruction of band-limited functions from samples.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "mcub/errors.hpp"
#include "mcub/lattice.hpp"
#include "mcub/manifold.hpp"
#include "mcub/spectral.hpp"

namespace mcub {

/// Relative singular-value floor below which the sampling matrix is treated
/// as rank deficient.
inline constexpr double kRankFloor = 1e-12;

/// U(j, k) = u_j(x_k); shape |E_omega| x |lattice|.
struct SamplingMatrix {
  Lattice lattice;
  double omega = 0.0;
  Eigen::MatrixXd U;

  const ManifoldDescriptor& manifold() const noexcept { return lattice.manifold; }
  Eigen::Index rows() const noexcept { return U.rows(); }
  Eigen::Index cols() const noexcept { return U.cols(); }
};

struct FrameBounds {
  double A = 0.0;  // A * sum f(x_k)^2 <= ||f||^2
  double B = std::numeric_limits<double>::infinity();  // ||f||^2 <= B * sum f(x_k)^2
  double condition = std::numeric_limits<double>::infinity();  // B / A

  bool is_frame() const noexcept { return A > 0.0; }
};

inline SamplingMatrix sampling_matrix(const Lattice& lat, double omega) {
  return {lat, omega, Basis(lat.manifold, omega).evaluate(lat.points)};
}

inline SamplingMatrix sampling_matrix(const ManifoldDescriptor& m, const Lattice& lat, double omega) {
  if (!(m == lat.manifold)) throw std::invalid_argument("sampling_matrix: lattice lives on another manifold");
  return sampling_matrix(lat, omega);
}

/// Sampling-inequality constants from the extreme singular values of U:
/// A = 1 / sigma_max^2 and B = 1 / sigma_min^2. A is 0 when U lacks full row
/// rank (fewer nodes than dimensions, or sigma_min below the rank floor),
/// in which case B and the condition are infinite.
inline FrameBounds frame_bounds(const SamplingMatrix& S) {
  FrameBounds fb;
  if (S.rows() == 0 || S.cols() < S.rows()) return fb;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(S.U);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > kRankFloor * smax)) return fb;
  fb.A = 1.0 / (smax * smax);
  fb.B = 1.0 / (smin * smin);
  fb.condition = fb.B / fb.A;
  return fb;
}

/// Theta = (U U^T)^{-1} U: column k holds the coefficients of the dual
/// frame element Theta_k.
inline Eigen::MatrixXd dual_frame(const SamplingMatrix& S) {
  if (!frame_bounds(S).is_frame()) throw NotAFrame("sampling matrix is not of full row rank");
  const Eigen::MatrixXd gram = S.U * S.U.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw NotAFrame("Gram matrix is not positive definite");
  return llt.solve(S.U);
}

/// f = sum_k f(x_k) Theta_k, returned in coefficient form.
inline SpectralFunction reconstruct(const SamplingMatrix& S, const std::vector<double>& samples) {
  if (samples.size() != static_cast<std::size_t>(S.cols()))
    throw LengthMismatch("sample count does not match the lattice");
  const Eigen::Map<const Eigen::VectorXd> y(samples.data(), static_cast<Eigen::Index>(samples.size()));
  return {S.manifold(), S.omega, dual_frame(S) * y};
}

}  // namespace mcub
