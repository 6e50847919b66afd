#pragma once

// Variational splines on lattice nodes: the Lagrangian (cardinal) splines
// minimizing ||L^k s|| under interpolation constraints, spline interpolation,
// and the cubature rule obtained by integrating the Lagrangian splines.
//
// Functions in H^{2k} are represented by their coefficients on E_{truncation}.
// With y_j = lambda_j^k c_j (j >= 1) the penalty is |y|^2 and the
// interpolation constraint reads a0 c_0 + K y = e, where a0 = u_0(x) is
// constant and K(mu, j) = u_j(x_mu) / lambda_j^k. The constant coefficient c_0
// is unpenalized, so the minimization is a min-norm problem with one free
// direction. Solves run in long double.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mcub/cubature.hpp"
#include "mcub/errors.hpp"
#include "mcub/lattice.hpp"
#include "mcub/manifold.hpp"
#include "mcub/spectral.hpp"

namespace mcub {

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

enum class SplineSolver {
  null_space,    // Householder elimination of the constant direction + min-norm COD
  saddle_point,  // kernel KKT system [[K K^T, a0], [a0^T, 0]]
};

struct SplineOptions {
  double truncation = 0.0;  // 0 selects default_truncation()
  int k_min = 0;            // 0 selects n + 1
  SplineSolver solver = SplineSolver::null_space;
};

struct SplineModel {
  Lattice lattice;
  int k = 1;
  double truncation = 0.0;
  Eigen::MatrixXd C;  // column g = coefficients of the Lagrangian spline at node g

  const ManifoldDescriptor& manifold() const noexcept { return lattice.manifold; }
  SpectralFunction lagrangian(std::size_t g) const {
    return {lattice.manifold, truncation, C.col(static_cast<Eigen::Index>(g))};
  }
};

/// Smallest eigenvalue cutoff with at least 3 |lattice| functions whose top
/// eigenvalue exceeds 100 / rho^2.
inline double default_truncation(const Lattice& lat) {
  const double by_count = cutoff_for_count(lat.manifold, 3 * lat.size());
  return std::max(by_count, std::ceil(100.0 / (lat.rho * lat.rho)));
}

namespace detail {

struct SplineSystem {
  VectorXld scale;  // lambda_j^{-k}, j >= 1
  VectorXld a0;     // u_0 at the nodes
  MatrixXld K;      // N x (J - 1)
};

inline SplineSystem spline_system(const Lattice& lat, int k, double truncation) {
  const Basis basis(lat.manifold, truncation);
  const Eigen::MatrixXd A = basis.evaluate(lat.points);  // J x N
  const Eigen::Index J = A.rows();
  const Eigen::Index N = A.cols();
  SplineSystem sys;
  sys.scale.resize(J - 1);
  for (Eigen::Index j = 1; j < J; ++j)
    sys.scale(j - 1) = std::pow(static_cast<long double>(basis[static_cast<std::size_t>(j)].eigenvalue),
                                -static_cast<long double>(k));
  sys.a0 = A.row(0).transpose().cast<long double>();
  sys.K.resize(N, J - 1);
  for (Eigen::Index mu = 0; mu < N; ++mu)
    for (Eigen::Index j = 1; j < J; ++j)
      sys.K(mu, j - 1) = static_cast<long double>(A(j, mu)) * sys.scale(j - 1);
  return sys;
}

/// Returns (c0 row, Y) with Y = scaled coefficients, one column per node.
inline std::pair<VectorXld, MatrixXld> solve_null_space(const SplineSystem& sys) {
  const Eigen::Index N = sys.K.rows();
  // Householder reflection H with H a0 = alpha e_1.
  VectorXld v = sys.a0;
  const long double alpha = (v(0) >= 0 ? -1.0L : 1.0L) * v.norm();
  v(0) -= alpha;
  const long double vv = v.squaredNorm();
  auto reflect = [&](const MatrixXld& X) -> MatrixXld {
    if (vv == 0.0L) return X;
    return X - (2.0L / vv) * v * (v.transpose() * X);
  };
  const MatrixXld HK = reflect(sys.K);
  const MatrixXld HE = reflect(MatrixXld::Identity(N, N));

  MatrixXld Y;
  if (N > 1) {
    const MatrixXld Kt = HK.bottomRows(N - 1);
    Eigen::CompleteOrthogonalDecomposition<MatrixXld> cod(Kt);
    if (cod.rank() < N - 1) throw TruncationTooSmall("interpolation constraints are rank deficient");
    Y = cod.solve(HE.bottomRows(N - 1));
  } else {
    Y = MatrixXld::Zero(sys.K.cols(), 1);
  }
  VectorXld c0 = ((HE.row(0) - HK.row(0) * Y) / alpha).transpose();
  return {c0, Y};
}

inline std::pair<VectorXld, MatrixXld> solve_saddle_point(const SplineSystem& sys) {
  const Eigen::Index N = sys.K.rows();
  MatrixXld kkt = MatrixXld::Zero(N + 1, N + 1);
  kkt.topLeftCorner(N, N) = sys.K * sys.K.transpose();
  kkt.topRightCorner(N, 1) = sys.a0;
  kkt.bottomLeftCorner(1, N) = sys.a0.transpose();
  MatrixXld rhs = MatrixXld::Zero(N + 1, N);
  rhs.topRows(N) = MatrixXld::Identity(N, N);
  const Eigen::FullPivLU<MatrixXld> lu(kkt);
  if (lu.rank() < N + 1) throw TruncationTooSmall("saddle-point system is singular");
  const MatrixXld sol = lu.solve(rhs);
  const MatrixXld eta = sol.topRows(N);
  return {sol.row(N).transpose(), sys.K.transpose() * eta};
}

}  // namespace detail

/// Lagrangian splines L_g of order k on the lattice nodes.
inline SplineModel lagrangian_basis(const Lattice& lat, int k, const SplineOptions& opts = {}) {
  const int k_min = opts.k_min > 0 ? opts.k_min : lat.manifold.n + 1;
  if (k < std::max(1, k_min))
    throw std::invalid_argument("lagrangian_basis: smoothness order k below k_min");
  if (lat.points.empty()) throw NotALattice("empty lattice");
  const double truncation = opts.truncation > 0.0 ? opts.truncation : default_truncation(lat);
  if (eigen_count(lat.manifold, truncation) < 3 * lat.size())
    throw TruncationTooSmall("truncation space needs at least 3 functions per node");

  const auto sys = detail::spline_system(lat, k, truncation);
  const auto [c0, Y] = opts.solver == SplineSolver::null_space ? detail::solve_null_space(sys)
                                                              : detail::solve_saddle_point(sys);
  SplineModel model{lat, k, truncation, Eigen::MatrixXd(Y.rows() + 1, Y.cols())};
  model.C.row(0) = c0.transpose().cast<double>();
  model.C.bottomRows(Y.rows()) = (sys.scale.asDiagonal() * Y).cast<double>();
  return model;
}

inline SpectralFunction spline_interpolate(const SplineModel& model, const std::vector<double>& samples) {
  if (samples.size() != static_cast<std::size_t>(model.C.cols()))
    throw LengthMismatch("sample count does not match the lattice");
  const Eigen::Map<const Eigen::VectorXd> z(samples.data(), static_cast<Eigen::Index>(samples.size()));
  return {model.manifold(), model.truncation, model.C * z};
}

/// Weights lambda_g = integral of L_g = sqrt(Vol) * C(0, g).
inline CubatureRule spline_weights(const SplineModel& model) {
  Eigen::VectorXd w = std::sqrt(model.manifold().volume) * model.C.row(0).transpose();
  const bool positive = (w.array() > 0.0).all();
  return {model.lattice, std::move(w), 0.0, positive, Construction::spline};
}

/// sum_j lambda_j^{2k} c_j^2 = ||L^k f||^2.
inline double spline_penalty(const SpectralFunction& f, int k) {
  return apply_laplacian_power(f, k).coefficients.squaredNorm();
}

/// Scaled coefficients y = lambda^k c (j >= 1), one column per node.
inline MatrixXld scaled_coefficients(const SplineModel& model) {
  const Eigen::VectorXd lambda = Basis(model.manifold(), model.truncation).eigenvalues();
  MatrixXld Y(model.C.rows() - 1, model.C.cols());
  for (Eigen::Index j = 1; j < model.C.rows(); ++j)
    for (Eigen::Index g = 0; g < model.C.cols(); ++g)
      Y(j - 1, g) = std::pow(static_cast<long double>(lambda(j)), static_cast<long double>(model.k)) *
                    static_cast<long double>(model.C(j, g));
  return Y;
}

/// Largest relative residual, over nodes, of L^{2k} L_g lying in the span of
/// the node-evaluation functionals (KKT stationarity), measured in the
/// lambda^k-scaled coordinates.
inline double polyharmonic_residual(const SplineModel& model) {
  const auto sys = detail::spline_system(model.lattice, model.k, model.truncation);
  const MatrixXld Y = scaled_coefficients(model);
  const Eigen::Index J1 = sys.K.cols();
  const Eigen::Index N = sys.K.rows();
  MatrixXld M(J1 + 1, N);
  M.topRows(J1) = sys.K.transpose();
  M.bottomRows(1) = sys.a0.transpose();
  MatrixXld T = MatrixXld::Zero(J1 + 1, N);
  T.topRows(J1) = Y;
  const Eigen::CompleteOrthogonalDecomposition<MatrixXld> cod(M);
  const MatrixXld eta = cod.solve(T);
  long double worst = 0.0L;
  for (Eigen::Index g = 0; g < N; ++g) {
    const long double scale = std::max(T.col(g).norm(), std::numeric_limits<long double>::min());
    worst = std::max(worst, (M * eta.col(g) - T.col(g)).norm() / scale);
  }
  return static_cast<double>(worst);
}

/// Condition number of the Gram matrix of {L_g} in the inner product
/// sum_mu f(x_mu) g(x_mu) + <L^k f, L^k g>.
inline double riesz_condition(const SplineModel& model) {
  const MatrixXld Y = scaled_coefficients(model);
  const Eigen::MatrixXd gram =
      Eigen::MatrixXd::Identity(model.C.cols(), model.C.cols()) + (Y.transpose() * Y).cast<double>();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
}

struct SplineDecayRow {
  int k = 0;
  double error = 0.0;           // |int f - sum lambda_g^(k) f(x_g)|
  double ratio_to_prev = 0.0;   // error(k) / error(k - 1), 0 for the first row
  double sobolev_bound = 0.0;   // Vol rho^k ||L^{k/2} f||
  double fitted_c0 = 0.0;       // (error / sobolev_bound)^(1/k)
};

struct SplineDecayTable {
  double rho = 0.0;
  double omega = 0.0;
  double rho_sqrt_omega = 0.0;
  bool contraction_expected = false;  // rho sqrt(omega) <= contraction_threshold
  std::vector<SplineDecayRow> rows;

  bool monotone() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(rows[i].error < rows[i - 1].error)) return false;
    return true;
  }
};

/// Spline cubature error for f in E_omega (omega = f.cutoff) per order k.
inline SplineDecayTable spline_error_decay(const Lattice& lat, const SpectralFunction& f,
                                           const std::vector<int>& k_range, const SplineOptions& opts = {},
                                           double contraction_threshold = 0.5) {
  SplineDecayTable table;
  table.rho = lat.rho;
  table.omega = f.cutoff;
  table.rho_sqrt_omega = lat.rho * std::sqrt(f.cutoff);
  table.contraction_expected = table.rho_sqrt_omega <= contraction_threshold;
  const double integral = exact_integral(f);
  const auto samples = synthesize(f, lat.points);
  for (int k : k_range) {
    const auto model = lagrangian_basis(lat, k, opts);
    SplineDecayRow row;
    row.k = k;
    row.error = std::abs(integral - integrate(spline_weights(model), samples));
    if (!table.rows.empty() && table.rows.back().error > 0.0)
      row.ratio_to_prev = row.error / table.rows.back().error;
    row.sobolev_bound = f.manifold.volume * std::pow(lat.rho, k) * apply_laplacian_power(f, 0.5 * k).norm();
    row.fitted_c0 = row.sobolev_bound > 0.0 ? std::pow(row.error / row.sobolev_bound, 1.0 / k) : 0.0;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace mcub
