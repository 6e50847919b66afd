#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mcub/frames.hpp"
#include "test_support.hpp"

using namespace mcub;

namespace {

Lattice circle8() { return build_lattice(ManifoldDescriptor::circle(), kPi / 2, 0); }

}  // namespace

TEST(SamplingMatrix, CircleGramIsScaledIdentity) {
  const auto S = sampling_matrix(circle8(), 4.0);
  ASSERT_EQ(S.rows(), 5);
  ASSERT_EQ(S.cols(), 8);
  const Eigen::MatrixXd gram = S.U * S.U.transpose();
  EXPECT_LE((gram - (4.0 / kPi) * Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SamplingMatrix, OmegaZeroIsConstantRow) {
  const auto S = sampling_matrix(circle8(), 0.0);
  ASSERT_EQ(S.rows(), 1);
  for (Eigen::Index k = 0; k < S.cols(); ++k) EXPECT_DOUBLE_EQ(S.U(0, k), 1.0 / std::sqrt(kTwoPi));
}

TEST(SamplingMatrix, SphereConstantRow) {
  const auto lat = build_lattice(ManifoldDescriptor::sphere2(), 0.6, 1);
  const auto S = sampling_matrix(lat, 6.5);
  ASSERT_EQ(S.rows(), 9);
  ASSERT_EQ(S.cols(), static_cast<Eigen::Index>(lat.size()));
  for (Eigen::Index k = 0; k < S.cols(); ++k) EXPECT_NEAR(S.U(0, k), 1.0 / std::sqrt(4 * kPi), 1e-15);
}

TEST(SamplingMatrix, RejectsForeignLattice) {
  EXPECT_THROW(sampling_matrix(ManifoldDescriptor::torus2(), circle8(), 4.0), std::invalid_argument);
}

TEST(FrameBounds, CircleTightFrame) {
  const auto fb = frame_bounds(sampling_matrix(circle8(), 4.0));
  EXPECT_NEAR(fb.A, kPi / 4, 1e-14);
  EXPECT_NEAR(fb.B, kPi / 4, 1e-14);
  EXPECT_LE(fb.condition - 1.0, 1e-10);
}

TEST(FrameBounds, TooFewSamplesIsNotAFrame) {
  Lattice lat{ManifoldDescriptor::circle(), 1.0, 0, {{0.0, 0.0}, {2.0, 0.0}, {4.0, 0.0}}};
  const auto S = sampling_matrix(lat, 4.0);
  const auto fb = frame_bounds(S);
  EXPECT_EQ(fb.A, 0.0);
  EXPECT_FALSE(fb.is_frame());
  EXPECT_THROW(dual_frame(S), NotAFrame);
  EXPECT_THROW(reconstruct(S, {1.0, 2.0, 3.0}), NotAFrame);
}

TEST(FrameBounds, SphereConditionStableAcrossSeeds) {
  // rho sqrt(omega) = 0.6 * sqrt(6.5) ~ 1.53
  std::vector<double> conds;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto fb = frame_bounds(sampling_matrix(build_lattice(ManifoldDescriptor::sphere2(), 0.6, seed), 6.5));
    ASSERT_TRUE(fb.is_frame());
    EXPECT_LE(fb.A, fb.B);
    conds.push_back(fb.condition);
  }
  const auto [lo, hi] = std::minmax_element(conds.begin(), conds.end());
  EXPECT_LT(*hi / *lo, 2.0);
}

TEST(DualFrame, TightFrameDualIsScaledOriginal) {
  const auto S = sampling_matrix(circle8(), 4.0);
  EXPECT_LE((dual_frame(S) - (kPi / 4) * S.U).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DualFrame, LeftInverseOnCoefficientSpace) {
  for (auto kind : {ManifoldKind::circle, ManifoldKind::torus2, ManifoldKind::sphere2}) {
    const auto m = ManifoldDescriptor::make(kind);
    const auto S = sampling_matrix(build_lattice(m, 0.5, 3), kind == ManifoldKind::circle ? 16.0 : 6.5);
    const Eigen::MatrixXd I = S.U * dual_frame(S).transpose();
    EXPECT_LE((I - Eigen::MatrixXd::Identity(S.rows(), S.rows())).cwiseAbs().maxCoeff(), 1e-10) << to_string(kind);
  }
}

TEST(Reconstruct, CosineFromEightSamples) {
  const auto lat = circle8();
  const auto S = sampling_matrix(lat, 4.0);
  std::vector<double> samples;
  for (const auto& p : lat.points) samples.push_back(std::cos(p.first));
  const auto f = reconstruct(S, samples);
  EXPECT_NEAR(f.coefficients(1), std::sqrt(kPi), 1e-12);
  for (Eigen::Index j : {0, 2, 3, 4}) EXPECT_LE(std::abs(f.coefficients(j)), 1e-12);
}

TEST(Reconstruct, ZeroAndConstantSamples) {
  const auto S = sampling_matrix(circle8(), 4.0);
  EXPECT_EQ(reconstruct(S, std::vector<double>(8, 0.0)).norm(), 0.0);
  const auto u0 = reconstruct(S, std::vector<double>(8, 1.0 / std::sqrt(kTwoPi)));
  EXPECT_NEAR(u0.coefficients(0), 1.0, 1e-14);
  EXPECT_LE(u0.coefficients.tail(4).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(reconstruct(S, {1.0}), LengthMismatch);
}

TEST(Reconstruct, SphereRoundTrip) {
  std::mt19937_64 gen(11);
  const auto lat = build_lattice(ManifoldDescriptor::sphere2(), 0.6, 1);
  const auto S = sampling_matrix(lat, 6.5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = oracle::random_function(lat.manifold, 6.5, gen);
    const auto samples = synthesize(f, lat.points);
    const auto g = reconstruct(S, samples);
    EXPECT_LE((g.coefficients - f.coefficients).cwiseAbs().maxCoeff(), 1e-9);
    // Resampling the reconstruction returns the data.
    const auto again = synthesize(g, lat.points);
    for (std::size_t k = 0; k < samples.size(); ++k) EXPECT_NEAR(again[k], samples[k], 1e-10);
  }
}

TEST(FrameBounds, TwoSidedInequalityAndTightness) {
  std::mt19937_64 gen(12);
  const auto lat = build_lattice(ManifoldDescriptor::torus2(), 0.5, 2);
  const auto S = sampling_matrix(lat, 10.0);
  const auto fb = frame_bounds(S);
  ASSERT_TRUE(fb.is_frame());
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::VectorXd c = oracle::random_vector(S.rows(), gen);
    const double energy = (S.U.transpose() * c).squaredNorm();
    EXPECT_LE(fb.A * energy, c.squaredNorm() * (1 + 1e-12));
    EXPECT_LE(c.squaredNorm(), fb.B * energy * (1 + 1e-12));
  }
  // Extreme singular vectors attain both bounds.
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(S.U, Eigen::ComputeFullU);
  const Eigen::VectorXd top = svd.matrixU().col(0);
  const Eigen::VectorXd bottom = svd.matrixU().col(S.rows() - 1);
  EXPECT_NEAR(fb.A * (S.U.transpose() * top).squaredNorm(), 1.0, 1e-10);
  EXPECT_NEAR(fb.B * (S.U.transpose() * bottom).squaredNorm(), 1.0, 1e-10);
}

// rho^{-n/2} ||f|| / ||samples|| at fixed c0 = rho sqrt(omega): the interval
// [sqrt(A), sqrt(B)] rho^{-n/2} does not drift with seed or with rho.
TEST(FrameBounds, ScaledRatioStableAtFixedC0) {
  const auto m = ManifoldDescriptor::sphere2();
  const double c0 = 1.5;
  double lo = 1e300, hi = 0;
  for (double rho : {0.6, 0.4}) {
    for (std::uint64_t seed : {1, 2}) {
      const auto fb = frame_bounds(sampling_matrix(build_lattice(m, rho, seed), c0 * c0 / (rho * rho)));
      ASSERT_TRUE(fb.is_frame());
      lo = std::min(lo, std::sqrt(fb.A) / rho);
      hi = std::max(hi, std::sqrt(fb.B) / rho);
    }
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi / lo, 4.0);
}
