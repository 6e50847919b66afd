#include <gtest/gtest.h>

#include "mcub/lattice.hpp"

using namespace mcub;

TEST(BuildLattice, CircleEquispaced) {
  const auto lat = build_lattice(ManifoldDescriptor::circle(), kPi / 2, 0);
  ASSERT_EQ(lat.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(lat.points[k].first, k * kPi / 4, 1e-14);
}

TEST(BuildLattice, RhoTooLarge) {
  EXPECT_THROW(build_lattice(ManifoldDescriptor::circle(), 10.0, 0), RhoTooLarge);
  EXPECT_THROW(build_lattice(ManifoldDescriptor::sphere2(), 3.5, 0), RhoTooLarge);
}

TEST(BuildLattice, Deterministic) {
  const auto a = build_lattice(ManifoldDescriptor::sphere2(), 0.6, 1);
  const auto b = build_lattice(ManifoldDescriptor::sphere2(), 0.6, 1);
  const auto c = build_lattice(ManifoldDescriptor::sphere2(), 0.6, 2);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, c.points);
}

TEST(VerifyLattice, CircleReport) {
  const auto lat = build_lattice(ManifoldDescriptor::circle(), kPi / 2, 0);
  const auto rep = verify_lattice(lat);
  EXPECT_NEAR(rep.min_separation, kPi / 4, 1e-14);
  EXPECT_NEAR(rep.covering_radius, kPi / 8, 1e-14);
  EXPECT_EQ(rep.multiplicity, 4);
  EXPECT_EQ(rep.point_count, 8u);
}

TEST(VerifyLattice, SinglePointIsNotALattice) {
  Lattice lat{ManifoldDescriptor::circle(), kPi / 2, 0, {{0.0, 0.0}}};
  EXPECT_THROW(verify_lattice(lat), NotALattice);
}

TEST(VerifyLattice, CrowdedPointsAreNotALattice) {
  auto lat = build_lattice(ManifoldDescriptor::circle(), kPi / 2, 0);
  lat.points.push_back({0.1, 0.0});
  EXPECT_THROW(verify_lattice(lat), NotALattice);
}

TEST(VerifyLattice, ProbeDensityPrecondition) {
  const auto lat = build_lattice(ManifoldDescriptor::circle(), kPi / 2, 0);
  EXPECT_THROW(verify_lattice(lat, 16), std::invalid_argument);
}

TEST(VerifyLattice, SphereCertificate) {
  const auto lat = build_lattice(ManifoldDescriptor::sphere2(), 0.6, 1);
  const auto rep = verify_lattice(lat);
  EXPECT_LE(rep.covering_radius, 0.3);
  EXPECT_GE(rep.min_separation, 0.3 * (1 - 1e-12));
  EXPECT_GE(rep.multiplicity, 1);
  // An independent, finer probe grid stays within the probe-spacing margin.
  const auto fine = verify_lattice(lat, 400);
  EXPECT_LE(fine.covering_radius, 0.3 + fine.probe_spacing);
}

// |M_rho| sits between the packing and covering counts for every lattice.
TEST(Lattice, PackingCoveringSandwich) {
  for (auto kind : {ManifoldKind::circle, ManifoldKind::torus2, ManifoldKind::sphere2}) {
    const auto m = ManifoldDescriptor::make(kind);
    for (double rho : {0.3, 0.5, 0.8}) {
      for (std::uint64_t seed : {0u, 1u, 5u}) {
        const auto lat = build_lattice(m, rho, seed);
        const auto bounds = packing_bounds(m, rho);
        EXPECT_GE(static_cast<double>(lat.size()), bounds.lower) << to_string(kind) << " rho=" << rho;
        EXPECT_LE(static_cast<double>(lat.size()), bounds.upper) << to_string(kind) << " rho=" << rho;
        EXPECT_NO_THROW(verify_lattice(lat));
      }
    }
  }
}

TEST(Voronoi, CircleEquispacedMeasures) {
  const auto lat = build_lattice(ManifoldDescriptor::circle(), kPi / 2, 0);
  // 51 quadrature nodes per cell, none equidistant from two lattice nodes.
  const auto v = voronoi_measures(lat, 8 * 51);
  ASSERT_EQ(v.measures.size(), 8);
  for (Eigen::Index k = 0; k < 8; ++k) EXPECT_NEAR(v.measures(k), kPi / 4, 1e-12);
  EXPECT_NEAR(v.measures.sum(), kTwoPi, 1e-12);
}

TEST(Voronoi, SphereMeasuresPartitionVolume) {
  const auto lat = build_lattice(ManifoldDescriptor::sphere2(), 0.6, 1);
  const auto v = voronoi_measures(lat);
  EXPECT_NEAR(v.measures.sum(), 4 * kPi, 1e-9 * 4 * kPi);
  EXPECT_GT(v.measures.minCoeff(), 0.0);
  // Recorded envelope for this lattice: measures / rho^2 within [a1, a2].
  const double a1 = v.measures.minCoeff() / 0.36;
  const double a2 = v.measures.maxCoeff() / 0.36;
  EXPECT_GT(a1, 0.2);
  EXPECT_LT(a2, 1.0);
}

TEST(Voronoi, TorusMeasuresPositive) {
  const auto lat = build_lattice(ManifoldDescriptor::torus2(), 0.7, 3);
  const auto v = voronoi_measures(lat);
  EXPECT_NEAR(v.measures.sum(), 4 * kPi * kPi, 1e-9);
  EXPECT_GT(v.measures.minCoeff(), 0.0);
}

TEST(Weyl, CircleRatiosWithinFactorTwo) {
  const auto t = weyl_count_check(ManifoldDescriptor::circle(), {16, 64, 256}, 1.0, 1);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_LE(t.spread(), 2.0);
}

TEST(Weyl, SphereCountsGrowFourfold) {
  const auto t = weyl_count_check(ManifoldDescriptor::sphere2(), {9, 36, 144}, 1.0, 1);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double growth = static_cast<double>(t.rows[i].point_count) / t.rows[i - 1].point_count;
    EXPECT_NEAR(growth, 4.0, 0.5);
  }
  EXPECT_TRUE(t.bounded());
}

TEST(Weyl, TorusSingleRow) {
  const auto t = weyl_count_check(ManifoldDescriptor::torus2(), {4}, 1.0, 1);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_GT(t.rows[0].ratio, 0.0);
}

TEST(Weyl, PropagatesRhoTooLarge) {
  EXPECT_THROW(weyl_count_check(ManifoldDescriptor::circle(), {0.01}, 1.0, 1), RhoTooLarge);
}
