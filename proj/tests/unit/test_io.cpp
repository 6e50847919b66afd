#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mcub/io.hpp"

using namespace mcub;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "mcub_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Io, ManifoldRoundTrip) {
  for (auto kind : {ManifoldKind::circle, ManifoldKind::torus2, ManifoldKind::sphere2}) {
    const auto m = ManifoldDescriptor::make(kind);
    const auto j = io::to_json(m);
    EXPECT_EQ(j.at("kind"), std::string(to_string(kind)));
    EXPECT_EQ(io::manifold_from_json(j), m);
  }
  EXPECT_THROW(io::manifold_from_json({{"kind", "klein"}}), FormatError);
  EXPECT_THROW(io::manifold_from_json({{"kind", "circle"}, {"n", 2}}), FormatError);
  EXPECT_THROW(io::manifold_from_json({{"kind", "sphere2"}, {"volume", 1.0}}), FormatError);
  EXPECT_THROW(io::manifold_from_json(nlohmann::json::array()), FormatError);
}

TEST(Io, LatticeRoundTrip) {
  for (auto kind : {ManifoldKind::circle, ManifoldKind::torus2, ManifoldKind::sphere2}) {
    const auto lat = build_lattice(ManifoldDescriptor::make(kind), 0.7, 3);
    const auto back = io::lattice_from_json(nlohmann::json::parse(io::to_json(lat).dump()));
    EXPECT_EQ(back.points, lat.points);
    EXPECT_EQ(back.rho, lat.rho);
    EXPECT_EQ(back.seed, lat.seed);
    EXPECT_NO_THROW(verify_lattice(back));
  }
}

TEST(Io, LatticeMalformed) {
  auto j = io::to_json(build_lattice(ManifoldDescriptor::circle(), kPi / 2, 0));
  auto bad = j;
  bad["points"][0] = {0.0, 1.0};
  EXPECT_THROW(io::lattice_from_json(bad), FormatError);
  bad = j;
  bad["rho"] = -1.0;
  EXPECT_THROW(io::lattice_from_json(bad), FormatError);
  bad = j;
  bad.erase("points");
  EXPECT_THROW(io::lattice_from_json(bad), FormatError);
  bad = j;
  bad["rho"] = "wide";
  EXPECT_THROW(io::lattice_from_json(bad), FormatError);
}

TEST(Io, VoronoiRoundTrip) {
  const auto V = voronoi_measures(build_lattice(ManifoldDescriptor::torus2(), 1.0, 1));
  const auto back = io::voronoi_from_json(io::to_json(V));
  EXPECT_EQ(back.measures, V.measures);
  EXPECT_EQ(back.resolution, V.resolution);
  auto bad = io::to_json(V);
  bad["measures"].erase(0);
  EXPECT_THROW(io::voronoi_from_json(bad), FormatError);
}

TEST(Io, SpectralRoundTrip) {
  const SpectralFunction f(ManifoldDescriptor::circle(), 4.0, Eigen::VectorXd::LinSpaced(5, -1.0, 1.0));
  const auto back = io::spectral_from_json(io::to_json(f));
  EXPECT_EQ(back.coefficients, f.coefficients);
  auto bad = io::to_json(f);
  bad["coefficients"].push_back(2.0);
  EXPECT_THROW(io::spectral_from_json(bad), LengthMismatch);
}

TEST(Io, RuleRoundTrip) {
  const auto lat = build_lattice(ManifoldDescriptor::sphere2(), 0.6, 1);
  const auto rule = positive_weights(sampling_matrix(lat, 6.5), voronoi_measures(lat));
  const auto back = io::rule_from_json(nlohmann::json::parse(io::to_json(rule).dump()));
  EXPECT_EQ(back.weights, rule.weights);
  EXPECT_EQ(back.omega, rule.omega);
  EXPECT_TRUE(back.positive);
  EXPECT_EQ(back.construction, Construction::positive_corrected);
  EXPECT_LE(exactness_residual(back, back.omega), 1e-10);

  auto bad = io::to_json(rule);
  bad["weights"][0] = -1.0;
  EXPECT_THROW(io::rule_from_json(bad), FormatError);
  bad = io::to_json(rule);
  bad["construction"] = "gauss";
  EXPECT_THROW(io::rule_from_json(bad), FormatError);
}

TEST(Io, NonFiniteNumbersBecomeNull) {
  const auto j = io::to_json(FrameBounds{});
  EXPECT_EQ(j.at("A"), 0.0);
  EXPECT_TRUE(j.at("B").is_null());
  EXPECT_TRUE(j.at("condition").is_null());
}

TEST(Io, SidecarLayout) {
  Eigen::MatrixXd M(2, 3);
  M << 1, 2, 3, 4, 5, 6.5;
  const auto buf = io::encode_matrix(M);
  ASSERT_EQ(buf.size(), 16u + 6 * 8);
  EXPECT_EQ(std::string(buf.begin(), buf.begin() + 4), "SPLM");
  EXPECT_EQ(buf[4], 1);  // version, little-endian
  EXPECT_EQ(buf[8], 2);  // rows
  EXPECT_EQ(buf[12], 3);  // cols
  // Row-major: the second stored double is M(0, 1) = 2.0 = 0x4000000000000000.
  EXPECT_EQ(buf[16 + 8 + 7], 0x40);
  EXPECT_EQ(buf[16 + 8 + 6], 0x00);
  EXPECT_EQ(io::decode_matrix(buf), M);
}

TEST(Io, SidecarMalformed) {
  auto buf = io::encode_matrix(Eigen::MatrixXd::Ones(2, 2));
  auto bad = buf;
  bad[0] = 'X';
  EXPECT_THROW(io::decode_matrix(bad), FormatError);
  bad = buf;
  bad[4] = 9;
  EXPECT_THROW(io::decode_matrix(bad), FormatError);
  bad = buf;
  bad.pop_back();
  EXPECT_THROW(io::decode_matrix(bad), FormatError);
  EXPECT_THROW(io::decode_matrix({'S', 'P'}), FormatError);
}

TEST(Io, SplineModelRoundTrip) {
  SplineOptions opts;
  opts.truncation = 256.0;
  const auto model = lagrangian_basis(build_lattice(ManifoldDescriptor::circle(), kPi / 2, 0), 2, opts);
  const auto path = scratch_dir() / "model.json";
  io::save_spline_model(model, path);
  EXPECT_TRUE(fs::exists(scratch_dir() / "model.bin"));
  EXPECT_EQ(io::read_json(path).at("matrix"), "model.bin");
  const auto back = io::load_spline_model(path);
  EXPECT_EQ(back.C, model.C);
  EXPECT_EQ(back.k, 2);
  EXPECT_EQ(back.truncation, 256.0);
  EXPECT_EQ(back.lattice.points, model.lattice.points);

  // A sidecar whose shape disagrees with the truncation is rejected.
  io::write_bytes(scratch_dir() / "model.bin", io::encode_matrix(Eigen::MatrixXd::Ones(3, 8)));
  EXPECT_THROW(io::load_spline_model(path), FormatError);
}

TEST(Io, FilesMalformed) {
  const auto path = scratch_dir() / "broken.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(io::read_json(path), FormatError);
  EXPECT_THROW(io::read_json(scratch_dir() / "missing.json"), FormatError);
}
