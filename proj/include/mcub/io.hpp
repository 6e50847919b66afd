#pragma once

// JSON (nlohmann::json) encodings of the library types and the binary
// sidecar holding spline coefficient matrices.

#include <array>
#include <cmath>
#include <iterator>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mcub/cubature.hpp"
#include "mcub/errors.hpp"
#include "mcub/frames.hpp"
#include "mcub/homogeneous.hpp"
#include "mcub/lattice.hpp"
#include "mcub/manifold.hpp"
#include "mcub/spectral.hpp"
#include "mcub/splines.hpp"

namespace mcub::io {

using json = nlohmann::json;

namespace detail {

inline json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::VectorXd vector_from(const json& arr) {
  if (!arr.is_array()) throw FormatError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return v;
}

/// Non-finite numbers serialize as null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
}

}  // namespace detail

// --- manifold --------------------------------------------------------------

inline json to_json(const ManifoldDescriptor& m) {
  return {{"kind", std::string(to_string(m.kind))}, {"n", m.n}, {"volume", m.volume}, {"group_dim", m.group_dim}};
}

inline ManifoldDescriptor manifold_from_json(const json& j) {
  return detail::guarded([&] {
    const auto m = ManifoldDescriptor::make(parse_manifold_kind(j.at("kind").get<std::string>()));
    if (j.contains("n") && j.at("n").get<int>() != m.n) throw FormatError("manifold dimension mismatch");
    if (j.contains("group_dim") && j.at("group_dim").get<int>() != m.group_dim)
      throw FormatError("group dimension mismatch");
    if (j.contains("volume") && std::abs(j.at("volume").get<double>() - m.volume) > 1e-12 * m.volume)
      throw FormatError("volume mismatch");
    return m;
  });
}

// --- lattice ---------------------------------------------------------------

inline json point_json(const ManifoldDescriptor& m, const Point& p) {
  if (m.kind == ManifoldKind::circle) return json::array({p.first});
  return json::array({p.first, p.second});
}

inline json to_json(const Lattice& lat) {
  json pts = json::array();
  for (const auto& p : lat.points) pts.push_back(point_json(lat.manifold, p));
  return {{"manifold", to_json(lat.manifold)}, {"rho", lat.rho}, {"seed", lat.seed}, {"points", pts}};
}

inline Lattice lattice_from_json(const json& j) {
  return detail::guarded([&] {
    Lattice lat;
    lat.manifold = manifold_from_json(j.at("manifold"));
    lat.rho = j.at("rho").get<double>();
    lat.seed = j.at("seed").get<std::uint64_t>();
    if (!(lat.rho > 0.0)) throw FormatError("rho must be positive");
    const std::size_t dims = lat.manifold.kind == ManifoldKind::circle ? 1 : 2;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != dims) throw FormatError("point has wrong arity");
      Point q{p[0].get<double>(), dims == 2 ? p[1].get<double>() : 0.0};
      lat.points.push_back(normalize(lat.manifold, q));
    }
    return lat;
  });
}

inline json to_json(const VoronoiWeights& v) {
  json j = to_json(v.lattice);
  j["measures"] = detail::vector_json(v.measures);
  j["resolution"] = v.resolution;
  return j;
}

inline VoronoiWeights voronoi_from_json(const json& j) {
  return detail::guarded([&] {
    VoronoiWeights v{lattice_from_json(j), detail::vector_from(j.at("measures")), j.value("resolution", 0)};
    if (static_cast<std::size_t>(v.measures.size()) != v.lattice.size())
      throw FormatError("measure count does not match the lattice");
    return v;
  });
}

inline json to_json(const LatticeReport& r) {
  return {{"min_separation", detail::number(r.min_separation)},
          {"covering_radius", detail::number(r.covering_radius)},
          {"multiplicity", r.multiplicity},
          {"point_count", r.point_count},
          {"probe_spacing", r.probe_spacing}};
}

// --- spectral --------------------------------------------------------------

inline json to_json(const SpectralFunction& f) {
  return {{"manifold", to_json(f.manifold)}, {"cutoff", f.cutoff}, {"coefficients", detail::vector_json(f.coefficients)}};
}

inline SpectralFunction spectral_from_json(const json& j) {
  return detail::guarded([&] {
    return SpectralFunction(manifold_from_json(j.at("manifold")), j.at("cutoff").get<double>(),
                            detail::vector_from(j.at("coefficients")));
  });
}

// --- cubature --------------------------------------------------------------

inline json to_json(const CubatureRule& r) {
  return {{"lattice", to_json(r.lattice)},
          {"weights", detail::vector_json(r.weights)},
          {"omega", r.omega},
          {"positive", r.positive},
          {"construction", std::string(to_string(r.construction))}};
}

inline CubatureRule rule_from_json(const json& j) {
  return detail::guarded([&] {
    CubatureRule r;
    r.lattice = lattice_from_json(j.at("lattice"));
    r.weights = detail::vector_from(j.at("weights"));
    r.omega = j.at("omega").get<double>();
    r.positive = j.at("positive").get<bool>();
    r.construction = parse_construction(j.at("construction").get<std::string>());
    if (static_cast<std::size_t>(r.weights.size()) != r.lattice.size())
      throw FormatError("weight count does not match the lattice");
    if (r.positive && !(r.weights.array() > 0.0).all()) throw FormatError("rule flagged positive has a weight <= 0");
    return r;
  });
}

inline json to_json(const FrameBounds& fb) {
  return {{"A", detail::number(fb.A)}, {"B", detail::number(fb.B)}, {"condition", detail::number(fb.condition)}};
}

inline json to_json(const ProductReport& r) {
  return {{"omega", r.omega},
          {"bound", r.bound},
          {"max_leakage", r.max_leakage},
          {"empirical_cutoff", r.empirical_cutoff},
          {"probe_cutoff", r.probe_cutoff}};
}

// --- spline sidecar --------------------------------------------------------
//
// 16-byte header: magic "SPLM", version u32, rows u32, cols u32 (all
// little-endian), followed by rows*cols little-endian IEEE-754 doubles in
// row-major order.

inline constexpr std::uint32_t kSidecarVersion = 1;

namespace detail {

inline void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

inline void put_f64(std::vector<unsigned char>& buf, double x) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &x, sizeof bits);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

inline double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  double x = 0.0;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace detail

inline std::vector<unsigned char> encode_matrix(const Eigen::MatrixXd& M) {
  std::vector<unsigned char> buf{'S', 'P', 'L', 'M'};
  detail::put_u32(buf, kSidecarVersion);
  detail::put_u32(buf, static_cast<std::uint32_t>(M.rows()));
  detail::put_u32(buf, static_cast<std::uint32_t>(M.cols()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) detail::put_f64(buf, M(i, j));
  return buf;
}

inline Eigen::MatrixXd decode_matrix(const std::vector<unsigned char>& buf) {
  if (buf.size() < 16 || std::memcmp(buf.data(), "SPLM", 4) != 0) throw FormatError("bad sidecar magic");
  if (detail::get_u32(buf.data() + 4) != kSidecarVersion) throw FormatError("unsupported sidecar version");
  const std::uint32_t rows = detail::get_u32(buf.data() + 8);
  const std::uint32_t cols = detail::get_u32(buf.data() + 12);
  if (buf.size() != 16 + 8ull * rows * cols) throw FormatError("sidecar size does not match its header");
  Eigen::MatrixXd M(rows, cols);
  const unsigned char* p = buf.data() + 16;
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j, p += 8) M(i, j) = detail::get_f64(p);
  return M;
}

inline void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& buf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Model JSON; the coefficient matrix goes to `sidecar`, referenced by the
/// path relative to the JSON file's directory when possible.
inline json to_json(const SplineModel& model, const std::string& sidecar_ref) {
  return {{"manifold", to_json(model.manifold())},
          {"lattice", to_json(model.lattice)},
          {"k", model.k},
          {"truncation", model.truncation},
          {"rows", model.C.rows()},
          {"cols", model.C.cols()},
          {"matrix", sidecar_ref}};
}

inline void save_spline_model(const SplineModel& model, const std::filesystem::path& json_path) {
  auto sidecar = json_path;
  sidecar.replace_extension(".bin");
  write_bytes(sidecar, encode_matrix(model.C));
  std::ofstream out(json_path);
  if (!out) throw FormatError("cannot open " + json_path.string() + " for writing");
  out << to_json(model, sidecar.filename().string()).dump(2) << '\n';
}

inline SplineModel load_spline_model(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw FormatError("cannot open " + json_path.string());
  const json j = detail::guarded([&] { return json::parse(in); });
  return detail::guarded([&] {
    SplineModel model;
    model.lattice = lattice_from_json(j.at("lattice"));
    model.k = j.at("k").get<int>();
    model.truncation = j.at("truncation").get<double>();
    std::filesystem::path sidecar = j.at("matrix").get<std::string>();
    if (sidecar.is_relative()) sidecar = json_path.parent_path() / sidecar;
    model.C = decode_matrix(read_bytes(sidecar));
    if (static_cast<std::size_t>(model.C.rows()) != eigen_count(model.manifold(), model.truncation) ||
        static_cast<std::size_t>(model.C.cols()) != model.lattice.size())
      throw FormatError("spline matrix shape does not match lattice and truncation");
    return model;
  });
}

// --- files -----------------------------------------------------------------

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return detail::guarded([&] { return json::parse(in); });
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace mcub::io
