#pragma once

// Command-line front end. `run` takes the arguments without the program name
// and returns the process exit code: 0 success, 1 failed verification or a
// numerical failure, 2 usage or input-format error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcub/io.hpp"
#include "mcub/mcub.hpp"

namespace mcub::cli {

using json = nlohmann::json;

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out << text;
}

inline void emit_json(const std::string& path, const json& j) { emit(path, j.dump(2) + "\n"); }

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// rho from (omega, c0) under either scaling: c0 / sqrt(omega) or c0 / omega.
inline double scaled_rho(double omega, double c0, const std::string& scaling) {
  if (!(omega > 0.0) || !(c0 > 0.0)) throw UsageError("--omega and --c0 must be positive");
  return scaling == "linear" ? c0 / omega : c0 / std::sqrt(omega);
}

struct Check {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double tolerance = 0.0;
};

inline json check_json(const Check& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"value", io::detail::number(c.value)}, {"tolerance", c.tolerance}};
}

// --- subcommands -----------------------------------------------------------

struct LatticeArgs {
  std::string manifold;
  std::optional<double> rho;
  std::optional<double> omega;
  double c0 = 1.0;
  std::string scaling = "sqrt";
  std::uint64_t seed = 0;
  bool voronoi = false;
  int resolution = 0;
  std::string out;
};

inline int cmd_lattice(const LatticeArgs& a) {
  const auto m = ManifoldDescriptor::make(parse_manifold_kind(a.manifold));
  if (!a.rho && !a.omega) throw UsageError("one of --rho or --omega is required");
  const double rho = a.rho ? *a.rho : scaled_rho(*a.omega, a.c0, a.scaling);
  const auto lat = build_lattice(m, rho, a.seed);
  emit_json(a.out, a.voronoi ? io::to_json(voronoi_measures(lat, a.resolution)) : io::to_json(lat));
  return 0;
}

struct WeightsArgs {
  std::string lattice;
  std::optional<double> omega;
  bool exact = false;
  bool positive = false;
  std::optional<int> spline;
  int resolution = 0;
  double truncation = 0.0;
  int k_min = 0;
  std::string out;
};

inline int cmd_weights(const WeightsArgs& a) {
  const auto lat = io::lattice_from_json(io::read_json(a.lattice));
  if (a.exact + a.positive + a.spline.has_value() != 1)
    throw UsageError("exactly one of --exact, --positive, --spline is required");
  if (a.spline) {
    SplineOptions opts;
    opts.truncation = a.truncation;
    opts.k_min = a.k_min;
    emit_json(a.out, io::to_json(spline_weights(lagrangian_basis(lat, *a.spline, opts))));
    return 0;
  }
  if (!a.omega) throw UsageError("--omega is required for --exact and --positive");
  const auto S = sampling_matrix(lat, *a.omega);
  const auto rule = a.exact ? exact_weights(S) : positive_weights(S, voronoi_measures(lat, a.resolution));
  emit_json(a.out, io::to_json(rule));
  return 0;
}

struct VerifyArgs {
  std::string rule;
  std::string function;
  std::string report;
  double tol = 1e-10;
  int probe_density = 0;
};

inline int cmd_verify(const VerifyArgs& a) {
  if (!(a.tol > 0.0)) throw UsageError("--tol must be positive");
  const auto rule = io::rule_from_json(io::read_json(a.rule));
  const auto& m = rule.manifold();
  std::vector<Check> checks;
  json measured;

  const double sum = rule.weights.sum();
  checks.push_back({"weight_sum", std::abs(sum - m.volume) <= a.tol, sum - m.volume, a.tol});
  measured["weight_sum"] = sum;
  measured["volume"] = m.volume;

  if (rule.omega > 0.0) {
    const double residual = exactness_residual(rule, rule.omega);
    checks.push_back({"exactness_residual", residual <= 1e-9 * m.volume, residual, 1e-9 * m.volume});
    const auto fb = frame_bounds(sampling_matrix(rule.lattice, rule.omega));
    checks.push_back({"frame", fb.is_frame(), fb.A, 0.0});
    measured["frame_bounds"] = io::to_json(fb);
  }

  const auto env = weight_envelope(rule.weights, rule.lattice);
  measured["envelope"] = {{"c1", env.c1}, {"c2", env.c2}};
  if (rule.positive) checks.push_back({"positivity", rule.weights.minCoeff() > 0.0, rule.weights.minCoeff(), 0.0});

  try {
    const auto rep = verify_lattice(rule.lattice, a.probe_density);
    checks.push_back({"lattice", true, rep.covering_radius, rule.lattice.rho / 2});
    measured["lattice"] = io::to_json(rep);
  } catch (const NotALattice& e) {
    checks.push_back({"lattice", false, std::nan(""), rule.lattice.rho / 2});
    measured["lattice"] = {{"error", e.what()}};
  }

  if (!a.function.empty()) {
    const auto f = io::spectral_from_json(io::read_json(a.function));
    if (!(f.manifold == m)) throw UsageError("function and rule live on different manifolds");
    const double err = std::abs(integrate(rule, synthesize(f, rule.lattice.points)) - exact_integral(f));
    const bool band_limited = f.cutoff <= rule.omega || f.cutoff == 0.0;
    if (band_limited) checks.push_back({"function_integral", err <= 1e-9 * m.volume, err, 1e-9 * m.volume});
    measured["function_integral_error"] = err;
    if (rule.omega > 0.0 && !band_limited) {
      const auto rep = error_report(rule, f, 1, 3);
      measured["error_report"] = {{"lhs", rep.lhs}, {"lhs_sampled", rep.lhs_sampled}, {"rhs", rep.rhs},
                                  {"ratio", rep.ratio}};
    }
    if (f.cutoff > 0.0) {
      const auto prod = product_bandlimit_check(f, f, 1.5 * product_bound(m, f.cutoff));
      checks.push_back({"product_leakage", prod.holds(), prod.max_leakage, 1e-10});
      measured["product"] = io::to_json(prod);
    }
  }

  bool ok = true;
  json arr = json::array();
  for (const auto& c : checks) {
    ok = ok && c.passed;
    arr.push_back(check_json(c));
  }
  const json report = {{"rule", a.rule},
                       {"construction", std::string(to_string(rule.construction))},
                       {"omega", rule.omega},
                       {"point_count", rule.lattice.size()},
                       {"checks", arr},
                       {"measured", measured},
                       {"passed", ok}};
  emit_json(a.report, report);
  return ok ? 0 : 1;
}

struct DftArgs {
  std::string rule;
  double omega = 0.0;
  std::string function;
  std::string samples;
  std::string out;
};

inline int cmd_dft(const DftArgs& a) {
  const auto rule = io::rule_from_json(io::read_json(a.rule));
  if (a.function.empty() == a.samples.empty()) throw UsageError("exactly one of --function or --samples is required");
  std::vector<double> samples;
  if (!a.function.empty()) {
    const auto f = io::spectral_from_json(io::read_json(a.function));
    samples = synthesize(f, rule.lattice.points);
  } else {
    samples = io::detail::guarded([&] { return io::read_json(a.samples).get<std::vector<double>>(); });
  }
  try {
    emit_json(a.out, io::to_json(discrete_fourier_transform(rule, samples, a.omega)));
    return 0;
  } catch (const InsufficientExactness& e) {
    emit_json(a.out, {{"error", e.name()}, {"message", e.what()}, {"rule_omega", rule.omega},
                      {"required_omega", product_bound(rule.manifold(), a.omega)}});
    std::cerr << e.what() << '\n';
    return 1;
  }
}

struct SplineArgs {
  std::string lattice;
  int k = 2;
  double truncation = 0.0;
  int k_min = 0;
  std::string solver = "null_space";
  std::string out;
};

inline int cmd_spline(const SplineArgs& a) {
  const auto lat = io::lattice_from_json(io::read_json(a.lattice));
  SplineOptions opts;
  opts.truncation = a.truncation;
  opts.k_min = a.k_min;
  opts.solver = a.solver == "saddle_point" ? SplineSolver::saddle_point : SplineSolver::null_space;
  io::save_spline_model(lagrangian_basis(lat, a.k, opts), a.out);
  return 0;
}

struct SweepArgs {
  std::string manifold;
  std::vector<double> omegas;
  double c0 = 1.0;
  std::string scaling = "sqrt";
  std::uint64_t seed = 1;
  int spline_k = 0;
  double band = 1.0;
  std::optional<double> besov;
  std::string out;
};

inline int cmd_sweep(const SweepArgs& a) {
  const auto m = ManifoldDescriptor::make(parse_manifold_kind(a.manifold));
  std::ostringstream csv;
  csv << "omega,rho,point_count,ratio,A,B,condition";
  for (int k = 1; k <= a.spline_k; ++k) csv << ",err_" << k;
  if (a.besov) csv << ",besov_err";
  csv << '\n';

  // One band-limited test function for the spline columns, fixed by the seed.
  std::optional<SpectralFunction> f;
  if (a.spline_k > 0) {
    std::mt19937_64 gen(a.seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd c(static_cast<Eigen::Index>(eigen_count(m, a.band)));
    for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = normal(gen);
    f = SpectralFunction(m, a.band, c);
  }

  for (double omega : a.omegas) {
    const double rho = scaled_rho(omega, a.c0, a.scaling);
    const auto lat = build_lattice(m, rho, a.seed);
    const auto S = sampling_matrix(lat, omega);
    const auto fb = frame_bounds(S);
    const double ratio = static_cast<double>(lat.size()) / std::pow(omega, 0.5 * m.n);
    csv << fmt(omega) << ',' << fmt(rho) << ',' << lat.size() << ',' << fmt(ratio) << ',' << fmt(fb.A) << ','
        << fmt(fb.B) << ',' << fmt(fb.condition);
    if (f) {
      SplineOptions opts;
      opts.k_min = 1;
      std::vector<int> ks;
      for (int k = 1; k <= a.spline_k; ++k) ks.push_back(k);
      for (const auto& row : spline_error_decay(lat, *f, ks, opts).rows) csv << ',' << fmt(row.error);
    }
    if (a.besov) {
      auto g = SpectralFunction::zero(m, 100.0 * omega);
      const Eigen::VectorXd lambda = g.basis().eigenvalues();
      for (Eigen::Index j = 1; j < lambda.size(); ++j) g.coefficients(j) = std::pow(lambda(j), -*a.besov);
      csv << ',' << fmt(error_report(exact_weights(S), g, 1, 3).lhs_sampled);
    }
    csv << '\n';
  }
  emit(a.out, csv.str());
  return 0;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args) {
  using namespace detail;
  CLI::App app{"Lattices, cubature rules and spectral transforms on the circle, torus and sphere", "mcub"};
  app.require_subcommand(1);
  const std::vector<std::string> manifolds{"circle", "torus2", "sphere2", "torus", "sphere"};

  LatticeArgs la;
  auto* lat = app.add_subcommand("lattice", "build a rho-lattice");
  lat->add_option("--manifold", la.manifold)->required()->check(CLI::IsMember(manifolds));
  auto* rho_opt = lat->add_option("--rho", la.rho, "lattice scale");
  auto* omega_opt = lat->add_option("--omega", la.omega, "band limit; rho = c0 * omega^(-1/2)");
  rho_opt->excludes(omega_opt);
  lat->add_option("--c0", la.c0)->needs(omega_opt);
  lat->add_option("--scaling", la.scaling, "sqrt: c0/sqrt(omega), linear: c0/omega")
      ->check(CLI::IsMember({"sqrt", "linear"}));
  lat->add_option("--seed", la.seed);
  lat->add_flag("--voronoi", la.voronoi, "include Voronoi measures");
  lat->add_option("--resolution", la.resolution, "Voronoi quadrature resolution");
  lat->add_option("-o,--output", la.out);

  WeightsArgs wa;
  auto* wts = app.add_subcommand("weights", "compute cubature weights for a lattice");
  wts->add_option("--lattice", wa.lattice)->required()->check(CLI::ExistingFile);
  wts->add_option("--omega", wa.omega);
  auto* ex = wts->add_flag("--exact", wa.exact, "minimal-norm exact weights");
  auto* pos = wts->add_flag("--positive", wa.positive, "positive exact weights");
  auto* spl = wts->add_option("--spline", wa.spline, "spline weights of order k");
  ex->excludes(pos)->excludes(spl);
  pos->excludes(spl);
  wts->add_option("--resolution", wa.resolution, "Voronoi quadrature resolution");
  wts->add_option("--truncation", wa.truncation, "spline truncation cutoff");
  wts->add_option("--k-min", wa.k_min, "smallest admissible spline order");
  wts->add_option("-o,--output", wa.out);

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "check a cubature rule and write a report");
  ver->add_option("--rule", va.rule)->required()->check(CLI::ExistingFile);
  ver->add_option("--function", va.function)->check(CLI::ExistingFile);
  ver->add_option("--report", va.report);
  ver->add_option("--tol", va.tol, "tolerance on the weight sum");
  ver->add_option("--probe-density", va.probe_density);

  DftArgs da;
  auto* dft = app.add_subcommand("dft", "Fourier coefficients from samples");
  dft->add_option("--rule", da.rule)->required()->check(CLI::ExistingFile);
  dft->add_option("--omega", da.omega)->required();
  auto* fn = dft->add_option("--function", da.function)->check(CLI::ExistingFile);
  auto* sm = dft->add_option("--samples", da.samples, "JSON array of node values")->check(CLI::ExistingFile);
  fn->excludes(sm);
  dft->add_option("-o,--output", da.out);

  SplineArgs sa;
  auto* sp = app.add_subcommand("spline", "Lagrangian spline model (JSON + binary sidecar)");
  sp->add_option("--lattice", sa.lattice)->required()->check(CLI::ExistingFile);
  sp->add_option("--k", sa.k);
  sp->add_option("--truncation", sa.truncation);
  sp->add_option("--k-min", sa.k_min);
  sp->add_option("--solver", sa.solver)->check(CLI::IsMember({"null_space", "saddle_point"}));
  sp->add_option("-o,--output", sa.out)->required();

  SweepArgs wa2;
  auto* sw = app.add_subcommand("sweep", "rate tables as CSV");
  sw->add_option("--manifold", wa2.manifold)->required()->check(CLI::IsMember(manifolds));
  sw->add_option("--omegas", wa2.omegas)->required()->delimiter(',');
  sw->add_option("--c0", wa2.c0);
  sw->add_option("--scaling", wa2.scaling)->check(CLI::IsMember({"sqrt", "linear"}));
  sw->add_option("--seed", wa2.seed);
  sw->add_option("--spline-k", wa2.spline_k, "add spline errors for k = 1..K");
  sw->add_option("--band", wa2.band, "band limit of the spline test function");
  sw->add_option("--besov", wa2.besov, "add the cubature error for coefficients lambda^-alpha");
  sw->add_option("-o,--output", wa2.out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*lat) return cmd_lattice(la);
    if (*wts) return cmd_weights(wa);
    if (*ver) return cmd_verify(va);
    if (*dft) return cmd_dft(da);
    if (*sp) return cmd_spline(sa);
    if (*sw) return cmd_sweep(wa2);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mcub::cli
