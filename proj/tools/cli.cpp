#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "svg.hpp"
#include "tightcert/contact.hpp"
#include "tightcert/json_io.hpp"
#include "tightcert/nodal.hpp"
#include "tightcert/spectral.hpp"
#include "tightcert/surface.hpp"
#include "tightcert/torus3.hpp"

#ifndef TIGHTCERT_VERSION
#define TIGHTCERT_VERSION "unknown"
#endif

namespace tightcert::cli {

namespace {

using io::Json;

// Thrown for flag values that fail an operation's preconditions.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok)
    throw ValidationError(message);
}

Json config_json(const RunConfig& c) {
  return {
      {"subcommand", c.subcommand},
      {"surface", c.surface},
      {"mesh", c.mesh},
      {"nx", c.nx},
      {"ny", c.ny},
      {"lx", c.lx},
      {"ly", c.ly},
      {"subdiv", c.subdiv},
      {"refine", c.refine},
      {"k", c.k},
      {"tol", c.tol},
      {"seed", c.seed},
      {"eigen_index", c.eigen_index},
      {"fiber_length", c.fiber_length},
      {"cover_degree", c.cover_degree},
      {"euler_number", c.euler_number},
      {"l_min", c.l_min ? Json(*c.l_min) : Json(nullptr)},
      {"zero_tol", c.zero_tol},
      {"mode", c.mode},
      {"n", c.n},
      {"direction", c.direction},
      {"svg", c.svg},
      {"out", c.out},
      {"threads", c.threads},
  };
}

Json report_header(const RunConfig& c) {
  return {{"schema", io::schema_version},
          {"version", TIGHTCERT_VERSION},
          {"config", config_json(c)},
          // The pipelines are sequential; --threads is recorded but not used.
          {"threads_used", 1}};
}

void fill_surface_defaults(RunConfig& c) {
  if (!c.mesh.empty())
    c.surface = "file";
  if (c.lx == 0.0)
    c.lx = 2.0 * std::numbers::pi;
  if (c.ly == 0.0)
    c.ly = 2.0 * std::numbers::pi;
  if (c.surface == "flat-torus") {
    const double h = std::max(c.lx, c.ly) / 64.0;
    if (c.nx == 0)
      c.nx = std::max(3, static_cast<int>(std::lround(c.lx / h)));
    if (c.ny == 0)
      c.ny = std::max(3, static_cast<int>(std::lround(c.ly / h)));
  }
}

void validate_surface(const RunConfig& c) {
  require(c.surface == "flat-torus" || c.surface == "icosphere" || c.surface == "genus2" ||
              c.surface == "file",
          "--surface must be flat-torus, icosphere, genus2 or file");
  require(c.surface != "file" || !c.mesh.empty(), "--surface file needs --mesh");
  require(c.lx > 0.0 && std::isfinite(c.lx) && c.ly > 0.0 && std::isfinite(c.ly),
          "--lx and --ly must be positive");
  require(c.surface != "flat-torus" || (c.nx >= 3 && c.ny >= 3),
          "--nx and --ny must be at least 3");
  require(c.subdiv >= 0 && c.subdiv <= 7, "--subdiv must be in [0, 7]");
  require(c.refine >= 0 && c.refine <= 4, "--refine must be in [0, 4]");
}

void validate_spectrum(const RunConfig& c) {
  require(c.k >= 1, "--k must be at least 1");
  require(c.tol > 0.0 && c.tol < 1.0, "--tol must be in (0, 1)");
}

void validate_eigen_index(const RunConfig& c) {
  require(c.k >= 2, "--k must be at least 2 to pick a nonconstant eigenfunction");
  require(c.eigen_index >= 1 && c.eigen_index < c.k, "--eigen-index must be in [1, k - 1]");
  require(c.zero_tol > 0.0 && c.zero_tol < 1.0, "--zero-tol must be in (0, 1)");
}

surface::TriangleMesh build_surface(const RunConfig& c) {
  if (c.surface == "flat-torus")
    return surface::build_flat_torus(c.nx, c.ny, c.lx, c.ly);
  if (c.surface == "icosphere")
    return surface::build_icosphere(c.subdiv);
  if (c.surface == "genus2")
    return surface::build_hyperbolic_genus2(c.refine);
  return surface::load_mesh(c.mesh);
}

std::vector<spectral::EigenPair> solve(const RunConfig& c, const spectral::OperatorPair& ops,
                                       int& iterations) {
  require(c.k <= ops.size(), "--k exceeds the vertex count");
  spectral::SolverOptions options;
  options.tol = c.tol;
  options.seed = c.seed;
  spectral::SolveStats stats;
  auto pairs = spectral::solve_lowest(ops, c.k, options, stats);
  iterations = stats.iterations;
  return pairs;
}

Json spectrum_json(const std::vector<spectral::EigenPair>& pairs, int iterations,
                   bool include_values) {
  Json list = Json::array();
  for (const auto& p : pairs)
    list.push_back(io::to_json(p, include_values));
  Json clusters = Json::array();
  for (const auto& [first, last] : spectral::multiplicity_clusters(pairs))
    clusters.push_back({first, last});
  return {{"iterations", iterations}, {"eigenpairs", list}, {"clusters", clusters}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f)
    throw std::runtime_error("cannot write " + path);
}

// Writes the SVG if asked; layout problems are recorded, not fatal.
void maybe_svg(const RunConfig& c, const nodal::NodalDecomposition& dec,
               const surface::TriangleMesh& mesh, Json& report, std::ostream& err) {
  if (c.svg.empty())
    return;
  const Layout layout = choose_layout(mesh);
  try {
    write_text(c.svg, emit_svg(dec, mesh, layout));
    report["svg"] = {{"path", c.svg}, {"layout", to_string(layout)}};
  } catch (const LayoutError& e) {
    err << e.what() << '\n';
    report["svg"] = {{"path", c.svg}, {"layout", to_string(layout)}, {"error", e.what()}};
  }
}

Json run_surface(const RunConfig& c) {
  const auto mesh = build_surface(c);
  Json report = report_header(c);
  report["mesh"] = io::mesh_summary(mesh);
  const auto curvature = surface::discrete_curvature(mesh);
  const auto sign = surface::curvature_nonpositive(curvature, 1e-8 * 2.0 * std::numbers::pi /
                                                                  mesh.total_area());
  report["curvature"] = {{"nonpositive", sign.nonpositive},
                         {"max_curvature", sign.max_curvature},
                         {"worst_vertex", sign.worst_vertex}};
  return report;
}

Json run_spectrum(const RunConfig& c) {
  const auto mesh = build_surface(c);
  const auto ops = spectral::assemble(mesh);
  int iterations = 0;
  const auto pairs = solve(c, ops, iterations);
  Json report = report_header(c);
  report["mesh"] = io::mesh_summary(mesh);
  report["spectrum"] = spectrum_json(pairs, iterations, true);
  return report;
}

Json run_nodal(const RunConfig& c, std::ostream& err) {
  const auto mesh = build_surface(c);
  const auto ops = spectral::assemble(mesh);
  int iterations = 0;
  const auto pairs = solve(c, ops, iterations);
  const auto& pair = pairs[c.eigen_index];
  Json report = report_header(c);
  report["mesh"] = io::mesh_summary(mesh);
  report["spectrum"] = spectrum_json(pairs, iterations, false);

  const auto dec = nodal::decompose(mesh, pair.f, c.zero_tol);
  Json nodal_json = io::to_json(dec);
  Json balances = Json::array();
  for (int d = 0; d < dec.domain_count(); ++d)
    balances.push_back(io::to_json(nodal::domain_gauss_bonnet(dec, d)));
  nodal_json["gauss_bonnet"] = balances;
  Json discs = Json::array();
  for (const auto& q : nodal::disc_domain_inequality(dec, pair.lambda))
    discs.push_back(
        {{"domain", q.domain}, {"lhs", q.lhs}, {"rhs", q.rhs}, {"margin", q.margin}});
  nodal_json["disc_inequality"] = discs;
  Json geometry = Json::array();
  for (const auto& g : nodal::dividing_set_geometry(dec, mesh))
    geometry.push_back(io::to_json(g));
  nodal_json["dividing_set_geometry"] = geometry;
  report["eigen_index"] = c.eigen_index;
  report["nodal"] = nodal_json;

  // Courant bound over every nonconstant pair that decomposes cleanly.
  std::vector<nodal::NodalDecomposition> all;
  Json skipped = Json::array();
  for (int i = 1; i < static_cast<int>(pairs.size()); ++i) {
    try {
      all.push_back(nodal::decompose(mesh, pairs[i].f, c.zero_tol));
    } catch (const nodal::NodalError& e) {
      skipped.push_back({{"index", i}, {"error", e.what()}});
      break;
    }
  }
  Json courant = io::to_json(nodal::courant_check(
      std::span(pairs).first(all.size() + 1), std::span<const nodal::NodalDecomposition>(all)));
  courant["skipped_from"] = skipped;
  report["courant"] = courant;

  maybe_svg(c, dec, mesh, report, err);
  return report;
}

Json run_certify(const RunConfig& c, std::ostream& err, int& exit_code) {
  const auto mesh = build_surface(c);
  const auto ops = spectral::assemble(mesh);
  const auto curvature = surface::discrete_curvature(mesh);
  int iterations = 0;
  const auto pairs = solve(c, ops, iterations);
  const auto& pair = pairs[c.eigen_index];
  const double E = contact::twisting_constant(c.euler_number, mesh.total_area());
  const auto form = contact::lift_to_beltrami(mesh, pair, c.fiber_length, 1, E);

  Json report = report_header(c);
  report["mesh"] = io::mesh_summary(mesh);
  report["spectrum"] = spectrum_json(pairs, iterations, false);
  report["eigen_index"] = c.eigen_index;
  const auto nonvanishing = contact::nonvanishing_check(form);
  report["lift"] = {{"lambda", form.lambda},
                    {"mu", form.mu},
                    {"E", form.E},
                    {"fiber_length", form.fiber_length},
                    {"min_alpha_norm", nonvanishing.min_norm},
                    {"mean_alpha_norm", nonvanishing.mean_norm}};

  std::optional<nodal::NodalDecomposition> dec;
  try {
    dec.emplace(nodal::decompose(mesh, pair.f, c.zero_tol));
    report["nodal"] = io::to_json(*dec);
  } catch (const nodal::NodalError& e) {
    err << "nodal: " << e.what() << '\n';
    report["nodal"] = {{"error", std::string("nodal: ") + e.what()}};
  }

  contact::CertificateInput input;
  input.cover_degree = c.cover_degree;
  input.euler_number = c.euler_number;
  input.fiber_length_min = c.l_min;
  const auto cert =
      contact::certify(mesh, ops, curvature, form, dec ? &*dec : nullptr, input);
  report["certificate"] = io::to_json(cert);
  if (cert.consistency_failures > 0) {
    err << "contact: CONSISTENCY_FAILURE (" << cert.consistency_failures << ")\n";
    exit_code = exit_consistency_failure;
  }
  if (dec)
    maybe_svg(c, *dec, mesh, report, err);
  return report;
}

torus3::Axis parse_axis(const std::string& s) {
  if (s == "x")
    return torus3::Axis::x;
  if (s == "y")
    return torus3::Axis::y;
  return torus3::Axis::z;
}

Json run_torus3(const RunConfig& c) {
  const int m = c.mode;
  std::vector<int> grids;
  if (c.n / 2 >= 8)
    grids.push_back(c.n / 2);
  grids.push_back(c.n);
  grids.push_back(2 * c.n);

  Json table = Json::array();
  double previous = 0.0;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const auto field = torus3::sample_alpha_n(m, grids[i]);
    const double r = torus3::curl_residual(field, m);
    Json row = {{"n", grids[i]}, {"h", field.spacing()}, {"residual", r}};
    row["order"] = i == 0 ? Json(nullptr) : Json(std::log2(previous / r));
    table.push_back(row);
    previous = r;
  }

  const auto field = torus3::sample_alpha_n(m, c.n);
  const auto fine = torus3::sample_alpha_n(m, 2 * c.n);
  const double right = torus3::curl_residual(field, m);
  const double wrong_mu = m + (m > 0 ? 1.0 : -1.0);
  const double wrong = torus3::curl_residual(field, wrong_mu);
  const double fit_coarse = torus3::fit_mu(field);
  const double fit_fine = torus3::fit_mu(fine);

  Json report = report_header(c);
  report["orientation"] = "left_handed";
  report["curl_residual"] = table;
  report["wrong_mu"] = {{"mu", wrong_mu}, {"residual", wrong}, {"ratio", wrong / right}};
  report["mu_fit"] = {{"n_coarse", c.n},
                      {"coarse", fit_coarse},
                      {"fine", fit_fine},
                      {"richardson", torus3::richardson(fit_coarse, fit_fine)}};

  const auto ham = torus3::contact_hamiltonian(field, parse_axis(c.direction));
  Json h = {{"direction", c.direction}, {"degenerate", ham.degenerate}};
  if (ham.degenerate) {
    h["error"] = "torus3: alpha(X) vanishes identically; X lies in the plane field";
  } else {
    h["gener_lap_residual"] = torus3::gener_lap_residual(ham.f, std::abs(m));
    h["characteristic_surface"] = io::to_json(torus3::characteristic_surface(ham.f));
    const auto tangency = torus3::reeb_tangency(field, ham.f);
    h["reeb_tangency"] = {{"max_abs", tangency.max_abs}, {"samples", tangency.samples}};
  }
  report["hamiltonian"] = h;
  return report;
}

void add_surface_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--surface", c.surface, "flat-torus, icosphere, genus2 or file");
  sub->add_option("--mesh", c.mesh, "mesh file (.off or .ioff)");
  sub->add_option("--nx", c.nx, "flat torus cells along x");
  sub->add_option("--ny", c.ny, "flat torus cells along y");
  sub->add_option("--lx", c.lx, "flat torus period along x");
  sub->add_option("--ly", c.ly, "flat torus period along y");
  sub->add_option("--subdiv", c.subdiv, "icosphere subdivisions");
  sub->add_option("--refine", c.refine, "genus-2 refinement level");
  sub->add_option("--out", c.out, "JSON output path (default stdout)");
  sub->add_option("--threads", c.threads, "worker threads");
}

void add_spectrum_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--k", c.k, "number of eigenpairs");
  sub->add_option("--tol", c.tol, "eigensolver residual tolerance");
  sub->add_option("--seed", c.seed, "eigensolver seed");
}

void add_nodal_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--eigen-index", c.eigen_index, "eigenpair to use (default k - 1)");
  sub->add_option("--zero-tol", c.zero_tol, "relative zero tolerance");
  sub->add_option("--svg", c.svg, "SVG output path");
}

} // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"tightcert: spectral certificates for S^1-invariant contact structures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TIGHTCERT_VERSION);

  auto* surface_cmd = app.add_subcommand("surface", "build or load a surface and report it");
  add_surface_flags(surface_cmd, c);
  auto* spectrum_cmd = app.add_subcommand("spectrum", "lowest Laplace-Beltrami eigenpairs");
  add_surface_flags(spectrum_cmd, c);
  add_spectrum_flags(spectrum_cmd, c);
  auto* nodal_cmd = app.add_subcommand("nodal", "nodal decomposition of one eigenfunction");
  add_surface_flags(nodal_cmd, c);
  add_spectrum_flags(nodal_cmd, c);
  add_nodal_flags(nodal_cmd, c);
  auto* certify_cmd = app.add_subcommand("certify", "universal tightness certificate");
  add_surface_flags(certify_cmd, c);
  add_spectrum_flags(certify_cmd, c);
  add_nodal_flags(certify_cmd, c);
  certify_cmd->add_option("--fiber-length", c.fiber_length, "length of the circle fibre");
  certify_cmd->add_option("--cover-degree", c.cover_degree, "degree k of the bundle covering");
  certify_cmd->add_option("--euler-number", c.euler_number, "Euler number e");
  certify_cmd->add_option("--l-min", c.l_min, "shortest fibre length (default fibre length)");
  auto* torus3_cmd = app.add_subcommand("torus3", "Beltrami checks for alpha_n on T^3");
  torus3_cmd->add_option("--mode", c.mode, "mode number n of alpha_n");
  torus3_cmd->add_option("--n", c.n, "grid points per axis");
  torus3_cmd->add_option("--direction", c.direction, "contact vector field axis: x, y or z");
  torus3_cmd->add_option("--out", c.out, "JSON output path (default stdout)");
  torus3_cmd->add_option("--threads", c.threads, "worker threads");

  std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_validation;
  }

  int exit_code = exit_ok;
  try {
    if (const char* env = std::getenv("TIGHTCERT_THREADS")) {
      try {
        std::size_t used = 0;
        c.threads = std::stoi(env, &used);
        require(used == std::string(env).size(), "");
      } catch (const std::exception&) {
        throw ValidationError("TIGHTCERT_THREADS must be an integer");
      }
    }
    require(c.threads >= 1, "--threads must be at least 1");

    Json report;
    if (surface_cmd->parsed() || spectrum_cmd->parsed() || nodal_cmd->parsed() ||
        certify_cmd->parsed()) {
      fill_surface_defaults(c);
      validate_surface(c);
      if (c.eigen_index < 0)
        c.eigen_index = c.k - 1;
    }
    if (surface_cmd->parsed()) {
      c.subcommand = "surface";
      report = run_surface(c);
    } else if (spectrum_cmd->parsed()) {
      c.subcommand = "spectrum";
      validate_spectrum(c);
      report = run_spectrum(c);
    } else if (nodal_cmd->parsed()) {
      c.subcommand = "nodal";
      validate_spectrum(c);
      validate_eigen_index(c);
      report = run_nodal(c, err);
    } else if (certify_cmd->parsed()) {
      c.subcommand = "certify";
      validate_spectrum(c);
      validate_eigen_index(c);
      require(c.fiber_length > 0.0 && std::isfinite(c.fiber_length),
              "--fiber-length must be positive");
      require(c.cover_degree >= 1, "--cover-degree must be at least 1");
      require(!c.l_min || (*c.l_min > 0.0 && std::isfinite(*c.l_min)),
              "--l-min must be positive");
      report = run_certify(c, err, exit_code);
    } else {
      c.subcommand = "torus3";
      require(c.mode != 0, "--mode must be nonzero");
      require(c.n >= 8 && c.n <= 128, "--n must be in [8, 128]");
      require(c.direction == "x" || c.direction == "y" || c.direction == "z",
              "--direction must be x, y or z");
      report = run_torus3(c);
    }

    const std::string text = report.dump(2) + "\n";
    if (c.out.empty())
      out << text;
    else
      write_text(c.out, text);
    return exit_code;
  } catch (const ValidationError& e) {
    err << "cli: " << e.what() << '\n';
    return exit_validation;
  } catch (const surface::MeshError& e) {
    err << "surface: " << e.what() << '\n';
    return exit_validation;
  } catch (const spectral::NonConvergence& e) {
    err << "spectral: " << e.what() << '\n';
    return exit_nonconvergence;
  } catch (const spectral::DegenerateTriangle& e) {
    err << "spectral: " << e.what() << '\n';
    return exit_validation;
  } catch (const nodal::NodalError& e) {
    err << "nodal: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  }
}

int run(int argc, const char* const* argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace tightcert::cli
