// bloch-hs: spectral homogenization experiments on Hashin-Shtrikman
// micro-structures. Subcommands mirror the pipeline stages; every run writes
// its outputs plus a manifest JSON carrying the resolved config and its hash.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "bhs/bloch.hpp"
#include "bhs/dispersion.hpp"
#include "bhs/dns.hpp"
#include "bhs/io.hpp"
#include "bhs/verify.hpp"

namespace {

using bhs::Json;

struct CellFlags {
  std::string kind = "disk";
  double R = 0.7071067811865476;
  double a = 0.5;
  int axis = 1;  // 1-based on the CLI
  double rho1 = 0.4;
  double rho2 = 1.0;
  double m1 = 0.5;
  double m2 = 0.0;
  std::string inclusion = "none";
  double theta = 0.5;
  double alpha = 1.0;
  double beta = 2.0;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--cell", kind,
                    "cell kind: disk | laminate | confocal | periodic-square");
    cmd->add_option("--R", R, "disk core radius (disk / periodic-square)");
    cmd->add_option("--a", a, "laminate slab half-width");
    cmd->add_option("--axis", axis, "lamination axis (1-based)");
    cmd->add_option("--rho1", rho1, "confocal core level");
    cmd->add_option("--rho2", rho2, "confocal boundary level");
    cmd->add_option("--m1", m1, "confocal offset m_1");
    cmd->add_option("--m2", m2, "confocal offset m_2");
    cmd->add_option("--inclusion", inclusion,
                    "periodic-square inclusion: none | strip | disk");
    cmd->add_option("--theta", theta, "strip volume fraction");
    cmd->add_option("--alpha", alpha, "core conductivity");
    cmd->add_option("--beta", beta, "coating conductivity");
  }

  bhs::CellDescriptor descriptor() const {
    bhs::CellDescriptor d;
    d.alpha = alpha;
    d.beta = beta;
    if (kind == "disk") {
      d.geometry = bhs::DiskInclusion{R};
    } else if (kind == "laminate") {
      d.geometry = bhs::LaminateCell{a, axis - 1};
    } else if (kind == "confocal") {
      d.geometry = bhs::ConfocalEllipse{rho1, rho2, {m1, m2}};
    } else if (kind == "periodic-square") {
      bhs::PeriodicSquare g;
      if (inclusion == "none")
        g.inclusion = bhs::PeriodicSquare::Inclusion::None;
      else if (inclusion == "strip")
        g.inclusion = bhs::PeriodicSquare::Inclusion::Strip;
      else if (inclusion == "disk")
        g.inclusion = bhs::PeriodicSquare::Inclusion::Disk;
      else
        throw bhs::ArgumentError("unknown inclusion: " + inclusion);
      g.theta = theta;
      g.radius = R;
      g.axis = axis - 1;
      d.geometry = g;
    } else {
      throw bhs::ArgumentError("unknown cell kind: " + kind);
    }
    return d;
  }

  Json config() const {
    Json j;
    j["cell"] = kind;
    j["R"] = R;
    j["a"] = a;
    j["axis"] = axis;
    j["rho1"] = rho1;
    j["rho2"] = rho2;
    j["m1"] = m1;
    j["m2"] = m2;
    j["inclusion"] = inclusion;
    j["theta"] = theta;
    j["alpha"] = alpha;
    j["beta"] = beta;
    return j;
  }
};

void write_manifest(const std::string& out_dir, const std::string& command,
                    const Json& config, const std::vector<std::string>& outputs) {
  Json m;
  m["command"] = command;
  m["config"] = config;
  m["config_hash"] = bhs::config_hash(config);
  m["outputs"] = outputs;
  m["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  bhs::write_text_file(out_dir + "/" + command + ".manifest.json",
                       m.dump(2) + "\n");
}

// Applies JSON config-file values as option defaults so that explicit flags
// still override them.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw bhs::ArgumentError("cannot read config file: " + path);
  Json j = Json::parse(is);
  for (auto& [key, value] : j.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt) continue;
    std::string text =
        value.is_string() ? value.get<std::string>() : value.dump();
    opt->default_str(text);
    if (opt->empty()) opt->add_result(text)->run_callback();
  }
}

int run_homogenize(const CellFlags& cell, double h, const std::string& route,
                   const std::string& out_dir) {
  bhs::CellDescriptor desc = cell.descriptor();
  bhs::CoefficientField field = desc.make_field();
  bhs::Mesh mesh = bhs::generate_cell_mesh(desc.geometry, h);

  Json config = cell.config();
  config["h"] = h;
  config["route"] = route;
  std::string hash = bhs::config_hash(config);

  Json result;
  result["config_hash"] = hash;
  result["cell"] = bhs::cell_to_json(desc);
  if (route == "integral" || route == "both") {
    bhs::CellWorkspace ws(field, mesh);
    result["cell_integral"] = bhs::tensor_to_json(bhs::homogenized_cell_integral(ws));
  }
  if (route == "hessian" || route == "both") {
    bhs::CellRegime regime = bhs::CellRegime::ConstantTrace;
    int space_axis = 0;
    if (std::holds_alternative<bhs::LaminateCell>(desc.geometry)) {
      regime = bhs::CellRegime::PeriodicConstantTrace;
      space_axis = std::get<bhs::LaminateCell>(desc.geometry).axis;
    } else if (std::holds_alternative<bhs::PeriodicSquare>(desc.geometry)) {
      regime = bhs::CellRegime::Periodic;
    }
    bhs::CellSpace space = bhs::make_cell_space(mesh, regime, space_axis);
    bhs::AssembledForms forms = bhs::assemble(field, mesh, space);
    result["eig_hessian"] = bhs::tensor_to_json(bhs::homogenized_from_hessian(forms));
  }
  if (route == "periodic") {
    result["periodic_cell"] =
        bhs::tensor_to_json(bhs::periodic_homogenized(field, mesh));
  }
  std::string path = out_dir + "/homogenize.json";
  bhs::write_text_file(path, result.dump(2) + "\n");
  write_manifest(out_dir, "homogenize", config, {path});
  std::cout << result.dump(2) << "\n";
  return 0;
}

int run_cell_spectrum(const CellFlags& cell, double h, double eta_x, double eta_y,
                      int fan, double eta_radius, double tol,
                      const std::string& out_dir) {
  bhs::CellDescriptor desc = cell.descriptor();
  bhs::CoefficientField field = desc.make_field();
  bhs::Mesh mesh = bhs::generate_cell_mesh(desc.geometry, h);
  bhs::CellRegime regime = bhs::CellRegime::ConstantTrace;
  int space_axis = 0;
  if (std::holds_alternative<bhs::LaminateCell>(desc.geometry)) {
    regime = bhs::CellRegime::PeriodicConstantTrace;
    space_axis = std::get<bhs::LaminateCell>(desc.geometry).axis;
  } else if (std::holds_alternative<bhs::PeriodicSquare>(desc.geometry)) {
    regime = bhs::CellRegime::Periodic;
  }
  bhs::CellSpace space = bhs::make_cell_space(mesh, regime, space_axis);
  bhs::AssembledForms forms = bhs::assemble(field, mesh, space);

  std::vector<bhs::Vec2> grid;
  if (fan > 0) {
    for (int i = 0; i < fan; ++i) {
      double a = 2.0 * M_PI * i / fan;
      grid.emplace_back(eta_radius * std::cos(a), eta_radius * std::sin(a));
    }
  } else {
    grid.emplace_back(eta_x, eta_y);
  }
  bhs::SweepResult sweep = bhs::sweep_lambda1(forms, grid, tol,
                                              std::max(1.0, eta_radius));

  Json config = cell.config();
  config["h"] = h;
  config["eta"] = {eta_x, eta_y};
  config["fan"] = fan;
  config["eta_radius"] = eta_radius;
  config["tol"] = tol;
  std::string hash = bhs::config_hash(config);
  std::string path = out_dir + "/cell-spectrum.csv";
  {
    bhs::CsvWriter csv(path, {"eta_1", "eta_2", "lambda1", "residual",
                              "iterations"},
                       hash);
    for (const auto& row : sweep.rows)
      csv.row({row.eta.x(), row.eta.y(), row.lambda1, row.residual,
               static_cast<double>(row.iterations)});
  }
  write_manifest(out_dir, "cell-spectrum", config, {path});
  std::cout << "lambda1 rows: " << sweep.rows.size()
            << ", max Lipschitz quotient: " << sweep.max_lipschitz_quotient
            << "\n";
  return 0;
}

int run_dispersion(const CellFlags& cell, double h, int directions,
                   const std::string& out_dir) {
  bhs::CellDescriptor desc = cell.descriptor();
  bhs::CoefficientField field = desc.make_field();
  bhs::Mesh mesh = bhs::generate_cell_mesh(desc.geometry, h);
  bhs::CellWorkspace ws(field, mesh);
  bhs::HomogenizedTensor m = bhs::homogenized_cell_integral(ws);
  bhs::CellSpace space = bhs::make_cell_space(mesh, bhs::CellRegime::ConstantTrace);
  bhs::AssembledForms forms = bhs::assemble(field, mesh, space);
  auto rows = bhs::dispersion_fan(ws, forms, m.entries, directions);

  Json config = cell.config();
  config["h"] = h;
  config["directions"] = directions;
  std::string hash = bhs::config_hash(config);
  std::string path = out_dir + "/dispersion.csv";
  {
    bhs::CsvWriter csv(path, {"angle", "d", "q4", "rel_gap"}, hash);
    for (const auto& row : rows)
      csv.row({row.angle, row.d_value, row.q4_oracle, row.relative_gap});
  }
  write_manifest(out_dir, "dispersion", config, {path});
  std::cout << "dispersion fan written: " << path << "\n";
  return 0;
}

int run_covering(double eps_max, double eps_min, double residual,
                 std::uint64_t seed, int grid, const std::string& out_dir) {
  bhs::VitaliCovering cov = bhs::generate_disk_covering(
      bhs::Rect{0.0, 0.0, 1.0, 1.0}, eps_max, eps_min, residual, seed, grid);
  Json config;
  config["eps-max"] = eps_max;
  config["eps-min"] = eps_min;
  config["residual"] = residual;
  config["seed"] = seed;
  config["grid"] = grid;
  Json j = bhs::covering_to_json(cov);
  j["config_hash"] = bhs::config_hash(config);
  std::string path = out_dir + "/covering.json";
  bhs::write_text_file(path, j.dump(2) + "\n");
  write_manifest(out_dir, "covering", config, {path});
  std::cout << "cells: " << cov.cells.size()
            << ", residual: " << cov.residual_fraction << ", kappa: " << cov.kappa
            << (cov.target_missed ? " (target-missed)" : "") << "\n";
  return 0;
}

int run_bloch(const CellFlags& cell, double eps_max, double eps_min,
              double residual, std::uint64_t seed, double xi_max, int xi_rings,
              int xi_angles, const std::string& mode_name, double cell_h,
              const std::string& out_dir) {
  bhs::CellDescriptor desc = cell.descriptor();
  bhs::CoefficientField field = desc.make_field();
  double gamma = bhs::hs_spherical_gamma(cell.alpha, cell.beta,
                                         bhs::cell_volume_fraction(desc.geometry),
                                         2);
  bhs::VitaliCovering cov = bhs::generate_disk_covering(
      bhs::Rect{0.0, 0.0, 1.0, 1.0}, eps_max, eps_min, residual, seed, 1024);
  bhs::MicroField micro(cov, field, gamma * bhs::Mat2::Identity());
  bhs::BlochOptions opt;
  opt.cell_mesh_h = cell_h;
  opt.eta_cache_max = std::max(0.85, cov.kappa * xi_max * 1.05);
  bhs::BlochEngine engine(micro, opt);

  bhs::ScalarField g = bhs::make_smooth_bump(bhs::Vec2(0.5, 0.5), 0.3, 1.0);
  std::vector<bhs::Vec2> xi;
  xi.emplace_back(0.0, 0.0);
  for (int ring = 1; ring <= xi_rings; ++ring)
    for (int a = 0; a < xi_angles; ++a) {
      double ang = 2.0 * M_PI * a / xi_angles;
      double r = xi_max * ring / xi_rings;
      xi.emplace_back(r * std::cos(ang), r * std::sin(ang));
    }
  bhs::BlochMode mode =
      mode_name == "taylor1" ? bhs::BlochMode::Taylor1 : bhs::BlochMode::Exact;
  bhs::BlochTransformResult b = engine.transform(g, xi, mode);
  std::vector<bhs::Complex> f = engine.reference(g, xi);

  Json config = cell.config();
  config["eps-max"] = eps_max;
  config["eps-min"] = eps_min;
  config["residual"] = residual;
  config["seed"] = seed;
  config["xi-max"] = xi_max;
  config["xi-rings"] = xi_rings;
  config["xi-angles"] = xi_angles;
  config["mode"] = mode_name;
  config["cell-h"] = cell_h;
  std::string hash = bhs::config_hash(config);
  std::string path = out_dir + "/bloch.csv";
  {
    bhs::CsvWriter csv(
        path, {"xi_1", "xi_2", "re_b", "im_b", "re_f", "im_f", "abs_err"}, hash);
    for (size_t i = 0; i < xi.size(); ++i)
      csv.row({xi[i].x(), xi[i].y(), b.values[i].real(), b.values[i].imag(),
               f[i].real(), f[i].imag(), std::abs(b.values[i] - f[i])});
  }
  write_manifest(out_dir, "bloch", config, {path});
  std::cout << "bloch transform written: " << path << "\n";
  return 0;
}

int run_dns(const CellFlags& cell, const std::vector<double>& eps_levels,
            int mesh_n, const std::string& out_dir, std::uint64_t seed) {
  bhs::CellDescriptor desc = cell.descriptor();
  bhs::CoefficientField field = desc.make_field();
  double gamma = bhs::hs_spherical_gamma(cell.alpha, cell.beta,
                                         bhs::cell_volume_fraction(desc.geometry),
                                         2);
  bhs::Mat2 background = gamma * bhs::Mat2::Identity();
  std::vector<bhs::VitaliCovering> levels;
  for (size_t i = 0; i < eps_levels.size(); ++i) {
    double eps = eps_levels[i];
    levels.push_back(bhs::generate_disk_covering(
        bhs::Rect{0.0, 0.0, 1.0, 1.0}, eps, eps / 8.0,
        std::max(0.03, 0.08 * eps / eps_levels.front()), seed + i, 1024));
  }
  bhs::Mesh mesh = bhs::unit_square_mesh(mesh_n);
  auto rows = bhs::convergence_study(field, background, levels,
                                     [](const bhs::Vec2&) { return 1.0; }, mesh);

  Json config = cell.config();
  config["levels"] = eps_levels;
  config["mesh-n"] = mesh_n;
  config["seed"] = seed;
  std::string hash = bhs::config_hash(config);
  std::string path = out_dir + "/dns.csv";
  {
    bhs::CsvWriter csv(
        path, {"kappa", "residual", "l2_err", "flux_err", "dofs", "seconds"},
        hash);
    for (const auto& row : rows)
      csv.row({row.kappa, row.residual_fraction, row.l2_error,
               row.flux_weak_error, static_cast<double>(row.dofs), row.seconds});
  }
  write_manifest(out_dir, "dns", config, {path});
  std::cout << "dns study written: " << path << "\n";
  return 0;
}

int run_verify_all(bool fast) {
  bhs::VerifySettings settings;
  settings.fast = fast;
  bool all_pass = true;
  for (int id = 1; id <= bhs::criterion_count(); ++id) {
    bhs::CriterionResult r = bhs::run_criterion(id, settings);
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": "
              << r.name << " (" << r.seconds << "s) " << r.detail << "\n";
  }
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bloch-hs: Bloch-wave spectral homogenization on "
               "Hashin-Shtrikman micro-structures"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::string config_path;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--config", config_path, "JSON config file (flags override)");

  CellFlags cell;
  double h = 0.02;
  double tol = 1e-11;

  auto* cmd_homog = app.add_subcommand("homogenize",
                                       "homogenized tensor of a cell");
  cell.add_options(cmd_homog);
  cmd_homog->add_option("--h", h, "target mesh size");
  std::string route = "both";
  cmd_homog->add_option("--route", route,
                        "integral | hessian | both | periodic");

  auto* cmd_spec = app.add_subcommand("cell-spectrum",
                                      "ground-state energies over momenta");
  cell.add_options(cmd_spec);
  cmd_spec->add_option("--h", h, "target mesh size");
  double eta_x = 0.1, eta_y = 0.0, eta_radius = 0.3;
  int fan = 0;
  cmd_spec->add_option("--eta-x", eta_x, "momentum x");
  cmd_spec->add_option("--eta-y", eta_y, "momentum y");
  cmd_spec->add_option("--fan", fan, "evaluate on an n-point fan instead");
  cmd_spec->add_option("--eta-radius", eta_radius, "fan radius");
  cmd_spec->add_option("--tol", tol, "eigensolver residual tolerance");

  auto* cmd_disp = app.add_subcommand("dispersion", "Burnett quartic fan");
  cell.add_options(cmd_disp);
  cmd_disp->add_option("--h", h, "target mesh size");
  int directions = 16;
  cmd_disp->add_option("--directions", directions, "fan size");

  auto* cmd_cov = app.add_subcommand("covering", "greedy Vitali disk covering");
  double eps_max = 0.2, eps_min = 0.025, residual = 0.1;
  std::uint64_t seed = 7;
  int grid = 1024;
  cmd_cov->add_option("--eps-max", eps_max, "largest cell scale");
  cmd_cov->add_option("--eps-min", eps_min, "smallest admissible scale");
  cmd_cov->add_option("--residual", residual, "residual area target");
  cmd_cov->add_option("--seed", seed, "placement jitter seed");
  cmd_cov->add_option("--grid", grid, "distance-field grid resolution");

  auto* cmd_bloch = app.add_subcommand("bloch",
                                       "first Bloch transform vs Fourier");
  cell.add_options(cmd_bloch);
  double xi_max = 4.0, cell_h = 0.06;
  int xi_rings = 4, xi_angles = 8;
  std::string mode = "exact";
  cmd_bloch->add_option("--eps-max", eps_max, "largest cell scale");
  cmd_bloch->add_option("--eps-min", eps_min, "smallest admissible scale");
  cmd_bloch->add_option("--residual", residual, "residual area target");
  cmd_bloch->add_option("--seed", seed, "covering seed");
  cmd_bloch->add_option("--xi-max", xi_max, "largest frequency radius");
  cmd_bloch->add_option("--xi-rings", xi_rings, "frequency rings");
  cmd_bloch->add_option("--xi-angles", xi_angles, "frequency angles per ring");
  cmd_bloch->add_option("--mode", mode, "exact | taylor1");
  cmd_bloch->add_option("--cell-h", cell_h, "reference-cell mesh size");

  auto* cmd_dns = app.add_subcommand("dns",
                                     "direct simulation convergence study");
  cell.add_options(cmd_dns);
  std::vector<double> levels = {0.2, 0.1, 0.05};
  int mesh_n = 480;
  cmd_dns->add_option("--levels", levels, "covering scales (descending)");
  cmd_dns->add_option("--mesh-n", mesh_n, "macro mesh resolution per axis");
  cmd_dns->add_option("--seed", seed, "covering seed");

  auto* cmd_verify = app.add_subcommand("verify-all", "run the acceptance suite");
  bool fast = false;
  cmd_verify->add_flag("--fast", fast, "coarse smoke settings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  }

  try {
    if (!config_path.empty()) {
      CLI::App* active = app.get_subcommands().front();
      apply_config_file(active, config_path);
    }
    if (cmd_homog->parsed()) return run_homogenize(cell, h, route, out_dir);
    if (cmd_spec->parsed())
      return run_cell_spectrum(cell, h, eta_x, eta_y, fan, eta_radius, tol,
                               out_dir);
    if (cmd_disp->parsed()) return run_dispersion(cell, h, directions, out_dir);
    if (cmd_cov->parsed())
      return run_covering(eps_max, eps_min, residual, seed, grid, out_dir);
    if (cmd_bloch->parsed())
      return run_bloch(cell, eps_max, eps_min, residual, seed, xi_max, xi_rings,
                       xi_angles, mode, cell_h, out_dir);
    if (cmd_dns->parsed()) return run_dns(cell, levels, mesh_n, out_dir, seed);
    if (cmd_verify->parsed()) return run_verify_all(fast);
  } catch (const bhs::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}
