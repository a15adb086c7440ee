// Command-line front end: mesh info, assembly, solves, field-of-values
// enclosures, experiments and the scalar stability check.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "helmfov/assembly.hpp"
#include "helmfov/fov.hpp"
#include "helmfov/harness/config.hpp"
#include "helmfov/harness/experiments.hpp"
#include "helmfov/matrix_market.hpp"
#include "helmfov/mesh.hpp"
#include "helmfov/precond.hpp"

namespace {

using namespace helmfov;
using namespace helmfov::harness;

constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

// Raw flag values; unset optionals leave the config untouched.
struct Flags {
  std::optional<std::string> config;
  std::optional<int> dim;
  std::optional<int> level;
  std::optional<int> coarse_level;
  std::optional<std::string> levels;
  std::optional<std::string> coarse_levels;
  std::optional<std::string> kappa2;
  std::optional<std::string> sigma;
  std::optional<std::string> sigma_box;
  std::optional<std::string> precond;
  std::optional<std::string> cycles;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> angles;
  std::optional<double> eig_tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  long grid = 10000;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "TOML configuration file");
  app->add_option("--dim", f.dim, "spatial dimension (2 or 3)");
  app->add_option("--level", f.level, "fine mesh level");
  app->add_option("--coarse-level", f.coarse_level, "coarse level of the two-level preconditioner");
  app->add_option("--kappa2", f.kappa2, "kappa^2, or a comma-separated list");
  app->add_option("--sigma", f.sigma, "constant loss, or a comma-separated list");
  app->add_option("--sigma-box", f.sigma_box, "x0,y0[,z0]:x1,y1[,z1]:value");
  app->add_option("--precond", f.precond, "laplace | mg:N | twolevel:L");
  app->add_option("--tol", f.tol, "relative GMRES tolerance");
  app->add_option("--max-iter", f.max_iter, "GMRES iteration cap");
  app->add_option("--angles", f.angles, "number of rotation angles");
  app->add_option("--eig-tol", f.eig_tol, "Lanczos tolerance");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--threads", f.threads, "worker threads");
  app->add_option("--out", f.out, "output directory");
}

ExperimentConfig build_config(ExperimentConfig cfg, const Flags& f) {
  if (f.config) apply_toml(cfg, *f.config);
  if (f.dim) cfg.dim = *f.dim;
  if (f.level) cfg.level = *f.level;
  if (f.coarse_level) cfg.coarse_level = *f.coarse_level;
  if (f.levels) cfg.levels = parse_int_list(*f.levels);
  if (f.coarse_levels) cfg.coarse_levels = parse_int_list(*f.coarse_levels);
  if (f.kappa2) cfg.kappa2 = parse_double_list(*f.kappa2);
  if (f.sigma) {
    cfg.sigma = parse_double_list(*f.sigma);
    cfg.sigma_box.reset();
  }
  if (f.sigma_box) cfg.sigma_box = parse_sigma_box(*f.sigma_box, cfg.dim);
  if (f.precond) {
    try {
      cfg.precond = PrecondSpec::parse(*f.precond);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (f.cycles) cfg.cycles = parse_int_list(*f.cycles);
  if (f.tol) cfg.tol = *f.tol;
  if (f.max_iter) cfg.max_iter = *f.max_iter;
  if (f.angles) cfg.angles = *f.angles;
  if (f.eig_tol) cfg.eig_tol = *f.eig_tol;
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (f.out) cfg.out = *f.out;
  if (cfg.coarse_level && cfg.precond.kind == PrecondSpec::Kind::two_level) {
    cfg.precond.coarse_level = *cfg.coarse_level;
  }
  cfg.validate();
  return cfg;
}

// Single (kappa2, loss) pair for the commands that handle one problem.
std::pair<double, LossProfile> single_problem(const ExperimentConfig& cfg) {
  if (cfg.kappa2.size() > 1) throw ConfigError("--kappa2 takes a single value here");
  const double k2 = cfg.kappa2.empty() ? 0.0 : cfg.kappa2.front();
  if (cfg.sigma_box) return {k2, *cfg.sigma_box};
  if (cfg.sigma.size() > 1) throw ConfigError("--sigma takes a single value here");
  return {k2, LossProfile::constant(cfg.sigma.empty() ? 0.0 : cfg.sigma.front())};
}

int cmd_mesh_info(const ExperimentConfig& cfg) {
  std::cout << mesh_summary_json(build_mesh(cfg.dim, cfg.level)) << '\n';
  return 0;
}

int cmd_assemble(const ExperimentConfig& cfg, bool write_files) {
  const auto [k2, loss] = single_problem(cfg);
  const auto mesh = std::make_shared<const MeshLevel>(cfg.dim, cfg.level);
  const auto problem = assemble(mesh, k2, loss);
  if (write_files) {
    std::filesystem::create_directories(cfg.out);
    export_matrixmarket(problem.system, cfg.out / "A.mtx");
    export_matrixmarket(problem.stiffness, cfg.out / "K.mtx");
    export_matrixmarket(problem.mass, cfg.out / "M.mtx");
    export_matrixmarket(problem.weighted_mass, cfg.out / "Msigma.mtx");
  }
  std::cout << problem_json(problem) << '\n';
  return 0;
}

int cmd_solve(const ExperimentConfig& cfg, bool write_files) {
  const auto [k2, loss] = single_problem(cfg);
  cfg.precond.validate(cfg.level);
  const auto disc = discretize(cfg.dim, cfg.level, k2, loss);
  const auto rep = solve_with(disc, cfg.precond, cfg.load, cfg.tol, cfg.max_iter);
  if (write_files) {
    std::filesystem::create_directories(cfg.out);
    CsvTable t({"iteration", "residual", "relative_residual"});
    for (std::size_t i = 0; i < rep.residual_history.size(); ++i) {
      t.add_row({std::to_string(i), format_number(rep.residual_history[i]),
                 format_number(rep.residual_history[i] / rep.rhs_norm)});
    }
    t.write(cfg.out / "residuals.csv");
  }
  auto j = nlohmann::json::parse(rep.to_json());
  j["precond"] = cfg.precond.to_string();
  j["dofs"] = disc.size();
  std::cout << j.dump() << '\n';
  if (!rep.converged) {
    std::cerr << "GMRES did not converge in " << rep.iterations << " iterations\n";
    return kExitNotConverged;
  }
  return 0;
}

int cmd_fov(const ExperimentConfig& cfg, bool write_files) {
  const auto [k2, loss] = single_problem(cfg);
  cfg.precond.validate(cfg.level);
  const auto disc = discretize(cfg.dim, cfg.level, k2, loss);
  FovOptions opts;
  opts.n_angles = cfg.angles;
  opts.eig_tol = cfg.eig_tol;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  const auto op = preconditioned_operator(disc, make_preconditioner(disc, cfg.precond));
  const auto enc = compute_enclosure(op, opts);
  const auto d = diagnostics(enc, disc.fine_mesh().h(), cfg.dim, k2,
                             loss.is_constant() ? std::optional<double>(loss.sigma) : std::nullopt);
  nlohmann::json j;
  j["precond"] = cfg.precond.to_string();
  j["angles"] = cfg.angles;
  j["all_converged"] = enc.all_converged();
  j["flagged_angles"] = enc.flagged_angles();
  j["rectangle"] = {d.outer.re_min, d.outer.re_max, d.outer.im_min, d.outer.im_max};
  const auto sc = d.outer_scaled();
  j["rectangle_scaled"] = {sc.re_min, sc.re_max, sc.im_min, sc.im_max};
  if (d.strip_min) j["strip"] = {*d.strip_min, *d.strip_max};
  j["origin_distance"] = d.origin_distance;
  j["disc_center"] = {d.disc_center.real(), d.disc_center.imag()};
  j["disc_radius"] = d.disc_radius;
  j["disc_bound_applicable"] = d.disc_bound_applicable;
  std::cout << j.dump() << '\n';
  if (write_files) {
    std::filesystem::create_directories(cfg.out);
    std::ofstream csv(cfg.out / "fov.csv");
    write_enclosure_csv(csv, enc);
    SvgPlot plot("field of values of A B (" + cfg.precond.to_string() + ")", "Re", "Im");
    std::vector<XY> poly;
    std::vector<XY> wit;
    for (const auto& v : enc.polygon) poly.emplace_back(v.real(), v.imag());
    for (const auto& w : enc.witnesses) wit.emplace_back(w.real(), w.imag());
    plot.add_polygon(std::move(poly), "#1f77b4", "enclosure");
    plot.add_markers(std::move(wit), "#d62728", "witnesses");
    if (d.strip_min && loss.sigma > 0.0) {
      const double slope = k2 / loss.sigma;
      plot.add_reference_line({*d.strip_min, 0.0}, {*d.strip_min - slope, 1.0}, "black", "strip");
      plot.add_reference_line({*d.strip_max, 0.0}, {*d.strip_max - slope, 1.0}, "black");
    }
    plot.write(cfg.out / "fov.svg");
  }
  return 0;
}

int cmd_experiment(const std::string& name, const Flags& f) {
  auto cfg = build_config(default_config(name), f);
  if (f.level && !f.levels && name == "laplace-fov") cfg.levels = {cfg.level};
  if (f.coarse_level && !f.coarse_levels) cfg.coarse_levels = {*cfg.coarse_level};
  const auto out = run_experiment(name, cfg);
  for (const auto& path : out.write(cfg.out)) std::cout << path.string() << '\n';
  return 0;
}

int cmd_check_stability(const ExperimentConfig& cfg, long grid) {
  if (cfg.kappa2.empty() || cfg.sigma.empty()) throw ConfigError("check stability needs --kappa2 and --sigma");
  bool all_ok = true;
  for (double k2 : cfg.kappa2) {
    for (double s : cfg.sigma) {
      const auto r = check_stability_scalar(k2, s, grid);
      nlohmann::json j;
      j["kappa2"] = r.kappa2;
      j["sigma"] = r.sigma;
      j["x_max"] = r.x_max;
      j["grid_points"] = r.grid_points;
      j["bound"] = r.bound;
      j["grid_max"] = r.grid_max;
      j["argmax"] = r.argmax;
      j["within_bound"] = r.within_bound;
      std::cout << j.dump() << '\n';
      all_ok = all_ok && r.within_bound;
    }
  }
  return all_ok ? 0 : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lossy Helmholtz FEM: preconditioned GMRES and field-of-values tools"};
  app.require_subcommand(1);
  Flags flags;

  auto* mesh = app.add_subcommand("mesh", "mesh queries");
  auto* mesh_info = mesh->add_subcommand("info", "print mesh sizes as JSON");
  mesh->require_subcommand(1);
  add_common(mesh_info, flags);

  auto* assemble_cmd = app.add_subcommand("assemble", "assemble A, K, M, M_sigma");
  add_common(assemble_cmd, flags);

  auto* solve = app.add_subcommand("solve", "right-preconditioned GMRES with load f = 1");
  add_common(solve, flags);

  auto* fov = app.add_subcommand("fov", "field-of-values enclosure of the preconditioned operator");
  add_common(fov, flags);

  std::string exp_name;
  auto* experiment = app.add_subcommand("experiment", "run a named experiment");
  experiment->add_option("name", exp_name, "experiment name")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  add_common(experiment, flags);
  experiment->add_option("--levels", flags.levels, "mesh levels (comma-separated)");
  experiment->add_option("--coarse-levels", flags.coarse_levels, "coarse levels (comma-separated)");
  experiment->add_option("--cycles", flags.cycles, "V-cycle counts (comma-separated)");

  auto* check = app.add_subcommand("check", "analytic checks");
  check->require_subcommand(1);
  auto* stability = check->add_subcommand("stability", "scalar stability bound on a grid");
  add_common(stability, flags);
  stability->add_option("--grid", flags.grid, "grid points")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*mesh_info) return cmd_mesh_info(build_config({}, flags));
    if (*assemble_cmd) return cmd_assemble(build_config({}, flags), flags.out.has_value());
    if (*solve) return cmd_solve(build_config({}, flags), flags.out.has_value());
    if (*fov) return cmd_fov(build_config({}, flags), flags.out.has_value());
    if (*experiment) return cmd_experiment(exp_name, flags);
    if (*stability) return cmd_check_stability(build_config({}, flags), flags.grid);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
