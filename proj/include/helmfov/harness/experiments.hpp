#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "helmfov/fov.hpp"
#include "helmfov/harness/config.hpp"
#include "helmfov/harness/csv.hpp"
#include "helmfov/harness/svg.hpp"
#include "helmfov/krylov.hpp"
#include "helmfov/multigrid.hpp"
#include "helmfov/precond.hpp"

namespace helmfov::harness {

/// CSV tables and SVG plots produced by one experiment run.
struct ExperimentOutput {
  std::vector<std::pair<std::string, CsvTable>> tables;  // file stem -> table
  std::vector<std::pair<std::string, SvgPlot>> plots;    // file stem -> plot

  const CsvTable& table(const std::string& stem) const;
  /// Writes <stem>.csv and <stem>.svg files into dir (created if needed).
  std::vector<std::filesystem::path> write(const std::filesystem::path& dir) const;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};
/// Least-squares line; r2 is 1 when the data has no spread.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// GMRES outcome; non-convergence is written as the "n.c." sentinel.
struct IterationCount {
  int iterations = 0;
  bool converged = false;
  std::string cell() const;
};

/// GMRES with load f = config load on the fine mesh of disc.
SolveReport solve_with(const Discretization& disc, const PrecondSpec& spec, double load, double tol,
                       int max_iter);

// ---------------------------------------------------------------------------

struct LaplaceFovRow {
  int dim = 2;
  int level = 1;
  double h = 0.0;
  double kappa2 = 0.0;
  double sigma = 0.0;
  FovEnclosure enclosure;
  FovDiagnostics diag;
  /// Extreme Rayleigh quotients x^*Mx / x^*x.
  double mass_min = 0.0;
  double mass_max = 0.0;
};

struct LaplaceFovResult {
  std::vector<LaplaceFovRow> rows;
  ExperimentOutput output() const;
};

/// Field of values of A K^{-1} M per (level, kappa2, sigma); constant sigma > 0.
LaplaceFovResult exp_laplace_fov(const ExperimentConfig& cfg);

struct GmresRow {
  int dim = 2;
  int level = 1;
  std::string precond;
  double kappa2 = 0.0;
  std::string loss;
  double sigma = 0.0;  // max loss value
  IterationCount count;
  double final_rel_residual = 0.0;
  double true_rel_residual = 0.0;
  bool monotone = true;
};

struct GmresSweepResult {
  std::vector<GmresRow> rows;
  /// Fit of iterations vs kappa2 per loss profile (converged rows only).
  std::vector<std::pair<std::string, LinearFit>> fits;
  ExperimentOutput output() const;
};

GmresSweepResult exp_gmres_sweep(const ExperimentConfig& cfg);

struct PerturbationRow {
  int cycles = 1;
  Rectangle outer;
  double radius = 0.0;         // max modulus over polygon vertices
  double radius_scaled = 0.0;  // radius / h^d
  double reality_residue = 0.0;
  bool converged = true;
};

struct PerturbationResult {
  int dim = 2;
  int level = 1;
  double kappa2 = 0.0;
  double sigma = 0.0;
  std::vector<PerturbationRow> rows;
  LinearFit log_fit;  // ln(radius) vs N
  double fitted_rate = 0.0;
  ErrorReductionEstimate gamma;
  ExperimentOutput output() const;
};

/// Enclosures of A (K~^{-N} - K^{-1}) M for each N; first kappa2 and loss.
PerturbationResult exp_perturbation_decay(const ExperimentConfig& cfg);

struct StagnationRow {
  int dim = 2;
  int fine_level = 1;
  int coarse_level = 1;
  double kappa2 = 0.0;
  double sigma = 0.0;
  IterationCount count;
  std::optional<double> min_re;
};

struct StagnationSummary {
  double kappa2 = 0.0;
  bool non_increasing = true;
  bool last_two_within = false;
  /// Smallest swept coarse level from which every count is within 15% of
  /// the count at the deepest swept level.
  std::optional<int> stagnation_level;
  /// Smallest swept coarse level with positive min Re of the field of values.
  std::optional<int> positive_min_re_level;
};

struct StagnationResult {
  std::vector<StagnationRow> rows;
  std::vector<StagnationSummary> summaries;
  ExperimentOutput output() const;
};

StagnationResult exp_two_level_stagnation(const ExperimentConfig& cfg);

struct CyclesRow {
  double kappa2 = 0.0;
  double sigma = 0.0;
  int cycles = 0;  // 0 marks the exact Laplace preconditioner
  IterationCount count;
};

struct CyclesSummary {
  double kappa2 = 0.0;
  double sigma = 0.0;
  IterationCount exact;
  /// Counts never rise by more than one from one N to the next.
  bool non_increasing = true;
  /// Count at the largest N equals the exact-Laplace count.
  bool reaches_exact = false;
};

struct CyclesResult {
  std::vector<CyclesRow> rows;
  std::vector<CyclesSummary> summaries;
  ExperimentOutput output() const;
};

/// GMRES counts with K~^{-N} M for each N against K^{-1} M.
CyclesResult exp_mg_cycles(const ExperimentConfig& cfg);

struct DiscBoundRow {
  double kappa2 = 0.0;
  double sigma = 0.0;
  FovDiagnostics diag;
  IterationCount count;
  std::vector<double> residuals;
  /// max_i |r_i| / ((s/|c|)^i |r_0|); meaningful when the bound applies.
  double worst_ratio = 0.0;
  bool holds = true;
};

struct DiscBoundResult {
  std::vector<DiscBoundRow> rows;
  ExperimentOutput output() const;
};

/// GMRES residuals with K^{-1} M against the disc bound from its enclosure.
DiscBoundResult exp_disc_bound(const ExperimentConfig& cfg);

struct StabilityReport {
  double kappa2 = 0.0;
  double sigma = 0.0;
  double x_max = 0.0;
  long grid_points = 0;
  double bound = 0.0;
  double grid_max = 0.0;
  double argmax = 0.0;
  bool within_bound = false;
};

/// Brute-force sup of x / |x - kappa2 + i sigma| on a uniform grid of
/// (0, x_max] against sqrt(kappa2^2 + sigma^2) / sigma.
StabilityReport check_stability_scalar(double kappa2, double sigma, long grid_points = 10000,
                                       std::optional<double> x_max = std::nullopt);

ExperimentOutput exp_stability(const ExperimentConfig& cfg);

/// Experiment names accepted by run_experiment.
const std::vector<std::string>& experiment_names();
/// Configuration with the sweep defaults of the named experiment.
ExperimentConfig default_config(const std::string& name);
ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& cfg);

}  // namespace helmfov::harness
