#include "helmfov/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "helmfov/parallel.hpp"

namespace helmfov::harness {
namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string fmt(double v) { return format_number(v); }
std::string fmt_bool(bool b) { return b ? "1" : "0"; }

std::string tag(double v) {
  std::string s = format_number(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

FovOptions fov_options(const ExperimentConfig& cfg) {
  FovOptions o;
  o.n_angles = cfg.angles;
  o.eig_tol = cfg.eig_tol;
  o.seed = cfg.seed;
  o.threads = 1;
  return o;
}

double sigma_of(const LossProfile& loss) { return loss.max_value(); }

std::vector<double> require_list(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ConfigError(std::string("experiment needs a non-empty ") + what + " list");
  return v;
}

std::vector<LossProfile> require_losses(const ExperimentConfig& cfg) {
  auto l = cfg.losses();
  if (l.empty()) throw ConfigError("experiment needs sigma values or a sigma box");
  return l;
}

double extreme_mass_quotient(const HelmholtzProblem& p, bool largest, const FovOptions& o) {
  LanczosOptions lo;
  lo.tol = o.eig_tol;
  lo.max_iter = o.max_lanczos;
  lo.seed = o.seed;
  const auto m = mass_operator(p);
  if (largest) return lanczos_max_eig(m, lo).eigenvalue;
  return -lanczos_max_eig(scaled(-1.0, m), lo).eigenvalue;
}

double min_real_part(const LinearOperator& op, const FovOptions& o) {
  return -support_value(op, Complex(-1.0, 0.0), o);
}

bool within_fraction(int a, int b, double frac) {
  return std::abs(a - b) <= frac * std::max(a, b);
}

}  // namespace

const CsvTable& ExperimentOutput::table(const std::string& stem) const {
  for (const auto& [name, t] : tables) {
    if (name == stem) return t;
  }
  throw std::out_of_range("ExperimentOutput: no table '" + stem + "'");
}

std::vector<std::filesystem::path> ExperimentOutput::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  for (const auto& [stem, t] : tables) {
    files.push_back(dir / (stem + ".csv"));
    t.write(files.back());
  }
  for (const auto& [stem, p] : plots) {
    files.push_back(dir / (stem + ".svg"));
    p.write(files.back());
  }
  return files;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("linear_fit: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit f;
  f.points = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

std::string IterationCount::cell() const { return converged ? std::to_string(iterations) : "n.c."; }

SolveReport solve_with(const Discretization& disc, const PrecondSpec& spec, double load, double tol,
                       int max_iter) {
  const CVector b = assemble_load_constant(disc.fine_mesh(), Complex(load, 0.0));
  const auto precond = make_preconditioner(disc, spec);
  return gmres_right(system_operator(*disc.problem), precond, b, GmresOptions{tol, max_iter}).report;
}

// --------------------------------------------------------------- laplace-fov

LaplaceFovResult exp_laplace_fov(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.levels.empty()) throw ConfigError("laplace-fov needs a levels list");
  const auto kappas = require_list(cfg.kappa2, "kappa2");
  if (cfg.sigma_box) throw ConfigError("laplace-fov needs a constant sigma");
  const auto sigmas = require_list(cfg.sigma, "sigma");
  for (double s : sigmas) {
    if (!(s > 0.0)) throw ConfigError("laplace-fov needs sigma > 0");
  }

  std::vector<Discretization> bases;
  for (int level : cfg.levels) bases.push_back(discretize(cfg.dim, level, 0.0, LossProfile::constant(0.0)));

  LaplaceFovResult res;
  for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
    for (double k2 : kappas) {
      for (double s : sigmas) {
        LaplaceFovRow row;
        row.dim = cfg.dim;
        row.level = cfg.levels[li];
        row.h = bases[li].fine_mesh().h();
        row.kappa2 = k2;
        row.sigma = s;
        res.rows.push_back(std::move(row));
      }
    }
  }
  const auto opts = fov_options(cfg);
  const std::size_t per_level = kappas.size() * sigmas.size();
  parallel_for(static_cast<int>(res.rows.size()), cfg.threads, [&](int i) {
    auto& row = res.rows[static_cast<std::size_t>(i)];
    const auto disc =
        with_coefficients(bases[static_cast<std::size_t>(i) / per_level], row.kappa2, LossProfile::constant(row.sigma));
    const auto op = preconditioned_operator(disc, exact_laplace_preconditioner(disc));
    row.enclosure = compute_enclosure(op, opts);
    row.diag = diagnostics(row.enclosure, row.h, row.dim, row.kappa2, row.sigma);
    row.mass_min = extreme_mass_quotient(*disc.problem, false, opts);
    row.mass_max = extreme_mass_quotient(*disc.problem, true, opts);
  });
  return res;
}

ExperimentOutput LaplaceFovResult::output() const {
  ExperimentOutput out;
  CsvTable t({"dim", "level", "h", "kappa2", "sigma", "angles", "re_min", "re_max", "im_min",
              "im_max", "witness_re_min", "witness_re_max", "witness_im_min", "witness_im_max",
              "re_min_scaled", "re_max_scaled", "im_min_scaled", "im_max_scaled", "strip_min",
              "strip_max", "strip_min_scaled", "strip_max_scaled", "mass_min", "mass_max",
              "im_lower_ok", "re_upper_ok", "converged"});
  for (const auto& r : rows) {
    const auto& d = r.diag;
    const auto sc = d.outer_scaled();
    t.add_row({std::to_string(r.dim), std::to_string(r.level), fmt(r.h), fmt(r.kappa2), fmt(r.sigma),
               std::to_string(r.enclosure.angles.size()), fmt(d.outer.re_min), fmt(d.outer.re_max),
               fmt(d.outer.im_min), fmt(d.outer.im_max), fmt(d.inner.re_min), fmt(d.inner.re_max),
               fmt(d.inner.im_min), fmt(d.inner.im_max), fmt(sc.re_min), fmt(sc.re_max),
               fmt(sc.im_min), fmt(sc.im_max), fmt(*d.strip_min), fmt(*d.strip_max),
               fmt(*d.strip_min_scaled()), fmt(*d.strip_max_scaled()), fmt(r.mass_min),
               fmt(r.mass_max), fmt_bool(d.inner.im_min >= -1e-10),
               fmt_bool(d.inner.re_max <= r.mass_max + 1e-10),
               fmt_bool(r.enclosure.all_converged())});
  }
  out.tables.emplace_back("laplace_fov", std::move(t));

  // One plot per (kappa2, sigma) overlaying the h^d-scaled enclosures of all levels.
  std::vector<std::pair<double, double>> params;
  for (const auto& r : rows) {
    if (std::find(params.begin(), params.end(), std::make_pair(r.kappa2, r.sigma)) == params.end()) {
      params.emplace_back(r.kappa2, r.sigma);
    }
  }
  for (const auto& [k2, s] : params) {
    SvgPlot plot("scaled field of values, kappa2=" + fmt(k2) + ", sigma=" + fmt(s), "Re / h^d",
                 "Im / h^d");
    std::size_t c = 0;
    const LaplaceFovRow* last = nullptr;
    for (const auto& r : rows) {
      if (r.kappa2 != k2 || r.sigma != s) continue;
      std::vector<XY> pts;
      for (const auto& v : r.enclosure.polygon) {
        pts.emplace_back(v.real() / r.diag.h_pow_d, v.imag() / r.diag.h_pow_d);
      }
      plot.add_polygon(std::move(pts), color(c++), "level " + std::to_string(r.level));
      last = &r;
    }
    if (last) {
      const double slope = k2 / s;
      plot.add_reference_line({0.0, 0.0}, {1.0, 0.0}, "gray", "Im = 0");
      for (double c0 : {*last->diag.strip_min_scaled(), *last->diag.strip_max_scaled()}) {
        plot.add_reference_line({c0, 0.0}, {c0 - slope, 1.0}, "black");
      }
    }
    out.plots.emplace_back("laplace_fov_k" + tag(k2) + "_s" + tag(s), std::move(plot));
  }
  return out;
}

// --------------------------------------------------------------- gmres-sweep

GmresSweepResult exp_gmres_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  cfg.precond.validate(cfg.level);
  const auto kappas = require_list(cfg.kappa2, "kappa2");
  const auto losses = require_losses(cfg);
  const auto base = discretize(cfg.dim, cfg.level, 0.0, LossProfile::constant(0.0));

  GmresSweepResult res;
  for (const auto& loss : losses) {
    for (double k2 : kappas) {
      GmresRow row;
      row.dim = cfg.dim;
      row.level = cfg.level;
      row.precond = cfg.precond.to_string();
      row.kappa2 = k2;
      row.loss = loss.to_string();
      row.sigma = sigma_of(loss);
      res.rows.push_back(row);
    }
  }
  parallel_for(static_cast<int>(res.rows.size()), cfg.threads, [&](int i) {
    auto& row = res.rows[static_cast<std::size_t>(i)];
    const auto& loss = losses[static_cast<std::size_t>(i) / kappas.size()];
    const auto disc = with_coefficients(base, row.kappa2, loss);
    const auto rep = solve_with(disc, cfg.precond, cfg.load, cfg.tol, cfg.max_iter);
    row.count = {rep.iterations, rep.converged};
    row.final_rel_residual = rep.final_residual() / rep.rhs_norm;
    row.true_rel_residual = rep.true_final_residual / rep.rhs_norm;
    row.monotone = rep.history_non_increasing();
  });

  for (std::size_t li = 0; li < losses.size(); ++li) {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = 0; k < kappas.size(); ++k) {
      const auto& row = res.rows[li * kappas.size() + k];
      if (!row.count.converged) continue;
      x.push_back(row.kappa2);
      y.push_back(row.count.iterations);
    }
    LinearFit fit;
    fit.points = static_cast<int>(x.size());
    if (x.size() >= 2) fit = linear_fit(x, y);
    res.fits.emplace_back(losses[li].to_string(), fit);
  }
  return res;
}

ExperimentOutput GmresSweepResult::output() const {
  ExperimentOutput out;
  CsvTable t({"dim", "level", "precond", "kappa2", "loss", "sigma", "iterations", "converged",
              "final_rel_residual", "true_rel_residual", "monotone"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.dim), std::to_string(r.level), r.precond, fmt(r.kappa2), r.loss,
               fmt(r.sigma), r.count.cell(), fmt_bool(r.count.converged), fmt(r.final_rel_residual),
               fmt(r.true_rel_residual), fmt_bool(r.monotone)});
  }
  out.tables.emplace_back("gmres_sweep", std::move(t));
  CsvTable f({"loss", "points", "slope", "intercept", "r2"});
  for (const auto& [loss, fit] : fits) {
    f.add_row({loss, std::to_string(fit.points), fmt(fit.slope), fmt(fit.intercept), fmt(fit.r2)});
  }
  out.tables.emplace_back("gmres_sweep_fit", std::move(f));

  SvgPlot plot("GMRES iterations", "kappa2", "iterations");
  std::size_t c = 0;
  for (const auto& [loss, fit] : fits) {
    std::vector<XY> pts;
    for (const auto& r : rows) {
      if (r.loss == loss && r.count.converged) pts.emplace_back(r.kappa2, r.count.iterations);
    }
    plot.add_markers(pts, color(c));
    plot.add_polyline(std::move(pts), color(c++), loss);
  }
  out.plots.emplace_back("gmres_sweep", std::move(plot));
  return out;
}

// -------------------------------------------------------- perturbation-decay

PerturbationResult exp_perturbation_decay(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto kappas = require_list(cfg.kappa2, "kappa2");
  const auto losses = require_losses(cfg);
  if (cfg.cycles.empty()) throw ConfigError("perturbation-decay needs a cycles list");
  const auto disc = discretize(cfg.dim, cfg.level, kappas.front(), losses.front());

  PerturbationResult res;
  res.dim = cfg.dim;
  res.level = cfg.level;
  res.kappa2 = kappas.front();
  res.sigma = sigma_of(losses.front());
  res.rows.resize(cfg.cycles.size());
  const auto opts = fov_options(cfg);
  const double hd = disc.fine_mesh().h_pow_d();
  parallel_for(static_cast<int>(cfg.cycles.size()), cfg.threads, [&](int i) {
    auto& row = res.rows[static_cast<std::size_t>(i)];
    row.cycles = cfg.cycles[static_cast<std::size_t>(i)];
    const auto enc = compute_enclosure(perturbation_operator(disc, row.cycles), opts);
    row.outer = bounding_box(enc.polygon);
    for (const auto& v : enc.polygon) row.radius = std::max(row.radius, std::abs(v));
    row.radius_scaled = row.radius / hd;
    row.converged = enc.all_converged();
    for (int s = 0; s < 8; ++s) {
      const CVector x = random_unit_vector(disc.size(), cfg.seed + 1000u + static_cast<unsigned>(s));
      const CVector v = disc.problem->mass.multiply(x);
      const CVector d = disc.mg->apply_n_cycles(v, row.cycles) - disc.laplace->solve(v);
      const Complex t = v.dot(d);
      if (std::abs(t) > 0.0) row.reality_residue = std::max(row.reality_residue, std::abs(t.imag()) / std::abs(t));
    }
  });

  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : res.rows) {
    if (r.radius > 0.0) {
      x.push_back(r.cycles);
      y.push_back(std::log(r.radius));
    }
  }
  if (x.size() >= 2) {
    res.log_fit = linear_fit(x, y);
    res.fitted_rate = std::exp(res.log_fit.slope);
  }
  res.gamma = measure_gamma(*disc.mg, 3, 30, cfg.seed);
  return res;
}

ExperimentOutput PerturbationResult::output() const {
  ExperimentOutput out;
  CsvTable t({"dim", "level", "kappa2", "sigma", "cycles", "re_min", "re_max", "im_min", "im_max",
              "radius", "radius_scaled", "reality_residue", "converged"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(dim), std::to_string(level), fmt(kappa2), fmt(sigma),
               std::to_string(r.cycles), fmt(r.outer.re_min), fmt(r.outer.re_max), fmt(r.outer.im_min),
               fmt(r.outer.im_max), fmt(r.radius), fmt(r.radius_scaled), fmt(r.reality_residue),
               fmt_bool(r.converged)});
  }
  out.tables.emplace_back("perturbation_decay", std::move(t));
  CsvTable f({"points", "log_slope", "log_intercept", "r2", "fitted_rate", "gamma0", "gamma1"});
  f.add_row({std::to_string(log_fit.points), fmt(log_fit.slope), fmt(log_fit.intercept),
             fmt(log_fit.r2), fmt(fitted_rate), fmt(gamma.gamma0), fmt(gamma.gamma1)});
  out.tables.emplace_back("perturbation_decay_fit", std::move(f));

  SvgPlot plot("perturbation enclosure radius", "V-cycles N", "log10(radius / h^d)");
  std::vector<XY> pts;
  for (const auto& r : rows) {
    if (r.radius_scaled > 0.0) pts.emplace_back(r.cycles, std::log10(r.radius_scaled));
  }
  plot.add_markers(pts, color(0));
  plot.add_polyline(std::move(pts), color(0), "measured");
  out.plots.emplace_back("perturbation_decay", std::move(plot));
  return out;
}

// ----------------------------------------------------- two-level-stagnation

StagnationResult exp_two_level_stagnation(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto kappas = require_list(cfg.kappa2, "kappa2");
  const auto losses = require_losses(cfg);
  if (cfg.coarse_levels.empty()) throw ConfigError("two-level-stagnation needs coarse_levels");
  for (int l : cfg.coarse_levels) {
    if (l > cfg.level) throw ConfigError("coarse level above the fine level");
  }
  const auto base = discretize(cfg.dim, cfg.level, 0.0, LossProfile::constant(0.0));
  const auto opts = fov_options(cfg);

  StagnationResult res;
  for (double k2 : kappas) {
    for (int l : cfg.coarse_levels) {
      StagnationRow row;
      row.dim = cfg.dim;
      row.fine_level = cfg.level;
      row.coarse_level = l;
      row.kappa2 = k2;
      row.sigma = sigma_of(losses.front());
      res.rows.push_back(row);
    }
  }
  parallel_for(static_cast<int>(res.rows.size()), cfg.threads, [&](int i) {
    auto& row = res.rows[static_cast<std::size_t>(i)];
    const auto disc = with_coefficients(base, row.kappa2, losses.front());
    const auto spec = PrecondSpec::two_level(row.coarse_level);
    const auto rep = solve_with(disc, spec, cfg.load, cfg.tol, cfg.max_iter);
    row.count = {rep.iterations, rep.converged};
    if (cfg.min_re) {
      row.min_re = min_real_part(preconditioned_operator(disc, make_preconditioner(disc, spec)), opts);
    }
  });

  const std::size_t nl = cfg.coarse_levels.size();
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    StagnationSummary s;
    s.kappa2 = kappas[k];
    const auto at = [&](std::size_t j) -> const StagnationRow& { return res.rows[k * nl + j]; };
    for (std::size_t j = 1; j < nl; ++j) {
      const auto& a = at(j - 1).count;
      const auto& b = at(j).count;
      if (!b.converged && a.converged) s.non_increasing = false;
      if (a.converged && b.converged && b.iterations > a.iterations) s.non_increasing = false;
    }
    if (nl >= 2) {
      const auto& a = at(nl - 2).count;
      const auto& b = at(nl - 1).count;
      s.last_two_within = a.converged && b.converged && within_fraction(a.iterations, b.iterations, 0.15);
    }
    const auto& last = at(nl - 1).count;
    if (last.converged) {
      for (std::size_t j = 0; j < nl; ++j) {
        bool ok = true;
        for (std::size_t q = j; q < nl; ++q) {
          const auto& c = at(q).count;
          ok = ok && c.converged && within_fraction(c.iterations, last.iterations, 0.15);
        }
        if (ok) {
          s.stagnation_level = at(j).coarse_level;
          break;
        }
      }
    }
    for (std::size_t j = 0; j < nl; ++j) {
      if (at(j).min_re && *at(j).min_re > 0.0) {
        s.positive_min_re_level = at(j).coarse_level;
        break;
      }
    }
    res.summaries.push_back(s);
  }
  return res;
}

ExperimentOutput StagnationResult::output() const {
  ExperimentOutput out;
  CsvTable t({"dim", "fine_level", "coarse_level", "kappa", "kappa2", "sigma", "iterations",
              "converged", "min_re"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.dim), std::to_string(r.fine_level), std::to_string(r.coarse_level),
               fmt(std::sqrt(r.kappa2)), fmt(r.kappa2), fmt(r.sigma), r.count.cell(),
               fmt_bool(r.count.converged), r.min_re ? fmt(*r.min_re) : "-"});
  }
  out.tables.emplace_back("two_level_stagnation", std::move(t));
  CsvTable s({"kappa2", "non_increasing", "last_two_within_15pct", "stagnation_level",
              "positive_min_re_level"});
  for (const auto& q : summaries) {
    s.add_row({fmt(q.kappa2), fmt_bool(q.non_increasing), fmt_bool(q.last_two_within),
               q.stagnation_level ? std::to_string(*q.stagnation_level) : "-",
               q.positive_min_re_level ? std::to_string(*q.positive_min_re_level) : "-"});
  }
  out.tables.emplace_back("two_level_stagnation_summary", std::move(s));

  SvgPlot plot("two-level GMRES iterations", "coarse level", "iterations");
  SvgPlot re_plot("minimum real part of the field of values", "coarse level", "min Re");
  bool any_re = false;
  std::size_t c = 0;
  for (const auto& q : summaries) {
    std::vector<XY> pts;
    std::vector<XY> re_pts;
    for (const auto& r : rows) {
      if (r.kappa2 != q.kappa2) continue;
      if (r.count.converged) pts.emplace_back(r.coarse_level, r.count.iterations);
      if (r.min_re) re_pts.emplace_back(r.coarse_level, *r.min_re);
    }
    const std::string label = "kappa=" + fmt(std::round(std::sqrt(q.kappa2) * 1e3) / 1e3);
    plot.add_markers(pts, color(c));
    plot.add_polyline(std::move(pts), color(c), label);
    if (!re_pts.empty()) {
      any_re = true;
      re_plot.add_markers(re_pts, color(c));
      re_plot.add_polyline(std::move(re_pts), color(c), label);
    }
    ++c;
  }
  out.plots.emplace_back("two_level_stagnation", std::move(plot));
  if (any_re) {
    re_plot.add_reference_line({0.0, 0.0}, {1.0, 0.0}, "gray");
    out.plots.emplace_back("two_level_min_re", std::move(re_plot));
  }
  return out;
}

// ----------------------------------------------------------------- mg-cycles

CyclesResult exp_mg_cycles(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto kappas = require_list(cfg.kappa2, "kappa2");
  const auto losses = require_losses(cfg);
  if (cfg.cycles.empty()) throw ConfigError("mg-cycles needs a cycles list");
  const auto base = discretize(cfg.dim, cfg.level, 0.0, LossProfile::constant(0.0));

  CyclesResult res;
  const std::size_t per = cfg.cycles.size() + 1;
  for (const auto& loss : losses) {
    for (double k2 : kappas) {
      res.rows.push_back({k2, sigma_of(loss), 0, {}});
      for (int n : cfg.cycles) res.rows.push_back({k2, sigma_of(loss), n, {}});
    }
  }
  parallel_for(static_cast<int>(res.rows.size()), cfg.threads, [&](int i) {
    auto& row = res.rows[static_cast<std::size_t>(i)];
    const auto& loss = losses[static_cast<std::size_t>(i) / (per * kappas.size())];
    const auto disc = with_coefficients(base, row.kappa2, loss);
    const auto spec = row.cycles == 0 ? PrecondSpec::exact_laplace() : PrecondSpec::mg_laplace(row.cycles);
    const auto rep = solve_with(disc, spec, cfg.load, cfg.tol, cfg.max_iter);
    row.count = {rep.iterations, rep.converged};
  });

  for (std::size_t g = 0; g < res.rows.size(); g += per) {
    CyclesSummary s;
    s.kappa2 = res.rows[g].kappa2;
    s.sigma = res.rows[g].sigma;
    s.exact = res.rows[g].count;
    for (std::size_t j = g + 2; j < g + per; ++j) {
      const auto& a = res.rows[j - 1].count;
      const auto& b = res.rows[j].count;
      if (!b.converged && a.converged) s.non_increasing = false;
      if (a.converged && b.converged && b.iterations > a.iterations + 1) s.non_increasing = false;
    }
    const auto& last = res.rows[g + per - 1].count;
    s.reaches_exact = last.converged && s.exact.converged && last.iterations == s.exact.iterations;
    res.summaries.push_back(s);
  }
  return res;
}

ExperimentOutput CyclesResult::output() const {
  ExperimentOutput out;
  CsvTable t({"kappa2", "sigma", "precond", "cycles", "iterations", "converged"});
  for (const auto& r : rows) {
    t.add_row({fmt(r.kappa2), fmt(r.sigma), r.cycles == 0 ? "laplace" : "mg:" + std::to_string(r.cycles),
               std::to_string(r.cycles), r.count.cell(), fmt_bool(r.count.converged)});
  }
  out.tables.emplace_back("mg_cycles", std::move(t));
  CsvTable s({"kappa2", "sigma", "exact_iterations", "non_increasing_pm1", "reaches_exact"});
  for (const auto& q : summaries) {
    s.add_row({fmt(q.kappa2), fmt(q.sigma), q.exact.cell(), fmt_bool(q.non_increasing),
               fmt_bool(q.reaches_exact)});
  }
  out.tables.emplace_back("mg_cycles_summary", std::move(s));

  SvgPlot plot("GMRES iterations with N V-cycles", "N", "iterations");
  std::size_t c = 0;
  for (const auto& q : summaries) {
    std::vector<XY> pts;
    for (const auto& r : rows) {
      if (r.kappa2 == q.kappa2 && r.sigma == q.sigma && r.cycles > 0 && r.count.converged) {
        pts.emplace_back(r.cycles, r.count.iterations);
      }
    }
    if (q.exact.converged) {
      plot.add_reference_line({0.0, static_cast<double>(q.exact.iterations)},
                              {1.0, static_cast<double>(q.exact.iterations)}, color(c));
    }
    plot.add_markers(pts, color(c));
    plot.add_polyline(std::move(pts), color(c), "kappa2=" + fmt(q.kappa2) + ", sigma=" + fmt(q.sigma));
    ++c;
  }
  out.plots.emplace_back("mg_cycles", std::move(plot));
  return out;
}

// ---------------------------------------------------------------- disc-bound

DiscBoundResult exp_disc_bound(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto kappas = require_list(cfg.kappa2, "kappa2");
  const auto losses = require_losses(cfg);
  const auto base = discretize(cfg.dim, cfg.level, 0.0, LossProfile::constant(0.0));
  const auto opts = fov_options(cfg);

  DiscBoundResult res;
  for (const auto& loss : losses) {
    for (double k2 : kappas) res.rows.push_back({k2, sigma_of(loss), {}, {}, {}, 0.0, true});
  }
  parallel_for(static_cast<int>(res.rows.size()), cfg.threads, [&](int i) {
    auto& row = res.rows[static_cast<std::size_t>(i)];
    const auto& loss = losses[static_cast<std::size_t>(i) / kappas.size()];
    const auto disc = with_coefficients(base, row.kappa2, loss);
    const auto op = preconditioned_operator(disc, exact_laplace_preconditioner(disc));
    const auto enc = compute_enclosure(op, opts);
    row.diag = diagnostics(enc, disc.fine_mesh().h(), disc.dim(), row.kappa2,
                           loss.is_constant() ? std::optional<double>(loss.sigma) : std::nullopt);
    const auto rep = solve_with(disc, PrecondSpec::exact_laplace(), cfg.load, cfg.tol, cfg.max_iter);
    row.count = {rep.iterations, rep.converged};
    row.residuals = rep.residual_history;
    if (row.diag.origin_distance > 0.0) {
      const double rho = row.diag.disc_ratio();
      for (std::size_t k = 0; k < row.residuals.size(); ++k) {
        const double bound = std::pow(rho, static_cast<double>(k)) * row.residuals[0];
        row.worst_ratio = std::max(row.worst_ratio, row.residuals[k] / bound);
      }
      row.holds = row.worst_ratio <= 1.05;
    }
  });
  return res;
}

ExperimentOutput DiscBoundResult::output() const {
  ExperimentOutput out;
  CsvTable t({"kappa2", "sigma", "disc_center_re", "disc_center_im", "disc_radius", "disc_ratio",
              "origin_excluded", "disc_applicable", "iterations", "converged", "worst_ratio", "holds"});
  for (const auto& r : rows) {
    t.add_row({fmt(r.kappa2), fmt(r.sigma), fmt(r.diag.disc_center.real()), fmt(r.diag.disc_center.imag()),
               fmt(r.diag.disc_radius), fmt(r.diag.disc_ratio()), fmt_bool(r.diag.origin_distance > 0.0),
               fmt_bool(r.diag.disc_bound_applicable), r.count.cell(), fmt_bool(r.count.converged),
               fmt(r.worst_ratio), fmt_bool(r.holds)});
  }
  out.tables.emplace_back("disc_bound", std::move(t));

  SvgPlot plot("GMRES residuals against the disc bound", "iteration", "log10 |r_i| / |r_0|");
  std::size_t c = 0;
  for (const auto& r : rows) {
    std::vector<XY> meas;
    std::vector<XY> bound;
    for (std::size_t k = 0; k < r.residuals.size(); ++k) {
      meas.emplace_back(k, std::log10(r.residuals[k] / r.residuals[0]));
      bound.emplace_back(k, k * std::log10(r.diag.disc_ratio()));
    }
    plot.add_polyline(std::move(meas), color(c), "kappa2=" + fmt(r.kappa2));
    if (r.diag.origin_distance > 0.0) plot.add_polyline(std::move(bound), color(c));
    ++c;
  }
  out.plots.emplace_back("disc_bound", std::move(plot));
  return out;
}

// ----------------------------------------------------------------- stability

StabilityReport check_stability_scalar(double kappa2, double sigma, long grid_points,
                                       std::optional<double> x_max) {
  if (!(sigma > 0.0)) throw std::invalid_argument("check_stability_scalar: sigma must be positive");
  if (!(kappa2 >= 0.0)) throw std::invalid_argument("check_stability_scalar: kappa2 must be >= 0");
  if (grid_points < 1) throw std::invalid_argument("check_stability_scalar: empty grid");
  StabilityReport r;
  r.kappa2 = kappa2;
  r.sigma = sigma;
  r.x_max = x_max.value_or(10.0 * std::max(kappa2, 1.0));
  if (!(r.x_max > 0.0)) throw std::invalid_argument("check_stability_scalar: x_max must be positive");
  r.grid_points = grid_points;
  r.bound = std::hypot(kappa2, sigma) / sigma;
  for (long i = 1; i <= grid_points; ++i) {
    const double x = r.x_max * static_cast<double>(i) / static_cast<double>(grid_points);
    const double f = x / std::hypot(x - kappa2, sigma);
    if (f > r.grid_max) {
      r.grid_max = f;
      r.argmax = x;
    }
  }
  r.within_bound = r.grid_max <= r.bound * (1.0 + 1e-12);
  return r;
}

ExperimentOutput exp_stability(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto kappas = require_list(cfg.kappa2, "kappa2");
  const auto sigmas = require_list(cfg.sigma, "sigma");
  ExperimentOutput out;
  CsvTable t({"kappa2", "sigma", "x_max", "grid_points", "bound", "grid_max", "argmax", "ratio",
              "within_bound"});
  SvgPlot plot("x / |x - kappa2 + i sigma| relative to its bound", "x / x_max", "value / bound");
  std::size_t c = 0;
  for (double k2 : kappas) {
    for (double s : sigmas) {
      const auto r = check_stability_scalar(k2, s);
      t.add_row({fmt(k2), fmt(s), fmt(r.x_max), std::to_string(r.grid_points), fmt(r.bound),
                 fmt(r.grid_max), fmt(r.argmax), fmt(r.grid_max / r.bound), fmt_bool(r.within_bound)});
      std::vector<XY> pts;
      for (int i = 1; i <= 400; ++i) {
        const double x = r.x_max * i / 400.0;
        pts.emplace_back(i / 400.0, x / std::hypot(x - k2, s) / r.bound);
      }
      plot.add_polyline(std::move(pts), color(c++), "kappa2=" + fmt(k2) + ", sigma=" + fmt(s));
    }
  }
  plot.add_reference_line({0.0, 1.0}, {1.0, 1.0}, "black");
  out.tables.emplace_back("stability", std::move(t));
  out.plots.emplace_back("stability", std::move(plot));
  return out;
}

// ----------------------------------------------------------------- registry

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"laplace-fov", "gmres-sweep", "perturbation-decay",
                                              "two-level-stagnation", "mg-cycles", "disc-bound",
                                              "stability"};
  return names;
}

ExperimentConfig default_config(const std::string& name) {
  ExperimentConfig c;
  const double pi = std::numbers::pi;
  if (name == "laplace-fov") {
    c.levels = {1, 2, 3, 4};
    c.kappa2 = {1.0, 10.0, 50.0};
    c.sigma = {1.0};
  } else if (name == "gmres-sweep") {
    c.level = 6;
    for (int k = 100; k <= 1000; k += 100) c.kappa2.push_back(k);
    c.sigma = {5.0, 10.0};
  } else if (name == "perturbation-decay") {
    c.level = 4;
    c.kappa2 = {1000.0};
    c.sigma = {5.0};
    for (int n = 1; n <= 10; ++n) c.cycles.push_back(n);
  } else if (name == "two-level-stagnation") {
    c.level = 6;
    c.coarse_levels = {1, 2, 3, 4, 5};
    c.kappa2 = {16 * pi * pi, 36 * pi * pi, 100 * pi * pi};
    c.sigma = {7.0};
  } else if (name == "mg-cycles") {
    c.level = 5;
    c.kappa2 = {100.0, 1000.0};
    c.sigma = {5.0};
    for (int n = 1; n <= 10; ++n) c.cycles.push_back(n);
  } else if (name == "disc-bound") {
    c.level = 4;
    c.kappa2 = {1.0, 10.0};
    c.sigma = {5.0};
  } else if (name == "stability") {
    c.kappa2 = {0.0, 100.0, 1000.0};
    c.sigma = {1.0, 5.0};
  } else {
    throw ConfigError("unknown experiment '" + name + "'");
  }
  return c;
}

ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "laplace-fov") return exp_laplace_fov(cfg).output();
  if (name == "gmres-sweep") return exp_gmres_sweep(cfg).output();
  if (name == "perturbation-decay") return exp_perturbation_decay(cfg).output();
  if (name == "two-level-stagnation") return exp_two_level_stagnation(cfg).output();
  if (name == "mg-cycles") return exp_mg_cycles(cfg).output();
  if (name == "disc-bound") return exp_disc_bound(cfg).output();
  if (name == "stability") return exp_stability(cfg);
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace helmfov::harness
