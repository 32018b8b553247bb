#include "ewslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "ewslab/csv.hpp"
#include "ewslab/error.hpp"
#include "ewslab/parallel.hpp"
#include "ewslab/report.hpp"
#include "ewslab/rng.hpp"

namespace ewslab {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) fail(ErrorKind::ValidationError, "cannot write " + file.string());
  return out;
}

void write_text(const fs::path& file, const std::string& text) { open_out(file) << text; }

std::string sign_text(int s) { return s > 0 ? "+" : (s < 0 ? "-" : "0"); }

}  // namespace

// --- fig1 -------------------------------------------------------------------

Fig1Result compute_fig1(const ExperimentConfig& cfg) {
  cfg.validate();
  Fig1Result r;
  r.lambda_x = ou::uniform_grid(cfg.grids.lambda_min, cfg.ou.lambda_y, cfg.grids.fig1_points);
  r.var_psi.reserve(r.lambda_x.size());
  r.ac1_psi.reserve(r.lambda_x.size());
  for (double lx : r.lambda_x) {
    const ou::OUParams p = cfg.ou.with_lambda_x(lx);
    r.var_psi.push_back(ou::observable_variance(p, cfg.obs));
    r.ac1_psi.push_back(ou::observable_autocorrelation(p, cfg.obs, 1.0));
  }
  r.turning_points = ou::lambda_star(cfg.ou, cfg.obs, cfg.grids.lambda_min, cfg.ou.lambda_y);
  return r;
}

void write_fig1(const Fig1Result& r, const ExperimentConfig& cfg, const fs::path& dir) {
  auto out = open_out(dir / "fig1.csv");
  out << "lambda_x,var_psi,ac1_psi\n";
  for (std::size_t i = 0; i < r.lambda_x.size(); ++i) {
    CsvRow(out) << r.lambda_x[i] << r.var_psi[i] << r.ac1_psi[i];
  }
  if (cfg.emit_svg) {
    write_text(dir / "fig1_var.svg",
               report::svg_line_plot("Var[Psi] vs lambda_x", "lambda_x", "variance",
                                     {{"Var[Psi]", r.lambda_x, r.var_psi}}));
    write_text(dir / "fig1_ac1.svg",
               report::svg_line_plot("AC(1) of Psi vs lambda_x", "lambda_x", "AC(1)",
                                     {{"AC(1)", r.lambda_x, r.ac1_psi}}));
  }
}

// --- fig2 -------------------------------------------------------------------

std::size_t Fig2Result::blue_cells_var() const {
  return static_cast<std::size_t>(std::count(map.var_sign.begin(), map.var_sign.end(), 1));
}

std::size_t Fig2Result::blue_cells_ac() const {
  return static_cast<std::size_t>(std::count(map.ac_sign.begin(), map.ac_sign.end(), 1));
}

Fig2Result compute_fig2(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto betas = ou::default_beta_grid(cfg.grids.beta_points);
  const auto lambdas =
      ou::uniform_grid(cfg.grids.lambda_min, cfg.ou.lambda_y, cfg.grids.lambda_points);
  Fig2Result r;
  r.map = ou::trend_sign_map(cfg.ou, betas, lambdas);
  r.var.resize(betas.size() * lambdas.size());
  r.ac1.resize(betas.size() * lambdas.size());
  parallel_for(betas.size(), [&](std::size_t ib) {
    for (std::size_t il = 0; il < lambdas.size(); ++il) {
      const ou::OUParams p = cfg.ou.with_lambda_x(lambdas[il]);
      const ou::Observable obs{betas[ib]};
      r.var[ib * lambdas.size() + il] = ou::observable_variance(p, obs);
      r.ac1[ib * lambdas.size() + il] = ou::observable_autocorrelation(p, obs, 1.0);
    }
  });
  return r;
}

void write_fig2(const Fig2Result& r, const ExperimentConfig& cfg, const fs::path& dir) {
  auto out = open_out(dir / "fig2.csv");
  out << "beta,lambda_x,var,ac1,var_sign,ac_sign\n";
  const auto& betas = r.map.beta_grid;
  const auto& lambdas = r.map.lambda_grid;
  for (std::size_t ib = 0; ib < betas.size(); ++ib) {
    for (std::size_t il = 0; il < lambdas.size(); ++il) {
      const std::size_t k = ib * lambdas.size() + il;
      CsvRow(out) << betas[ib] << lambdas[il] << r.var[k] << r.ac1[k]
                  << static_cast<int>(r.map.var_sign[k]) << static_cast<int>(r.map.ac_sign[k]);
    }
  }
  if (cfg.emit_svg) {
    write_text(dir / "fig2_var.svg", report::svg_value_heatmap("Var[Psi] (log10)", "lambda_x",
                                                               "beta", lambdas, betas, r.var, true));
    write_text(dir / "fig2_ac1.svg", report::svg_value_heatmap("AC(1) of Psi", "lambda_x", "beta",
                                                               lambdas, betas, r.ac1, false));
    write_text(dir / "fig2_var_sign.svg",
               report::svg_sign_heatmap("trend of Var[Psi] (blue: deceitful)", "lambda_x", "beta",
                                        lambdas, betas, r.map.var_sign));
    write_text(dir / "fig2_ac_sign.svg",
               report::svg_sign_heatmap("trend of AC(1) (blue: deceitful)", "lambda_x", "beta",
                                        lambdas, betas, r.map.ac_sign));
  }
}

// --- fig3 -------------------------------------------------------------------

ou::OUParams linearised_params(const sim::FoldSimConfig& sim, double alpha) {
  const sim::NoiseMatrix s = sim.sigma.scaled(sim.epsilon);
  return ou::OUParams{.lambda_x = 2.0 * std::sqrt(alpha),
                      .lambda_y = 1.0,
                      .sigma_x = s.s11,
                      .sigma_y = s.s22,
                      .c = s.s12};
}

namespace {

Fig3Run run_one(const ExperimentConfig& cfg, std::size_t run_index) {
  Fig3Run run;
  run.path = sim::simulate_fold(cfg.sim, run_index);
  run.psi = sim::observable_series(run.path, cfg.obs);
  if (run.path.truncated) run.note = "state left the bounded box; path truncated";
  if (run.path.tipped_at) run.note = "tipped at t=" + format_double(*run.path.tipped_at);
  try {
    run.cutoff = sim::analysis_cutoff(run.path, cfg.sim, cfg.window.length);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyAnalysisWindow) throw;
    run.note += (run.note.empty() ? "" : "; ") + std::string("no full analysis window");
    return run;
  }

  const std::span<const double> admitted(run.psi.data(), run.cutoff);
  const auto wins = ews::windows(admitted, cfg.window);
  run.indicators.resize(kEstimatorIds.size());
  for (std::size_t e = 0; e < kEstimatorIds.size(); ++e) {
    run.indicators[e].estimator_id = kEstimatorIds[e];
  }
  for (const auto& w : wins) {
    const double center =
        0.5 * (run.path.times[w.start] + run.path.times[w.start + cfg.window.length - 1]);
    const std::array<double, 6> values = {
        ews::var_estimator(w.segment),
        ews::ac1_estimator(w.segment),
        ews::psd_max(w.segment, cfg.welch),
        ews::km_drift_rate(w.segment, 20, cfg.sim.sample_interval()),
        ews::gls_ar1_rate(w.segment),
        ews::psd_fit_rate(w.segment, cfg.welch),
    };
    for (std::size_t e = 0; e < values.size(); ++e) {
      run.indicators[e].centers.push_back(center);
      run.indicators[e].values.push_back(values[e]);
    }
  }
  return run;
}

}  // namespace

Fig3Result compute_fig3(const ExperimentConfig& cfg) {
  cfg.validate();
  const sim::NoiseMatrix s = cfg.sim.sigma.scaled(cfg.sim.epsilon);
  if (s.s11 == 0.0 && s.s12 == 0.0 && s.s22 == 0.0) {
    fail(ErrorKind::ZeroVariance, "no stochastic forcing (epsilon * Sigma = 0)");
  }

  Fig3Result r;
  r.runs.resize(static_cast<std::size_t>(cfg.sim.n_runs));
  parallel_for(r.runs.size(), [&](std::size_t i) { r.runs[i] = run_one(cfg, i); });

  // Window k covers the same samples in every run that reaches it.
  std::size_t n_windows = 0;
  const Fig3Run* longest = nullptr;
  for (const auto& run : r.runs) {
    if (!run.indicators.empty() && run.indicators[0].values.size() > n_windows) {
      n_windows = run.indicators[0].values.size();
      longest = &run;
    }
  }
  if (n_windows == 0) fail(ErrorKind::EmptyAnalysisWindow, "no run admits a full window");

  r.mean.resize(kEstimatorIds.size());
  r.runs_per_window.assign(n_windows, 0);
  for (std::size_t e = 0; e < kEstimatorIds.size(); ++e) {
    auto& m = r.mean[e];
    m.estimator_id = kEstimatorIds[e];
    m.centers = longest->indicators[e].centers;
    m.values.assign(n_windows, 0.0);
  }
  for (const auto& run : r.runs) {  // fixed run order keeps the sums reproducible
    if (run.indicators.empty()) continue;
    const std::size_t w = run.indicators[0].values.size();
    for (std::size_t k = 0; k < w; ++k) {
      ++r.runs_per_window[k];
      for (std::size_t e = 0; e < kEstimatorIds.size(); ++e) {
        r.mean[e].values[k] += run.indicators[e].values[k];
      }
    }
  }
  for (auto& m : r.mean) {
    for (std::size_t k = 0; k < n_windows; ++k) m.values[k] /= r.runs_per_window[k];
  }

  r.analytic_var.estimator_id = "var_analytic";
  r.analytic_ac1.estimator_id = "ac1_analytic";
  for (double t : r.mean[0].centers) {
    const double alpha = cfg.sim.alpha(t);
    if (!(alpha > 0.0)) continue;
    const ou::OUParams p = linearised_params(cfg.sim, alpha);
    r.analytic_alpha.push_back(alpha);
    r.analytic_lambda_x.push_back(p.lambda_x);
    r.analytic_var.centers.push_back(t);
    r.analytic_var.values.push_back(ou::observable_variance(p, cfg.obs));
    r.analytic_ac1.centers.push_back(t);
    r.analytic_ac1.values.push_back(ou::observable_autocorrelation(p, cfg.obs, 1.0));
  }

  if (n_windows >= 3) {
    for (const auto& m : r.mean) r.trends.push_back(ews::indicator_trend(m));
  }
  return r;
}

void write_fig3(const Fig3Result& r, const ExperimentConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir / "paths");
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu.csv", i);
    auto out = open_out(dir / "paths" / name);
    sim::write_path_csv(out, r.runs[i].path, cfg.obs);
  }

  {
    auto out = open_out(dir / "indicators.csv");
    out << ews::kIndicatorHeader << '\n';
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      for (const auto& ind : r.runs[i].indicators) ews::write_indicator_rows(out, ind, std::to_string(i));
    }
    for (const auto& ind : r.mean) ews::write_indicator_rows(out, ind, "mean");
  }
  {
    auto out = open_out(dir / "fig3_analytic.csv");
    out << "t_center,alpha,lambda_x,var_analytic,ac1_analytic\n";
    for (std::size_t k = 0; k < r.analytic_var.values.size(); ++k) {
      CsvRow(out) << r.analytic_var.centers[k] << r.analytic_alpha[k] << r.analytic_lambda_x[k]
                  << r.analytic_var.values[k] << r.analytic_ac1.values[k];
    }
  }
  {
    auto out = open_out(dir / "fig3_trends.csv");
    out << "estimator_id,slope,sign,deceitful_sign\n";
    for (std::size_t e = 0; e < r.trends.size(); ++e) {
      CsvRow(out) << kEstimatorIds[e] << r.trends[e].slope << r.trends[e].sign << kDeceitfulSigns[e];
    }
  }
  {
    auto out = open_out(dir / "fig3_runs.csv");
    out << "run_id,samples,cutoff,tipped_at,truncated,windows,note\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      const auto& run = r.runs[i];
      std::string note = run.note;
      std::replace(note.begin(), note.end(), ',', ';');
      CsvRow(out) << static_cast<std::int64_t>(i) << static_cast<std::int64_t>(run.path.size())
                  << static_cast<std::int64_t>(run.cutoff)
                  << (run.path.tipped_at ? format_double(*run.path.tipped_at) : std::string())
                  << (run.path.truncated ? 1 : 0)
                  << static_cast<std::int64_t>(run.indicators.empty() ? 0 : run.indicators[0].values.size())
                  << note;
    }
  }

  if (cfg.emit_svg && !r.runs.empty()) {
    const auto& run = r.runs.front();
    write_text(dir / "fig3_paths.svg",
               report::svg_line_plot("sample path (run 0)", "t", "state",
                                     {{"X", run.path.times, run.path.x},
                                      {"Y", run.path.times, run.path.y},
                                      {"Psi", run.path.times, run.psi}}));
    for (std::size_t e = 0; e < r.mean.size(); ++e) {
      std::vector<report::LineSeries> series = {
          {"ensemble mean", r.mean[e].centers, r.mean[e].values}};
      if (e == 0) series.push_back({"linearised", r.analytic_var.centers, r.analytic_var.values});
      if (e == 1) series.push_back({"linearised", r.analytic_ac1.centers, r.analytic_ac1.values});
      write_text(dir / (std::string("fig3_") + kEstimatorIds[e] + ".svg"),
                 report::svg_line_plot(kEstimatorIds[e], "t", kEstimatorIds[e], series));
    }
  }
}

// --- theorem ------------------------------------------------------------------

std::vector<ou::OUParams> theorem_draws(std::uint64_t seed, std::size_t n, double delta) {
  CounterRng rng(derive_seed(seed, 0x7468656f72656dULL));
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::vector<ou::OUParams> draws;
  draws.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ou::OUParams p;
    p.lambda_y = uniform(0.2, 2.0);
    p.lambda_x = uniform(std::min(delta, p.lambda_y), p.lambda_y);
    p.sigma_x = uniform(0.05, 3.0);
    p.sigma_y = uniform(0.05, 3.0);
    do {
      p.c = uniform(-2.0, 2.0);
    } while (std::abs(p.c) < 0.1);
    draws.push_back(p);
  }
  return draws;
}

std::vector<TheoremRow> compute_theorem(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto draws = theorem_draws(cfg.sim.seed, cfg.grids.n_draws, cfg.grids.delta);
  std::vector<TheoremRow> rows(draws.size());
  constexpr double half_pi = std::numbers::pi / 2.0;
  parallel_for(draws.size(), [&](std::size_t i) {
    TheoremRow& row = rows[i];
    row.params = draws[i];
    try {
      row.closed_form = ou::theorem_derivatives(row.params);
      row.finite_difference = ou::fd_mixed_derivatives(row.params);
      const double expected = (row.params.c * row.params.sigma_y > 0.0) ? 1.0 : -1.0;
      row.sign_ok = std::copysign(1.0, row.closed_form.dvar) == expected &&
                    std::copysign(1.0, row.closed_form.dac) == expected;
      row.interval = ou::deceitful_interval(row.params, cfg.grids.delta);
      row.side_ok = row.interval->width() > 0.0 &&
                    (expected > 0.0 ? row.interval->lo >= half_pi : row.interval->hi <= half_pi);
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

void write_theorem(const std::vector<TheoremRow>& rows, const fs::path& dir) {
  auto out = open_out(dir / "theorem.csv");
  out << "lambda_x,lambda_y,sigma_x,sigma_y,c,dvar,dac,fd_dvar,fd_dac,interval_lo,interval_hi,side_ok\n";
  for (const auto& row : rows) {
    const auto& p = row.params;
    CsvRow csv(out);
    csv << p.lambda_x << p.lambda_y << p.sigma_x << p.sigma_y << p.c << row.closed_form.dvar
        << row.closed_form.dac << row.finite_difference.dvar << row.finite_difference.dac;
    if (row.interval) {
      csv << row.interval->lo << row.interval->hi;
    } else {
      csv << "" << "";
    }
    csv << (row.side_ok ? 1 : 0);
  }
}

// --- driver -------------------------------------------------------------------

std::string run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  write_text(dir / "config.resolved.ini", to_config_text(cfg));

  std::ostringstream summary;
  switch (cfg.experiment) {
    case Experiment::Fig1: {
      const auto r = compute_fig1(cfg);
      write_fig1(r, cfg, dir);
      auto tp = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("none"); };
      summary << "fig1: " << r.lambda_x.size() << " points; lambda* var=" << tp(r.turning_points.variance)
              << " ac1=" << tp(r.turning_points.autocorrelation) << '\n';
      break;
    }
    case Experiment::Fig2: {
      const auto r = compute_fig2(cfg);
      write_fig2(r, cfg, dir);
      summary << "fig2: " << r.var.size() << " cells; deceitful cells var=" << r.blue_cells_var()
              << " ac1=" << r.blue_cells_ac() << '\n';
      break;
    }
    case Experiment::Fig3: {
      const auto r = compute_fig3(cfg);
      write_fig3(r, cfg, dir);
      summary << "fig3: " << r.runs.size() << " runs, " << r.mean[0].values.size() << " windows\n";
      for (std::size_t i = 0; i < r.runs.size(); ++i) {
        if (!r.runs[i].note.empty()) summary << "  run " << i << ": " << r.runs[i].note << '\n';
      }
      for (std::size_t e = 0; e < r.trends.size(); ++e) {
        summary << "  trend " << kEstimatorIds[e] << ": " << sign_text(r.trends[e].sign)
                << " (slope " << format_double(r.trends[e].slope) << ")\n";
      }
      break;
    }
    case Experiment::Theorem: {
      const auto rows = compute_theorem(cfg);
      write_theorem(rows, dir);
      std::size_t side = 0;
      std::size_t sign = 0;
      for (const auto& row : rows) {
        side += row.side_ok ? 1 : 0;
        sign += row.sign_ok ? 1 : 0;
        if (!row.error.empty()) summary << "  draw error: " << row.error << '\n';
      }
      summary << "theorem: " << rows.size() << " draws; mixed partials carry sgn(c sigma_y) in "
              << sign << ", interval on that side of pi/2 in " << side << '\n';
      break;
    }
    case Experiment::Custom:
      fail(ErrorKind::ValidationError, "experiment must be one of fig1, fig2, fig3, theorem");
  }
  return summary.str();
}

}  // namespace ewslab
