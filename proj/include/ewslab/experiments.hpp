#pragma once

// Named experiments: each computes an in-memory result and can write it as
// CSV (plus optional SVG) into an output directory.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ewslab/config.hpp"
#include "ewslab/ews_estimators.hpp"
#include "ewslab/ou_analytics.hpp"
#include "ewslab/sde_sim.hpp"

namespace ewslab {

struct Fig1Result {
  std::vector<double> lambda_x;
  std::vector<double> var_psi;
  std::vector<double> ac1_psi;
  ou::TurningPoints turning_points;
};

Fig1Result compute_fig1(const ExperimentConfig& cfg);

struct Fig2Result {
  ou::TrendMap map;
  std::vector<double> var;  ///< same layout as map.var_sign
  std::vector<double> ac1;

  std::size_t blue_cells_var() const;
  std::size_t blue_cells_ac() const;
};

Fig2Result compute_fig2(const ExperimentConfig& cfg);

inline constexpr std::array<const char*, 6> kEstimatorIds = {
    "var", "ac1", "psd_max", "km_rate", "gls_rate", "psd_fit_rate"};

/// Sign a destabilising system would NOT show for each estimator: the
/// deceitful outcome the fold experiment is expected to reproduce.
inline constexpr std::array<int, 6> kDeceitfulSigns = {-1, -1, -1, +1, +1, +1};

struct Fig3Run {
  sim::Path path;
  std::vector<double> psi;
  std::size_t cutoff = 0;
  std::vector<ews::IndicatorSeries> indicators;  ///< one per estimator id; empty if unused
  std::string note;
};

struct Fig3Result {
  std::vector<Fig3Run> runs;
  std::vector<ews::IndicatorSeries> mean;  ///< ensemble mean per window index
  std::vector<std::size_t> runs_per_window;
  ews::IndicatorSeries analytic_var;
  ews::IndicatorSeries analytic_ac1;
  std::vector<double> analytic_alpha;
  std::vector<double> analytic_lambda_x;
  std::vector<ews::Trend> trends;  ///< indicator_trend of each mean series
};

/// Linearised OU parameters of the fold system at ramp value alpha:
/// lambda_x = 2 sqrt(alpha), lambda_y = 1, noise eps * Sigma.
ou::OUParams linearised_params(const sim::FoldSimConfig& sim, double alpha);

Fig3Result compute_fig3(const ExperimentConfig& cfg);

struct TheoremRow {
  ou::OUParams params;
  ou::MixedDerivatives closed_form;
  ou::MixedDerivatives finite_difference;
  std::optional<ou::BetaInterval> interval;
  bool side_ok = false;
  bool sign_ok = false;
  std::string error;
};

/// Random draws with lambda_y in [0.2, 2], lambda_x in [delta, lambda_y],
/// sigma_x, sigma_y in [0.05, 3], c in [-2, 2] with |c| >= 0.1.
std::vector<ou::OUParams> theorem_draws(std::uint64_t seed, std::size_t n, double delta);

std::vector<TheoremRow> compute_theorem(const ExperimentConfig& cfg);

void write_fig1(const Fig1Result& r, const ExperimentConfig& cfg, const std::filesystem::path& dir);
void write_fig2(const Fig2Result& r, const ExperimentConfig& cfg, const std::filesystem::path& dir);
void write_fig3(const Fig3Result& r, const ExperimentConfig& cfg, const std::filesystem::path& dir);
void write_theorem(const std::vector<TheoremRow>& rows, const std::filesystem::path& dir);

/// Writes the resolved config, runs cfg.experiment and returns a short
/// human-readable summary.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace ewslab
