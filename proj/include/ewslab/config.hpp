#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "ewslab/ews_estimators.hpp"
#include "ewslab/ou_analytics.hpp"
#include "ewslab/sde_sim.hpp"

namespace ewslab {

enum class Experiment { Fig1, Fig2, Fig3, Theorem, Custom };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

struct GridSpec {
  std::size_t beta_points = 256;
  std::size_t lambda_points = 256;
  double lambda_min = 1e-3;
  std::size_t fig1_points = 1000;
  std::size_t n_draws = 100;
  double delta = 0.05;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Custom;
  ou::OUParams ou{};  ///< lambda_y = 1, sigma_x = 0.1, sigma_y = 2, c = 1
  ou::Observable obs{-0.7853981633974483};
  sim::FoldSimConfig sim{};
  ews::WindowSpec window{};
  ews::WelchSpec welch{};
  GridSpec grids{};
  std::string output_dir = "ewslab_out";
  bool emit_svg = false;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;
};

/// Sectioned `key = value` text with `#` comments. Section headers are
/// optional; a key placed under a header must belong to it. Throws ParseError
/// (with the line number) or ValidationError.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& file);

/// Fully resolved config in the same format; parse_config reads it back.
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace ewslab
