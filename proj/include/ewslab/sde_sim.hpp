#pragma once

// Path generation for the 2D systems: exact transition sampling of the linear
// OU process and Euler-Maruyama integration of the slowly ramped fold SDE
//
//   dX = (-X^2 + alpha(t)) dt + eps (s11 dW1 + s12 dW2)
//   dY = -Y dt               + eps  s22 dW2,     alpha(t) = alpha0 - frac * t / T

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "ewslab/ou_analytics.hpp"
#include "ewslab/rng.hpp"

namespace ewslab::sim {

/// Upper-triangular noise loading; the (2,1) entry is zero by construction.
struct NoiseMatrix {
  double s11 = 0.1;
  double s12 = 1.0;
  double s22 = 2.0;

  NoiseMatrix scaled(double k) const { return {k * s11, k * s12, k * s22}; }
};

NoiseMatrix noise_matrix(const ou::OUParams& p);

struct State {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr double kStateBound = 1e6;

inline bool in_bounds(const State& s) {
  return std::abs(s.x) <= kStateBound && std::abs(s.y) <= kStateBound;
}

struct Path {
  std::vector<double> times;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<double> tipped_at;
  bool truncated = false;  ///< state left the bounded box; integration aborted

  std::size_t size() const { return times.size(); }
  void push(double t, const State& s) {
    times.push_back(t);
    x.push_back(s.x);
    y.push_back(s.y);
  }
};

/// Exact one-step transition of the linear OU process for a fixed dt:
/// mean D s, covariance V - D V D^T with D = diag(exp(-lx dt), exp(-ly dt)).
class ExactOuSampler {
 public:
  ExactOuSampler(const ou::OUParams& p, double dt);

  State step(const State& s, NormalSource& normal) const;

  /// Draw from the stationary law N(0, V).
  State stationary(NormalSource& normal) const;

  const ou::Cov2& transition_covariance() const { return q_; }

 private:
  double dx_, dy_;
  ou::Cov2 q_;
  double q_l11_, q_l21_, q_l22_;
  double v_l11_, v_l21_, v_l22_;
};

State exact_ou_step(const ou::OUParams& p, const State& s, double dt, NormalSource& normal);

/// n samples spaced dt apart, started in the stationary law.
Path sample_stationary_ou(const ou::OUParams& p, std::size_t n, double dt, std::uint64_t seed);

/// One Euler-Maruyama update: s + drift(s, t) dt + Sigma sqrt(dt) (g1, g2).
class EulerMaruyamaStepper {
 public:
  EulerMaruyamaStepper(const NoiseMatrix& sigma, double dt)
      : sigma_(sigma), dt_(dt), sqrt_dt_(std::sqrt(dt)) {}

  template <class Drift>
  State step(const Drift& drift, const State& s, double t, NormalSource& normal) const {
    const State f = drift(s, t);
    const double g1 = normal();
    const double g2 = normal();
    return State{s.x + f.x * dt_ + (sigma_.s11 * g1 + sigma_.s12 * g2) * sqrt_dt_,
                 s.y + f.y * dt_ + sigma_.s22 * g2 * sqrt_dt_};
  }

  double dt() const { return dt_; }

 private:
  NoiseMatrix sigma_;
  double dt_;
  double sqrt_dt_;
};

using Drift = std::function<State(const State&, double)>;

/// Full-resolution path including the initial state. Stops and sets
/// Path::truncated if the state leaves [-1e6, 1e6]^2.
Path simulate_em(const Drift& drift, const NoiseMatrix& sigma, const State& x0, double t_total,
                 double dt, std::uint64_t seed);

struct FoldSimConfig {
  double t_total = 1e4;
  double dt = 1.0 / 30.0;
  int subsample = 30;
  double epsilon = 0.1;
  double alpha0 = 1.0;
  double alpha_slope_frac = 1.1;
  NoiseMatrix sigma{};
  std::optional<double> x0;  ///< defaults to sqrt(alpha0)
  double y0 = 0.0;
  double burn_in = 100.0;
  double tip_threshold = -0.5;
  double alpha_cut = 0.05;
  std::uint64_t seed = 24301;
  int n_runs = 20;

  double alpha(double t) const { return alpha0 - alpha_slope_frac * t / t_total; }
  double initial_x() const { return x0.value_or(std::sqrt(std::max(alpha0, 0.0))); }
  double sample_interval() const { return subsample * dt; }
  std::int64_t raw_steps() const { return std::llround(t_total / dt); }

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
};

/// Integrates at cfg.dt, records every cfg.subsample-th state with t > burn_in,
/// and stops at the first step with X < tip_threshold (recorded in tipped_at).
Path simulate_fold(const FoldSimConfig& cfg, std::uint64_t run_index);

std::vector<double> observable_series(const Path& path, const ou::Observable& obs);

/// Number of leading samples admitted to estimation: alpha(t) >= alpha_cut and
/// t before any tipping. Throws EmptyAnalysisWindow if fewer than
/// window_length samples remain.
std::size_t analysis_cutoff(const Path& path, const FoldSimConfig& cfg,
                            std::size_t window_length = 1000);

/// CSV with header `t,x,y` (plus `psi` when an observable is given).
void write_path_csv(std::ostream& out, const Path& path,
                    const std::optional<ou::Observable>& obs = std::nullopt);

}  // namespace ewslab::sim
