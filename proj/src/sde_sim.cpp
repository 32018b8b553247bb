#include "ewslab/sde_sim.hpp"

#include <cmath>
#include <string>

#include "ewslab/csv.hpp"
#include "ewslab/error.hpp"

namespace ewslab::sim {

namespace {

struct Chol2 {
  double l11, l21, l22;
};

// Cholesky factor of a 2x2 positive-semidefinite matrix; degenerate
// directions get a zero column instead of NaNs.
Chol2 cholesky(const ou::Cov2& m) {
  const double l11 = std::sqrt(std::max(m.v11, 0.0));
  const double l21 = l11 > 0.0 ? m.v12 / l11 : 0.0;
  const double l22 = std::sqrt(std::max(m.v22 - l21 * l21, 0.0));
  return {l11, l21, l22};
}

}  // namespace

NoiseMatrix noise_matrix(const ou::OUParams& p) { return {p.sigma_x, p.c, p.sigma_y}; }

ExactOuSampler::ExactOuSampler(const ou::OUParams& p, double dt) {
  if (!(dt >= 0.0)) fail(ErrorKind::PreconditionViolated, "dt must be non-negative");
  const ou::Cov2 v = ou::stationary_covariance(p);
  dx_ = std::exp(-p.lambda_x * dt);
  dy_ = std::exp(-p.lambda_y * dt);
  q_ = ou::Cov2{.v11 = v.v11 * (1.0 - dx_ * dx_),
                .v12 = v.v12 * (1.0 - dx_ * dy_),
                .v22 = v.v22 * (1.0 - dy_ * dy_)};
  const Chol2 lq = cholesky(q_);
  q_l11_ = lq.l11;
  q_l21_ = lq.l21;
  q_l22_ = lq.l22;
  const Chol2 lv = cholesky(v);
  v_l11_ = lv.l11;
  v_l21_ = lv.l21;
  v_l22_ = lv.l22;
}

State ExactOuSampler::step(const State& s, NormalSource& normal) const {
  const double g1 = normal();
  const double g2 = normal();
  return State{dx_ * s.x + q_l11_ * g1, dy_ * s.y + q_l21_ * g1 + q_l22_ * g2};
}

State ExactOuSampler::stationary(NormalSource& normal) const {
  const double g1 = normal();
  const double g2 = normal();
  return State{v_l11_ * g1, v_l21_ * g1 + v_l22_ * g2};
}

State exact_ou_step(const ou::OUParams& p, const State& s, double dt, NormalSource& normal) {
  return ExactOuSampler(p, dt).step(s, normal);
}

Path sample_stationary_ou(const ou::OUParams& p, std::size_t n, double dt, std::uint64_t seed) {
  const ExactOuSampler sampler(p, dt);
  NormalSource normal(seed);
  Path path;
  path.times.reserve(n);
  path.x.reserve(n);
  path.y.reserve(n);
  State s = sampler.stationary(normal);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) s = sampler.step(s, normal);
    path.push(static_cast<double>(k) * dt, s);
  }
  return path;
}

Path simulate_em(const Drift& drift, const NoiseMatrix& sigma, const State& x0, double t_total,
                 double dt, std::uint64_t seed) {
  if (!(dt > 0.0)) fail(ErrorKind::PreconditionViolated, "dt must be positive");
  const auto n = static_cast<std::size_t>(std::llround(t_total / dt));
  const EulerMaruyamaStepper stepper(sigma, dt);
  NormalSource normal(seed);
  Path path;
  path.times.reserve(n + 1);
  path.x.reserve(n + 1);
  path.y.reserve(n + 1);
  State s = x0;
  path.push(0.0, s);
  for (std::size_t k = 0; k < n; ++k) {
    s = stepper.step(drift, s, static_cast<double>(k) * dt, normal);
    if (!in_bounds(s)) {
      path.truncated = true;
      break;
    }
    path.push(static_cast<double>(k + 1) * dt, s);
  }
  return path;
}

void FoldSimConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::ValidationError, what); };
  if (!(dt > 0.0)) bad("dt > 0");
  if (subsample < 1) bad("subsample >= 1");
  if (!(t_total > burn_in)) bad("t_total > burn_in");
  if (!(burn_in >= 0.0)) bad("burn_in >= 0");
  if (!(epsilon >= 0.0)) bad("epsilon >= 0");
  if (n_runs < 1) bad("n_runs >= 1");
  if (!(alpha_slope_frac > 0.0)) bad("alpha_slope_frac > 0");
  const double steps = t_total / dt;
  if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
    bad("t_total is an integer multiple of dt");
  }
  if (!std::isfinite(initial_x()) || !std::isfinite(y0)) bad("finite initial state");
}

Path simulate_fold(const FoldSimConfig& cfg, std::uint64_t run_index) {
  cfg.validate();
  const std::int64_t n = cfg.raw_steps();
  const EulerMaruyamaStepper stepper(cfg.sigma.scaled(cfg.epsilon), cfg.dt);
  NormalSource normal(derive_seed(cfg.seed, run_index));
  const auto drift = [&cfg](const State& s, double t) {
    return State{-s.x * s.x + cfg.alpha(t), -s.y};
  };

  Path path;
  const auto expected = static_cast<std::size_t>(n / cfg.subsample + 1);
  path.times.reserve(expected);
  path.x.reserve(expected);
  path.y.reserve(expected);

  State s{cfg.initial_x(), cfg.y0};
  for (std::int64_t k = 0; k < n; ++k) {
    s = stepper.step(drift, s, static_cast<double>(k) * cfg.dt, normal);
    const double t = static_cast<double>(k + 1) * cfg.dt;
    if (!in_bounds(s)) {
      path.truncated = true;
      break;
    }
    if (s.x < cfg.tip_threshold) {
      path.tipped_at = t;
      break;
    }
    if ((k + 1) % cfg.subsample == 0 && t > cfg.burn_in) path.push(t, s);
  }
  return path;
}

std::vector<double> observable_series(const Path& path, const ou::Observable& obs) {
  const double a = obs.weight_x();
  const double b = obs.weight_y();
  std::vector<double> psi(path.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = a * path.x[i] + b * path.y[i];
  return psi;
}

std::size_t analysis_cutoff(const Path& path, const FoldSimConfig& cfg,
                            std::size_t window_length) {
  std::size_t end = 0;
  while (end < path.size()) {
    const double t = path.times[end];
    if (cfg.alpha(t) < cfg.alpha_cut) break;
    if (path.tipped_at && t >= *path.tipped_at) break;
    ++end;
  }
  if (end < window_length) {
    fail(ErrorKind::EmptyAnalysisWindow,
         std::to_string(end) + " admitted samples, window needs " + std::to_string(window_length));
  }
  return end;
}

void write_path_csv(std::ostream& out, const Path& path,
                    const std::optional<ou::Observable>& obs) {
  std::vector<double> psi;
  if (obs) {
    psi = observable_series(path, *obs);
    out << "t,x,y,psi\n";
  } else {
    out << "t,x,y\n";
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    CsvRow row(out);
    row << path.times[i] << path.x[i] << path.y[i];
    if (obs) row << psi[i];
  }
}

}  // namespace ewslab::sim
