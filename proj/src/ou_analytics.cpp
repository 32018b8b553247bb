#include "ewslab/ou_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ewslab/error.hpp"
#include "ewslab/parallel.hpp"

namespace ewslab::ou {

namespace {

int sign_of(double v, double tol = 0.0) {
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

// Keeps lambda_x - h strictly positive for very small rates.
double fd_step(double lambda_x, double rel_step) {
  return std::min(rel_step * std::max(1.0, lambda_x), 0.5 * lambda_x);
}

}  // namespace

void require_stationary(const OUParams& p) {
  if (!(p.lambda_x > 0.0) || !(p.lambda_y > 0.0)) {
    fail(ErrorKind::DegenerateRate, "rates must be positive (lambda_x=" +
                                        std::to_string(p.lambda_x) +
                                        ", lambda_y=" + std::to_string(p.lambda_y) + ")");
  }
}

double Observable::weight_x() const { return std::cos(beta); }
double Observable::weight_y() const { return std::sin(beta); }

bool Mat2::symmetric(double tol) const {
  return std::abs(m12 - m21) <= tol * std::max({1.0, std::abs(m12), std::abs(m21)});
}

Cov2 stationary_covariance(const OUParams& p) {
  require_stationary(p);
  return Cov2{
      .v11 = (p.sigma_x * p.sigma_x + p.c * p.c) / (2.0 * p.lambda_x),
      .v12 = p.sigma_y * p.c / (p.lambda_x + p.lambda_y),
      .v22 = p.sigma_y * p.sigma_y / (2.0 * p.lambda_y),
  };
}

double lyapunov_residual(const OUParams& p, const Cov2& v) {
  // A = diag(-lx, -ly); Sigma Sigma^T = [[sx^2 + c^2, c sy], [c sy, sy^2]]
  const double r11 = -2.0 * p.lambda_x * v.v11 + p.sigma_x * p.sigma_x + p.c * p.c;
  const double r12 = -(p.lambda_x + p.lambda_y) * v.v12 + p.c * p.sigma_y;
  const double r22 = -2.0 * p.lambda_y * v.v22 + p.sigma_y * p.sigma_y;
  return std::max({std::abs(r11), std::abs(r12), std::abs(r22)});
}

Mat2 lag_covariance(const OUParams& p, double tau) {
  if (tau < 0.0) fail(ErrorKind::NegativeLag, "tau=" + std::to_string(tau));
  const Cov2 v = stationary_covariance(p);
  const double ex = std::exp(-p.lambda_x * tau);
  const double ey = std::exp(-p.lambda_y * tau);
  return Mat2{.m11 = v.v11 * ex, .m12 = v.v12 * ex, .m21 = v.v12 * ey, .m22 = v.v22 * ey};
}

Mat2 lag_correlation(const OUParams& p, double tau) {
  const Cov2 v = stationary_covariance(p);
  if (!(v.v11 > 0.0) || !(v.v22 > 0.0)) {
    fail(ErrorKind::SingularCovariance, "zero marginal variance");
  }
  const Mat2 r = lag_covariance(p, tau);
  const double s = std::sqrt(v.v11 * v.v22);
  return Mat2{.m11 = r.m11 / v.v11, .m12 = r.m12 / s, .m21 = r.m21 / s, .m22 = r.m22 / v.v22};
}

double observable_variance(const OUParams& p, const Observable& obs) {
  const Cov2 v = stationary_covariance(p);
  const double a = obs.weight_x();
  const double b = obs.weight_y();
  return a * a * v.v11 + b * b * v.v22 + 2.0 * a * b * v.v12;
}

double observable_autocorrelation(const OUParams& p, const Observable& obs, double tau) {
  const double var = observable_variance(p, obs);
  if (!(var > 0.0)) fail(ErrorKind::SingularCovariance, "observable has zero variance");
  const Mat2 r = lag_covariance(p, tau);
  const double a = obs.weight_x();
  const double b = obs.weight_y();
  return (a * a * r.m11 + b * b * r.m22 + a * b * (r.m12 + r.m21)) / var;
}

double indicator_value(const OUParams& p, const Observable& obs, Indicator which) {
  return which == Indicator::Variance ? observable_variance(p, obs)
                                      : observable_autocorrelation(p, obs, 1.0);
}

double lambda_derivative(const OUParams& p, const Observable& obs, Indicator which,
                         double rel_step) {
  require_stationary(p);
  const double h = fd_step(p.lambda_x, rel_step);
  const double up = indicator_value(p.with_lambda_x(p.lambda_x + h), obs, which);
  const double down = indicator_value(p.with_lambda_x(p.lambda_x - h), obs, which);
  return (up - down) / (2.0 * h);
}

MixedDerivatives theorem_derivatives(const OUParams& p) {
  require_stationary(p);
  if (p.sigma_y == 0.0) fail(ErrorKind::ZeroSigmaY, "AC(1) derivative needs sigma_y != 0");
  const double lx = p.lambda_x;
  const double ly = p.lambda_y;
  const double s2 = (lx + ly) * (lx + ly);
  // Only the cross term 2 cos(b) sin(b) V12 contributes at b = pi/2, where
  // d/db sin(2b) = -2 and dV12/dlambda_x = -c sigma_y / (lx + ly)^2.
  MixedDerivatives d;
  d.dvar = 2.0 * p.c * p.sigma_y / s2;
  d.dac = 2.0 * p.c * ly * (std::exp(-lx) * (1.0 + lx + ly) - std::exp(-ly)) / (s2 * p.sigma_y);
  return d;
}

MixedDerivatives fd_mixed_derivatives(const OUParams& p, double h_beta, double h_lambda) {
  require_stationary(p);
  constexpr double half_pi = std::numbers::pi / 2.0;
  auto mixed = [&](Indicator which, double hb, double hl) {
    auto f = [&](double beta, double lx) {
      return indicator_value(p.with_lambda_x(lx), Observable{beta}, which);
    };
    const double lx = p.lambda_x;
    return (f(half_pi + hb, lx + hl) - f(half_pi + hb, lx - hl) - f(half_pi - hb, lx + hl) +
            f(half_pi - hb, lx - hl)) /
           (4.0 * hb * hl);
  };
  // Psi turns from Y-dominated to X-dominated over an angle of order
  // sqrt(Var[Y] / Var[X]) around pi/2, so the beta step follows that scale.
  const double angle_scale =
      std::min(1.0, std::sqrt(observable_variance(p, Observable{half_pi}) /
                              observable_variance(p, Observable{0.0})));
  auto richardson = [&](Indicator which) {
    const double hb = h_beta * angle_scale;
    const double hl = h_lambda * p.lambda_x;
    return (4.0 * mixed(which, 0.5 * hb, 0.5 * hl) - mixed(which, hb, hl)) / 3.0;
  };
  return MixedDerivatives{.dvar = richardson(Indicator::Variance),
                          .dac = richardson(Indicator::Autocorrelation)};
}

std::optional<double> TurningPoints::combined() const {
  if (variance && autocorrelation) return std::max(*variance, *autocorrelation);
  return variance ? variance : autocorrelation;
}

namespace {

constexpr double kStarStep = 1e-6;
constexpr double kBisectTol = 1e-9;
constexpr int kStarScanPoints = 2000;

std::optional<double> turning_point(const OUParams& tmpl, const Observable& obs, Indicator which,
                                    double lo, double hi) {
  auto deriv = [&](double lx) {
    return lambda_derivative(tmpl.with_lambda_x(lx), obs, which, kStarStep);
  };
  // Log-spaced scan: the derivatives blow up like 1/lambda^2 near zero.
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  double upper = hi;
  int upper_sign = sign_of(deriv(hi), kSignTolerance);
  for (int i = kStarScanPoints - 2; i >= 0; --i) {
    const double lower = std::exp(log_lo + (log_hi - log_lo) * i / (kStarScanPoints - 1));
    const int lower_sign = sign_of(deriv(lower), kSignTolerance);
    if (lower_sign != 0 && upper_sign != 0 && lower_sign != upper_sign) {
      double a = lower;
      double b = upper;
      while (b - a > kBisectTol) {
        const double mid = 0.5 * (a + b);
        if (sign_of(deriv(mid)) == lower_sign) {
          a = mid;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    if (lower_sign != 0) upper_sign = lower_sign;
    upper = lower;
  }
  return std::nullopt;
}

}  // namespace

TurningPoints lambda_star(const OUParams& p_template, const Observable& obs, double lambda_min,
                          double lambda_max) {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
    fail(ErrorKind::PreconditionViolated, "need 0 < lambda_min < lambda_max");
  }
  require_stationary(p_template.with_lambda_x(lambda_min));
  TurningPoints tp;
  tp.variance = turning_point(p_template, obs, Indicator::Variance, lambda_min, lambda_max);
  tp.autocorrelation =
      turning_point(p_template, obs, Indicator::Autocorrelation, lambda_min, lambda_max);
  return tp;
}

bool deceitful_at(const OUParams& p_template, double beta, double delta,
                  const DeceitfulSearch& search) {
  const Observable obs{beta};
  const int g = std::max(2, search.lambda_points);
  for (int i = 0; i < g; ++i) {
    const double lx = delta + (p_template.lambda_y - delta) * i / (g - 1);
    const OUParams p = p_template.with_lambda_x(lx);
    if (!(lambda_derivative(p, obs, Indicator::Variance, search.fd_rel_step) > 0.0)) return false;
    if (!(lambda_derivative(p, obs, Indicator::Autocorrelation, search.fd_rel_step) > 0.0)) {
      return false;
    }
  }
  return true;
}

BetaInterval deceitful_interval(const OUParams& p_template, double delta,
                                const DeceitfulSearch& search) {
  if (p_template.c == 0.0 || p_template.sigma_x == 0.0 || p_template.sigma_y == 0.0) {
    fail(ErrorKind::PreconditionViolated, "c, sigma_x and sigma_y must all be nonzero");
  }
  if (!(delta > 0.0) || !(delta < p_template.lambda_y)) {
    fail(ErrorKind::PreconditionViolated, "need 0 < delta < lambda_y");
  }
  constexpr double half_pi = std::numbers::pi / 2.0;
  // The lambda_x-derivatives vanish at pi/2 and grow like offset * (mixed
  // partial), so the interval opens on the side of sgn(c sigma_y).
  const double side = (p_template.c * p_template.sigma_y > 0.0) ? 1.0 : -1.0;
  auto ok = [&](double offset) {
    return deceitful_at(p_template, half_pi + side * offset, delta, search);
  };

  double res = search.initial_resolution;
  while (!ok(res)) {
    res *= 0.25;
    if (res < search.min_resolution) {
      fail(ErrorKind::PreconditionViolated, "no deceitful interval resolved near pi/2");
    }
  }

  // Contiguous scan at the resolved spacing, then bisect the far edge.
  int k = 1;
  while (k < search.max_steps && (k + 1) * res < half_pi && ok((k + 1) * res)) ++k;
  double good = k * res;
  double bad = std::min((k + 1) * res, half_pi);
  if (k < search.max_steps) {
    for (int it = 0; it < 60 && bad - good > 1e-12; ++it) {
      const double mid = 0.5 * (good + bad);
      (ok(mid) ? good : bad) = mid;
    }
  }

  if (side > 0.0) return BetaInterval{half_pi, half_pi + good};
  return BetaInterval{half_pi - good, half_pi};
}

TrendMap trend_sign_map(const OUParams& p_template, const std::vector<double>& beta_grid,
                        const std::vector<double>& lambda_grid) {
  for (double lx : lambda_grid) require_stationary(p_template.with_lambda_x(lx));
  TrendMap map;
  map.beta_grid = beta_grid;
  map.lambda_grid = lambda_grid;
  const std::size_t nl = lambda_grid.size();
  map.var_sign.assign(beta_grid.size() * nl, 0);
  map.ac_sign.assign(beta_grid.size() * nl, 0);
  parallel_for(beta_grid.size(), [&](std::size_t ib) {
    const Observable obs{beta_grid[ib]};
    for (std::size_t il = 0; il < nl; ++il) {
      const OUParams p = p_template.with_lambda_x(lambda_grid[il]);
      map.var_sign[ib * nl + il] = static_cast<std::int8_t>(
          sign_of(lambda_derivative(p, obs, Indicator::Variance, kTrendStep), kSignTolerance));
      map.ac_sign[ib * nl + il] = static_cast<std::int8_t>(sign_of(
          lambda_derivative(p, obs, Indicator::Autocorrelation, kTrendStep), kSignTolerance));
    }
  });
  return map;
}

std::vector<double> default_beta_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = std::numbers::pi * static_cast<double>(i) / n;
  return grid;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> grid(n);
  if (n == 1) {
    grid[0] = lo;
    return grid;
  }
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

}  // namespace ewslab::ou
