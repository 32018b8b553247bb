#pragma once

// Closed-form stationary statistics of the 2D Ornstein-Uhlenbeck process
//
//   d(X, Y) = diag(-lambda_x, -lambda_y) (X, Y) dt + [[sigma_x, c], [0, sigma_y]] dW
//
// observed through the linear combination Psi = cos(beta) X + sin(beta) Y.
// Everything here is a pure function of its arguments.

#include <cstdint>
#include <optional>
#include <vector>

namespace ewslab::ou {

struct OUParams {
  double lambda_x = 0.5;
  double lambda_y = 1.0;
  double sigma_x = 0.1;
  double sigma_y = 2.0;
  double c = 1.0;  ///< cross-coupling of the second noise source into X

  OUParams with_lambda_x(double lx) const {
    OUParams p = *this;
    p.lambda_x = lx;
    return p;
  }
};

/// Throws DegenerateRate unless both rates are strictly positive.
void require_stationary(const OUParams& p);

struct Observable {
  double beta = 0.0;  ///< mixing angle in radians

  double weight_x() const;
  double weight_y() const;
};

struct Cov2 {
  double v11 = 0.0;
  double v12 = 0.0;
  double v22 = 0.0;

  double determinant() const { return v11 * v22 - v12 * v12; }
  bool positive_definite() const { return v11 > 0.0 && v22 > 0.0 && determinant() > 0.0; }
};

struct Mat2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m21 = 0.0;
  double m22 = 0.0;

  bool symmetric(double tol = 0.0) const;
};

Cov2 stationary_covariance(const OUParams& p);

/// max-norm of A V + V A^T + Sigma Sigma^T.
double lyapunov_residual(const OUParams& p, const Cov2& v);

/// R(tau) = exp(tau A) V. Row 1 decays with lambda_x, row 2 with lambda_y.
Mat2 lag_covariance(const OUParams& p, double tau);

/// r(tau)_ij = R(tau)_ij / sqrt(V_ii V_jj).
Mat2 lag_correlation(const OUParams& p, double tau);

double observable_variance(const OUParams& p, const Observable& obs);

/// E[Psi_t Psi_{t+tau}] / Var[Psi]. The lag-1 autocorrelation is tau = 1.
double observable_autocorrelation(const OUParams& p, const Observable& obs, double tau = 1.0);

enum class Indicator { Variance, Autocorrelation };

double indicator_value(const OUParams& p, const Observable& obs, Indicator which);

/// Central finite difference of an indicator with respect to lambda_x using
/// the step rel_step * max(1, lambda_x).
double lambda_derivative(const OUParams& p, const Observable& obs, Indicator which,
                         double rel_step);

struct MixedDerivatives {
  double dvar = 0.0;  ///< d_beta d_lambda_x Var[Psi] at beta = pi/2
  double dac = 0.0;   ///< d_beta d_lambda_x AC_Psi(1) at beta = pi/2
};

/// Closed form: dvar = 2 c sigma_y / (lx + ly)^2 and
/// dac = 2 c ly (exp(-lx)(1 + lx + ly) - exp(-ly)) / ((lx + ly)^2 sigma_y).
/// Both carry sgn(c sigma_y) whenever lambda_x <= lambda_y.
MixedDerivatives theorem_derivatives(const OUParams& p);

/// The same mixed partials by nested central differences of
/// observable_variance / observable_autocorrelation around beta = pi/2, with
/// one Richardson extrapolation step. The beta step is h_beta times
/// min(1, sqrt(Var[Y] / Var[X])), the lambda_x step is h_lambda * lambda_x.
MixedDerivatives fd_mixed_derivatives(const OUParams& p, double h_beta = 1e-3,
                                      double h_lambda = 1e-3);

/// Turning points of the two indicators along lambda_x. An empty optional
/// means the derivative keeps one sign on the whole search interval.
struct TurningPoints {
  std::optional<double> variance;
  std::optional<double> autocorrelation;

  /// Larger of the two, when at least one exists.
  std::optional<double> combined() const;
};

TurningPoints lambda_star(const OUParams& p_template, const Observable& obs, double lambda_min,
                          double lambda_max);

/// Open interval (lo, hi) of mixing angles.
struct BetaInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double beta) const { return beta > lo && beta < hi; }
};

struct DeceitfulSearch {
  int lambda_points = 64;         ///< uniform grid over [delta, lambda_y]
  double initial_resolution = 1e-3;
  double min_resolution = 1e-12;
  int max_steps = 2000;
  double fd_rel_step = 1e-6;
};

/// Interval of beta next to pi/2 on which both Var[Psi] and AC_Psi(1) increase
/// with lambda_x everywhere on the lambda_x grid, i.e. both indicators fall
/// while the X direction destabilises. It lies above pi/2 when c sigma_y > 0
/// and below otherwise. Requires c, sigma_x, sigma_y nonzero.
BetaInterval deceitful_interval(const OUParams& p_template, double delta,
                                const DeceitfulSearch& search = {});

/// Returns true when both lambda_x-derivatives are strictly positive at every
/// point of the uniform grid over [delta, lambda_y].
bool deceitful_at(const OUParams& p_template, double beta, double delta,
                  const DeceitfulSearch& search = {});

struct TrendMap {
  std::vector<double> beta_grid;
  std::vector<double> lambda_grid;
  // Row-major, index [i_beta * lambda_grid.size() + i_lambda].
  std::vector<std::int8_t> var_sign;
  std::vector<std::int8_t> ac_sign;

  std::int8_t var_at(std::size_t ib, std::size_t il) const {
    return var_sign[ib * lambda_grid.size() + il];
  }
  std::int8_t ac_at(std::size_t ib, std::size_t il) const {
    return ac_sign[ib * lambda_grid.size() + il];
  }
};

inline constexpr double kTrendStep = 1e-4;
inline constexpr double kSignTolerance = 1e-12;

/// Sign of d(indicator)/d(lambda_x) on a (beta, lambda_x) grid: -1 is the
/// CSD-consistent trend, +1 the deceitful one, 0 below kSignTolerance.
TrendMap trend_sign_map(const OUParams& p_template, const std::vector<double>& beta_grid,
                        const std::vector<double>& lambda_grid);

/// n points uniformly over [0, pi).
std::vector<double> default_beta_grid(std::size_t n = 256);

/// n points uniformly over [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

}  // namespace ewslab::ou
