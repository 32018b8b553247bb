#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "ewslab/error.hpp"
#include "ewslab/ews_estimators.hpp"

namespace ewslab::ews {

namespace {

// FFTW planning is not thread-safe; executing an existing plan on new
// (unaligned) buffers is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan r2c(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    plans_.emplace(n, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

}  // namespace

void WelchSpec::validate() const {
  if (segment < 4) fail(ErrorKind::ValidationError, "welch_segment >= 4");
  if (!(overlap >= 0.0 && overlap < 1.0)) fail(ErrorKind::ValidationError, "0 <= welch_overlap < 1");
}

Spectrum welch_psd(std::span<const double> series, const WelchSpec& spec) {
  spec.validate();
  if (series.size() < spec.segment) {
    fail(ErrorKind::SeriesTooShort, "Welch PSD needs at least one full segment of " +
                                        std::to_string(spec.segment) + " samples");
  }
  const int m = static_cast<int>(spec.segment);
  const std::size_t step =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(m * (1.0 - spec.overlap))));
  const int bins = m / 2 + 1;

  std::vector<double> taper(m);
  double taper_power = 0.0;
  for (int j = 0; j < m; ++j) {
    taper[j] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * j / m));
    taper_power += taper[j] * taper[j];
  }

  fftw_plan plan = PlanCache::instance().r2c(m);
  std::vector<double> buf(m);
  std::vector<fftw_complex> spec_out(bins);
  std::vector<double> acc(bins, 0.0);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + m <= series.size(); start += step) {
    double mean = 0.0;
    for (int j = 0; j < m; ++j) mean += series[start + j];
    mean /= m;
    for (int j = 0; j < m; ++j) buf[j] = (series[start + j] - mean) * taper[j];
    fftw_execute_dft_r2c(plan, buf.data(), spec_out.data());
    for (int k = 0; k < bins; ++k) {
      acc[k] += spec_out[k][0] * spec_out[k][0] + spec_out[k][1] * spec_out[k][1];
    }
    ++segments;
  }

  Spectrum s;
  s.frequency.resize(bins);
  s.power.resize(bins);
  for (int k = 0; k < bins; ++k) {
    const bool doubled = k > 0 && !(m % 2 == 0 && k == m / 2);
    s.frequency[k] = static_cast<double>(k) / m;
    s.power[k] = (doubled ? 2.0 : 1.0) * acc[k] / (static_cast<double>(segments) * taper_power);
  }
  return s;
}

double psd_max(std::span<const double> segment, const WelchSpec& spec) {
  const Spectrum s = welch_psd(segment, spec);
  return *std::max_element(s.power.begin() + 1, s.power.end());
}

double fit_lorentzian_rate(const Spectrum& spectrum, double max_frequency) {
  std::vector<double> omega2;
  std::vector<double> log_power;
  for (std::size_t k = 0; k < spectrum.power.size(); ++k) {
    if (!(spectrum.frequency[k] > 0.0) || !(spectrum.power[k] > 0.0)) continue;
    if (spectrum.frequency[k] > max_frequency) continue;
    const double w = 2.0 * std::numbers::pi * spectrum.frequency[k];
    omega2.push_back(w * w);
    log_power.push_back(std::log(spectrum.power[k]));
  }
  if (omega2.size() < 3) fail(ErrorKind::FitDegenerate, "fewer than 3 positive PSD bins");

  // log a is solved in closed form for each lambda: it is the mean residual.
  auto sse = [&](double log_lambda) {
    const double l2 = std::exp(2.0 * log_lambda);
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t k = 0; k < omega2.size(); ++k) {
      const double u = log_power[k] + std::log(l2 + omega2[k]);
      sum += u;
      sum2 += u * u;
    }
    return sum2 - sum * sum / static_cast<double>(omega2.size());
  };

  constexpr int kGrid = 200;
  const double lo = std::log(1e-3);
  const double hi = std::log(5.0);
  auto grid_at = [&](int i) { return lo + (hi - lo) * i / (kGrid - 1); };
  int best = 0;
  double best_sse = sse(grid_at(0));
  for (int i = 1; i < kGrid; ++i) {
    const double v = sse(grid_at(i));
    if (v < best_sse) {
      best_sse = v;
      best = i;
    }
  }

  // Golden-section refinement between the grid neighbours.
  double a = grid_at(std::max(0, best - 1));
  double b = grid_at(std::min(kGrid - 1, best + 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = sse(c);
  double fd = sse(d);
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = sse(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = sse(d);
    }
  }
  return std::exp(0.5 * (a + b));
}

double psd_fit_rate(std::span<const double> segment, const WelchSpec& spec) {
  return fit_lorentzian_rate(welch_psd(segment, spec));
}

}  // namespace ewslab::ews
