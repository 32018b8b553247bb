#include "ewslab/ews_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ewslab/csv.hpp"
#include "ewslab/error.hpp"

namespace ewslab::ews {

namespace {

void require_length(std::size_t have, std::size_t need, const char* what) {
  if (have < need) {
    fail(ErrorKind::SeriesTooShort, std::string(what) + " needs " + std::to_string(need) +
                                        " samples, got " + std::to_string(have));
  }
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string to_string(Detrend d) {
  switch (d) {
    case Detrend::None: return "none";
    case Detrend::Mean: return "mean";
    case Detrend::Linear: return "linear";
  }
  return "linear";
}

Detrend parse_detrend(const std::string& s) {
  if (s == "none") return Detrend::None;
  if (s == "mean") return Detrend::Mean;
  if (s == "linear") return Detrend::Linear;
  fail(ErrorKind::ValidationError, "detrend must be none, mean or linear (got '" + s + "')");
}

void WindowSpec::validate() const {
  if (length < 16) fail(ErrorKind::ValidationError, "window_length >= 16");
  if (stride < 1 || stride > length) fail(ErrorKind::ValidationError, "1 <= window_stride <= window_length");
}

void detrend_in_place(std::vector<double>& segment, Detrend mode) {
  if (mode == Detrend::None || segment.empty()) return;
  const double n = static_cast<double>(segment.size());
  const double my = mean_of(segment);
  if (mode == Detrend::Mean || segment.size() < 2) {
    for (double& v : segment) v -= my;
    return;
  }
  const double mx = 0.5 * (n - 1.0);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < segment.size(); ++i) {
    const double dx = static_cast<double>(i) - mx;
    sxy += dx * (segment[i] - my);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  for (std::size_t i = 0; i < segment.size(); ++i) {
    segment[i] -= my + slope * (static_cast<double>(i) - mx);
  }
}

std::vector<Window> windows(std::span<const double> series, const WindowSpec& spec) {
  spec.validate();
  require_length(series.size(), spec.length, "windowing");
  const std::size_t count = (series.size() - spec.length) / spec.stride + 1;
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    Window win;
    win.start = w * spec.stride;
    win.center = static_cast<double>(win.start) + 0.5 * static_cast<double>(spec.length - 1);
    win.segment.assign(series.begin() + static_cast<std::ptrdiff_t>(win.start),
                       series.begin() + static_cast<std::ptrdiff_t>(win.start + spec.length));
    detrend_in_place(win.segment, spec.detrend);
    out.push_back(std::move(win));
  }
  return out;
}

double var_estimator(std::span<const double> segment) {
  require_length(segment.size(), 2, "variance");
  const double m = mean_of(segment);
  double ss = 0.0;
  for (double v : segment) ss += (v - m) * (v - m);
  return ss / static_cast<double>(segment.size());
}

double ac1_estimator(std::span<const double> segment) {
  require_length(segment.size(), 3, "AC(1)");
  const double m = mean_of(segment);
  double raw = 0.0;
  double ss = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < segment.size(); ++i) {
    const double d = segment[i] - m;
    raw += segment[i] * segment[i];
    ss += d * d;
    if (i + 1 < segment.size()) cross += d * (segment[i + 1] - m);
  }
  if (!(ss > 1e-20 * raw)) fail(ErrorKind::ZeroVariance, "AC(1) of a constant segment");
  return cross / ss;
}

KmResult km_drift(std::span<const double> segment, int n_bins, double dt) {
  if (n_bins < 3) fail(ErrorKind::PreconditionViolated, "n_bins >= 3");
  require_length(segment.size(), static_cast<std::size_t>(10 * n_bins), "Kramers-Moyal drift");
  const std::size_t n = segment.size() - 1;  // states with a successor
  const std::vector<double> states(segment.begin(), segment.begin() + static_cast<std::ptrdiff_t>(n));
  const double lo = percentile(states, 0.05);
  const double hi = percentile(states, 0.95);
  if (!(hi > lo)) fail(ErrorKind::DegenerateBins, "percentile range is empty");
  const double width = (hi - lo) / n_bins;

  std::vector<double> inc_sum(n_bins, 0.0);
  std::vector<double> count(n_bins, 0.0);
  std::vector<int> bin_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = segment[i];
    if (x < lo || x > hi) continue;
    const int b = std::min(n_bins - 1, static_cast<int>((x - lo) / width));
    bin_of[i] = b;
    inc_sum[b] += (segment[i + 1] - x) / dt;
    count[b] += 1.0;
  }

  double sw = 0.0;
  double swx = 0.0;
  double swy = 0.0;
  int used = 0;
  std::vector<double> center(n_bins);
  std::vector<double> d1(n_bins, 0.0);
  for (int b = 0; b < n_bins; ++b) {
    center[b] = lo + (b + 0.5) * width;
    if (count[b] == 0.0) continue;
    d1[b] = inc_sum[b] / count[b];
    sw += count[b];
    swx += count[b] * center[b];
    swy += count[b] * d1[b];
    ++used;
  }
  if (used < 3) fail(ErrorKind::DegenerateBins, std::to_string(used) + " nonempty bins");
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    if (count[b] == 0.0) continue;
    sxx += count[b] * (center[b] - xbar) * (center[b] - xbar);
    sxy += count[b] * (center[b] - xbar) * (d1[b] - ybar);
  }

  KmResult res;
  res.slope = sxy / sxx;
  res.used_bins = used;
  const double intercept = ybar - res.slope * xbar;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bin_of[i] < 0) continue;
    const double r = (segment[i + 1] - segment[i]) / dt - (intercept + res.slope * center[bin_of[i]]);
    rss += r * r;
  }
  res.slope_stderr = std::sqrt(rss / std::max(1.0, sw - 2.0) / sxx);
  res.rate = -std::log(std::max(1.0 + res.slope * dt, kPhiFloor)) / dt;
  return res;
}

double km_drift_rate(std::span<const double> segment, int n_bins, double dt) {
  return km_drift(segment, n_bins, dt).rate;
}

GlsResult gls_ar1(std::span<const double> x, int max_iter, double tol) {
  require_length(x.size(), 50, "GLS AR(1)");
  const std::size_t n = x.size();
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * x[i + 1];
  }
  if (!(sxx > 0.0)) fail(ErrorKind::ZeroVariance, "GLS AR(1) on an all-zero segment");

  GlsResult res;
  double phi = sxy / sxx;
  for (int it = 1; it <= max_iter; ++it) {
    // Residual lag-1 correlation under the current phi.
    double ee = 0.0;
    double ee1 = 0.0;
    double prev = x[1] - phi * x[0];
    ee += prev * prev;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double e = x[i + 1] - phi * x[i];
      ee += e * e;
      ee1 += prev * e;
      prev = e;
    }
    const double rho = ee > 0.0 ? std::clamp(ee1 / ee, -1.0 + 1e-9, 1.0 - 1e-9) : 0.0;

    // Whitened regression (x_{i+1} - rho x_i) on (x_i - rho x_{i-1}).
    double zz = 0.0;
    double zy = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double z = x[i] - rho * x[i - 1];
      const double y = x[i + 1] - rho * x[i];
      zz += z * z;
      zy += z * y;
    }
    const double next = zz > 0.0 ? zy / zz : phi;
    res.iterations = it;
    res.rho = rho;
    const double change = std::abs(next - phi);
    phi = next;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  res.phi = std::clamp(phi, kPhiFloor, 1.0 - kPhiFloor);
  res.rate = -std::log(res.phi);
  return res;
}

double gls_ar1_rate(std::span<const double> segment, int max_iter, double tol) {
  return gls_ar1(segment, max_iter, tol).rate;
}

Trend indicator_trend(const IndicatorSeries& ind) {
  if (ind.centers.size() != ind.values.size()) {
    fail(ErrorKind::PreconditionViolated, "centers and values differ in length");
  }
  require_length(ind.values.size(), 3, "indicator trend");
  const double mt = mean_of(ind.centers);
  const double mv = mean_of(ind.values);
  double stt = 0.0;
  double stv = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < ind.values.size(); ++i) {
    stt += (ind.centers[i] - mt) * (ind.centers[i] - mt);
    stv += (ind.centers[i] - mt) * (ind.values[i] - mv);
    scale = std::max(scale, std::abs(ind.values[i]));
  }
  Trend t;
  t.slope = stv / stt;
  if (std::abs(t.slope) >= 1e-12 * scale && t.slope != 0.0) t.sign = t.slope > 0.0 ? 1 : -1;
  return t;
}

void write_indicator_rows(std::ostream& out, const IndicatorSeries& ind, const std::string& run_id) {
  for (std::size_t i = 0; i < ind.values.size(); ++i) {
    CsvRow(out) << ind.centers[i] << ind.values[i] << ind.estimator_id << run_id;
  }
}

}  // namespace ewslab::ews
