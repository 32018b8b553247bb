#include "ewslab/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ewslab::report {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f, const std::string& xl, const std::string& yl) {
  const double l = kLeft;
  const double r = kWidth - kRight;
  const double t = kTop;
  const double b = kHeight - kBottom;
  out << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << r - l << "\" height=\"" << b - t
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    out << "<text x=\"" << f.px(xv) << "\" y=\"" << b + 16 << "\" text-anchor=\"middle\">" << fmt(xv)
        << "</text>\n";
    out << "<text x=\"" << l - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << (l + r) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(xl) << "</text>\n";
  out << "<text transform=\"translate(16," << (t + b) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

std::string ramp(double u) {
  // white -> dark blue
  u = std::clamp(u, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 * (1.0 - 0.9 * u)));
  const int g = static_cast<int>(std::lround(255 * (1.0 - 0.75 * u)));
  const int b = static_cast<int>(std::lround(255 * (1.0 - 0.45 * u)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

// Cell edges at midpoints between grid values.
std::vector<double> edges(const std::vector<double>& grid) {
  std::vector<double> e(grid.size() + 1);
  if (grid.size() == 1) return {grid[0] - 0.5, grid[0] + 0.5};
  for (std::size_t i = 1; i < grid.size(); ++i) e[i] = 0.5 * (grid[i - 1] + grid[i]);
  e.front() = grid.front() - (e[1] - grid.front());
  e.back() = grid.back() + (grid.back() - e[grid.size() - 1]);
  return e;
}

template <class ColourOf>
std::string heatmap(const std::string& title, const std::string& xl, const std::string& yl,
                    const std::vector<double>& cols, const std::vector<double>& rows,
                    ColourOf colour_of) {
  std::ostringstream out;
  open_svg(out, title);
  const auto ce = edges(cols);
  const auto re = edges(rows);
  const Frame f{ce.front(), ce.back(), re.front(), re.back()};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double x = f.px(ce[j]);
      const double y = f.py(re[i + 1]);
      out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(f.px(ce[j + 1]) - x + 0.3) << "\" height=\"" << fmt(f.py(re[i]) - y + 0.3)
          << "\" fill=\"" << colour_of(i * cols.size() + j) << "\"/>\n";
    }
  }
  axes(out, f, xl, yl);
  out << "</svg>\n";
  return out.str();
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<LineSeries>& series) {
  static constexpr std::array<const char*, 6> kColours = {"#1f77b4", "#d62728", "#2ca02c",
                                                          "#9467bd", "#ff7f0e", "#17becf"};
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) {
    x0 = std::isfinite(x0) ? x0 - 1 : 0;
    x1 = x0 + 2;
  }
  if (!(y1 > y0)) {
    y0 = std::isfinite(y0) ? y0 - 1 : 0;
    y1 = y0 + 2;
  }
  const double pad = 0.05 * (y1 - y0);
  const Frame f{x0, x1, y0 - pad, y1 + pad};

  std::ostringstream out;
  open_svg(out, title);
  axes(out, f, x_label, y_label);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kColours[k % kColours.size()];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    const double ly = kTop + 16.0 * (k + 1);
    out << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kWidth - kRight + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\"/>\n"
        << "<text x=\"" << kWidth - kRight + 34 << "\" y=\"" << ly << "\">" << escape(s.label)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_sign_heatmap(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<double>& cols,
                             const std::vector<double>& rows,
                             const std::vector<std::int8_t>& values) {
  return heatmap(title, x_label, y_label, cols, rows, [&](std::size_t idx) -> std::string {
    if (values[idx] < 0) return "#d62728";
    if (values[idx] > 0) return "#1f5fbf";
    return "#ffffff";
  });
}

std::string svg_value_heatmap(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<double>& cols,
                              const std::vector<double>& rows, const std::vector<double>& values,
                              bool log_scale) {
  auto tf = [log_scale](double v) { return log_scale ? std::log10(std::max(v, 1e-300)) : v; };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, tf(v));
    hi = std::max(hi, tf(v));
  }
  const double span = hi > lo ? hi - lo : 1.0;
  return heatmap(title, x_label, y_label, cols, rows,
                 [&](std::size_t idx) { return ramp((tf(values[idx]) - lo) / span); });
}

}  // namespace ewslab::report
