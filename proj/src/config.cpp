#include "ewslab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string_view>
#include <vector>

#include "ewslab/csv.hpp"
#include "ewslab/error.hpp"

namespace ewslab {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_bool(std::string_view text, bool& out) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    out = true;
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    out = false;
    return true;
  }
  return false;
}

using Setter = std::function<bool(ExperimentConfig&, std::string_view)>;

struct Key {
  std::string section;
  std::string name;
  Setter set;
};

template <class T, class Access>
Setter number_setter(Access access) {
  return [access](ExperimentConfig& cfg, std::string_view v) {
    T value{};
    if (!parse_number(v, value)) return false;
    access(cfg) = value;
    return true;
  };
}

#define EWSLAB_NUM(section, name, type, member) \
  Key { section, name, number_setter<type>([](ExperimentConfig& c) -> type& { return c.member; }) }

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys = {
      Key{"run", "experiment",
          [](ExperimentConfig& c, std::string_view v) {
            c.experiment = parse_experiment(std::string(v));
            return true;
          }},
      Key{"run", "output_dir",
          [](ExperimentConfig& c, std::string_view v) {
            c.output_dir = std::string(v);
            return !v.empty();
          }},
      Key{"run", "svg", [](ExperimentConfig& c, std::string_view v) { return parse_bool(v, c.emit_svg); }},
      EWSLAB_NUM("ou", "lambda_x", double, ou.lambda_x),
      EWSLAB_NUM("ou", "lambda_y", double, ou.lambda_y),
      EWSLAB_NUM("ou", "sigma_x", double, ou.sigma_x),
      EWSLAB_NUM("ou", "sigma_y", double, ou.sigma_y),
      EWSLAB_NUM("ou", "c", double, ou.c),
      EWSLAB_NUM("observable", "beta", double, obs.beta),
      EWSLAB_NUM("sim", "t_total", double, sim.t_total),
      EWSLAB_NUM("sim", "dt", double, sim.dt),
      EWSLAB_NUM("sim", "subsample", int, sim.subsample),
      EWSLAB_NUM("sim", "epsilon", double, sim.epsilon),
      EWSLAB_NUM("sim", "alpha0", double, sim.alpha0),
      EWSLAB_NUM("sim", "alpha_slope_frac", double, sim.alpha_slope_frac),
      EWSLAB_NUM("sim", "s11", double, sim.sigma.s11),
      EWSLAB_NUM("sim", "s12", double, sim.sigma.s12),
      EWSLAB_NUM("sim", "s22", double, sim.sigma.s22),
      Key{"sim", "x0",
          [](ExperimentConfig& c, std::string_view v) {
            double x = 0.0;
            if (!parse_number(v, x)) return false;
            c.sim.x0 = x;
            return true;
          }},
      EWSLAB_NUM("sim", "y0", double, sim.y0),
      EWSLAB_NUM("sim", "burn_in", double, sim.burn_in),
      EWSLAB_NUM("sim", "tip_threshold", double, sim.tip_threshold),
      EWSLAB_NUM("sim", "alpha_cut", double, sim.alpha_cut),
      EWSLAB_NUM("sim", "seed", std::uint64_t, sim.seed),
      EWSLAB_NUM("sim", "n_runs", int, sim.n_runs),
      EWSLAB_NUM("window", "window_length", std::size_t, window.length),
      EWSLAB_NUM("window", "window_stride", std::size_t, window.stride),
      Key{"window", "detrend",
          [](ExperimentConfig& c, std::string_view v) {
            c.window.detrend = ews::parse_detrend(std::string(v));
            return true;
          }},
      EWSLAB_NUM("welch", "welch_segment", std::size_t, welch.segment),
      EWSLAB_NUM("welch", "welch_overlap", double, welch.overlap),
      EWSLAB_NUM("grids", "beta_points", std::size_t, grids.beta_points),
      EWSLAB_NUM("grids", "lambda_points", std::size_t, grids.lambda_points),
      EWSLAB_NUM("grids", "lambda_min", double, grids.lambda_min),
      EWSLAB_NUM("grids", "fig1_points", std::size_t, grids.fig1_points),
      EWSLAB_NUM("grids", "n_draws", std::size_t, grids.n_draws),
      EWSLAB_NUM("grids", "delta", double, grids.delta),
  };
  return keys;
}

#undef EWSLAB_NUM

[[noreturn]] void parse_error(const std::string& source, int line, const std::string& what) {
  fail(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Fig1: return "fig1";
    case Experiment::Fig2: return "fig2";
    case Experiment::Fig3: return "fig3";
    case Experiment::Theorem: return "theorem";
    case Experiment::Custom: return "custom";
  }
  return "custom";
}

Experiment parse_experiment(const std::string& s) {
  for (Experiment e : {Experiment::Fig1, Experiment::Fig2, Experiment::Fig3, Experiment::Theorem,
                       Experiment::Custom}) {
    if (s == to_string(e)) return e;
  }
  fail(ErrorKind::ValidationError, "unknown experiment '" + s + "'");
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::ValidationError, what); };
  if (!(ou.lambda_x > 0.0) || !(ou.lambda_y > 0.0)) {
    bad("stationarity: lambda_x > 0 and lambda_y > 0");
  }
  sim.validate();
  window.validate();
  welch.validate();
  if (welch.segment > window.length) bad("welch_segment <= window_length");
  if (!(grids.lambda_min > 0.0)) bad("lambda_min > 0");
  if (!(grids.lambda_min < ou.lambda_y)) bad("lambda_min < lambda_y");
  if (grids.beta_points < 2 || grids.lambda_points < 2 || grids.fig1_points < 2) {
    bad("grid point counts >= 2");
  }
  if (grids.n_draws < 1) bad("n_draws >= 1");
  if (!(grids.delta > 0.0)) bad("delta > 0");
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> sections;
  for (const Key& k : key_table()) sections.insert(k.section);

  std::string current;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') parse_error(source, line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(name)) parse_error(source, line_no, "unknown section [" + name + "]");
      current = name;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(source, line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    const Key* match = nullptr;
    for (const Key& k : key_table()) {
      if (k.name == key) match = &k;
    }
    if (!match) parse_error(source, line_no, "unknown key '" + key + "'");
    if (!current.empty() && match->section != current) {
      parse_error(source, line_no,
                  "key '" + key + "' belongs to [" + match->section + "], not [" + current + "]");
    }
    if (!seen.insert(key).second) parse_error(source, line_no, "duplicate key '" + key + "'");
    bool ok = false;
    try {
      ok = match->set(cfg, value);
    } catch (const Error& e) {
      parse_error(source, line_no, e.what());
    }
    if (!ok) parse_error(source, line_no, "bad value '" + std::string(value) + "' for " + key);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + file.string());
  return parse_config(in, file.string());
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto kv = [&out](const char* k, const std::string& v) { out << k << " = " << v << '\n'; };
  auto num = [&kv](const char* k, double v) { kv(k, format_double(v)); };
  auto cnt = [&kv](const char* k, auto v) { kv(k, std::to_string(v)); };

  out << "# resolved ewslab configuration\n[run]\n";
  kv("experiment", to_string(cfg.experiment));
  kv("output_dir", cfg.output_dir);
  kv("svg", cfg.emit_svg ? "true" : "false");
  out << "\n[ou]\n";
  num("lambda_x", cfg.ou.lambda_x);
  num("lambda_y", cfg.ou.lambda_y);
  num("sigma_x", cfg.ou.sigma_x);
  num("sigma_y", cfg.ou.sigma_y);
  num("c", cfg.ou.c);
  out << "\n[observable]\n";
  num("beta", cfg.obs.beta);
  out << "\n[sim]\n";
  num("t_total", cfg.sim.t_total);
  num("dt", cfg.sim.dt);
  cnt("subsample", cfg.sim.subsample);
  num("epsilon", cfg.sim.epsilon);
  num("alpha0", cfg.sim.alpha0);
  num("alpha_slope_frac", cfg.sim.alpha_slope_frac);
  num("s11", cfg.sim.sigma.s11);
  num("s12", cfg.sim.sigma.s12);
  num("s22", cfg.sim.sigma.s22);
  num("x0", cfg.sim.initial_x());
  num("y0", cfg.sim.y0);
  num("burn_in", cfg.sim.burn_in);
  num("tip_threshold", cfg.sim.tip_threshold);
  num("alpha_cut", cfg.sim.alpha_cut);
  cnt("seed", cfg.sim.seed);
  cnt("n_runs", cfg.sim.n_runs);
  out << "\n[window]\n";
  cnt("window_length", cfg.window.length);
  cnt("window_stride", cfg.window.stride);
  kv("detrend", ews::to_string(cfg.window.detrend));
  out << "\n[welch]\n";
  cnt("welch_segment", cfg.welch.segment);
  num("welch_overlap", cfg.welch.overlap);
  out << "\n[grids]\n";
  cnt("beta_points", cfg.grids.beta_points);
  cnt("lambda_points", cfg.grids.lambda_points);
  num("lambda_min", cfg.grids.lambda_min);
  cnt("fig1_points", cfg.grids.fig1_points);
  cnt("n_draws", cfg.grids.n_draws);
  num("delta", cfg.grids.delta);
  return out.str();
}

}  // namespace ewslab
