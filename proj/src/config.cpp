#include "erexp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace erexp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw config_error(line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw config_error(line, "expected an integer, got '" + v + "'");
  }
}

std::vector<double> parse_epsilon(const std::string& v, int line) {
  std::vector<double> grid;
  if (v.find(':') != std::string::npos) {
    // start:stop:step with inclusive endpoints
    std::istringstream ss(v);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
        !std::getline(ss, c))
      throw config_error(line, "epsilon range must be start:stop:step");
    const double start = parse_double(trim(a), line);
    const double stop = parse_double(trim(b), line);
    const double step = parse_double(trim(c), line);
    if (!(step > 0.0) || stop < start)
      throw config_error(line, "epsilon range must have positive step and stop >= start");
    const long long count = std::llround((stop - start) / step);
    for (long long i = 0; i <= count; ++i) {
      const double e = start + static_cast<double>(i) * step;
      if (e <= stop + 1e-12) grid.push_back(std::min(e, stop));
    }
  } else {
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) grid.push_back(parse_double(tok, line));
    }
  }
  if (grid.empty()) throw config_error(line, "empty epsilon grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > 1.0)
      throw config_error(line, "epsilon values must lie in [0,1]");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw config_error(line, "epsilon grid must be strictly increasing");
  }
  return grid;
}

}  // namespace

spectral::EnsembleParams RunConfig::ensemble_params() const {
  spectral::EnsembleParams p;
  if (!rate) throw config_error(0, "missing key: r");
  p.rate = *rate;
  p.field_order = field_order.value_or(2);
  p.validate();
  return p;
}

spectral::RaptorParams RunConfig::raptor_params() const {
  spectral::RaptorParams p;
  if (!inner_rate) throw config_error(0, "missing key: r_i");
  if (!outer_rate) throw config_error(0, "missing key: r_o");
  if (!omega) throw config_error(0, "missing [omega] table");
  p.inner_rate = *inner_rate;
  p.outer_rate = *outer_rate;
  p.omega = *omega;
  p.validate();
  return p;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool saw_ensemble = false;
  bool in_omega = false;
  std::vector<std::pair<int, double>> omega_rows;
  int omega_line = 0;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line == "[omega]") {
        in_omega = true;
        omega_line = lineno;
        continue;
      }
      throw config_error(lineno, "unknown section '" + line + "'");
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!in_omega)
        throw config_error(lineno, "expected 'key = value' or an [omega] row");
      std::istringstream row(line);
      long long deg;
      double prob;
      if (!(row >> deg >> prob))
        throw config_error(lineno, "[omega] rows must be 'degree probability'");
      std::string rest;
      if (row >> rest) throw config_error(lineno, "trailing characters in [omega] row");
      if (deg < 1 || deg > 1'000'000)
        throw config_error(lineno, "degree must be a positive integer");
      omega_rows.emplace_back(static_cast<int>(deg), prob);
      continue;
    }

    in_omega = false;
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) throw config_error(lineno, "empty value for key '" + key + "'");

    if (key == "ensemble") {
      saw_ensemble = true;
      if (val == "random_linear")
        cfg.ensemble = EnsembleKind::random_linear;
      else if (val == "raptor")
        cfg.ensemble = EnsembleKind::raptor;
      else if (val == "user_shape_file")
        cfg.ensemble = EnsembleKind::user_shape_file;
      else
        throw config_error(lineno, "unknown ensemble '" + val + "'");
    } else if (key == "r") {
      cfg.rate = parse_double(val, lineno);
      if (!(*cfg.rate > 0.0 && *cfg.rate < 1.0))
        throw config_error(lineno, "r must be in (0,1)");
    } else if (key == "q") {
      const long long q = parse_int(val, lineno);
      if (q < 2 || q > 10'000) throw config_error(lineno, "q must be an integer >= 2");
      cfg.field_order = static_cast<int>(q);
    } else if (key == "r_i") {
      cfg.inner_rate = parse_double(val, lineno);
      if (!(*cfg.inner_rate > 0.0 && *cfg.inner_rate <= 1.0))
        throw config_error(lineno, "r_i must be in (0,1]");
    } else if (key == "r_o") {
      cfg.outer_rate = parse_double(val, lineno);
      if (!(*cfg.outer_rate > 0.0 && *cfg.outer_rate <= 1.0))
        throw config_error(lineno, "r_o must be in (0,1]");
    } else if (key == "epsilon") {
      cfg.epsilon_grid = parse_epsilon(val, lineno);
    } else if (key == "n") {
      const long long n = parse_int(val, lineno);
      if (n < 1 || n > 100'000'000) throw config_error(lineno, "n must be a positive integer");
      cfg.n = static_cast<int>(n);
    } else if (key == "trials") {
      const long long t = parse_int(val, lineno);
      if (t < 1) throw config_error(lineno, "trials must be >= 1");
      cfg.trials = t;
    } else if (key == "seed") {
      try {
        cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
      } catch (const std::exception&) {
        throw config_error(lineno, "seed must be a nonnegative integer");
      }
    } else if (key == "out") {
      cfg.out = val;
    } else if (key == "shape_file") {
      cfg.shape_file = val;
    } else if (key == "awe_file") {
      cfg.awe_file = val;
    } else if (key == "gamma") {
      cfg.gamma_override = parse_double(val, lineno);
    } else if (key == "outer_grid") {
      const long long g = parse_int(val, lineno);
      if (g < 8 || g > 1'000'000) throw config_error(lineno, "outer_grid out of range");
      cfg.grid.outer_points = static_cast<int>(g);
    } else if (key == "inner_log_grid") {
      const long long g = parse_int(val, lineno);
      if (g < 8 || g > 1'000'000) throw config_error(lineno, "inner_log_grid out of range");
      cfg.grid.inner_log_points = static_cast<int>(g);
    } else if (key == "inner_lin_grid") {
      const long long g = parse_int(val, lineno);
      if (g < 8 || g > 1'000'000) throw config_error(lineno, "inner_lin_grid out of range");
      cfg.grid.inner_lin_points = static_cast<int>(g);
    } else if (key == "refine_tol") {
      cfg.grid.refine_tol = parse_double(val, lineno);
      if (!(cfg.grid.refine_tol > 0.0)) throw config_error(lineno, "refine_tol must be positive");
    } else if (key == "tol_pos") {
      cfg.grid.tol_pos = parse_double(val, lineno);
      if (!(cfg.grid.tol_pos > 0.0)) throw config_error(lineno, "tol_pos must be positive");
    } else if (key == "bisect_tol") {
      cfg.grid.bisect_tol = parse_double(val, lineno);
      if (!(cfg.grid.bisect_tol > 0.0)) throw config_error(lineno, "bisect_tol must be positive");
    } else if (key == "scan_step") {
      cfg.grid.scan_step = parse_double(val, lineno);
      if (!(cfg.grid.scan_step > 0.0 && cfg.grid.scan_step < 1.0))
        throw config_error(lineno, "scan_step must be in (0,1)");
    } else {
      throw config_error(lineno, "unknown key '" + key + "'");
    }
  }

  if (!saw_ensemble) throw config_error(0, "missing key: ensemble");
  if (!omega_rows.empty()) {
    try {
      cfg.omega = spectral::DegreeDistribution::from_pairs(omega_rows);
    } catch (const std::invalid_argument& e) {
      throw config_error(omega_line, e.what());
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error(0, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace {

// shortest decimal that round-trips to the same double
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "ensemble = " << to_string(cfg.ensemble) << "\n";
  if (cfg.rate) out << "r = " << fmt(*cfg.rate) << "\n";
  if (cfg.field_order) out << "q = " << *cfg.field_order << "\n";
  if (cfg.inner_rate) out << "r_i = " << fmt(*cfg.inner_rate) << "\n";
  if (cfg.outer_rate) out << "r_o = " << fmt(*cfg.outer_rate) << "\n";
  if (cfg.shape_file) out << "shape_file = " << *cfg.shape_file << "\n";
  if (cfg.awe_file) out << "awe_file = " << *cfg.awe_file << "\n";
  if (cfg.gamma_override) out << "gamma = " << fmt(*cfg.gamma_override) << "\n";
  if (!cfg.epsilon_grid.empty()) {
    out << "epsilon = ";
    for (std::size_t i = 0; i < cfg.epsilon_grid.size(); ++i)
      out << (i ? "," : "") << fmt(cfg.epsilon_grid[i]);
    out << "\n";
  }
  if (cfg.n) out << "n = " << *cfg.n << "\n";
  if (cfg.trials) out << "trials = " << *cfg.trials << "\n";
  if (cfg.seed) out << "seed = " << *cfg.seed << "\n";
  if (cfg.out) out << "out = " << *cfg.out << "\n";

  const exponent::GridOptions def;
  if (cfg.grid.outer_points != def.outer_points)
    out << "outer_grid = " << cfg.grid.outer_points << "\n";
  if (cfg.grid.inner_log_points != def.inner_log_points)
    out << "inner_log_grid = " << cfg.grid.inner_log_points << "\n";
  if (cfg.grid.inner_lin_points != def.inner_lin_points)
    out << "inner_lin_grid = " << cfg.grid.inner_lin_points << "\n";
  if (cfg.grid.refine_tol != def.refine_tol)
    out << "refine_tol = " << fmt(cfg.grid.refine_tol) << "\n";
  if (cfg.grid.tol_pos != def.tol_pos) out << "tol_pos = " << fmt(cfg.grid.tol_pos) << "\n";
  if (cfg.grid.bisect_tol != def.bisect_tol)
    out << "bisect_tol = " << fmt(cfg.grid.bisect_tol) << "\n";
  if (cfg.grid.scan_step != def.scan_step)
    out << "scan_step = " << fmt(cfg.grid.scan_step) << "\n";

  if (cfg.omega) {
    out << "[omega]\n";
    const auto& d = *cfg.omega;
    for (std::size_t i = 0; i < d.degrees().size(); ++i)
      out << d.degrees()[i] << " " << fmt(d.probabilities()[i]) << "\n";
  }
  return out.str();
}

const char* to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::random_linear:
      return "random_linear";
    case EnsembleKind::raptor:
      return "raptor";
    case EnsembleKind::user_shape_file:
      return "user_shape_file";
  }
  return "unknown";
}

}  // namespace erexp::cli
