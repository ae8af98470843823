#include "erexp/run.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "erexp/finite_bound.hpp"
#include "erexp/rng.hpp"
#include "erexp/simulate.hpp"

namespace erexp::cli {

namespace {

// shortest decimal that round-trips to the same double
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + tmp);
    f << content;
    if (!f) throw std::runtime_error("failed writing output file: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("failed to move output into place: " + path);
}

std::string metadata_block(Command cmd, const RunConfig& cfg) {
  std::ostringstream out;
  out << "# erexp " << to_string(cmd) << " v" << kVersion << "\n";
  out << "# timestamp = " << timestamp_utc() << "\n";
  out << "# --- config ---\n";
  std::istringstream cfg_text(render_config(cfg));
  std::string line;
  while (std::getline(cfg_text, line)) out << "# " << line << "\n";
  out << "# --- end config ---\n";
  return out.str();
}

spectral::SpectralShape build_shape(const RunConfig& cfg) {
  switch (cfg.ensemble) {
    case EnsembleKind::random_linear:
      return spectral::random_linear_shape(cfg.ensemble_params());
    case EnsembleKind::raptor:
      return spectral::raptor_shape(cfg.raptor_params());
    case EnsembleKind::user_shape_file: {
      if (!cfg.shape_file) throw config_error(0, "missing key: shape_file");
      std::ifstream f(*cfg.shape_file);
      if (!f) throw config_error(0, "cannot open shape file: " + *cfg.shape_file);
      std::vector<std::pair<double, double>> samples;
      std::string line;
      int lineno = 0;
      while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double w, g;
        if (ls >> w >> g) samples.emplace_back(w, g);
      }
      return spectral::shape_from_samples(std::move(samples), cfg.gamma_override,
                                          cfg.ensemble_params());
    }
  }
  throw config_error(0, "unreachable ensemble kind");
}

void require_epsilon_grid(const RunConfig& cfg, bool open_interval) {
  if (cfg.epsilon_grid.empty()) throw config_error(0, "missing key: epsilon");
  if (open_interval)
    for (double e : cfg.epsilon_grid)
      if (!(e > 0.0 && e < 1.0))
        throw config_error(0, "epsilon values must lie in (0,1) for this command");
}

int run_exponent(const RunConfig& cfg, const RunOptions& opt,
                 const std::string& path) {
  require_epsilon_grid(cfg, true);
  if (opt.cross_check && cfg.ensemble != EnsembleKind::random_linear)
    throw config_error(0, "--cross-check on `exponent` requires the random_linear ensemble");
  const auto shape = build_shape(cfg);
  const auto curve = exponent::exponent_curve(shape, cfg.epsilon_grid, cfg.grid);

  std::ostringstream out;
  out << metadata_block(Command::exponent, cfg);
  out << "# shape = " << shape.id << "\n";
  out << "# gamma = " << fmt(shape.gamma) << "\n";
  out << (opt.cross_check ? "epsilon,E_G,argmin_delta,closed_form,abs_diff\n"
                          : "epsilon,E_G,argmin_delta\n");
  const auto params =
      cfg.ensemble == EnsembleKind::random_linear ? cfg.ensemble_params() : spectral::EnsembleParams{};
  for (const auto& p : curve.points) {
    out << fmt(p.epsilon) << "," << fmt(p.value) << "," << fmt(p.argmin_delta);
    if (opt.cross_check) {
      const double cf = exponent::exponent_random_linear_closed_form(params, p.epsilon);
      out << "," << fmt(cf) << "," << fmt(std::abs(p.value - cf));
    }
    out << "\n";
  }
  write_atomically(path, out.str());
  return kExitOk;
}

void threshold_row(std::ostream& out, const exponent::ThresholdResult& res) {
  out << fmt(res.delta_star) << "," << exponent::to_string(res.method) << ",";
  if (res.lambda_hat) out << fmt(*res.lambda_hat);
  out << ",";
  if (res.method == exponent::ThresholdMethod::system_2x2)
    out << fmt(res.residuals[0]) << "," << fmt(res.residuals[1]);
  else
    out << ",";
  out << "," << (res.useful ? "yes" : "no") << "\n";
}

int run_threshold(const RunConfig& cfg, const RunOptions& opt,
                  const std::string& path) {
  std::ostringstream out;
  out << metadata_block(Command::threshold, cfg);
  out << "delta_star,method,lambda_hat,residual_1,residual_2,useful\n";

  if (cfg.ensemble == EnsembleKind::raptor) {
    const auto params = cfg.raptor_params();
    threshold_row(out, exponent::threshold_raptor(params, cfg.grid));
    if (opt.cross_check)
      threshold_row(out, exponent::threshold_bisection(spectral::raptor_shape(params), cfg.grid));
  } else {
    const auto shape = build_shape(cfg);
    threshold_row(out, exponent::threshold_bisection(shape, cfg.grid));
    if (opt.cross_check && cfg.ensemble == EnsembleKind::random_linear) {
      exponent::ThresholdResult closed;
      closed.method = exponent::ThresholdMethod::closed_form;
      closed.delta_star = 1.0 - cfg.ensemble_params().rate;
      threshold_row(out, closed);
    }
  }
  write_atomically(path, out.str());
  return kExitOk;
}

int run_finite_bound(const RunConfig& cfg, const std::string& path) {
  require_epsilon_grid(cfg, false);
  finite_bound::WeightEnumerator awe;
  spectral::EnsembleParams params;
  if (cfg.ensemble == EnsembleKind::random_linear) {
    if (!cfg.n) throw config_error(0, "missing key: n");
    params = cfg.ensemble_params();
    awe = finite_bound::awe_random_linear(*cfg.n, params);
  } else if (cfg.ensemble == EnsembleKind::user_shape_file) {
    if (!cfg.awe_file) throw config_error(0, "missing key: awe_file");
    params = cfg.ensemble_params();
    awe = finite_bound::load_weight_enumerator_file(*cfg.awe_file);
  } else {
    throw config_error(0, "finite-bound supports random_linear or a user awe_file only");
  }
  const auto results = finite_bound::bound_curve(awe, params, cfg.epsilon_grid);

  std::ostringstream out;
  out << metadata_block(Command::finite_bound, cfg);
  out << "# realized_redundancy = " << awe.redundancy << "\n";
  out << "epsilon,n,bound,log2_bound\n";
  for (const auto& r : results)
    out << fmt(r.epsilon) << "," << r.n << "," << fmt(r.bound) << ","
        << fmt(r.log2_bound.log2_value) << "\n";
  write_atomically(path, out.str());
  return kExitOk;
}

int run_simulate(const RunConfig& cfg, const RunOptions& opt,
                 const std::string& path) {
  require_epsilon_grid(cfg, false);
  if (!cfg.n) throw config_error(0, "missing key: n");
  if (!cfg.trials) throw config_error(0, "missing key: trials");
  const std::uint64_t seed = opt.seed_override.value_or(cfg.seed.value_or(1));

  simulate::EnsembleSpec spec = simulate::RandomLinearEnsemble{};
  bool raptor = false;
  if (cfg.ensemble == EnsembleKind::random_linear) {
    spec = simulate::RandomLinearEnsemble{cfg.ensemble_params()};
  } else if (cfg.ensemble == EnsembleKind::raptor) {
    spec = simulate::RaptorEnsemble{cfg.raptor_params()};
    raptor = true;
  } else {
    throw config_error(0, "simulate supports random_linear and raptor ensembles");
  }

  std::ostringstream out;
  out << metadata_block(Command::simulate, cfg);
  if (raptor)
    out << "# lt_neighbor_model = distinct-without-replacement, degree capped at "
           "intermediate block size\n";
  out << "epsilon,n,trials,failures,p_hat,ci,seed\n";
  std::uint64_t sm = seed;
  for (std::size_t i = 0; i < cfg.epsilon_grid.size(); ++i) {
    // independent substream per grid point
    const std::uint64_t row_seed = splitmix64(sm);
    const auto est = simulate::monte_carlo(spec, *cfg.n, cfg.epsilon_grid[i],
                                           *cfg.trials, row_seed);
    out << fmt(cfg.epsilon_grid[i]) << "," << *cfg.n << "," << est.trials << ","
        << est.failures << "," << fmt(est.p_hat) << "," << fmt(est.ci_halfwidth)
        << "," << est.seed << "\n";
  }
  write_atomically(path, out.str());
  return kExitOk;
}

void print_plan(Command cmd, const RunConfig& cfg, const RunOptions& opt,
                const std::string& path, std::ostream& info) {
  info << "command: " << to_string(cmd) << "\n";
  info << "ensemble: " << to_string(cfg.ensemble) << "\n";
  if (!cfg.epsilon_grid.empty())
    info << "epsilon grid: " << cfg.epsilon_grid.size() << " points in ["
         << cfg.epsilon_grid.front() << ", " << cfg.epsilon_grid.back() << "]\n";
  if (cfg.n) info << "n: " << *cfg.n << "\n";
  if (cfg.trials) info << "trials: " << *cfg.trials << "\n";
  const std::uint64_t seed = opt.seed_override.value_or(cfg.seed.value_or(1));
  if (cmd == Command::simulate) info << "seed: " << seed << "\n";
  info << "outer_grid: " << cfg.grid.outer_points
       << ", inner grids: " << cfg.grid.inner_log_points << "+"
       << cfg.grid.inner_lin_points << "\n";
  info << "output: " << path << "\n";
  info << "plan only; nothing computed\n";
}

}  // namespace

std::optional<Command> command_from_string(const std::string& s) {
  if (s == "exponent") return Command::exponent;
  if (s == "threshold") return Command::threshold;
  if (s == "finite-bound") return Command::finite_bound;
  if (s == "simulate") return Command::simulate;
  return std::nullopt;
}

const char* to_string(Command c) {
  switch (c) {
    case Command::exponent:
      return "exponent";
    case Command::threshold:
      return "threshold";
    case Command::finite_bound:
      return "finite-bound";
    case Command::simulate:
      return "simulate";
  }
  return "unknown";
}

std::string resolve_out_path(Command cmd, const RunConfig& cfg,
                             const RunOptions& opt) {
  if (opt.out_override) return *opt.out_override;
  if (cfg.out) return *cfg.out;
  return std::string("erexp_") + to_string(cmd) + ".csv";
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

int run_command(Command cmd, const RunConfig& cfg, const RunOptions& opt,
                std::ostream& info) {
  const std::string path = resolve_out_path(cmd, cfg, opt);
  try {
    if (opt.dry_run) {
      // config is validated as far as command-independent parsing goes;
      // resolve command requirements without computing
      switch (cmd) {
        case Command::exponent:
          require_epsilon_grid(cfg, true);
          break;
        case Command::threshold:
          break;
        case Command::finite_bound:
          require_epsilon_grid(cfg, false);
          if (cfg.ensemble == EnsembleKind::raptor)
            throw config_error(0, "finite-bound supports random_linear or a user awe_file only");
          if (cfg.ensemble == EnsembleKind::random_linear && !cfg.n)
            throw config_error(0, "missing key: n");
          break;
        case Command::simulate:
          require_epsilon_grid(cfg, false);
          if (!cfg.n) throw config_error(0, "missing key: n");
          if (!cfg.trials) throw config_error(0, "missing key: trials");
          break;
      }
      print_plan(cmd, cfg, opt, path, info);
      return kExitOk;
    }
    switch (cmd) {
      case Command::exponent:
        return run_exponent(cfg, opt, path);
      case Command::threshold:
        return run_threshold(cfg, opt, path);
      case Command::finite_bound:
        return run_finite_bound(cfg, path);
      case Command::simulate:
        return run_simulate(cfg, opt, path);
    }
    return kExitInternal;
  } catch (const config_error& e) {
    info << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    info << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    info << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const numerics::convergence_error& e) {
    info << "solver did not converge: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    info << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace erexp::cli
