#ifndef EREXP_CONFIG_HPP
#define EREXP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "erexp/exponent.hpp"
#include "erexp/spectral.hpp"

// Run configuration: key = value lines, '#' comments, and an optional
// [omega] section of (degree, probability) rows. Epsilon ranges given as
// start:stop:step are resolved to an explicit grid at parse time. Unknown
// keys are rejected; parse errors carry line numbers.
namespace erexp::cli {

struct config_error : std::runtime_error {
  int line = 0;
  config_error(int line_no, const std::string& msg)
      : std::runtime_error(line_no > 0
                               ? "config line " + std::to_string(line_no) + ": " + msg
                               : msg),
        line(line_no) {}
};

enum class EnsembleKind { random_linear, raptor, user_shape_file };

struct RunConfig {
  EnsembleKind ensemble = EnsembleKind::random_linear;

  // random_linear / user ensembles
  std::optional<double> rate;
  std::optional<int> field_order;

  // raptor
  std::optional<double> inner_rate;
  std::optional<double> outer_rate;
  std::optional<spectral::DegreeDistribution> omega;

  // user files
  std::optional<std::string> shape_file;
  std::optional<std::string> awe_file;
  std::optional<double> gamma_override;

  std::vector<double> epsilon_grid;

  std::optional<int> n;
  std::optional<long long> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  exponent::GridOptions grid;

  spectral::EnsembleParams ensemble_params() const;  // requires rate (+ q)
  spectral::RaptorParams raptor_params() const;      // requires raptor keys
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Canonical key = value rendering; parse_config(render_config(c)) is
/// equivalent to c.
std::string render_config(const RunConfig& cfg);

const char* to_string(EnsembleKind k);

}  // namespace erexp::cli

#endif  // EREXP_CONFIG_HPP
