#ifndef EREXP_RUN_HPP
#define EREXP_RUN_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "erexp/config.hpp"

namespace erexp::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit-code contract: 0 success, 2 configuration error, 3 solver
// non-convergence, 1 unexpected internal failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoConvergence = 3;

enum class Command { exponent, threshold, finite_bound, simulate };

struct RunOptions {
  std::optional<std::string> out_override;
  std::optional<std::uint64_t> seed_override;
  bool dry_run = false;
  bool cross_check = false;
};

std::optional<Command> command_from_string(const std::string& s);
const char* to_string(Command c);

/// Execute one subcommand against a parsed config; CSV artifacts are written
/// to the resolved output path via a temp file and an atomic rename.
/// Diagnostics and the dry-run plan go to `info`. Returns an exit code.
int run_command(Command cmd, const RunConfig& cfg, const RunOptions& opt,
                std::ostream& info);

/// Output path resolution: --out flag, else the config's `out`, else
/// "erexp_<command>.csv".
std::string resolve_out_path(Command cmd, const RunConfig& cfg,
                             const RunOptions& opt);

/// RFC-4180 field quoting (used for non-numeric fields).
std::string csv_quote(const std::string& field);

}  // namespace erexp::cli

#endif  // EREXP_RUN_HPP
