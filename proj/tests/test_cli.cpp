#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "erexp/run.hpp"

using namespace erexp::cli;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// CSV lines with the volatile timestamp removed
std::vector<std::string> comparable_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# timestamp", 0) != 0) lines.push_back(line);
  return lines;
}

std::string extract_config_echo(const std::string& text) {
  std::istringstream in(text);
  std::string line, cfg;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line == "# --- config ---") {
      inside = true;
      continue;
    }
    if (line == "# --- end config ---") break;
    if (inside && line.rfind("# ", 0) == 0) cfg += line.substr(2) + "\n";
  }
  return cfg;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& p) : path(p) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("threshold command writes the resolved CSV") {
  const auto cfg = parse_config(
      "ensemble = random_linear\nr = 0.5\nq = 2\n");
  RunOptions opt;
  TempFile out("cli_threshold_rl.csv");
  opt.out_override = out.path;
  std::ostringstream info;
  CHECK(run_command(Command::threshold, cfg, opt, info) == kExitOk);
  const auto text = slurp(out.path);
  CHECK(text.find("delta_star,method,lambda_hat,residual_1,residual_2,useful") !=
        std::string::npos);
  CHECK(text.find("0.5") != std::string::npos);
  CHECK(text.find("bisection") != std::string::npos);
}

TEST_CASE("exponent command with cross-check emits matching oracle columns") {
  const auto cfg = parse_config(
      "ensemble = random_linear\nr = 0.5\nq = 2\n"
      "epsilon = 0.1,0.3,0.45\nouter_grid = 512\n");
  RunOptions opt;
  TempFile out("cli_exponent_rl.csv");
  opt.out_override = out.path;
  opt.cross_check = true;
  std::ostringstream info;
  CHECK(run_command(Command::exponent, cfg, opt, info) == kExitOk);
  const auto text = slurp(out.path);
  CHECK(text.find("epsilon,E_G,argmin_delta,closed_form,abs_diff") != std::string::npos);
  // every cross-check difference stays within the oracle tolerance
  std::istringstream in(text);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'e') continue;
    const auto last = line.rfind(',');
    CHECK(std::stod(line.substr(last + 1)) < 1e-6);
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("config echo in the metadata block re-parses equivalently") {
  const auto cfg = parse_config(
      "ensemble = random_linear\nr = 0.25\nq = 3\n"
      "epsilon = 0.1:0.7:0.2\nn = 64\n");
  RunOptions opt;
  TempFile out("cli_bound_rl.csv");
  opt.out_override = out.path;
  std::ostringstream info;
  CHECK(run_command(Command::finite_bound, cfg, opt, info) == kExitOk);
  const auto echoed = extract_config_echo(slurp(out.path));
  const auto reparsed = parse_config(echoed);
  CHECK(render_config(reparsed) == render_config(cfg));
}

TEST_CASE("simulate: same seed gives byte-identical bodies, new seed differs") {
  const auto cfg = parse_config(
      "ensemble = random_linear\nr = 0.5\nq = 2\n"
      "epsilon = 0.35,0.45\nn = 48\ntrials = 4000\nseed = 77\n");
  RunOptions opt;
  TempFile out1("cli_sim1.csv"), out2("cli_sim2.csv"), out3("cli_sim3.csv");
  std::ostringstream info;

  opt.out_override = out1.path;
  CHECK(run_command(Command::simulate, cfg, opt, info) == kExitOk);
  opt.out_override = out2.path;
  CHECK(run_command(Command::simulate, cfg, opt, info) == kExitOk);
  CHECK(comparable_lines(slurp(out1.path)) == comparable_lines(slurp(out2.path)));

  opt.out_override = out3.path;
  opt.seed_override = 78;
  CHECK(run_command(Command::simulate, cfg, opt, info) == kExitOk);
  CHECK(comparable_lines(slurp(out1.path)) != comparable_lines(slurp(out3.path)));
}

TEST_CASE("dry run validates and prints a plan without writing") {
  const auto cfg = parse_config(
      "ensemble = random_linear\nr = 0.5\nq = 2\n"
      "epsilon = 0.1,0.2\nn = 32\ntrials = 100\n");
  RunOptions opt;
  opt.dry_run = true;
  opt.out_override = "should_not_exist.csv";
  std::ostringstream info;
  CHECK(run_command(Command::simulate, cfg, opt, info) == kExitOk);
  CHECK(info.str().find("plan only") != std::string::npos);
  std::ifstream f("should_not_exist.csv");
  CHECK_FALSE(f.good());
}

TEST_CASE("user shape file drives threshold and exponent") {
  // sample the known random-linear shape into a file; the interpolated
  // threshold must land on 1 - r
  TempFile shape("user_shape_rl.txt");
  {
    std::ofstream f(shape.path);
    f << "# omega G\n";
    for (int i = 1; i <= 600; ++i) {
      const double w = static_cast<double>(i) / 601.0;
      const double g = -0.5 - w * std::log2(w) - (1 - w) * std::log2(1 - w);
      f << w << " " << g << "\n";
    }
  }
  std::ostringstream cfg_text;
  cfg_text << "ensemble = user_shape_file\nr = 0.5\nq = 2\n"
           << "gamma = -0.5\nshape_file = " << shape.path << "\n";
  const auto cfg = parse_config(cfg_text.str());
  RunOptions opt;
  TempFile out("cli_user_threshold.csv");
  opt.out_override = out.path;
  std::ostringstream info;
  CHECK(run_command(Command::threshold, cfg, opt, info) == kExitOk);
  const auto text = slurp(out.path);
  const auto pos = text.find("\n0.");
  REQUIRE(pos != std::string::npos);
  const double delta_star = std::stod(text.substr(pos + 1));
  CHECK(delta_star == doctest::Approx(0.5).epsilon(1e-3));

  // a missing shape_file key is a config error
  const auto broken = parse_config("ensemble = user_shape_file\nr = 0.5\nq = 2\n");
  CHECK(run_command(Command::threshold, broken, {}, info) == kExitConfig);
}

TEST_CASE("user weight-enumerator file drives finite-bound") {
  // write the n=16 random-linear enumerator to a file and check the command
  // reproduces the built-in ensemble's bound
  TempFile awe_file("user_awe_rl.txt");
  {
    std::ofstream f(awe_file.path);
    f << "0 0\n";
    long double c = 16.0L;
    for (int w = 1; w <= 16; ++w) {
      f.precision(17);
      f << w << " " << static_cast<double>(std::log2(c)) - 8.0 << "\n";
      c = c * (16 - w) / (w + 1);
    }
  }
  std::ostringstream cfg_text;
  cfg_text << "ensemble = user_shape_file\nr = 0.5\nq = 2\nepsilon = 0.3\n"
           << "awe_file = " << awe_file.path << "\n";
  const auto cfg = parse_config(cfg_text.str());
  RunOptions opt;
  TempFile out("cli_user_bound.csv");
  opt.out_override = out.path;
  std::ostringstream info;
  CHECK(run_command(Command::finite_bound, cfg, opt, info) == kExitOk);
  const auto text = slurp(out.path);

  const auto builtin = parse_config(
      "ensemble = random_linear\nr = 0.5\nq = 2\nepsilon = 0.3\nn = 16\n");
  TempFile out2("cli_builtin_bound.csv");
  opt.out_override = out2.path;
  CHECK(run_command(Command::finite_bound, builtin, opt, info) == kExitOk);
  const auto text2 = slurp(out2.path);

  // the two AWE sources agree to rounding (file entries vs log-gamma),
  // so the bounds must agree to high relative precision
  auto bound_value = [](const std::string& t) {
    const auto pos = t.rfind("\n0.3,16,");
    REQUIRE(pos != std::string::npos);
    std::istringstream row(t.substr(pos + 1));
    std::string eps, n, bound;
    std::getline(row, eps, ',');
    std::getline(row, n, ',');
    std::getline(row, bound, ',');
    return std::stod(bound);
  };
  CHECK(bound_value(text) ==
        doctest::Approx(bound_value(text2)).epsilon(1e-12));
}

TEST_CASE("command errors map to the exit-code contract") {
  std::ostringstream info;
  // missing epsilon for exponent -> config error
  const auto cfg1 = parse_config("ensemble = random_linear\nr = 0.5\nq = 2\n");
  CHECK(run_command(Command::exponent, cfg1, {}, info) == kExitConfig);

  // raptor has no finite-length enumerator
  const auto cfg2 = parse_config(
      "ensemble = raptor\nr_i = 0.8\nr_o = 0.99\nepsilon = 0.1\nn = 64\n"
      "[omega]\n1 1.0\n");
  CHECK(run_command(Command::finite_bound, cfg2, {}, info) == kExitConfig);

  // simulate requires n and trials
  const auto cfg3 = parse_config(
      "ensemble = random_linear\nr = 0.5\nq = 2\nepsilon = 0.1\n");
  CHECK(run_command(Command::simulate, cfg3, {}, info) == kExitConfig);

  // a raptor ensemble outside the usefulness region cannot be thresholded
  const auto cfg4 = parse_config(
      "ensemble = raptor\nr_i = 0.8\nr_o = 1.0\nepsilon = 0.1\n"
      "[omega]\n1 0.0098\n2 0.4590\n3 0.2110\n4 0.1134\n10 0.1113\n11 0.0799\n40 0.0156\n");
  CHECK(run_command(Command::threshold, cfg4, {}, info) == kExitConfig);

  // simulate over a non-prime field is rejected
  const auto cfg5 = parse_config(
      "ensemble = random_linear\nr = 0.5\nq = 4\nepsilon = 0.1\nn = 16\ntrials = 10\n");
  CHECK(run_command(Command::simulate, cfg5, {}, info) == kExitConfig);
}

TEST_CASE("command name round trip") {
  for (const char* name : {"exponent", "threshold", "finite-bound", "simulate"}) {
    const auto c = command_from_string(name);
    REQUIRE(c.has_value());
    CHECK(std::string(to_string(*c)) == name);
  }
  CHECK_FALSE(command_from_string("nope").has_value());
}

TEST_CASE("csv quoting") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
