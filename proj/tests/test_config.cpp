#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nsdg/config.hpp"
#include "nsdg/io.hpp"
#include "nsdg/verify.hpp"

using namespace nsdg;

namespace {

std::string write_temp(const std::string& content) {
  static int counter = 0;
  const std::string path = "config_test_" + std::to_string(counter++) + ".cfg";
  std::ofstream os(path);
  os << content;
  return path;
}

}  // namespace

TEST_CASE("minimal config applies defaults") {
  const std::string path = write_temp("command: simulate\nk: 1\nn: 8\n");
  const RunConfig config = parse_config_file(path);
  std::remove(path.c_str());

  CHECK(config.command == "simulate");
  CHECK(config.k == 1);
  CHECK(config.n == 8);
  CHECK(config.mu == 1.0);
  CHECK(config.T == 0.5);
  const PenaltyConfig pen = config.penalties();
  CHECK(pen.sigma == 40.0);
  CHECK(pen.sigma_tilde == 40.0);
  CHECK(pen.delta == PenaltyConfig::kDefaultDelta);
  CHECK(!config.delta_warning());
  config.validate();
}

TEST_CASE("delta above the admissible range warns but is accepted") {
  const std::string path = write_temp("command = simulate\ndelta = 0.2\n");
  const RunConfig config = parse_config_file(path);
  std::remove(path.c_str());
  CHECK(config.delta == 0.2);
  CHECK(config.delta_warning());
  config.validate();
}

TEST_CASE("study requires nonempty levels") {
  const std::string path = write_temp("command: study\nlevels:\n");
  const RunConfig config = parse_config_file(path);
  std::remove(path.c_str());
  CHECK(config.levels.empty());
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("unknown keys and bad values are rejected by name") {
  const std::string bad_key = write_temp("command: simulate\nwhatever: 3\n");
  CHECK_THROWS_WITH_AS(parse_config_file(bad_key), "unknown config key 'whatever'",
                       std::invalid_argument);
  std::remove(bad_key.c_str());

  const std::string bad_value = write_temp("k: banana\n");
  try {
    parse_config_file(bad_value);
    CHECK(false);
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("'k'") != std::string::npos);
  }
  std::remove(bad_value.c_str());
}

TEST_CASE("config file parses levels, comments, overrides") {
  const std::string path = write_temp(
      "# study setup\ncommand: study\nk: 2\nlevels: 4, 8, 16\nmu: 0.5  # half\n"
      "sigma: 55\ntau_mode: fixed\ntau_c: 0.01\ncase: steady-vortex\nseed: 99\n");
  const RunConfig config = parse_config_file(path);
  std::remove(path.c_str());
  CHECK(config.levels == std::vector<int>{4, 8, 16});
  CHECK(config.mu == 0.5);
  CHECK(config.penalties().sigma == 55.0);
  CHECK(config.penalties().sigma_tilde == 90.0);  // still the k-based default
  CHECK(config.tau_mode == "fixed");
  CHECK(config.case_name == "steady-vortex");
  CHECK(config.seed == 99);
  config.validate();
}

TEST_CASE("constraint violations name the key") {
  RunConfig config;
  config.command = "simulate";
  config.k = 0;
  try {
    config.validate();
    CHECK(false);
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("'k'") != std::string::npos);
  }
}

TEST_CASE("atomic writes leave no partial files") {
  const std::string path = "atomic_test.txt";
  write_text_atomic(path, "hello\n");
  write_text_atomic(path, "replaced\n");
  std::ifstream is(path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  CHECK(buffer.str() == "replaced\n");
  std::ifstream tmp(path + ".tmp");
  CHECK(!tmp.good());
  std::remove(path.c_str());
}

TEST_CASE("identity suite is deterministic for a fixed seed") {
  const auto a = run_form_checks(2, {1}, 5, 42);
  const auto b = run_form_checks(2, {1}, 5, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].max_residual == b[i].max_residual);
  }
  CHECK(all_pass(a));
  const std::string table = format_check_table(a);
  CHECK(table.find("PASS") != std::string::npos);
}
