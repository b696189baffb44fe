#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsdg/forms.hpp"

namespace nsdg {

// User-facing run configuration: a flat key=value file plus command-line
// overrides. Unknown keys are rejected; constraint violations name the key.
struct RunConfig {
  std::string command;  // simulate | study | verify-forms
  int k = 1;
  int n = 8;
  std::vector<int> levels;
  double mu = 1.0;
  double sigma = -1.0;        // < 0 means the default 10 (k+1)^2
  double sigma_tilde = -1.0;  // < 0 means the default 10 (k+1)^2
  double delta = PenaltyConfig::kDefaultDelta;
  double T = 0.5;
  std::string tau_mode = "h2";  // h2 | h | fixed
  double tau_c = 1.0;
  std::string case_name = "vortex";
  std::string output_dir = ".";
  std::uint64_t seed = 2024;
  int trials = 100;

  PenaltyConfig penalties() const;
  bool delta_warning() const { return delta > 0.125; }  // delta <= 1/(4d), d = 2
  void validate() const;
};

// Parses `key = value` (or `key: value`) lines into `base`; '#' starts a
// comment. Throws std::invalid_argument for unknown keys or bad values.
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

std::vector<int> parse_int_list(const std::string& text);

}  // namespace nsdg
