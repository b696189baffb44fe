#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsdg/forms.hpp"

namespace nsdg {

struct IdentityCheck {
  std::string name;
  int trials = 0;
  double max_residual = 0.0;  // relative to the accumulated term scale
  double tolerance = 0.0;
  bool pass = false;
};

// Randomized exact-identity suite for the convection, divergence, diffusion,
// and lift forms: integration-by-parts antisymmetry, positivity, the
// central/upwind split, equivalence of both divergence-form expressions,
// lift defining relations, symmetry, and sampled coercivity at the given
// penalties. Deterministic for a fixed seed.
std::vector<IdentityCheck> run_form_checks(int n, const std::vector<int>& degrees,
                                           int trials, std::uint64_t seed,
                                           const PenaltyConfig* penalties = nullptr);

std::string format_check_table(const std::vector<IdentityCheck>& checks);
bool all_pass(const std::vector<IdentityCheck>& checks);

}  // namespace nsdg
