#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsdg/splitting.hpp"

namespace nsdg {

// Manufactured exact solution with closed-form derivatives. The forcing is
// synthesized as f = du/dt - mu Lap(u) + (u.grad)u + grad p.
struct ManufacturedCase {
  std::string name;
  double mu = 1.0;
  std::function<Vec2(const Vec2&, double)> velocity;
  std::function<Mat2(const Vec2&, double)> velocity_gradient;
  std::function<Vec2(const Vec2&, double)> velocity_dt;
  std::function<Vec2(const Vec2&, double)> velocity_laplacian;
  std::function<double(const Vec2&, double)> pressure;

  Vec2 forcing(const Vec2& x, double t) const;
  std::function<Vec2(const Vec2&, double)> pressure_gradient;
};

// Divergence-free vortex with g(t) = cos t:
//   u = g (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y)),
//   p = g sin(2 pi x) cos(2 pi y).
ManufacturedCase vortex_case(double mu);

// Same spatial profile frozen in time (g = 1, no du/dt in the forcing).
ManufacturedCase steady_vortex_case(double mu);

ManufacturedCase make_case(const std::string& name, double mu);

enum class TimestepMode { ProportionalH2, ProportionalH, Fixed };

struct TimestepWindow {
  double c1 = 1.0;
  double c2 = 1.0;
  double gamma = 1.0;
};

struct TimestepChoice {
  double tau = 0.0;
  int n_steps = 0;
  bool window_ok = false;  // c1 h^2 <= tau <= c2 h^{(1+gamma)d/3}, d = 2
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// tau from the selected rule, rounded so that T/tau is an integer (the step
// count is rounded up). A violated window is reported, not rejected.
TimestepChoice timestep_rule(double h, TimestepMode mode, double c, double T,
                             const TimestepWindow& window = {});

// log(e_c/e_f) / log(h_c/h_f); NaN for degenerate inputs.
double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine);

struct LevelRecord {
  int n = 0;
  double h = 0.0;
  double tau = 0.0;
  int n_steps = 0;
  double err_u_spacetime = 0.0;  // sqrt(mu tau sum ||u_h^n - u^n||^2)
  double err_u_dg = 0.0;         // max_n ||u_h^n - u^n||_DG
  double err_p_spacetime = 0.0;  // sqrt(tau sum ||p_h^n - p^n||^2)
  double err_dtu = 0.0;          // sqrt(mu tau sum ||dtau u_h^{n+1} - dtau u^{n+1}||^2)
};

struct RateRecord {
  double u_spacetime = 0.0;
  double u_dg = 0.0;
  double p_spacetime = 0.0;
  double dtu = 0.0;
};

struct ConvergenceReport {
  std::vector<LevelRecord> levels;
  std::vector<RateRecord> rates;  // rates[0] is NaN (no coarser level)
  bool temporal = false;          // rates w.r.t. tau instead of h

  void write_csv(std::ostream& os) const;
};

// One scheme run, errors sampled at the discrete times t^n only.
LevelRecord run_level(const ManufacturedCase& mms, int k, int n, double tau, double T,
                      const PenaltyConfig& penalties);

// Spatial/coupled study over a refinement ladder of n values.
ConvergenceReport convergence_study(const ManufacturedCase& mms, int k,
                                    const std::vector<int>& levels, TimestepMode mode,
                                    double c, double T, const PenaltyConfig& penalties);

// Temporal study: n fixed, tau swept; rates are computed against tau.
ConvergenceReport temporal_study(const ManufacturedCase& mms, int k, int n,
                                 const std::vector<double>& taus, double T,
                                 const PenaltyConfig& penalties);

// Minimum observed rates between the two finest levels; a non-positive
// threshold disables that check.
struct RateThresholds {
  double min_u_spacetime = 0.0;
  double min_u_dg = 0.0;
  double min_p_spacetime = 0.0;
  double min_dtu = 0.0;
};

std::string report_summary(const ConvergenceReport& report, const RateThresholds& thresholds);
bool report_pass(const ConvergenceReport& report, const RateThresholds& thresholds);

}  // namespace nsdg
