#include "nsdg/mms.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nsdg {

Vec2 ManufacturedCase::forcing(const Vec2& x, double t) const {
  const Vec2 du_dt = velocity_dt(x, t);
  const Vec2 lap = velocity_laplacian(x, t);
  const Vec2 u = velocity(x, t);
  const Mat2 grad = velocity_gradient(x, t);
  const Vec2 conv = grad.apply(u);  // (u . grad) u
  const Vec2 gp = pressure_gradient(x, t);
  return du_dt - mu * lap + conv + gp;
}

namespace {

ManufacturedCase vortex_with_time_factor(double mu, bool steady) {
  const double pi = M_PI;
  auto g = [steady](double t) { return steady ? 1.0 : std::cos(t); };
  auto gd = [steady](double t) { return steady ? 0.0 : -std::sin(t); };

  ManufacturedCase c;
  c.name = steady ? "steady-vortex" : "vortex";
  c.mu = mu;
  c.velocity = [=](const Vec2& p, double t) {
    const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
    return Vec2{g(t) * sx * sx * std::sin(2.0 * pi * p.y),
                -g(t) * std::sin(2.0 * pi * p.x) * sy * sy};
  };
  c.velocity_gradient = [=](const Vec2& p, double t) {
    const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
    const double s2x = std::sin(2.0 * pi * p.x), s2y = std::sin(2.0 * pi * p.y);
    const double c2x = std::cos(2.0 * pi * p.x), c2y = std::cos(2.0 * pi * p.y);
    return Mat2{g(t) * pi * s2x * s2y, g(t) * 2.0 * pi * sx * sx * c2y,
                -g(t) * 2.0 * pi * c2x * sy * sy, -g(t) * pi * s2x * s2y};
  };
  c.velocity_dt = [=](const Vec2& p, double t) {
    const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
    return Vec2{gd(t) * sx * sx * std::sin(2.0 * pi * p.y),
                -gd(t) * std::sin(2.0 * pi * p.x) * sy * sy};
  };
  c.velocity_laplacian = [=](const Vec2& p, double t) {
    const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
    const double s2x = std::sin(2.0 * pi * p.x), s2y = std::sin(2.0 * pi * p.y);
    const double c2x = std::cos(2.0 * pi * p.x), c2y = std::cos(2.0 * pi * p.y);
    return Vec2{g(t) * (2.0 * pi * pi * c2x * s2y - 4.0 * pi * pi * sx * sx * s2y),
                g(t) * (4.0 * pi * pi * s2x * sy * sy - 2.0 * pi * pi * s2x * c2y)};
  };
  c.pressure = [=](const Vec2& p, double t) {
    return g(t) * std::sin(2.0 * pi * p.x) * std::cos(2.0 * pi * p.y);
  };
  c.pressure_gradient = [=](const Vec2& p, double t) {
    return Vec2{g(t) * 2.0 * pi * std::cos(2.0 * pi * p.x) * std::cos(2.0 * pi * p.y),
                -g(t) * 2.0 * pi * std::sin(2.0 * pi * p.x) * std::sin(2.0 * pi * p.y)};
  };
  return c;
}

}  // namespace

ManufacturedCase vortex_case(double mu) {
  if (mu <= 0.0) throw std::invalid_argument("vortex_case: mu must be > 0");
  return vortex_with_time_factor(mu, false);
}

ManufacturedCase steady_vortex_case(double mu) {
  if (mu <= 0.0) throw std::invalid_argument("steady_vortex_case: mu must be > 0");
  return vortex_with_time_factor(mu, true);
}

ManufacturedCase make_case(const std::string& name, double mu) {
  if (name == "vortex") return vortex_case(mu);
  if (name == "steady-vortex") return steady_vortex_case(mu);
  if (name == "zero") {
    ManufacturedCase c;
    c.name = "zero";
    c.mu = mu;
    c.velocity = [](const Vec2&, double) { return Vec2{}; };
    c.velocity_gradient = [](const Vec2&, double) { return Mat2{}; };
    c.velocity_dt = [](const Vec2&, double) { return Vec2{}; };
    c.velocity_laplacian = [](const Vec2&, double) { return Vec2{}; };
    c.pressure = [](const Vec2&, double) { return 0.0; };
    c.pressure_gradient = [](const Vec2&, double) { return Vec2{}; };
    return c;
  }
  throw std::invalid_argument("unknown manufactured case: " + name);
}

TimestepChoice timestep_rule(double h, TimestepMode mode, double c, double T,
                             const TimestepWindow& window) {
  if (h <= 0.0 || c <= 0.0 || T <= 0.0)
    throw std::invalid_argument("timestep_rule: h, c, T must be > 0");

  double tau = 0.0;
  switch (mode) {
    case TimestepMode::ProportionalH2: tau = c * h * h; break;
    case TimestepMode::ProportionalH: tau = c * h; break;
    case TimestepMode::Fixed: tau = c; break;
  }

  TimestepChoice out;
  out.n_steps = std::max(1, static_cast<int>(std::ceil(T / tau - 1e-12)));
  out.tau = T / out.n_steps;
  out.window_lo = window.c1 * h * h;
  out.window_hi = window.c2 * std::pow(h, (1.0 + window.gamma) * 2.0 / 3.0);
  out.window_ok = out.tau >= out.window_lo && out.tau <= out.window_hi;
  return out;
}

double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return nan;
  if (!(h_coarse > 0.0) || !(h_fine > 0.0) || h_coarse == h_fine) return nan;
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

LevelRecord run_level(const ManufacturedCase& mms, int k, int n, double tau, double T,
                      const PenaltyConfig& penalties) {
  const Mesh mesh = Mesh::uniform_square(n);
  const QuadratureRule rule = QuadratureRule::make(3 * k + 2);
  const FunctionSpace space_x(mesh, k, 2, rule);
  const FunctionSpace space_m(mesh, k - 1, 1, rule);

  SchemeParams params;
  params.mu = mms.mu;
  params.tau = tau;
  params.T = T;
  params.k = k;
  params.penalties = penalties;

  PressureCorrectionScheme scheme(space_x, space_m, params);

  LevelRecord rec;
  rec.n = n;
  rec.h = mesh.h_max();
  rec.tau = tau;
  rec.n_steps = params.n_steps();

  double sum_u2 = 0.0, sum_p2 = 0.0, sum_dtu2 = 0.0, worst_dg = 0.0;
  Eigen::VectorXd prev_u = Eigen::VectorXd();
  double prev_t = 0.0;

  auto observer = [&](const State& state) {
    const double t = state.step * tau;
    const double eu =
        l2_error(state.u, [&](const Vec2& x) { return mms.velocity(x, t); });
    const double ep =
        l2_error(state.p, [&](const Vec2& x) { return mms.pressure(x, t); });
    const double edg = dg_error(
        state.u, [&](const Vec2& x) { return mms.velocity(x, t); },
        [&](const Vec2& x) { return mms.velocity_gradient(x, t); }, penalties.sigma);
    sum_u2 += eu * eu;
    sum_p2 += ep * ep;
    worst_dg = std::max(worst_dg, edg);

    // Discrete time derivative vs the differenced exact samples; the sum
    // starts at the (n=1, n=2) pair.
    if (state.step >= 2) {
      DiscreteField dtu(space_x, (state.u.coeffs() - prev_u) / tau);
      const double tp = prev_t;
      const double edtu = l2_error(dtu, [&](const Vec2& x) {
        return (mms.velocity(x, t) - mms.velocity(x, tp)) / tau;
      });
      sum_dtu2 += edtu * edtu;
    }
    prev_u = state.u.coeffs();
    prev_t = t;
  };

  scheme.run([&mms](const Vec2& x, double t) { return mms.forcing(x, t); },
             [&mms](const Vec2& x) { return mms.velocity(x, 0.0); }, nullptr, observer);

  rec.err_u_spacetime = std::sqrt(mms.mu * tau * sum_u2);
  rec.err_p_spacetime = std::sqrt(tau * sum_p2);
  rec.err_u_dg = worst_dg;
  rec.err_dtu = std::sqrt(mms.mu * tau * sum_dtu2);
  return rec;
}

namespace {

void append_rates(ConvergenceReport& report) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.rates.assign(report.levels.size(), RateRecord{nan, nan, nan, nan});
  for (std::size_t i = 1; i < report.levels.size(); ++i) {
    const LevelRecord& a = report.levels[i - 1];
    const LevelRecord& b = report.levels[i];
    const double ha = report.temporal ? a.tau : a.h;
    const double hb = report.temporal ? b.tau : b.h;
    report.rates[i].u_spacetime = observed_rate(a.err_u_spacetime, b.err_u_spacetime, ha, hb);
    report.rates[i].u_dg = observed_rate(a.err_u_dg, b.err_u_dg, ha, hb);
    report.rates[i].p_spacetime = observed_rate(a.err_p_spacetime, b.err_p_spacetime, ha, hb);
    report.rates[i].dtu = observed_rate(a.err_dtu, b.err_dtu, ha, hb);
  }
}

}  // namespace

ConvergenceReport convergence_study(const ManufacturedCase& mms, int k,
                                    const std::vector<int>& levels, TimestepMode mode,
                                    double c, double T, const PenaltyConfig& penalties) {
  if (levels.empty()) throw std::invalid_argument("convergence_study: empty level list");
  ConvergenceReport report;
  for (int n : levels) {
    const double h = std::sqrt(2.0) / n;
    const TimestepChoice choice = timestep_rule(h, mode, c, T);
    report.levels.push_back(run_level(mms, k, n, choice.tau, T, penalties));
  }
  append_rates(report);
  return report;
}

ConvergenceReport temporal_study(const ManufacturedCase& mms, int k, int n,
                                 const std::vector<double>& taus, double T,
                                 const PenaltyConfig& penalties) {
  if (taus.empty()) throw std::invalid_argument("temporal_study: empty tau list");
  ConvergenceReport report;
  report.temporal = true;
  for (double tau_req : taus) {
    const TimestepChoice choice =
        timestep_rule(std::sqrt(2.0) / n, TimestepMode::Fixed, tau_req, T);
    report.levels.push_back(run_level(mms, k, n, choice.tau, T, penalties));
  }
  append_rates(report);
  return report;
}

namespace {

void summarize_one(std::ostream& os, const char* label, double rate, double min_rate,
                   bool& all_ok) {
  os << "  " << label << ": finest-pair rate = " << rate;
  if (min_rate > 0.0) {
    const bool ok = rate >= min_rate;
    all_ok = all_ok && ok;
    os << " (threshold " << min_rate << "): " << (ok ? "PASS" : "FAIL");
  }
  os << "\n";
}

}  // namespace

std::string report_summary(const ConvergenceReport& report, const RateThresholds& t) {
  std::ostringstream os;
  os.precision(4);
  os << "levels: " << report.levels.size()
     << (report.temporal ? " (rates in tau)" : " (rates in h)") << "\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelRecord& l = report.levels[i];
    os << "  n=" << l.n << " h=" << l.h << " tau=" << l.tau << " NT=" << l.n_steps
       << " err_u_st=" << l.err_u_spacetime << " err_u_dg=" << l.err_u_dg
       << " err_p_st=" << l.err_p_spacetime << " err_dtu=" << l.err_dtu << "\n";
  }
  if (report.levels.size() < 2) {
    os << "  (single level: no rates)\n";
    return os.str();
  }
  const RateRecord& r = report.rates.back();
  bool all_ok = true;
  summarize_one(os, "velocity space-time L2", r.u_spacetime, t.min_u_spacetime, all_ok);
  summarize_one(os, "velocity worst-time DG", r.u_dg, t.min_u_dg, all_ok);
  summarize_one(os, "pressure space-time L2", r.p_spacetime, t.min_p_spacetime, all_ok);
  summarize_one(os, "discrete time derivative", r.dtu, t.min_dtu, all_ok);
  os << "overall: " << (all_ok ? "PASS" : "FAIL") << "\n";
  return os.str();
}

bool report_pass(const ConvergenceReport& report, const RateThresholds& t) {
  if (report.levels.size() < 2) return true;
  const RateRecord& r = report.rates.back();
  auto ok = [](double rate, double min_rate) { return min_rate <= 0.0 || rate >= min_rate; };
  return ok(r.u_spacetime, t.min_u_spacetime) && ok(r.u_dg, t.min_u_dg) &&
         ok(r.p_spacetime, t.min_p_spacetime) && ok(r.dtu, t.min_dtu);
}

void ConvergenceReport::write_csv(std::ostream& os) const {
  os << "n,h,tau,NT,err_u_st,rate_u_st,err_u_dg,rate_u_dg,err_p_st,rate_p_st,"
        "err_dtu,rate_dtu\n";
  os.precision(12);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const LevelRecord& l = levels[i];
    const RateRecord& r = rates[i];
    os << l.n << "," << l.h << "," << l.tau << "," << l.n_steps << ","
       << l.err_u_spacetime << "," << r.u_spacetime << ","
       << l.err_u_dg << "," << r.u_dg << ","
       << l.err_p_spacetime << "," << r.p_spacetime << ","
       << l.err_dtu << "," << r.dtu << "\n";
  }
}

}  // namespace nsdg
