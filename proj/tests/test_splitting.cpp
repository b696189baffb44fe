#include <doctest.h>

#include <cmath>
#include <random>

#include "nsdg/mms.hpp"
#include "nsdg/splitting.hpp"
#include "oracle.hpp"

using namespace nsdg;

namespace {

DiscreteField random_field(const FunctionSpace& space, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DiscreteField f(space);
  for (int i = 0; i < space.n_dofs(); ++i) f.coeffs()[i] = dist(rng);
  return f;
}

struct Setup {
  Mesh mesh;
  FunctionSpace x;
  FunctionSpace m;
  SchemeParams params;

  Setup(int n, int k, double tau, double T, double mu = 1.0)
      : mesh(Mesh::uniform_square(n)),
        x(mesh, k, 2, QuadratureRule::make(3 * k + 2)),
        m(mesh, k - 1, 1, QuadratureRule::make(3 * k + 2)) {
    params.mu = mu;
    params.tau = tau;
    params.T = T;
    params.k = k;
    params.penalties = PenaltyConfig::defaults(k);
  }
};

}  // namespace

TEST_CASE("scheme params step count") {
  SchemeParams p;
  p.mu = 1.0;
  p.tau = 0.125;
  p.T = 1.0;
  p.k = 1;
  p.penalties = PenaltyConfig::defaults(1);
  CHECK(p.n_steps() == 8);
  p.tau = 0.3;
  CHECK_THROWS_AS(p.n_steps(), std::invalid_argument);
  p.tau = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.tau = 0.125;
  p.k = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("initialize") {
  Setup s(4, 2, 0.1, 1.0);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);

  const State zero = scheme.initialize([](const Vec2&) { return Vec2{}; });
  CHECK(zero.u.coeffs().norm() == 0.0);
  CHECK(zero.p.coeffs().norm() == 0.0);
  CHECK(zero.phi.coeffs().norm() == 0.0);
  CHECK(!zero.has_v);

  // Polynomial initial data of degree <= k is reproduced.
  const auto poly = [](const Vec2& p) {
    return Vec2{p.x * p.y, p.x * p.x - p.y};
  };
  const State st = scheme.initialize(poly);
  CHECK(l2_error(st.u, poly) < 1e-12);
}

TEST_CASE("projected vortex initial data converges at order k+1") {
  const ManufacturedCase mms = vortex_case(1.0);
  const auto u0 = [&mms](const Vec2& x) { return mms.velocity(x, 0.0); };
  double prev_err = 0.0, prev_h = 0.0;
  for (int n : {4, 8, 16}) {
    Setup s(n, 1, 0.1, 1.0);
    PressureCorrectionScheme scheme(s.x, s.m, s.params);
    const double err = l2_error(scheme.initialize(u0).u, u0);
    if (prev_err > 0.0) {
      const double rate = std::log(prev_err / err) / std::log(prev_h / s.mesh.h_max());
      CHECK(rate == doctest::Approx(2.0).epsilon(0.06));
    }
    prev_err = err;
    prev_h = s.mesh.h_max();
  }
}

TEST_CASE("momentum step: zero data gives zero velocity") {
  Setup s(4, 1, 1e-3, 1.0);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);
  const State state = scheme.initialize([](const Vec2&) { return Vec2{}; });
  const DiscreteField v = scheme.momentum_step(state, [](const Vec2&) { return Vec2{}; });
  CHECK(v.coeffs().norm() < 1e-14);
}

TEST_CASE("momentum step: strong diffusion damps the DG norm") {
  Setup s(4, 1, 1e-3, 1.0, /*mu=*/1e3);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);
  for (int trial = 0; trial < 5; ++trial) {
    State state = scheme.initialize([](const Vec2&) { return Vec2{}; });
    state.u = random_field(s.x, 40 + trial);
    const DiscreteField v =
        scheme.momentum_step(state, [](const Vec2&) { return Vec2{}; });
    CHECK(dg_norm(v, s.params.penalties.sigma) <=
          1.1 * dg_norm(state.u, s.params.penalties.sigma));
  }
}

TEST_CASE("momentum solve is linear in the right-hand side") {
  Setup s(3, 1, 1e-2, 1.0);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);
  const DiscreteField w = random_field(s.x, 77);
  const Eigen::VectorXd r1 = random_field(s.x, 78).coeffs();
  const Eigen::VectorXd r2 = random_field(s.x, 79).coeffs();
  const Eigen::VectorXd s1 = scheme.solve_momentum(w, r1);
  const Eigen::VectorXd s2 = scheme.solve_momentum(w, r2);
  const Eigen::VectorXd s12 = scheme.solve_momentum(w, r1 + r2);
  CHECK((s12 - s1 - s2).norm() <= 1e-10 * (s1.norm() + s2.norm()));
}

TEST_CASE("pressure poisson") {
  Setup s(3, 1, 1e-2, 1.0);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);

  const DiscreteField zero_v(s.x);
  CHECK(scheme.pressure_poisson(zero_v).coeffs().norm() < 1e-14);

  // Compatibility: the variational residual against the full scalar basis is
  // tiny, which pins the Lagrange multiplier at zero.
  const DiscreteField one = l2_project(s.m, [](const Vec2&) { return 1.0; });
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteField v = random_field(s.x, 60 + trial);
    const DiscreteField phi = scheme.pressure_poisson(v);
    CHECK(std::abs(integral(phi)) <= 1e-10 * std::max(phi.l2_norm(), 1e-30));
    const Eigen::VectorXd rhs =
        -(1.0 / s.params.tau) * (scheme.divergence_op().matrix * v.coeffs());
    const Eigen::VectorXd residual =
        scheme.scalar_laplacian_op().matrix * phi.coeffs() - rhs;
    CHECK(residual.norm() <= 1e-10 * rhs.norm());
    CHECK(std::abs(one.coeffs().dot(rhs)) <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("pressure and velocity updates") {
  Setup s(3, 1, 1e-2, 1.0);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);

  State state = scheme.initialize([](const Vec2&) { return Vec2{}; });
  state.p = random_field(s.m, 90);
  const DiscreteField phi = random_field(s.m, 91);
  const DiscreteField zero_v(s.x);

  // v = 0: p_new = p_old + phi.
  const DiscreteField p1 = scheme.pressure_update(state, zero_v, phi);
  CHECK((p1.coeffs() - state.p.coeffs() - phi.coeffs()).norm() < 1e-14);

  // phi = 0 and v = 0: p unchanged.
  const DiscreteField p2 = scheme.pressure_update(state, zero_v, DiscreteField(s.m));
  CHECK((p2.coeffs() - state.p.coeffs()).norm() < 1e-14);

  // phi = 0: u_new = v_new.
  const DiscreteField v = random_field(s.x, 92);
  const DiscreteField u1 = scheme.velocity_update(v, DiscreteField(s.m));
  CHECK((u1.coeffs() - v.coeffs()).norm() < 1e-14);

  // Variational definitions against random test fields.
  const DiscreteField p3 = scheme.pressure_update(state, v, phi);
  const DiscreteField u3 = scheme.velocity_update(v, phi);
  const auto& b = scheme.divergence_op().matrix;
  const double dmu = s.params.penalties.delta * s.params.mu;
  for (int trial = 0; trial < 50; ++trial) {
    const DiscreteField q = random_field(s.m, 1000 + trial);
    const double lhs = p3.coeffs().dot(q.coeffs());
    const double rhs = state.p.coeffs().dot(q.coeffs()) + phi.coeffs().dot(q.coeffs()) -
                       dmu * q.coeffs().dot(b * v.coeffs());
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1.0));

    const DiscreteField th = random_field(s.x, 2000 + trial);
    const double lhs_u = (u3.coeffs() - v.coeffs()).dot(th.coeffs());
    const double rhs_u = s.params.tau * th.coeffs().dot(b.transpose() * phi.coeffs());
    CHECK(std::abs(lhs_u - rhs_u) <= 1e-12 * (std::abs(lhs_u) + std::abs(rhs_u) + 1.0));
  }
}

TEST_CASE("velocity correction damps the discrete divergence") {
  const ManufacturedCase mms = vortex_case(1.0);
  Setup s(4, 1, 1e-3, 1.0);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);
  const State state =
      scheme.initialize([&](const Vec2& x) { return mms.velocity(x, 0.0); });
  const DiscreteField v = scheme.momentum_step(
      state, [&](const Vec2& x) { return mms.forcing(x, s.params.tau); });
  const DiscreteField phi = scheme.pressure_poisson(v);
  const DiscreteField u = scheme.velocity_update(v, phi);
  const auto& b = scheme.divergence_op().matrix;
  const Eigen::VectorXd bu_vec = b * u.coeffs();
  const Eigen::VectorXd bv_vec = b * v.coeffs();
  CHECK(bu_vec.norm() <= bv_vec.norm());
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteField q = random_field(s.m, 3000 + trial);
    const double bu = std::abs(q.coeffs().dot(bu_vec));
    const double bv = std::abs(q.coeffs().dot(bv_vec));
    CHECK(bu <= bv + 1e-10 * std::max(bv, 1.0));
  }
}

TEST_CASE("run: zero data stays zero") {
  Setup s(3, 1, 0.05, 0.25);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);
  std::vector<MonitorRow> monitor;
  const State final_state =
      scheme.run([](const Vec2&, double) { return Vec2{}; },
                 [](const Vec2&) { return Vec2{}; }, &monitor);
  CHECK(final_state.step == 5);
  CHECK(monitor.size() == 5);
  for (const MonitorRow& row : monitor) {
    CHECK(row.l2_u == 0.0);
    CHECK(row.dg_v == 0.0);
    CHECK(row.dg_phi == 0.0);
    CHECK(row.mean_phi == 0.0);
  }
}

TEST_CASE("run: discrete energy stability without forcing") {
  const ManufacturedCase mms = vortex_case(1.0);
  Setup s(8, 1, 1e-3, 0.05);
  PressureCorrectionScheme scheme(s.x, s.m, s.params);
  std::vector<MonitorRow> monitor;
  const State init = scheme.initialize([&](const Vec2& x) { return mms.velocity(x, 0.0); });
  const double u0_sq = init.u.coeffs().squaredNorm();

  scheme.run([](const Vec2&, double) { return Vec2{}; },
             [&](const Vec2& x) { return mms.velocity(x, 0.0); }, &monitor);
  double dg_sum = 0.0;
  for (const MonitorRow& row : monitor) {
    dg_sum += row.dg_v * row.dg_v;
    const double lhs =
        row.l2_u * row.l2_u + 0.25 * s.params.mu * s.params.tau * dg_sum;
    CHECK(lhs <= u0_sq * (1.0 + 1e-8));
    CHECK(std::abs(row.mean_phi) <= 1e-10 * std::max(row.dg_phi, 1e-30));
  }
}

TEST_CASE("run: forced energy bound with a stable measured constant") {
  // ||u^m||^2 + (mu/4) tau sum ||v^n||_DG^2 <= ||u0||^2 + (K/mu) tau sum ||f^n||^2
  // with the run-measured K bounded and stable across refinements.
  const ManufacturedCase mms = vortex_case(1.0);
  std::vector<double> ks;
  for (int n : {8, 16}) {
    Setup s(n, 1, 0.01, 0.2);
    PressureCorrectionScheme scheme(s.x, s.m, s.params);
    const State init =
        scheme.initialize([&](const Vec2& x) { return mms.velocity(x, 0.0); });
    const double u0_sq = init.u.coeffs().squaredNorm();
    double dg_sum = 0.0, f_sum = 0.0, k_measured = 0.0;
    auto obs = [&](const State& st) {
      const double t = st.step * s.params.tau;
      dg_sum += std::pow(dg_norm(st.v, s.params.penalties.sigma), 2);
      const DiscreteField fn =
          l2_project(s.x, [&](const Vec2& x) { return mms.forcing(x, t); });
      f_sum += fn.coeffs().squaredNorm();
      const double lhs = st.u.coeffs().squaredNorm() + 0.25 * s.params.tau * dg_sum;
      k_measured = std::max(k_measured, (lhs - u0_sq) / (s.params.tau * f_sum));
    };
    scheme.run([&](const Vec2& x, double t) { return mms.forcing(x, t); },
               [&](const Vec2& x) { return mms.velocity(x, 0.0); }, nullptr, obs);
    CHECK(k_measured < 0.1);
    ks.push_back(k_measured);
  }
  CHECK(ks[1] / ks[0] > 0.7);
  CHECK(ks[1] / ks[0] < 1.4);
}

TEST_CASE("run: bitwise deterministic monitor logs") {
  const ManufacturedCase mms = vortex_case(1.0);
  auto run_once = [&] {
    Setup s(4, 1, 0.01, 0.05);
    PressureCorrectionScheme scheme(s.x, s.m, s.params);
    std::vector<MonitorRow> monitor;
    scheme.run([&](const Vec2& x, double t) { return mms.forcing(x, t); },
               [&](const Vec2& x) { return mms.velocity(x, 0.0); }, &monitor);
    return monitor_csv(monitor);
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("one full scheme step matches the dense oracle") {
  const int k = 1, n = 1;
  Setup s(n, k, 1e-2, 1.0);
  const ManufacturedCase mms = vortex_case(1.0);
  const double tau = s.params.tau, mu = s.params.mu;
  const double sigma = s.params.penalties.sigma;
  const double delta = s.params.penalties.delta;

  PressureCorrectionScheme scheme(s.x, s.m, s.params);
  const State state = scheme.initialize([&](const Vec2& x) { return mms.velocity(x, 0.0); });
  const auto f_tau = [&](const Vec2& x) { return mms.forcing(x, tau); };
  const DiscreteField v1 = scheme.momentum_step(state, f_tau);
  const DiscreteField phi1 = scheme.pressure_poisson(v1);
  const DiscreteField p1 = scheme.pressure_update(state, v1, phi1);
  const DiscreteField u1 = scheme.velocity_update(v1, phi1);

  // Dense path: polynomial operators at an independent (finer) exactness,
  // the convection upwind terms and the forcing at the scheme's own rule
  // (both are quadrature-defined), dense LU, deflation for the zero mean.
  const int nx = s.x.n_dofs();
  const Eigen::MatrixXd a_d = oracle::sipg_matrix(s.x, sigma, false, 3 * k + 6);
  const Eigen::MatrixXd a_e =
      oracle::sipg_matrix(s.m, s.params.penalties.sigma_tilde, true, 3 * k + 6);
  const Eigen::MatrixXd b = oracle::divergence_matrix(s.m, s.x, 3 * k + 6);
  const Eigen::MatrixXd conv = oracle::convection_matrix(state.u, 3 * k + 2);
  const Eigen::VectorXd load = oracle::load_vector(s.x, f_tau, 3 * k + 2);
  const Eigen::VectorXd mean_vec = oracle::mean_vector(s.m, 3 * k + 6);

  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(nx, nx) + tau * conv + tau * mu * a_d;
  const Eigen::VectorXd rhs =
      state.u.coeffs() + tau * (b.transpose() * state.p.coeffs()) + tau * load;
  const Eigen::VectorXd v_o = Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(rhs);
  const Eigen::VectorXd phi_o =
      oracle::deflated_solve(a_e, mean_vec, -(1.0 / tau) * (b * v_o));
  const Eigen::VectorXd p_o = state.p.coeffs() + phi_o - delta * mu * (b * v_o);
  const Eigen::VectorXd u_o = v_o + tau * (b.transpose() * phi_o);

  CHECK((v1.coeffs() - v_o).norm() <= 1e-9 * v_o.norm());
  CHECK((phi1.coeffs() - phi_o).norm() <= 1e-9 * std::max(phi_o.norm(), 1e-12));
  CHECK((p1.coeffs() - p_o).norm() <= 1e-9 * std::max(p_o.norm(), 1e-12));
  CHECK((u1.coeffs() - u_o).norm() <= 1e-9 * u_o.norm());
}

TEST_CASE("monitor csv format") {
  std::vector<MonitorRow> rows{{1, 0.5, 1.0, 2.0, 3.0, 0.0}};
  const std::string csv = monitor_csv(rows);
  CHECK(csv.find("step,t,l2_u,dg_v,dg_phi,mean_phi\n") == 0);
  CHECK(csv.find("1,0.5,1,2,3,0") != std::string::npos);
}
