#include "nsdg/splitting.hpp"

#include <cmath>
#include <sstream>

namespace nsdg {

int SchemeParams::n_steps() const {
  validate();
  const int n = static_cast<int>(std::round(T / tau));
  if (n < 1 || std::abs(n * tau - T) > 1e-12 * std::max(T, 1.0))
    throw std::invalid_argument("SchemeParams: tau must divide T into uniform steps");
  return n;
}

void SchemeParams::validate() const {
  if (mu <= 0.0) throw std::invalid_argument("SchemeParams: mu must be > 0");
  if (tau <= 0.0) throw std::invalid_argument("SchemeParams: tau must be > 0");
  if (T <= 0.0) throw std::invalid_argument("SchemeParams: T must be > 0");
  if (k < 1) throw std::invalid_argument("SchemeParams: k must be >= 1");
  penalties.validate();
}

std::string monitor_csv(const std::vector<MonitorRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "step,t,l2_u,dg_v,dg_phi,mean_phi\n";
  for (const auto& r : rows)
    os << r.step << "," << r.t << "," << r.l2_u << "," << r.dg_v << "," << r.dg_phi << ","
       << r.mean_phi << "\n";
  return os.str();
}

PressureCorrectionScheme::PressureCorrectionScheme(const FunctionSpace& space_x,
                                                   const FunctionSpace& space_m,
                                                   const SchemeParams& params)
    : space_x_(&space_x), space_m_(&space_m), params_(params) {
  params_.validate();
  if (space_x.degree() != params.k || space_m.degree() != params.k - 1)
    throw std::invalid_argument("scheme: spaces must have degrees (k, k-1)");

  a_d_ = assemble_diffusion(space_x, params_.penalties.sigma);
  b_ = assemble_divergence(space_x, space_m);
  a_ellip_ = assemble_scalar_laplacian(space_m, params_.penalties.sigma_tilde);

  // (1, q_i): only the constant mode of each element contributes.
  DiscreteField one = l2_project(space_m, [](const Vec2&) { return 1.0; });
  mean_functional_ = one.coeffs();

  // Saddle system [A_ellip, m; m', 0] enforcing the zero mean; assembled and
  // factorized once.
  const int nm = space_m.n_dofs();
  std::vector<Eigen::Triplet<double>> trips;
  for (int c = 0; c < a_ellip_.matrix.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_ellip_.matrix, c); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int i = 0; i < nm; ++i) {
    if (mean_functional_[i] == 0.0) continue;
    trips.emplace_back(i, nm, mean_functional_[i]);
    trips.emplace_back(nm, i, mean_functional_[i]);
  }
  Eigen::SparseMatrix<double> saddle(nm + 1, nm + 1);
  saddle.setFromTriplets(trips.begin(), trips.end());
  poisson_solver_.compute(saddle);
  if (poisson_solver_.info() != Eigen::Success)
    throw SolverError("pressure Poisson saddle factorization failed");
}

State PressureCorrectionScheme::initialize(const VectorFn& u0) const {
  State state(*space_x_, *space_m_);
  state.u = l2_project(*space_x_, u0);
  return state;
}

Eigen::VectorXd PressureCorrectionScheme::solve_momentum(const DiscreteField& w,
                                                         const Eigen::VectorXd& rhs) {
  const double tau = params_.tau;
  const SparseOperator conv = assemble_convection(w);

  Eigen::SparseMatrix<double> identity(space_x_->n_dofs(), space_x_->n_dofs());
  identity.setIdentity();
  Eigen::SparseMatrix<double> system =
      identity + (tau * params_.mu) * a_d_.matrix + tau * conv.matrix;

  if (!momentum_pattern_ready_) {
    momentum_solver_.analyzePattern(system);
    momentum_pattern_ready_ = true;
  }
  momentum_solver_.factorize(system);
  if (momentum_solver_.info() != Eigen::Success)
    throw SolverError("momentum factorization failed (matrix may be singular)");

  Eigen::VectorXd sol = momentum_solver_.solve(rhs);
  const double rhs_norm = rhs.norm();
  const double residual = (system * sol - rhs).norm();
  if (rhs_norm > 0.0 && residual > 1e-10 * rhs_norm) {
    std::ostringstream os;
    os << "momentum solve residual " << residual / rhs_norm << " exceeds 1e-10";
    throw SolverError(os.str());
  }
  return sol;
}

DiscreteField PressureCorrectionScheme::momentum_step(const State& state, const VectorFn& f_n) {
  const double tau = params_.tau;
  Eigen::VectorXd rhs = state.u.coeffs() +
                        tau * (b_.matrix.transpose() * state.p.coeffs()) +
                        tau * load_vector(*space_x_, f_n);
  return DiscreteField(*space_x_, solve_momentum(state.u, rhs));
}

DiscreteField PressureCorrectionScheme::pressure_poisson(const DiscreteField& v_new) {
  const int nm = space_m_->n_dofs();
  Eigen::VectorXd rhs(nm + 1);
  rhs.head(nm) = -(1.0 / params_.tau) * (b_.matrix * v_new.coeffs());
  rhs[nm] = 0.0;

  Eigen::VectorXd sol = poisson_solver_.solve(rhs);
  if (poisson_solver_.info() != Eigen::Success)
    throw SolverError("pressure Poisson solve failed");

  DiscreteField phi(*space_m_, sol.head(nm));
  const double mean = mean_functional_.dot(phi.coeffs());
  const double scale = std::max(phi.l2_norm(), 1e-300);
  if (std::abs(mean) > 1e-10 * scale)
    throw SolverError("pressure increment violates the zero-mean constraint");
  return phi;
}

DiscreteField PressureCorrectionScheme::pressure_update(const State& state,
                                                        const DiscreteField& v_new,
                                                        const DiscreteField& phi_new) const {
  // Identity mass: the update is a coefficient-level relation, with the
  // divergence functional represented by B v.
  Eigen::VectorXd p = state.p.coeffs() + phi_new.coeffs() -
                      (params_.penalties.delta * params_.mu) * (b_.matrix * v_new.coeffs());
  return DiscreteField(*space_m_, std::move(p));
}

DiscreteField PressureCorrectionScheme::velocity_update(const DiscreteField& v_new,
                                                        const DiscreteField& phi_new) const {
  Eigen::VectorXd u = v_new.coeffs() +
                      params_.tau * (b_.matrix.transpose() * phi_new.coeffs());
  return DiscreteField(*space_x_, std::move(u));
}

State PressureCorrectionScheme::run(const ForcingFn& forcing, const VectorFn& u0,
                                    std::vector<MonitorRow>* monitor,
                                    const Observer& observer) {
  const int n_steps = params_.n_steps();
  State state = initialize(u0);
  for (int n = 1; n <= n_steps; ++n) {
    const double t_n = n * params_.tau;
    try {
      const DiscreteField v_new =
          momentum_step(state, [&](const Vec2& x) { return forcing(x, t_n); });
      const DiscreteField phi_new = pressure_poisson(v_new);
      const DiscreteField p_new = pressure_update(state, v_new, phi_new);
      const DiscreteField u_new = velocity_update(v_new, phi_new);
      state.v = v_new;
      state.phi = phi_new;
      state.p = p_new;
      state.u = u_new;
      state.has_v = true;
      state.step = n;
    } catch (const SolverError& err) {
      std::ostringstream os;
      os << "step " << n << " (t = " << t_n << "): " << err.what();
      throw SolverError(os.str());
    }

    if (monitor) {
      MonitorRow row;
      row.step = n;
      row.t = t_n;
      row.l2_u = state.u.l2_norm();
      row.dg_v = dg_norm(state.v, params_.penalties.sigma);
      row.dg_phi = dg_seminorm(state.phi, params_.penalties.sigma_tilde);
      row.mean_phi = mean_functional_.dot(state.phi.coeffs());
      monitor->push_back(row);
    }
    if (observer) observer(state);
  }
  return state;
}

}  // namespace nsdg
