#pragma once

#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsdg/forms.hpp"
#include "nsdg/norms.hpp"

namespace nsdg {

using ForcingFn = std::function<Vec2(const Vec2&, double)>;

struct SchemeParams {
  double mu = 1.0;
  double tau = 0.0;
  double T = 0.0;
  int k = 1;  // velocity degree; pressure degree is k-1
  PenaltyConfig penalties;

  // Number of uniform steps; throws unless tau divides T to 1e-12 relative.
  int n_steps() const;
  void validate() const;
};

struct State {
  int step = 0;
  DiscreteField u;    // end-of-step velocity
  DiscreteField v;    // intermediate velocity (unset until the first step)
  DiscreteField p;    // pressure
  DiscreteField phi;  // pressure increment, zero mean
  bool has_v = false;

  State(const FunctionSpace& x, const FunctionSpace& m)
      : u(x), v(x), p(m), phi(m) {}
};

struct MonitorRow {
  int step = 0;
  double t = 0.0;
  double l2_u = 0.0;
  double dg_v = 0.0;
  double dg_phi = 0.0;
  double mean_phi = 0.0;
};

std::string monitor_csv(const std::vector<MonitorRow>& rows);

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Pressure-correction time stepper: per step, an implicit momentum solve for
// the intermediate velocity, a zero-mean Poisson solve for the pressure
// increment, and two coefficient-level projection updates.
//
// The diffusion, divergence, and scalar Laplacian operators are assembled
// once; the convection operator is rebuilt every step around the advecting
// field u^{n-1}.
class PressureCorrectionScheme {
 public:
  PressureCorrectionScheme(const FunctionSpace& space_x, const FunctionSpace& space_m,
                           const SchemeParams& params);

  // u := L2 projection of u0; p = phi = 0. The caller guarantees div u0 = 0
  // and a vanishing boundary trace.
  State initialize(const VectorFn& u0) const;

  // Solve [M + tau C(u^{n-1}) + tau mu A_D] v = M u^{n-1} + tau B' p^{n-1} + tau F^n.
  DiscreteField momentum_step(const State& state, const VectorFn& f_n);

  // Solve a_ellip(phi, q) = -(1/tau) b(v, q) on the zero-mean space via one
  // Lagrange multiplier row/column.
  DiscreteField pressure_poisson(const DiscreteField& v_new);

  // p^n = p^{n-1} + phi^n - delta mu (div_h v^n - jump lift).
  DiscreteField pressure_update(const State& state, const DiscreteField& v_new,
                                const DiscreteField& phi_new) const;

  // u^n = v^n + tau B' phi^n.
  DiscreteField velocity_update(const DiscreteField& v_new,
                                const DiscreteField& phi_new) const;

  using Observer = std::function<void(const State&)>;

  // Full time loop; appends one monitor row per step. Sub-step failures are
  // rethrown with the step index attached.
  State run(const ForcingFn& forcing, const VectorFn& u0,
            std::vector<MonitorRow>* monitor = nullptr, const Observer& observer = {});

  // Momentum solve against an arbitrary right-hand side with the advecting
  // field frozen at w.
  Eigen::VectorXd solve_momentum(const DiscreteField& w, const Eigen::VectorXd& rhs);

  const SparseOperator& diffusion_op() const { return a_d_; }
  const SparseOperator& divergence_op() const { return b_; }
  const SparseOperator& scalar_laplacian_op() const { return a_ellip_; }
  const SchemeParams& params() const { return params_; }
  double mean_pressure(const State& state) const { return integral(state.p); }

 private:
  const FunctionSpace* space_x_;
  const FunctionSpace* space_m_;
  SchemeParams params_;

  SparseOperator a_d_;
  SparseOperator b_;
  SparseOperator a_ellip_;
  Eigen::VectorXd mean_functional_;  // (1, q_i) over the scalar space

  Eigen::SparseLU<Eigen::SparseMatrix<double>> momentum_solver_;
  bool momentum_pattern_ready_ = false;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> poisson_solver_;
};

}  // namespace nsdg
