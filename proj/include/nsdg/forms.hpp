#pragma once

#include <Eigen/Sparse>
#include <iosfwd>

#include "nsdg/field.hpp"

namespace nsdg {

// Penalty parameters of the scheme. delta > 1/(4d) = 1/8 exceeds the
// admissible divergence-damping range and is flagged, not rejected.
//
// The delta default is deliberately small: the damping functional scales
// with the O(h^k) divergence residual of the intermediate velocity and is
// added to the pressure every step without a tau factor, so an O(1) delta
// buries the k=1 pressure convergence under the accumulated startup
// transient at practical resolutions.
struct PenaltyConfig {
  double sigma = 0.0;
  double sigma_tilde = 0.0;
  double delta = kDefaultDelta;

  static constexpr double kDefaultDelta = 1.0 / 1024.0;

  static PenaltyConfig defaults(int k) {
    const double s = 10.0 * (k + 1) * (k + 1);
    return {s, s, kDefaultDelta};
  }
  bool delta_out_of_range() const { return delta > 0.125; }
  void validate() const;
};

struct SparseOperator {
  const FunctionSpace* row_space = nullptr;
  const FunctionSpace* col_space = nullptr;
  Eigen::SparseMatrix<double> matrix;
  bool symmetric = false;

  // Coordinate-format text dump (row col value per line).
  void dump_coo(std::ostream& os) const;
};

// Symmetric interior penalty discretization of -Laplace on the vector space:
// theta' A v = sum_E (grad v, grad theta) - consistency - symmetry
//            + (sigma/h_e) jump penalties over interior and boundary faces.
SparseOperator assemble_diffusion(const FunctionSpace& space_x, double sigma);

// Scalar counterpart acting on interior faces only; constants span its kernel.
SparseOperator assemble_scalar_laplacian(const FunctionSpace& space_m, double sigma_tilde);

// Divergence pairing b: q' B theta = (div_h theta, q) - sum_faces {q}[theta].n.
// Rows over the scalar space, columns over the vector space.
SparseOperator assemble_divergence(const FunctionSpace& space_x, const FunctionSpace& space_m);

// Convection operator linearized at the advecting field w:
// theta' C(w) v = convection_form(w; w, v, theta).
SparseOperator assemble_convection(const DiscreteField& w);

// Pointwise form evaluation; `scale` accumulates the absolute values of all
// quadrature contributions and calibrates the identity-test tolerances.
struct FormValue {
  double value = 0.0;
  double scale = 0.0;
};

// a_C(z; w, v, theta): volume transport + (1/2)(div w) coupling, the
// -(1/2)[w].n {v.theta} face term, and the inflow upwind term driven by z.
FormValue convection_form(const DiscreteField& z, const DiscreteField& w,
                          const DiscreteField& v, const DiscreteField& theta);

// Integration-by-parts companion form; satisfies
// convection_form(w;w,v,theta) = -convection_form_ibp(w;w,theta,v).
FormValue convection_form_ibp(const DiscreteField& z, const DiscreteField& w,
                              const DiscreteField& theta, const DiscreteField& v);

// Central part (no upwinding) and signed upwind part:
// convection_form(w;w,v,theta) = central - upwind(w;w,v,theta).
FormValue convection_central_part(const DiscreteField& w, const DiscreteField& v,
                                  const DiscreteField& theta);
FormValue convection_upwind_part(const DiscreteField& z, const DiscreteField& w,
                                 const DiscreteField& v, const DiscreteField& theta);

// Evaluate assembled bilinear forms on fields (theta' A v etc.).
double apply_form(const SparseOperator& op, const DiscreteField& col_field,
                  const DiscreteField& row_field);

// Lift of vector-valued face jumps into the scalar space:
// (lift, q) = sum_{interior+boundary} int {q} [theta].n for all q.
DiscreteField lift_velocity_jumps(const DiscreteField& theta, const FunctionSpace& space_m);

// Lift of scalar jumps into the vector space (interior faces only):
// (lift, theta) = sum_interior int {theta}.n [q] for all theta.
DiscreteField lift_pressure_jumps(const DiscreteField& q, const FunctionSpace& space_x);

// Scalar-space representation of the weak divergence: the field whose inner
// product with any q equals b(v, q); equals div_h v minus the jump lift.
DiscreteField discrete_divergence(const DiscreteField& v, const FunctionSpace& space_m);

}  // namespace nsdg
