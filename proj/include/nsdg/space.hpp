#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nsdg/mesh.hpp"
#include "nsdg/quadrature.hpp"

namespace nsdg {

// Values and gradients of the scalar element basis at one point.
struct BasisEval {
  std::vector<double> values;
  std::vector<Vec2> gradients;
};

// Piecewise-polynomial space on a triangulation. The element basis is
// orthonormal in L2(E) (Koornwinder/Dubiner modes mapped affinely), so the
// global mass matrix is the identity and L2 projections are elementwise
// coefficient evaluations.
//
// DoF layout: element-major blocks; within an element, component-major, then
// mode index. Immutable after construction.
class FunctionSpace {
 public:
  FunctionSpace(const Mesh& mesh, int degree, int components, QuadratureRule rule);
  FunctionSpace(const Mesh& mesh, int degree, int components);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  int n_modes() const { return n_modes_; }  // scalar modes per element
  int dofs_per_element() const { return components_ * n_modes_; }
  int n_dofs() const { return mesh_->n_elements() * dofs_per_element(); }
  const QuadratureRule& rule() const { return rule_; }

  int global_dof(int elem, int component, int mode) const {
    return elem * dofs_per_element() + component * n_modes_ + mode;
  }

  // Scalar basis (physical values/gradients) at an arbitrary point of an
  // element. Throws std::invalid_argument when the point lies outside the
  // element beyond a 1e-12 reference-coordinate tolerance.
  BasisEval eval_basis(int elem, const Vec2& x) const;

  // Cached tables at quadrature points. Volume tables are on the reference
  // triangle (apply the per-element scalings); trace tables are physical.
  const Eigen::MatrixXd& ref_volume_values() const { return ref_vol_values_; }
  const Eigen::MatrixXd& ref_volume_grad_xi() const { return ref_vol_grad_xi_; }
  const Eigen::MatrixXd& ref_volume_grad_eta() const { return ref_vol_grad_eta_; }

  // side 0/1 = trace from face.elems[0]/[1]; (n_line x n_modes) matrices.
  const Eigen::MatrixXd& trace_values(int face, int side) const {
    return trace_values_[2 * face + side];
  }
  const Eigen::MatrixXd& trace_grad_x(int face, int side) const {
    return trace_grad_x_[2 * face + side];
  }
  const Eigen::MatrixXd& trace_grad_y(int face, int side) const {
    return trace_grad_y_[2 * face + side];
  }

  // Physical quadrature point q of a face (shared by both sides).
  Vec2 face_point(int face, int q) const;

 private:
  const Mesh* mesh_;
  int degree_;
  int components_;
  int n_modes_;
  QuadratureRule rule_;

  Eigen::MatrixXd ref_vol_values_, ref_vol_grad_xi_, ref_vol_grad_eta_;
  std::vector<Eigen::MatrixXd> trace_values_, trace_grad_x_, trace_grad_y_;

  void build_tables();
};

// Orthonormal basis of P_degree on the reference triangle: values and
// reference gradients of all (degree+1)(degree+2)/2 modes at (xi, eta).
void reference_basis(int degree, const Vec2& ref, std::vector<double>& values,
                     std::vector<Vec2>& gradients);

}  // namespace nsdg
