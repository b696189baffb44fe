#pragma once

#include <Eigen/Dense>
#include <functional>

#include "nsdg/space.hpp"

namespace nsdg {

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

// Coefficient vector over a FunctionSpace.
class DiscreteField {
 public:
  explicit DiscreteField(const FunctionSpace& space)
      : space_(&space), coeffs_(Eigen::VectorXd::Zero(space.n_dofs())) {}
  DiscreteField(const FunctionSpace& space, Eigen::VectorXd coeffs);

  const FunctionSpace& space() const { return *space_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

  double eval_scalar(int elem, const Vec2& x) const;
  Vec2 eval_vector(int elem, const Vec2& x) const;
  Vec2 grad_scalar(int elem, const Vec2& x) const;
  Mat2 grad_vector(int elem, const Vec2& x) const;

  // L2(Omega) norm; equals the coefficient 2-norm for the orthonormal basis.
  double l2_norm() const { return coeffs_.norm(); }

 private:
  const FunctionSpace* space_;
  Eigen::VectorXd coeffs_;
};

// Upwind classification of a face point for an element, with the average of
// the discrete field taken across the face (one-sided trace on the boundary).
UpwindSide upwind_indicator(const DiscreteField& z, int elem, int face, const Vec2& x);

// Traces at cached face quadrature points (side 0/1 as stored on the face).
Vec2 trace_vector(const DiscreteField& f, int face, int side, int q);
double trace_scalar(const DiscreteField& f, int face, int side, int q);
Mat2 trace_grad_vector(const DiscreteField& f, int face, int side, int q);
Vec2 trace_grad_scalar(const DiscreteField& f, int face, int side, int q);

// Elementwise L2 projection. Reproduces polynomials up to space.degree().
DiscreteField l2_project(const FunctionSpace& space, const ScalarFn& fn);
DiscreteField l2_project(const FunctionSpace& space, const VectorFn& fn);

// Integral of a scalar field over the domain.
double integral(const DiscreteField& field);

// Functional coefficients (f, basis_i) of an analytic vector function.
Eigen::VectorXd load_vector(const FunctionSpace& space, const VectorFn& fn);

}  // namespace nsdg
