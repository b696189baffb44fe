#include "nsdg/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace nsdg {

double dg_norm(const DiscreteField& field, double sigma) {
  const FunctionSpace& space = field.space();
  if (space.components() != 2) throw std::invalid_argument("dg_norm: vector fields only");
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  const int nm = space.n_modes();

  double acc = 0.0;
  const Eigen::MatrixXd& gxi = space.ref_volume_grad_xi();
  const Eigen::MatrixXd& geta = space.ref_volume_grad_eta();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Mat2& inv_j = mesh.inverse_jacobian(e);
    for (int q = 0; q < rule.n_tri(); ++q) {
      Mat2 grad;
      for (int i = 0; i < nm; ++i) {
        const Vec2 g = inv_j.apply_transpose({gxi(q, i), geta(q, i)});
        grad.a00 += field.coeffs()[space.global_dof(e, 0, i)] * g.x;
        grad.a01 += field.coeffs()[space.global_dof(e, 0, i)] * g.y;
        grad.a10 += field.coeffs()[space.global_dof(e, 1, i)] * g.x;
        grad.a11 += field.coeffs()[space.global_dof(e, 1, i)] * g.y;
      }
      // unscaled tables: grad = sqrt(det) * physical gradient, and the
      // volume Jacobian det cancels it under the square.
      acc += rule.tri_weights[q] * frobenius2(grad);
    }
  }

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    for (int q = 0; q < rule.n_line(); ++q) {
      Vec2 jump = trace_vector(field, f, 0, q);
      if (face.interior()) jump -= trace_vector(field, f, 1, q);
      acc += (sigma / face.length) * rule.line_weights[q] * face.length * dot(jump, jump);
    }
  }
  return std::sqrt(acc);
}

double dg_seminorm(const DiscreteField& field, double sigma_tilde) {
  const FunctionSpace& space = field.space();
  if (space.components() != 1)
    throw std::invalid_argument("dg_seminorm: scalar fields only");
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  const int nm = space.n_modes();

  double acc = 0.0;
  const Eigen::MatrixXd& gxi = space.ref_volume_grad_xi();
  const Eigen::MatrixXd& geta = space.ref_volume_grad_eta();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Mat2& inv_j = mesh.inverse_jacobian(e);
    for (int q = 0; q < rule.n_tri(); ++q) {
      Vec2 grad;
      for (int i = 0; i < nm; ++i)
        grad += inv_j.apply_transpose({gxi(q, i), geta(q, i)}) *
                field.coeffs()[space.global_dof(e, 0, i)];
      acc += rule.tri_weights[q] * dot(grad, grad);
    }
  }

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.interior()) continue;
    for (int q = 0; q < rule.n_line(); ++q) {
      const double jump = trace_scalar(field, f, 0, q) -
                          trace_scalar(field, f, 1, q);
      acc += (sigma_tilde / face.length) * rule.line_weights[q] * face.length * jump * jump;
    }
  }
  return std::sqrt(acc);
}

double l2_distance(const Mesh& mesh, const QuadratureRule& rule, const ElemVectorFn& a,
                   const ElemVectorFn& b) {
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double det = mesh.jacobian_det(e);
    for (int q = 0; q < rule.n_tri(); ++q) {
      const Vec2 x = mesh.from_reference(e, rule.tri_points[q]);
      const Vec2 d = a(e, x) - b(e, x);
      acc += rule.tri_weights[q] * det * dot(d, d);
    }
  }
  return std::sqrt(acc);
}

double l2_distance(const Mesh& mesh, const QuadratureRule& rule, const ElemScalarFn& a,
                   const ElemScalarFn& b) {
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double det = mesh.jacobian_det(e);
    for (int q = 0; q < rule.n_tri(); ++q) {
      const Vec2 x = mesh.from_reference(e, rule.tri_points[q]);
      const double d = a(e, x) - b(e, x);
      acc += rule.tri_weights[q] * det * d * d;
    }
  }
  return std::sqrt(acc);
}

double l2_error(const DiscreteField& field, const VectorFn& exact) {
  const FunctionSpace& space = field.space();
  if (space.components() != 2) throw std::invalid_argument("l2_error: vector field expected");
  return l2_distance(
      space.mesh(), space.rule(),
      [&field](int e, const Vec2& x) { return field.eval_vector(e, x); },
      [&exact](int, const Vec2& x) { return exact(x); });
}

double l2_error(const DiscreteField& field, const ScalarFn& exact) {
  const FunctionSpace& space = field.space();
  if (space.components() != 1) throw std::invalid_argument("l2_error: scalar field expected");
  return l2_distance(
      space.mesh(), space.rule(),
      [&field](int e, const Vec2& x) { return field.eval_scalar(e, x); },
      [&exact](int, const Vec2& x) { return exact(x); });
}

double dg_error(const DiscreteField& field, const VectorFn& exact, const MatrixFn& exact_grad,
                double sigma) {
  const FunctionSpace& space = field.space();
  if (space.components() != 2) throw std::invalid_argument("dg_error: vector fields only");
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();

  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double det = mesh.jacobian_det(e);
    for (int q = 0; q < rule.n_tri(); ++q) {
      const Vec2 x = mesh.from_reference(e, rule.tri_points[q]);
      const Mat2 d = field.grad_vector(e, x) - exact_grad(x);
      acc += rule.tri_weights[q] * det * frobenius2(d);
    }
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    for (int q = 0; q < rule.n_line(); ++q) {
      const Vec2 x = space.face_point(f, q);
      Vec2 jump = trace_vector(field, f, 0, q) - exact(x);
      if (face.interior()) jump -= trace_vector(field, f, 1, q) - exact(x);
      acc += (sigma / face.length) * rule.line_weights[q] * face.length * dot(jump, jump);
    }
  }
  return std::sqrt(acc);
}

double space_time_l2(const std::vector<double>& step_errors, double tau, double mu) {
  double acc = 0.0;
  for (double e : step_errors) acc += e * e;
  return std::sqrt(mu * tau * acc);
}

}  // namespace nsdg
