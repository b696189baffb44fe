#include "nsdg/field.hpp"

#include <cmath>
#include <stdexcept>

namespace nsdg {

DiscreteField::DiscreteField(const FunctionSpace& space, Eigen::VectorXd coeffs)
    : space_(&space), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space.n_dofs())
    throw std::invalid_argument("DiscreteField: coefficient size mismatch");
}

double DiscreteField::eval_scalar(int elem, const Vec2& x) const {
  const BasisEval basis = space_->eval_basis(elem, x);
  const int nm = space_->n_modes();
  double out = 0.0;
  for (int i = 0; i < nm; ++i) out += coeffs_[space_->global_dof(elem, 0, i)] * basis.values[i];
  return out;
}

Vec2 DiscreteField::eval_vector(int elem, const Vec2& x) const {
  const BasisEval basis = space_->eval_basis(elem, x);
  const int nm = space_->n_modes();
  Vec2 out;
  for (int i = 0; i < nm; ++i) {
    out.x += coeffs_[space_->global_dof(elem, 0, i)] * basis.values[i];
    out.y += coeffs_[space_->global_dof(elem, 1, i)] * basis.values[i];
  }
  return out;
}

Vec2 DiscreteField::grad_scalar(int elem, const Vec2& x) const {
  const BasisEval basis = space_->eval_basis(elem, x);
  const int nm = space_->n_modes();
  Vec2 out;
  for (int i = 0; i < nm; ++i) out += basis.gradients[i] * coeffs_[space_->global_dof(elem, 0, i)];
  return out;
}

Mat2 DiscreteField::grad_vector(int elem, const Vec2& x) const {
  const BasisEval basis = space_->eval_basis(elem, x);
  const int nm = space_->n_modes();
  Mat2 out;
  for (int i = 0; i < nm; ++i) {
    const Vec2 g = basis.gradients[i];
    out.a00 += coeffs_[space_->global_dof(elem, 0, i)] * g.x;
    out.a01 += coeffs_[space_->global_dof(elem, 0, i)] * g.y;
    out.a10 += coeffs_[space_->global_dof(elem, 1, i)] * g.x;
    out.a11 += coeffs_[space_->global_dof(elem, 1, i)] * g.y;
  }
  return out;
}

UpwindSide upwind_indicator(const DiscreteField& z, int elem, int face, const Vec2& x) {
  const FunctionSpace& space = z.space();
  if (space.components() != 2)
    throw std::invalid_argument("upwind_indicator: vector field required");
  const Mesh& mesh = space.mesh();
  return upwind_indicator(mesh, elem, face, x, [&](const Vec2& p) {
    const Face& f = mesh.face(face);
    Vec2 avg = z.eval_vector(f.elems[0], p);
    if (f.interior()) avg = (avg + z.eval_vector(f.elems[1], p)) * 0.5;
    return avg;
  });
}

Vec2 trace_vector(const DiscreteField& f, int face, int side, int q) {
  const FunctionSpace& space = f.space();
  const Eigen::MatrixXd& tv = space.trace_values(face, side);
  const int elem = space.mesh().face(face).elems[side];
  Vec2 out;
  for (int i = 0; i < space.n_modes(); ++i) {
    out.x += f.coeffs()[space.global_dof(elem, 0, i)] * tv(q, i);
    out.y += f.coeffs()[space.global_dof(elem, 1, i)] * tv(q, i);
  }
  return out;
}

double trace_scalar(const DiscreteField& f, int face, int side, int q) {
  const FunctionSpace& space = f.space();
  const Eigen::MatrixXd& tv = space.trace_values(face, side);
  const int elem = space.mesh().face(face).elems[side];
  double out = 0.0;
  for (int i = 0; i < space.n_modes(); ++i)
    out += f.coeffs()[space.global_dof(elem, 0, i)] * tv(q, i);
  return out;
}

Mat2 trace_grad_vector(const DiscreteField& f, int face, int side, int q) {
  const FunctionSpace& space = f.space();
  const Eigen::MatrixXd& tgx = space.trace_grad_x(face, side);
  const Eigen::MatrixXd& tgy = space.trace_grad_y(face, side);
  const int elem = space.mesh().face(face).elems[side];
  Mat2 out;
  for (int i = 0; i < space.n_modes(); ++i) {
    const double cx = f.coeffs()[space.global_dof(elem, 0, i)];
    const double cy = f.coeffs()[space.global_dof(elem, 1, i)];
    out.a00 += cx * tgx(q, i);
    out.a01 += cx * tgy(q, i);
    out.a10 += cy * tgx(q, i);
    out.a11 += cy * tgy(q, i);
  }
  return out;
}

Vec2 trace_grad_scalar(const DiscreteField& f, int face, int side, int q) {
  const FunctionSpace& space = f.space();
  const Eigen::MatrixXd& tgx = space.trace_grad_x(face, side);
  const Eigen::MatrixXd& tgy = space.trace_grad_y(face, side);
  const int elem = space.mesh().face(face).elems[side];
  Vec2 out;
  for (int i = 0; i < space.n_modes(); ++i) {
    const double c = f.coeffs()[space.global_dof(elem, 0, i)];
    out.x += c * tgx(q, i);
    out.y += c * tgy(q, i);
  }
  return out;
}

namespace {

// coeff_i = sqrt(det J) * sum_q w_q f(x_q) phihat_i(x_q) for each component.
template <typename Eval>
void project_into(const FunctionSpace& space, int component, const Eval& eval,
                  Eigen::VectorXd& coeffs) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  const Eigen::MatrixXd& vals = space.ref_volume_values();
  const int nm = space.n_modes();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double scale = std::sqrt(mesh.jacobian_det(e));
    for (int q = 0; q < rule.n_tri(); ++q) {
      const Vec2 x = mesh.from_reference(e, rule.tri_points[q]);
      const double fw = eval(x) * rule.tri_weights[q] * scale;
      for (int i = 0; i < nm; ++i)
        coeffs[space.global_dof(e, component, i)] += fw * vals(q, i);
    }
  }
}

}  // namespace

DiscreteField l2_project(const FunctionSpace& space, const ScalarFn& fn) {
  if (space.components() != 1)
    throw std::invalid_argument("l2_project: scalar function onto vector space");
  DiscreteField field(space);
  project_into(space, 0, fn, field.coeffs());
  return field;
}

DiscreteField l2_project(const FunctionSpace& space, const VectorFn& fn) {
  if (space.components() != 2)
    throw std::invalid_argument("l2_project: vector function onto scalar space");
  DiscreteField field(space);
  project_into(space, 0, [&fn](const Vec2& x) { return fn(x).x; }, field.coeffs());
  project_into(space, 1, [&fn](const Vec2& x) { return fn(x).y; }, field.coeffs());
  return field;
}

double integral(const DiscreteField& field) {
  const FunctionSpace& space = field.space();
  if (space.components() != 1) throw std::invalid_argument("integral: scalar fields only");
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  const Eigen::MatrixXd& vals = space.ref_volume_values();
  double out = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double scale = std::sqrt(mesh.jacobian_det(e));
    for (int q = 0; q < rule.n_tri(); ++q) {
      double v = 0.0;
      for (int i = 0; i < space.n_modes(); ++i)
        v += field.coeffs()[space.global_dof(e, 0, i)] * vals(q, i);
      out += rule.tri_weights[q] * scale * v;
    }
  }
  return out;
}

Eigen::VectorXd load_vector(const FunctionSpace& space, const VectorFn& fn) {
  if (space.components() != 2)
    throw std::invalid_argument("load_vector: vector space required");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.n_dofs());
  project_into(space, 0, [&fn](const Vec2& x) { return fn(x).x; }, rhs);
  project_into(space, 1, [&fn](const Vec2& x) { return fn(x).y; }, rhs);
  return rhs;
}

}  // namespace nsdg
