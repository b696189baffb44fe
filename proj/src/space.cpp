#include "nsdg/space.hpp"

#include <cmath>
#include <stdexcept>

namespace nsdg {

namespace {

// Jacobi polynomials P_n^{(alpha,beta)} and first derivatives at t, for all
// n = 0..degree, via the three-term recurrence and
// d/dt P_n^{(a,b)} = (n+a+b+1)/2 * P_{n-1}^{(a+1,b+1)}.
void jacobi_all(int degree, double alpha, double beta, double t, std::vector<double>& p) {
  p.assign(degree + 1, 0.0);
  p[0] = 1.0;
  if (degree == 0) return;
  p[1] = (alpha + 1.0) + (alpha + beta + 2.0) * (t - 1.0) / 2.0;
  for (int n = 2; n <= degree; ++n) {
    const double ab = alpha + beta;
    const double a1 = 2.0 * n * (n + ab) * (2.0 * n + ab - 2.0);
    const double a2 = (2.0 * n + ab - 1.0) * (alpha * alpha - beta * beta);
    const double a3 = (2.0 * n + ab - 2.0) * (2.0 * n + ab - 1.0) * (2.0 * n + ab);
    const double a4 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * (2.0 * n + ab);
    p[n] = ((a2 + a3 * t) * p[n - 1] - a4 * p[n - 2]) / a1;
  }
}

// Scaled Legendre S_m(u,v) = v^m P_m(u/v) (a bivariate polynomial) and its
// partials, for all m = 0..degree.
void scaled_legendre_all(int degree, double u, double v, std::vector<double>& s,
                         std::vector<double>& su, std::vector<double>& sv) {
  s.assign(degree + 1, 0.0);
  su.assign(degree + 1, 0.0);
  sv.assign(degree + 1, 0.0);
  s[0] = 1.0;
  if (degree == 0) return;
  s[1] = u;
  su[1] = 1.0;
  for (int m = 1; m < degree; ++m) {
    const double c1 = (2.0 * m + 1.0) / (m + 1.0);
    const double c2 = static_cast<double>(m) / (m + 1.0);
    s[m + 1] = c1 * u * s[m] - c2 * v * v * s[m - 1];
    su[m + 1] = c1 * (s[m] + u * su[m]) - c2 * v * v * su[m - 1];
    sv[m + 1] = c1 * u * sv[m] - c2 * (2.0 * v * s[m - 1] + v * v * sv[m - 1]);
  }
}

}  // namespace

void reference_basis(int degree, const Vec2& ref, std::vector<double>& values,
                     std::vector<Vec2>& gradients) {
  const int n_modes = (degree + 1) * (degree + 2) / 2;
  values.assign(n_modes, 0.0);
  gradients.assign(n_modes, Vec2{});

  const double u = 2.0 * ref.x + ref.y - 1.0;  // collapsed coordinate pair
  const double v = 1.0 - ref.y;
  const double t = 2.0 * ref.y - 1.0;

  std::vector<double> s, su, sv;
  scaled_legendre_all(degree, u, v, s, su, sv);

  std::vector<double> jac, jac_d;
  int idx = 0;
  for (int d = 0; d <= degree; ++d) {
    for (int m = d; m >= 0; --m) {
      const int n = d - m;
      jacobi_all(n, 2.0 * m + 1.0, 0.0, t, jac);
      double jn = jac[n];
      double jn_dt = 0.0;
      if (n >= 1) {
        jacobi_all(n - 1, 2.0 * m + 2.0, 1.0, t, jac_d);
        jn_dt = 0.5 * (n + 2.0 * m + 2.0) * jac_d[n - 1];
      }
      const double scale = std::sqrt(2.0 * (2.0 * m + 1.0) * (m + n + 1.0));
      values[idx] = scale * s[m] * jn;
      // u = 2xi + eta - 1, v = 1 - eta, t = 2eta - 1
      const double dxi = 2.0 * su[m] * jn;
      const double deta = (su[m] - sv[m]) * jn + s[m] * 2.0 * jn_dt;
      gradients[idx] = {scale * dxi, scale * deta};
      ++idx;
    }
  }
}

FunctionSpace::FunctionSpace(const Mesh& mesh, int degree, int components,
                             QuadratureRule rule)
    : mesh_(&mesh),
      degree_(degree),
      components_(components),
      n_modes_((degree + 1) * (degree + 2) / 2),
      rule_(std::move(rule)) {
  if (degree < 0) throw std::invalid_argument("FunctionSpace: degree must be >= 0");
  if (components != 1 && components != 2)
    throw std::invalid_argument("FunctionSpace: components must be 1 or 2");
  build_tables();
}

FunctionSpace::FunctionSpace(const Mesh& mesh, int degree, int components)
    : FunctionSpace(mesh, degree, components, QuadratureRule::make(3 * degree + 2)) {}

BasisEval FunctionSpace::eval_basis(int elem, const Vec2& x) const {
  const Vec2 ref = mesh_->to_reference(elem, x);
  const double tol = 1e-12;
  if (ref.x < -tol || ref.y < -tol || ref.x + ref.y > 1.0 + tol)
    throw std::invalid_argument("eval_basis: point outside element");

  BasisEval out;
  std::vector<Vec2> ref_grads;
  reference_basis(degree_, ref, out.values, ref_grads);

  const double scale = 1.0 / std::sqrt(mesh_->jacobian_det(elem));
  const Mat2& inv_j = mesh_->inverse_jacobian(elem);
  out.gradients.resize(out.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] *= scale;
    out.gradients[i] = inv_j.apply_transpose(ref_grads[i]) * scale;
  }
  return out;
}

Vec2 FunctionSpace::face_point(int face, int q) const {
  const Face& f = mesh_->face(face);
  const Vec2 a = mesh_->vertex(f.verts[0]);
  const Vec2 b = mesh_->vertex(f.verts[1]);
  return a + (b - a) * rule_.line_points[q];
}

void FunctionSpace::build_tables() {
  const int nq = rule_.n_tri();
  ref_vol_values_.resize(nq, n_modes_);
  ref_vol_grad_xi_.resize(nq, n_modes_);
  ref_vol_grad_eta_.resize(nq, n_modes_);
  std::vector<double> vals;
  std::vector<Vec2> grads;
  for (int q = 0; q < nq; ++q) {
    reference_basis(degree_, rule_.tri_points[q], vals, grads);
    for (int i = 0; i < n_modes_; ++i) {
      ref_vol_values_(q, i) = vals[i];
      ref_vol_grad_xi_(q, i) = grads[i].x;
      ref_vol_grad_eta_(q, i) = grads[i].y;
    }
  }

  const int nf = mesh_->n_faces();
  const int nql = rule_.n_line();
  trace_values_.assign(2 * nf, Eigen::MatrixXd());
  trace_grad_x_.assign(2 * nf, Eigen::MatrixXd());
  trace_grad_y_.assign(2 * nf, Eigen::MatrixXd());
  for (int f = 0; f < nf; ++f) {
    const Face& face = mesh_->face(f);
    const int n_sides = face.interior() ? 2 : 1;
    for (int side = 0; side < n_sides; ++side) {
      const int elem = face.elems[side];
      Eigen::MatrixXd tv(nql, n_modes_), tgx(nql, n_modes_), tgy(nql, n_modes_);
      const double scale = 1.0 / std::sqrt(mesh_->jacobian_det(elem));
      const Mat2& inv_j = mesh_->inverse_jacobian(elem);
      for (int q = 0; q < nql; ++q) {
        const Vec2 ref = mesh_->to_reference(elem, face_point(f, q));
        reference_basis(degree_, ref, vals, grads);
        for (int i = 0; i < n_modes_; ++i) {
          tv(q, i) = scale * vals[i];
          const Vec2 g = inv_j.apply_transpose(grads[i]) * scale;
          tgx(q, i) = g.x;
          tgy(q, i) = g.y;
        }
      }
      trace_values_[2 * f + side] = std::move(tv);
      trace_grad_x_[2 * f + side] = std::move(tgx);
      trace_grad_y_[2 * f + side] = std::move(tgy);
    }
  }
}

}  // namespace nsdg
