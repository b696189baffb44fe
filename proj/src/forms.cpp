#include "nsdg/forms.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace nsdg {

void PenaltyConfig::validate() const {
  if (sigma <= 0.0 || sigma_tilde <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("PenaltyConfig: penalties must be positive");
}

void SparseOperator::dump_coo(std::ostream& os) const {
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double jump_sign(int side) { return side == 0 ? 1.0 : -1.0; }

void check_same_mesh(const FunctionSpace& a, const FunctionSpace& b) {
  if (&a.mesh() != &b.mesh() || a.rule().exactness != b.rule().exactness)
    throw std::invalid_argument("forms: spaces must share mesh and quadrature");
}

void check_same_space(const DiscreteField& a, const DiscreteField& b) {
  if (&a.space() != &b.space())
    throw std::invalid_argument("forms: fields must live in the same space");
}

// Scatter an element-local block for every component of the space.
void scatter_block(Triplets& trips, const FunctionSpace& rows, const FunctionSpace& cols,
                   int row_elem, int col_elem, const Eigen::MatrixXd& block,
                   bool per_component) {
  const int nc = per_component ? rows.components() : 1;
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i < block.rows(); ++i)
      for (int j = 0; j < block.cols(); ++j)
        trips.emplace_back(rows.global_dof(row_elem, c, i),
                           cols.global_dof(col_elem, c, j), block(i, j));
}

}  // namespace

SparseOperator assemble_diffusion(const FunctionSpace& space_x, double sigma) {
  if (space_x.components() != 2)
    throw std::invalid_argument("assemble_diffusion: vector space required");
  if (sigma <= 0.0) throw std::invalid_argument("assemble_diffusion: sigma must be > 0");
  const Mesh& mesh = space_x.mesh();
  const QuadratureRule& rule = space_x.rule();
  const int nm = space_x.n_modes();

  Triplets trips;
  trips.reserve(mesh.n_elements() * nm * nm * 2 + mesh.n_faces() * nm * nm * 8);

  // Volume: (grad v, grad theta), identical for both components.
  const Eigen::MatrixXd& gxi = space_x.ref_volume_grad_xi();
  const Eigen::MatrixXd& geta = space_x.ref_volume_grad_eta();
  Eigen::MatrixXd block(nm, nm);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Mat2& inv_j = mesh.inverse_jacobian(e);
    block.setZero();
    for (int q = 0; q < rule.n_tri(); ++q) {
      for (int i = 0; i < nm; ++i) {
        const Vec2 gi = inv_j.apply_transpose({gxi(q, i), geta(q, i)});
        for (int j = 0; j < nm; ++j) {
          const Vec2 gj = inv_j.apply_transpose({gxi(q, j), geta(q, j)});
          block(i, j) += rule.tri_weights[q] * dot(gi, gj);
        }
      }
    }
    scatter_block(trips, space_x, space_x, e, e, block, true);
  }

  // Faces: consistency, symmetry, and penalty terms.
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const int n_sides = face.interior() ? 2 : 1;
    const double aw = face.interior() ? 0.5 : 1.0;
    const Vec2 n = face.normal;
    const double he = face.length;
    for (int ts = 0; ts < n_sides; ++ts) {
      for (int ss = 0; ss < n_sides; ++ss) {
        const Eigen::MatrixXd& tv_t = space_x.trace_values(f, ts);
        const Eigen::MatrixXd& tv_s = space_x.trace_values(f, ss);
        const Eigen::MatrixXd& tgx_t = space_x.trace_grad_x(f, ts);
        const Eigen::MatrixXd& tgy_t = space_x.trace_grad_y(f, ts);
        const Eigen::MatrixXd& tgx_s = space_x.trace_grad_x(f, ss);
        const Eigen::MatrixXd& tgy_s = space_x.trace_grad_y(f, ss);
        block.setZero();
        for (int q = 0; q < rule.n_line(); ++q) {
          const double w = rule.line_weights[q] * he;
          for (int i = 0; i < nm; ++i) {
            const double gn_i = tgx_t(q, i) * n.x + tgy_t(q, i) * n.y;
            for (int j = 0; j < nm; ++j) {
              const double gn_j = tgx_s(q, j) * n.x + tgy_s(q, j) * n.y;
              double v = -aw * gn_j * jump_sign(ts) * tv_t(q, i);       // consistency
              v += -aw * gn_i * jump_sign(ss) * tv_s(q, j);             // symmetry
              v += (sigma / he) * jump_sign(ts) * tv_t(q, i) * jump_sign(ss) * tv_s(q, j);
              block(i, j) += w * v;
            }
          }
        }
        scatter_block(trips, space_x, space_x, face.elems[ts], face.elems[ss], block, true);
      }
    }
  }

  SparseOperator op;
  op.row_space = &space_x;
  op.col_space = &space_x;
  op.symmetric = true;
  op.matrix.resize(space_x.n_dofs(), space_x.n_dofs());
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

SparseOperator assemble_scalar_laplacian(const FunctionSpace& space_m, double sigma_tilde) {
  if (space_m.components() != 1)
    throw std::invalid_argument("assemble_scalar_laplacian: scalar space required");
  if (sigma_tilde <= 0.0)
    throw std::invalid_argument("assemble_scalar_laplacian: sigma_tilde must be > 0");
  const Mesh& mesh = space_m.mesh();
  const QuadratureRule& rule = space_m.rule();
  const int nm = space_m.n_modes();

  Triplets trips;
  const Eigen::MatrixXd& gxi = space_m.ref_volume_grad_xi();
  const Eigen::MatrixXd& geta = space_m.ref_volume_grad_eta();
  Eigen::MatrixXd block(nm, nm);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Mat2& inv_j = mesh.inverse_jacobian(e);
    block.setZero();
    for (int q = 0; q < rule.n_tri(); ++q)
      for (int i = 0; i < nm; ++i) {
        const Vec2 gi = inv_j.apply_transpose({gxi(q, i), geta(q, i)});
        for (int j = 0; j < nm; ++j) {
          const Vec2 gj = inv_j.apply_transpose({gxi(q, j), geta(q, j)});
          block(i, j) += rule.tri_weights[q] * dot(gi, gj);
        }
      }
    scatter_block(trips, space_m, space_m, e, e, block, false);
  }

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.interior()) continue;  // no boundary terms for the scalar operator
    const Vec2 n = face.normal;
    const double he = face.length;
    for (int ts = 0; ts < 2; ++ts) {
      for (int ss = 0; ss < 2; ++ss) {
        const Eigen::MatrixXd& tv_t = space_m.trace_values(f, ts);
        const Eigen::MatrixXd& tv_s = space_m.trace_values(f, ss);
        const Eigen::MatrixXd& tgx_t = space_m.trace_grad_x(f, ts);
        const Eigen::MatrixXd& tgy_t = space_m.trace_grad_y(f, ts);
        const Eigen::MatrixXd& tgx_s = space_m.trace_grad_x(f, ss);
        const Eigen::MatrixXd& tgy_s = space_m.trace_grad_y(f, ss);
        block.setZero();
        for (int q = 0; q < rule.n_line(); ++q) {
          const double w = rule.line_weights[q] * he;
          for (int i = 0; i < nm; ++i) {
            const double gn_i = tgx_t(q, i) * n.x + tgy_t(q, i) * n.y;
            for (int j = 0; j < nm; ++j) {
              const double gn_j = tgx_s(q, j) * n.x + tgy_s(q, j) * n.y;
              double v = -0.5 * gn_j * jump_sign(ts) * tv_t(q, i);
              v += -0.5 * gn_i * jump_sign(ss) * tv_s(q, j);
              v += (sigma_tilde / he) * jump_sign(ts) * tv_t(q, i) * jump_sign(ss) * tv_s(q, j);
              block(i, j) += w * v;
            }
          }
        }
        scatter_block(trips, space_m, space_m, face.elems[ts], face.elems[ss], block, false);
      }
    }
  }

  SparseOperator op;
  op.row_space = &space_m;
  op.col_space = &space_m;
  op.symmetric = true;
  op.matrix.resize(space_m.n_dofs(), space_m.n_dofs());
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

SparseOperator assemble_divergence(const FunctionSpace& space_x, const FunctionSpace& space_m) {
  if (space_x.components() != 2 || space_m.components() != 1)
    throw std::invalid_argument("assemble_divergence: expects (vector, scalar) spaces");
  check_same_mesh(space_x, space_m);
  const Mesh& mesh = space_x.mesh();
  const QuadratureRule& rule = space_x.rule();
  const int nmx = space_x.n_modes();
  const int nmm = space_m.n_modes();

  Triplets trips;

  // Volume: (div theta, q).
  const Eigen::MatrixXd& gxi = space_x.ref_volume_grad_xi();
  const Eigen::MatrixXd& geta = space_x.ref_volume_grad_eta();
  const Eigen::MatrixXd& mv = space_m.ref_volume_values();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Mat2& inv_j = mesh.inverse_jacobian(e);
    Eigen::MatrixXd bx = Eigen::MatrixXd::Zero(nmm, nmx);
    Eigen::MatrixXd by = Eigen::MatrixXd::Zero(nmm, nmx);
    for (int q = 0; q < rule.n_tri(); ++q)
      for (int j = 0; j < nmx; ++j) {
        const Vec2 gj = inv_j.apply_transpose({gxi(q, j), geta(q, j)});
        for (int i = 0; i < nmm; ++i) {
          bx(i, j) += rule.tri_weights[q] * gj.x * mv(q, i);
          by(i, j) += rule.tri_weights[q] * gj.y * mv(q, i);
        }
      }
    for (int i = 0; i < nmm; ++i)
      for (int j = 0; j < nmx; ++j) {
        trips.emplace_back(space_m.global_dof(e, 0, i), space_x.global_dof(e, 0, j), bx(i, j));
        trips.emplace_back(space_m.global_dof(e, 0, i), space_x.global_dof(e, 1, j), by(i, j));
      }
  }

  // Faces: -{q}[theta].n over interior and boundary faces.
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const int n_sides = face.interior() ? 2 : 1;
    const double aw = face.interior() ? 0.5 : 1.0;
    const Vec2 n = face.normal;
    const double he = face.length;
    for (int ts = 0; ts < n_sides; ++ts) {
      const Eigen::MatrixXd& mt = space_m.trace_values(f, ts);
      for (int ss = 0; ss < n_sides; ++ss) {
        const Eigen::MatrixXd& xs = space_x.trace_values(f, ss);
        Eigen::MatrixXd bx = Eigen::MatrixXd::Zero(nmm, nmx);
        Eigen::MatrixXd by = Eigen::MatrixXd::Zero(nmm, nmx);
        for (int q = 0; q < rule.n_line(); ++q) {
          const double w = -rule.line_weights[q] * he * aw * jump_sign(ss);
          for (int i = 0; i < nmm; ++i)
            for (int j = 0; j < nmx; ++j) {
              bx(i, j) += w * mt(q, i) * xs(q, j) * n.x;
              by(i, j) += w * mt(q, i) * xs(q, j) * n.y;
            }
        }
        for (int i = 0; i < nmm; ++i)
          for (int j = 0; j < nmx; ++j) {
            trips.emplace_back(space_m.global_dof(face.elems[ts], 0, i),
                               space_x.global_dof(face.elems[ss], 0, j), bx(i, j));
            trips.emplace_back(space_m.global_dof(face.elems[ts], 0, i),
                               space_x.global_dof(face.elems[ss], 1, j), by(i, j));
          }
      }
    }
  }

  SparseOperator op;
  op.row_space = &space_m;
  op.col_space = &space_x;
  op.symmetric = false;
  op.matrix.resize(space_m.n_dofs(), space_x.n_dofs());
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

SparseOperator assemble_convection(const DiscreteField& w) {
  const FunctionSpace& space = w.space();
  if (space.components() != 2)
    throw std::invalid_argument("assemble_convection: vector space required");
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  const int nm = space.n_modes();

  Triplets trips;
  trips.reserve(mesh.n_elements() * nm * nm * 2 + mesh.n_faces() * nm * nm * 8);

  const Eigen::MatrixXd& vv = space.ref_volume_values();
  const Eigen::MatrixXd& gxi = space.ref_volume_grad_xi();
  const Eigen::MatrixXd& geta = space.ref_volume_grad_eta();

  Eigen::MatrixXd block(nm, nm);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Mat2& inv_j = mesh.inverse_jacobian(e);
    const double inv_sqrt_det = 1.0 / std::sqrt(mesh.jacobian_det(e));
    block.setZero();
    for (int q = 0; q < rule.n_tri(); ++q) {
      Vec2 wq;
      double divw = 0.0;
      for (int i = 0; i < nm; ++i) {
        const Vec2 g = inv_j.apply_transpose({gxi(q, i), geta(q, i)});
        const double cx = w.coeffs()[space.global_dof(e, 0, i)];
        const double cy = w.coeffs()[space.global_dof(e, 1, i)];
        wq.x += cx * vv(q, i);
        wq.y += cy * vv(q, i);
        divw += cx * g.x + cy * g.y;
      }
      wq = wq * inv_sqrt_det;
      divw *= inv_sqrt_det;
      // (w . grad v_j) theta_i and (1/2)(div w) v_j theta_i; the element
      // Jacobian cancels against the two basis scalings.
      for (int i = 0; i < nm; ++i)
        for (int j = 0; j < nm; ++j) {
          const Vec2 gj = inv_j.apply_transpose({gxi(q, j), geta(q, j)});
          block(i, j) += rule.tri_weights[q] *
                         (dot(wq, gj) + 0.5 * divw * vv(q, j)) * vv(q, i);
        }
    }
    scatter_block(trips, space, space, e, e, block, true);
  }

  Eigen::MatrixXd blocks[2][2];
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const int n_sides = face.interior() ? 2 : 1;
    const double aw = face.interior() ? 0.5 : 1.0;
    const Vec2 n = face.normal;
    const double he = face.length;
    for (int a = 0; a < n_sides; ++a)
      for (int b = 0; b < n_sides; ++b) blocks[a][b] = Eigen::MatrixXd::Zero(nm, nm);

    for (int q = 0; q < rule.n_line(); ++q) {
      const Vec2 w0 = trace_vector(w, f, 0, q);
      const Vec2 w1 = face.interior() ? trace_vector(w, f, 1, q) : Vec2{};
      const double wq = rule.line_weights[q] * he;
      // -(1/2) [w].n {v . theta}: side-local products only.
      const double jump_wn = face.interior() ? dot(w0 - w1, n) : dot(w0, n);
      for (int u = 0; u < n_sides; ++u) {
        const Eigen::MatrixXd& tv = space.trace_values(f, u);
        const double c = -0.5 * jump_wn * aw * wq;
        for (int i = 0; i < nm; ++i)
          for (int j = 0; j < nm; ++j) blocks[u][u](i, j) += c * tv(q, i) * tv(q, j);
      }
      // Upwind: inflow side u has {w}.n_E < 0 (strict).
      const double avg_wn = face.interior() ? dot((w0 + w1) * 0.5, n) : dot(w0, n);
      for (int u = 0; u < n_sides; ++u) {
        const double wn_elem = (u == 0 ? avg_wn : -avg_wn);
        if (!(wn_elem < 0.0)) continue;
        const double c = std::abs(avg_wn) * wq;
        const Eigen::MatrixXd& tv_int = space.trace_values(f, u);
        for (int i = 0; i < nm; ++i)
          for (int j = 0; j < nm; ++j)
            blocks[u][u](i, j) += c * tv_int(q, i) * tv_int(q, j);
        if (face.interior()) {
          const Eigen::MatrixXd& tv_ext = space.trace_values(f, 1 - u);
          for (int i = 0; i < nm; ++i)
            for (int j = 0; j < nm; ++j)
              blocks[u][1 - u](i, j) -= c * tv_int(q, i) * tv_ext(q, j);
        }
      }
    }
    for (int a = 0; a < n_sides; ++a)
      for (int b = 0; b < n_sides; ++b)
        scatter_block(trips, space, space, face.elems[a], face.elems[b], blocks[a][b], true);
  }

  SparseOperator op;
  op.row_space = &space;
  op.col_space = &space;
  op.symmetric = false;
  op.matrix.resize(space.n_dofs(), space.n_dofs());
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  return op;
}

namespace {

struct VolumePointData {
  double weight_det;  // w_q * det J
  Vec2 x;
};

// Shared volume loop for the pointwise convection forms:
// contributes (w . grad a) . b + (1/2)(div w)(a . b) per point.
void convection_volume(const DiscreteField& w, const DiscreteField& a,
                       const DiscreteField& b, FormValue& out) {
  const FunctionSpace& space = w.space();
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double det = mesh.jacobian_det(e);
    for (int q = 0; q < rule.n_tri(); ++q) {
      const Vec2 x = mesh.from_reference(e, rule.tri_points[q]);
      const Vec2 wv = w.eval_vector(e, x);
      const Mat2 ga = a.grad_vector(e, x);
      const Vec2 av = a.eval_vector(e, x);
      const Vec2 bv = b.eval_vector(e, x);
      const double divw = w.grad_vector(e, x).trace();
      const double c = rule.tri_weights[q] * det *
                       (dot(ga.apply(wv), bv) + 0.5 * divw * dot(av, bv));
      out.value += c;
      out.scale += std::abs(c);
    }
  }
}

// -(1/2) sum over all faces of [w].n {a.b}.
void convection_face_central(const DiscreteField& w, const DiscreteField& a,
                             const DiscreteField& b, FormValue& out) {
  const FunctionSpace& space = w.space();
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const double he = face.length;
    for (int q = 0; q < rule.n_line(); ++q) {
      const double wq = rule.line_weights[q] * he;
      double jump_wn, avg_ab;
      if (face.interior()) {
        jump_wn = dot(trace_vector(w, f, 0, q) - trace_vector(w, f, 1, q), face.normal);
        avg_ab = 0.5 * (dot(trace_vector(a, f, 0, q), trace_vector(b, f, 0, q)) +
                        dot(trace_vector(a, f, 1, q), trace_vector(b, f, 1, q)));
      } else {
        jump_wn = dot(trace_vector(w, f, 0, q), face.normal);
        avg_ab = dot(trace_vector(a, f, 0, q), trace_vector(b, f, 0, q));
      }
      const double c = -0.5 * wq * jump_wn * avg_ab;
      out.value += c;
      out.scale += std::abs(c);
    }
  }
}

}  // namespace

FormValue convection_form(const DiscreteField& z, const DiscreteField& w,
                          const DiscreteField& v, const DiscreteField& theta) {
  check_same_space(z, w);
  check_same_space(w, v);
  check_same_space(v, theta);
  const FunctionSpace& space = w.space();
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();

  FormValue out;
  convection_volume(w, v, theta, out);
  convection_face_central(w, v, theta, out);

  // Upwind: |{w}.n_E| (v_int - v_ext) . theta_int over inflow points of z.
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const int n_sides = face.interior() ? 2 : 1;
    const double he = face.length;
    for (int q = 0; q < rule.n_line(); ++q) {
      const double wq = rule.line_weights[q] * he;
      const Vec2 z0 = trace_vector(z, f, 0, q);
      const Vec2 z1 = face.interior() ? trace_vector(z, f, 1, q) : Vec2{};
      const double avg_zn =
          face.interior() ? dot((z0 + z1) * 0.5, face.normal) : dot(z0, face.normal);
      const Vec2 w0 = trace_vector(w, f, 0, q);
      const Vec2 w1 = face.interior() ? trace_vector(w, f, 1, q) : Vec2{};
      const double avg_wn =
          face.interior() ? dot((w0 + w1) * 0.5, face.normal) : dot(w0, face.normal);
      for (int u = 0; u < n_sides; ++u) {
        const double zn_elem = (u == 0 ? avg_zn : -avg_zn);
        if (!(zn_elem < 0.0)) continue;
        const Vec2 v_int = trace_vector(v, f, u, q);
        const Vec2 v_ext =
            face.interior() ? trace_vector(v, f, 1 - u, q) : Vec2{};
        const Vec2 th_int = trace_vector(theta, f, u, q);
        const double c = wq * std::abs(avg_wn) * dot(v_int - v_ext, th_int);
        out.value += c;
        out.scale += std::abs(c);
      }
    }
  }
  return out;
}

FormValue convection_form_ibp(const DiscreteField& z, const DiscreteField& w,
                              const DiscreteField& theta, const DiscreteField& v) {
  check_same_space(z, w);
  check_same_space(w, v);
  check_same_space(v, theta);
  const FunctionSpace& space = w.space();
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();

  FormValue out;
  convection_volume(w, theta, v, out);
  convection_face_central(w, theta, v, out);

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const double he = face.length;
    if (face.interior()) {
      // |{w}.n_E| (theta_int - theta_ext) . v_ext over interior inflow points.
      for (int q = 0; q < rule.n_line(); ++q) {
        const double wq = rule.line_weights[q] * he;
        const Vec2 z0 = trace_vector(z, f, 0, q);
        const Vec2 z1 = trace_vector(z, f, 1, q);
        const double avg_zn = dot((z0 + z1) * 0.5, face.normal);
        const Vec2 w0 = trace_vector(w, f, 0, q);
        const Vec2 w1 = trace_vector(w, f, 1, q);
        const double avg_wn = dot((w0 + w1) * 0.5, face.normal);
        for (int u = 0; u < 2; ++u) {
          const double zn_elem = (u == 0 ? avg_zn : -avg_zn);
          if (!(zn_elem < 0.0)) continue;
          const Vec2 th_int = trace_vector(theta, f, u, q);
          const Vec2 th_ext = trace_vector(theta, f, 1 - u, q);
          const Vec2 v_ext = trace_vector(v, f, 1 - u, q);
          const double c = wq * std::abs(avg_wn) * dot(th_int - th_ext, v_ext);
          out.value += c;
          out.scale += std::abs(c);
        }
      }
    } else {
      // -(1/2) (|w.n| - w.n) theta . v on the domain boundary.
      for (int q = 0; q < rule.n_line(); ++q) {
        const double wq = rule.line_weights[q] * he;
        const double wn = dot(trace_vector(w, f, 0, q), face.normal);
        const double c = -0.5 * wq * (std::abs(wn) - wn) *
                         dot(trace_vector(theta, f, 0, q), trace_vector(v, f, 0, q));
        out.value += c;
        out.scale += std::abs(c);
      }
    }
  }
  return out;
}

FormValue convection_central_part(const DiscreteField& w, const DiscreteField& v,
                                  const DiscreteField& theta) {
  check_same_space(w, v);
  check_same_space(v, theta);
  FormValue out;
  convection_volume(w, v, theta, out);
  convection_face_central(w, v, theta, out);
  return out;
}

FormValue convection_upwind_part(const DiscreteField& z, const DiscreteField& w,
                                 const DiscreteField& v, const DiscreteField& theta) {
  check_same_space(z, w);
  check_same_space(w, v);
  check_same_space(v, theta);
  const FunctionSpace& space = w.space();
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = space.rule();

  FormValue out;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const int n_sides = face.interior() ? 2 : 1;
    const double he = face.length;
    for (int q = 0; q < rule.n_line(); ++q) {
      const double wq = rule.line_weights[q] * he;
      const Vec2 z0 = trace_vector(z, f, 0, q);
      const Vec2 z1 = face.interior() ? trace_vector(z, f, 1, q) : Vec2{};
      const double avg_zn =
          face.interior() ? dot((z0 + z1) * 0.5, face.normal) : dot(z0, face.normal);
      const Vec2 w0 = trace_vector(w, f, 0, q);
      const Vec2 w1 = face.interior() ? trace_vector(w, f, 1, q) : Vec2{};
      const double avg_wn =
          face.interior() ? dot((w0 + w1) * 0.5, face.normal) : dot(w0, face.normal);
      for (int u = 0; u < n_sides; ++u) {
        const double zn_elem = (u == 0 ? avg_zn : -avg_zn);
        if (!(zn_elem < 0.0)) continue;
        const double wn_elem = (u == 0 ? avg_wn : -avg_wn);  // signed {w}.n_E
        const Vec2 v_int = trace_vector(v, f, u, q);
        const Vec2 v_ext = face.interior() ? trace_vector(v, f, 1 - u, q) : Vec2{};
        const Vec2 th_int = trace_vector(theta, f, u, q);
        const double c = wq * wn_elem * dot(v_int - v_ext, th_int);
        out.value += c;
        out.scale += std::abs(c);
      }
    }
  }
  return out;
}

double apply_form(const SparseOperator& op, const DiscreteField& col_field,
                  const DiscreteField& row_field) {
  return row_field.coeffs().dot(op.matrix * col_field.coeffs());
}

DiscreteField lift_velocity_jumps(const DiscreteField& theta, const FunctionSpace& space_m) {
  const FunctionSpace& space_x = theta.space();
  if (space_x.components() != 2 || space_m.components() != 1)
    throw std::invalid_argument("lift_velocity_jumps: expects (vector field, scalar space)");
  check_same_mesh(space_x, space_m);
  const Mesh& mesh = space_x.mesh();
  const QuadratureRule& rule = space_x.rule();

  DiscreteField out(space_m);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const int n_sides = face.interior() ? 2 : 1;
    const double aw = face.interior() ? 0.5 : 1.0;
    for (int q = 0; q < rule.n_line(); ++q) {
      const double wq = rule.line_weights[q] * face.length;
      Vec2 jump = trace_vector(theta, f, 0, q);
      if (face.interior()) jump -= trace_vector(theta, f, 1, q);
      const double jn = dot(jump, face.normal);
      for (int u = 0; u < n_sides; ++u) {
        const Eigen::MatrixXd& mt = space_m.trace_values(f, u);
        for (int i = 0; i < space_m.n_modes(); ++i)
          out.coeffs()[space_m.global_dof(face.elems[u], 0, i)] += wq * aw * mt(q, i) * jn;
      }
    }
  }
  return out;
}

DiscreteField lift_pressure_jumps(const DiscreteField& q_field, const FunctionSpace& space_x) {
  const FunctionSpace& space_m = q_field.space();
  if (space_m.components() != 1 || space_x.components() != 2)
    throw std::invalid_argument("lift_pressure_jumps: expects (scalar field, vector space)");
  check_same_mesh(space_x, space_m);
  const Mesh& mesh = space_x.mesh();
  const QuadratureRule& rule = space_x.rule();

  DiscreteField out(space_x);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.interior()) continue;
    for (int q = 0; q < rule.n_line(); ++q) {
      const double wq = rule.line_weights[q] * face.length;
      const double jump = trace_scalar(q_field, f, 0, q) - trace_scalar(q_field, f, 1, q);
      for (int u = 0; u < 2; ++u) {
        const Eigen::MatrixXd& xt = space_x.trace_values(f, u);
        for (int i = 0; i < space_x.n_modes(); ++i) {
          out.coeffs()[space_x.global_dof(face.elems[u], 0, i)] +=
              wq * 0.5 * xt(q, i) * face.normal.x * jump;
          out.coeffs()[space_x.global_dof(face.elems[u], 1, i)] +=
              wq * 0.5 * xt(q, i) * face.normal.y * jump;
        }
      }
    }
  }
  return out;
}

DiscreteField discrete_divergence(const DiscreteField& v, const FunctionSpace& space_m) {
  const FunctionSpace& space_x = v.space();
  if (space_x.components() != 2 || space_m.components() != 1)
    throw std::invalid_argument("discrete_divergence: expects (vector field, scalar space)");
  check_same_mesh(space_x, space_m);
  const Mesh& mesh = space_x.mesh();
  const QuadratureRule& rule = space_x.rule();
  const int nmx = space_x.n_modes();
  const int nmm = space_m.n_modes();

  DiscreteField out(space_m);
  const Eigen::MatrixXd& gxi = space_x.ref_volume_grad_xi();
  const Eigen::MatrixXd& geta = space_x.ref_volume_grad_eta();
  const Eigen::MatrixXd& mv = space_m.ref_volume_values();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Mat2& inv_j = mesh.inverse_jacobian(e);
    for (int q = 0; q < rule.n_tri(); ++q) {
      double divv = 0.0;
      for (int j = 0; j < nmx; ++j) {
        const Vec2 g = inv_j.apply_transpose({gxi(q, j), geta(q, j)});
        divv += v.coeffs()[space_x.global_dof(e, 0, j)] * g.x +
                v.coeffs()[space_x.global_dof(e, 1, j)] * g.y;
      }
      for (int i = 0; i < nmm; ++i)
        out.coeffs()[space_m.global_dof(e, 0, i)] += rule.tri_weights[q] * divv * mv(q, i);
    }
  }
  const DiscreteField lift = lift_velocity_jumps(v, space_m);
  out.coeffs() -= lift.coeffs();
  return out;
}

}  // namespace nsdg
