#include "nsdg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "nsdg/norms.hpp"

namespace nsdg {

namespace {

DiscreteField random_field(const FunctionSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DiscreteField f(space);
  for (int i = 0; i < space.n_dofs(); ++i) f.coeffs()[i] = dist(rng);
  return f;
}

double rel(double residual, double scale) { return residual / std::max(scale, 1e-30); }

}  // namespace

std::vector<IdentityCheck> run_form_checks(int n, const std::vector<int>& degrees,
                                           int trials, std::uint64_t seed,
                                           const PenaltyConfig* penalties) {
  std::vector<IdentityCheck> checks;

  for (int k : degrees) {
    const Mesh mesh = Mesh::uniform_square(n);
    const QuadratureRule rule = QuadratureRule::make(3 * k + 2);
    const FunctionSpace space_x(mesh, k, 2, rule);
    const FunctionSpace space_m(mesh, k - 1, 1, rule);
    const PenaltyConfig pen = penalties ? *penalties : PenaltyConfig::defaults(k);

    const SparseOperator a_d = assemble_diffusion(space_x, pen.sigma);
    const SparseOperator a_ellip = assemble_scalar_laplacian(space_m, pen.sigma_tilde);
    const SparseOperator b = assemble_divergence(space_x, space_m);
    const DiscreteField one_m = l2_project(space_m, [](const Vec2&) { return 1.0; });

    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
    const std::string tag = " (k=" + std::to_string(k) + ")";

    IdentityCheck ibp{"integration-by-parts: a_C(w;w,v,th) + abar_C(w;w,th,v) = 0" + tag,
                      trials, 0.0, 1e-11, false};
    IdentityCheck pos{"positivity: a_C(w;w,v,v) >= 0" + tag, trials, 0.0, 1e-12, false};
    IdentityCheck split{"split: a_C(w;w,v,th) = C(w,v,th) - U(w;w,v,th)" + tag, trials, 0.0,
                        1e-12, false};
    IdentityCheck beq{"divergence form: both expressions of b agree" + tag, trials, 0.0,
                      1e-12, false};
    IdentityCheck bconst{"divergence form: b(th, 1) = 0" + tag, trials, 0.0, 1e-12, false};
    IdentityCheck liftr{"lift R: (R_h[th], q) matches its face functional" + tag, trials,
                        0.0, 1e-12, false};
    IdentityCheck liftg{"lift G: (G_h[q], th) matches its face functional" + tag, trials,
                        0.0, 1e-12, false};
    IdentityCheck liftb{"lift: b(th,q) = (div_h th, q) - (R_h[th], q)" + tag, trials, 0.0,
                        1e-12, false};
    IdentityCheck sym{"diffusion operator symmetry" + tag, 1, 0.0, 1e-12, false};
    IdentityCheck coer_d{"coercivity: a_D(th,th) >= 0.5 ||th||_DG^2" + tag, trials, 0.0,
                         1e-12, false};
    IdentityCheck coer_e{"coercivity: a_ellip(q,q) >= 0.5 |q|_DG^2" + tag, trials, 0.0,
                         1e-12, false};
    IdentityCheck diff{"difference identity: four-term expansion of a_C(u;u,.) - a_C(w;w,.)" +
                           tag, trials, 0.0, 1e-11, false};

    // Symmetry is a property of the assembled matrix, checked once.
    {
      Eigen::SparseMatrix<double> diff_mat =
          Eigen::SparseMatrix<double>(a_d.matrix.transpose()) - a_d.matrix;
      double max_entry = 0.0;
      for (int c = 0; c < a_d.matrix.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a_d.matrix, c); it; ++it)
          max_entry = std::max(max_entry, std::abs(it.value()));
      double max_asym = 0.0;
      for (int c = 0; c < diff_mat.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff_mat, c); it; ++it)
          max_asym = std::max(max_asym, std::abs(it.value()));
      sym.max_residual = rel(max_asym, max_entry);
    }

    for (int trial = 0; trial < trials; ++trial) {
      const DiscreteField w = random_field(space_x, rng);
      const DiscreteField v = random_field(space_x, rng);
      const DiscreteField th = random_field(space_x, rng);
      const DiscreteField u = random_field(space_x, rng);
      const DiscreteField q = random_field(space_m, rng);

      {
        const FormValue a = convection_form(w, w, v, th);
        const FormValue abar = convection_form_ibp(w, w, th, v);
        ibp.max_residual = std::max(
            ibp.max_residual, rel(std::abs(a.value + abar.value), a.scale + abar.scale));
      }
      {
        const FormValue a = convection_form(w, w, v, v);
        pos.max_residual = std::max(pos.max_residual, rel(-a.value, a.scale));
      }
      {
        const FormValue a = convection_form(w, w, v, th);
        const FormValue c = convection_central_part(w, v, th);
        const FormValue up = convection_upwind_part(w, w, v, th);
        split.max_residual =
            std::max(split.max_residual, rel(std::abs(a.value - (c.value - up.value)),
                                             a.scale + c.scale + up.scale));
      }
      {
        // Primal expression through B; dual expression assembled pointwise.
        const double b1 = q.coeffs().dot(b.matrix * th.coeffs());
        double b2 = 0.0, scale2 = 0.0;
        const Mesh& m = mesh;
        for (int e = 0; e < m.n_elements(); ++e) {
          const double det = m.jacobian_det(e);
          for (int qq = 0; qq < rule.n_tri(); ++qq) {
            const Vec2 x = m.from_reference(e, rule.tri_points[qq]);
            const double c = -rule.tri_weights[qq] * det *
                             dot(th.eval_vector(e, x), q.grad_scalar(e, x));
            b2 += c;
            scale2 += std::abs(c);
          }
        }
        for (int f = 0; f < m.n_faces(); ++f) {
          const Face& face = m.face(f);
          if (!face.interior()) continue;
          for (int qq = 0; qq < rule.n_line(); ++qq) {
            const Vec2 avg_th =
                (trace_vector(th, f, 0, qq) + trace_vector(th, f, 1, qq)) * 0.5;
            const double jump_q =
                trace_scalar(q, f, 0, qq) - trace_scalar(q, f, 1, qq);
            const double c =
                rule.line_weights[qq] * face.length * dot(avg_th, face.normal) * jump_q;
            b2 += c;
            scale2 += std::abs(c);
          }
        }
        beq.max_residual =
            std::max(beq.max_residual, rel(std::abs(b1 - b2), std::abs(b1) + scale2));
        const double bc = one_m.coeffs().dot(b.matrix * th.coeffs());
        bconst.max_residual = std::max(bconst.max_residual, rel(std::abs(bc), scale2));
      }
      {
        const DiscreteField r = lift_velocity_jumps(th, space_m);
        const double lhs = r.coeffs().dot(q.coeffs());
        double rhs = 0.0, scale = 0.0;
        for (int f = 0; f < mesh.n_faces(); ++f) {
          const Face& face = mesh.face(f);
          for (int qq = 0; qq < rule.n_line(); ++qq) {
            Vec2 jump = trace_vector(th, f, 0, qq);
            double avg_q = trace_scalar(q, f, 0, qq);
            if (face.interior()) {
              jump -= trace_vector(th, f, 1, qq);
              avg_q = 0.5 * (avg_q + trace_scalar(q, f, 1, qq));
            }
            const double c =
                rule.line_weights[qq] * face.length * avg_q * dot(jump, face.normal);
            rhs += c;
            scale += std::abs(c);
          }
        }
        liftr.max_residual =
            std::max(liftr.max_residual, rel(std::abs(lhs - rhs), std::abs(lhs) + scale));

        const DiscreteField g = lift_pressure_jumps(q, space_x);
        const double lhs_g = g.coeffs().dot(th.coeffs());
        double rhs_g = 0.0, scale_g = 0.0;
        for (int f = 0; f < mesh.n_faces(); ++f) {
          const Face& face = mesh.face(f);
          if (!face.interior()) continue;
          for (int qq = 0; qq < rule.n_line(); ++qq) {
            const Vec2 avg_th =
                (trace_vector(th, f, 0, qq) + trace_vector(th, f, 1, qq)) * 0.5;
            const double jump_q = trace_scalar(q, f, 0, qq) - trace_scalar(q, f, 1, qq);
            const double c =
                rule.line_weights[qq] * face.length * dot(avg_th, face.normal) * jump_q;
            rhs_g += c;
            scale_g += std::abs(c);
          }
        }
        liftg.max_residual = std::max(liftg.max_residual,
                                      rel(std::abs(lhs_g - rhs_g), std::abs(lhs_g) + scale_g));

        const DiscreteField div_v = discrete_divergence(th, space_m);
        const double b_th_q = q.coeffs().dot(b.matrix * th.coeffs());
        const double alt = div_v.coeffs().dot(q.coeffs());
        liftb.max_residual = std::max(
            liftb.max_residual, rel(std::abs(b_th_q - alt), std::abs(b_th_q) + std::abs(alt)));
      }
      {
        const double a_th = apply_form(a_d, th, th);
        const double dg = dg_norm(th, pen.sigma);
        coer_d.max_residual =
            std::max(coer_d.max_residual, rel(0.5 * dg * dg - a_th, 0.5 * dg * dg));
        const double a_q = apply_form(a_ellip, q, q);
        const double sdg = dg_seminorm(q, pen.sigma_tilde);
        coer_e.max_residual =
            std::max(coer_e.max_residual, rel(0.5 * sdg * sdg - a_q, 0.5 * sdg * sdg));
      }
      {
        const DiscreteField v2 = random_field(space_x, rng);
        const FormValue lhs_a = convection_form(u, u, v, th);
        const FormValue lhs_b = convection_form(w, w, v2, th);
        DiscreteField v_diff(space_x, v.coeffs() - v2.coeffs());
        DiscreteField u_diff(space_x, u.coeffs() - w.coeffs());
        const FormValue t1 = convection_form(w, w, v_diff, th);
        const FormValue t2 = convection_central_part(u_diff, v, th);
        const FormValue t3 = convection_upwind_part(w, u_diff, v, th);
        const FormValue t4a = convection_upwind_part(u, u, v, th);
        const FormValue t4b = convection_upwind_part(w, u, v, th);
        const double lhs = lhs_a.value - lhs_b.value;
        const double rhs = t1.value + t2.value - t3.value - (t4a.value - t4b.value);
        const double scale = lhs_a.scale + lhs_b.scale + t1.scale + t2.scale + t3.scale +
                             t4a.scale + t4b.scale;
        diff.max_residual = std::max(diff.max_residual, rel(std::abs(lhs - rhs), scale));
      }
    }

    for (IdentityCheck* c :
         {&ibp, &pos, &split, &beq, &bconst, &liftr, &liftg, &liftb, &sym, &coer_d, &coer_e,
          &diff}) {
      c->pass = c->max_residual <= c->tolerance;
      checks.push_back(*c);
    }
  }
  return checks;
}

std::string format_check_table(const std::vector<IdentityCheck>& checks) {
  std::ostringstream os;
  os << std::left << std::setw(72) << "identity" << std::setw(8) << "trials"
     << std::setw(14) << "max resid" << std::setw(12) << "tol" << "status\n";
  for (const auto& c : checks) {
    os << std::left << std::setw(72) << c.name << std::setw(8) << c.trials << std::scientific
       << std::setprecision(3) << std::setw(14) << c.max_residual << std::setw(12)
       << c.tolerance << (c.pass ? "PASS" : "FAIL") << "\n"
       << std::defaultfloat;
  }
  return os.str();
}

bool all_pass(const std::vector<IdentityCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const IdentityCheck& c) { return c.pass; });
}

}  // namespace nsdg
