#include "nsdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace nsdg {

void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  points.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    points[i] = -x;
    points[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

QuadratureRule QuadratureRule::make(int exactness) {
  if (exactness < 0) throw std::invalid_argument("quadrature: exactness must be >= 0");
  QuadratureRule rule;
  rule.exactness = exactness;

  // n Gauss points are exact to degree 2n-1, so n = ceil((p+1)/2).
  std::vector<double> gp, gw;
  const int n_line = (exactness + 2) / 2;
  gauss_legendre(std::max(1, n_line), gp, gw);
  for (int i = 0; i < static_cast<int>(gp.size()); ++i) {
    rule.line_points.push_back(0.5 * (gp[i] + 1.0));
    rule.line_weights.push_back(0.5 * gw[i]);
  }

  // Collapsed-square (Duffy) product rule: xi = a(1-b), eta = b with the
  // (1-b) Jacobian folded into the weights. A degree-p integrand becomes
  // degree p in a and p+1 in b, hence ceil((p+2)/2) points per direction.
  const int n_dir = (exactness + 2 + 1) / 2;
  gauss_legendre(std::max(1, n_dir), gp, gw);
  for (int j = 0; j < n_dir; ++j) {
    const double b = 0.5 * (gp[j] + 1.0);
    const double wb = 0.5 * gw[j];
    for (int i = 0; i < n_dir; ++i) {
      const double a = 0.5 * (gp[i] + 1.0);
      const double wa = 0.5 * gw[i];
      rule.tri_points.push_back({a * (1.0 - b), b});
      rule.tri_weights.push_back(wa * wb * (1.0 - b));
    }
  }
  return rule;
}

}  // namespace nsdg
