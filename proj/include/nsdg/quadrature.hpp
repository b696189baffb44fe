#pragma once

#include <vector>

#include "nsdg/geometry.hpp"

namespace nsdg {

// Quadrature on the reference triangle {xi, eta >= 0, xi + eta <= 1} and on
// the unit interval [0,1]. Both rules integrate polynomials exactly up to
// `exactness` total degree; all weights are positive.
struct QuadratureRule {
  std::vector<Vec2> tri_points;
  std::vector<double> tri_weights;   // sum to 1/2
  std::vector<double> line_points;   // in [0,1]
  std::vector<double> line_weights;  // sum to 1
  int exactness = 0;

  static QuadratureRule make(int exactness);

  int n_tri() const { return static_cast<int>(tri_points.size()); }
  int n_line() const { return static_cast<int>(line_points.size()); }
};

// Gauss-Legendre nodes/weights on [-1,1], exact for degree 2n-1.
void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights);

}  // namespace nsdg
