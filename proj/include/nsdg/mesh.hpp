#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "nsdg/geometry.hpp"

namespace nsdg {

enum class FaceKind { Interior, Boundary };

// One edge of the triangulation. For interior faces the stored normal points
// from elem(0) to elem(1), where elem(0) carries the smaller element index;
// for boundary faces it is the outward normal of the domain and elem(1) = -1.
struct Face {
  std::array<int, 2> verts{-1, -1};
  FaceKind kind = FaceKind::Boundary;
  std::array<int, 2> elems{-1, -1};
  Vec2 normal;
  double length = 0.0;  // h_e ( = |e| in 2D)

  bool interior() const { return kind == FaceKind::Interior; }
};

// Conforming triangulation of the unit square with full face connectivity.
// Immutable after construction; safe for concurrent reads.
class Mesh {
 public:
  // n x n cells, each split along the bottom-left/top-right diagonal.
  static Mesh uniform_square(int n);

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_elements() const { return static_cast<int>(elements_.size()); }
  int n_faces() const { return static_cast<int>(faces_.size()); }
  int n_interior_faces() const { return n_interior_faces_; }

  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& element(int e) const { return elements_[e]; }
  const Face& face(int f) const { return faces_[f]; }
  const std::array<int, 3>& element_faces(int e) const { return element_faces_[e]; }
  const std::vector<Face>& faces() const { return faces_; }

  double h_max() const { return h_max_; }
  double area(int e) const { return areas_[e]; }
  Vec2 centroid(int e) const { return centroids_[e]; }

  // Affine map x = v0 + J * (xi, eta) from the reference triangle
  // {xi, eta >= 0, xi + eta <= 1}.
  const Mat2& jacobian(int e) const { return jacobians_[e]; }
  const Mat2& inverse_jacobian(int e) const { return inv_jacobians_[e]; }
  double jacobian_det(int e) const { return 2.0 * areas_[e]; }

  // Reference coordinates of a physical point inside element e.
  Vec2 to_reference(int e, const Vec2& x) const {
    return inv_jacobians_[e].apply(x - vertices_[elements_[e][0]]);
  }
  Vec2 from_reference(int e, const Vec2& ref) const {
    return vertices_[elements_[e][0]] + jacobians_[e].apply(ref);
  }
  bool contains(int e, const Vec2& x, double tol = 1e-12) const;

  // Outward normal of element e on one of its faces (+/- the stored normal).
  Vec2 outward_normal(int e, int f) const;

  // Plain-text dump: VERTICES / ELEMENTS / FACES sections, one record per line.
  void dump(std::ostream& os) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 3>> element_faces_;
  std::vector<double> areas_;
  std::vector<Vec2> centroids_;
  std::vector<Mat2> jacobians_;
  std::vector<Mat2> inv_jacobians_;
  double h_max_ = 0.0;
  int n_interior_faces_ = 0;

  void finalize();
};

enum class UpwindSide { Inflow, OutflowOrTangent };

// Classifies a face point as inflow for the given element: inflow iff
// {z(x)} . n_E < 0, strict. `z_average` must return the face-average of z
// (one-sided trace on boundary faces). Throws std::invalid_argument if x is
// not on the face or the element is not adjacent to it.
UpwindSide upwind_indicator(const Mesh& mesh, int elem, int face, const Vec2& x,
                            const std::function<Vec2(const Vec2&)>& z_average);

}  // namespace nsdg
