#include "nsdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace nsdg {

Mesh Mesh::uniform_square(int n) {
  if (n < 1) throw std::invalid_argument("uniform_square: n must be >= 1");

  Mesh mesh;
  const int nv = n + 1;
  mesh.vertices_.reserve(nv * nv);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i)
      mesh.vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  auto vid = [nv](int i, int j) { return j * nv + i; };

  // Two positively oriented triangles per cell, all cut along the same
  // bottom-left to top-right diagonal.
  mesh.elements_.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.elements_.push_back({v00, v10, v11});
      mesh.elements_.push_back({v00, v11, v01});
    }
  }

  mesh.finalize();
  return mesh;
}

void Mesh::finalize() {
  const int ne = n_elements();
  areas_.resize(ne);
  centroids_.resize(ne);
  jacobians_.resize(ne);
  inv_jacobians_.resize(ne);
  element_faces_.assign(ne, {-1, -1, -1});
  h_max_ = 0.0;

  for (int e = 0; e < ne; ++e) {
    const auto& [a, b, c] = elements_[e];
    const Vec2 p0 = vertices_[a], p1 = vertices_[b], p2 = vertices_[c];
    const Vec2 d1 = p1 - p0, d2 = p2 - p0;
    jacobians_[e] = {d1.x, d2.x, d1.y, d2.y};
    const double det = jacobians_[e].det();
    if (det <= 0.0) throw std::invalid_argument("mesh: negatively oriented element");
    inv_jacobians_[e] = jacobians_[e].inverse();
    areas_[e] = 0.5 * det;
    centroids_[e] = (p0 + p1 + p2) / 3.0;
    h_max_ = std::max({h_max_, norm(p1 - p0), norm(p2 - p1), norm(p0 - p2)});
  }

  // Collect edges; keyed by sorted vertex pair so shared edges meet.
  std::map<std::pair<int, int>, int> edge_index;
  faces_.clear();
  for (int e = 0; e < ne; ++e) {
    const auto& tri = elements_[e];
    for (int k = 0; k < 3; ++k) {
      const int va = tri[k], vb = tri[(k + 1) % 3];
      const auto key = std::minmax(va, vb);
      auto it = edge_index.find(key);
      if (it == edge_index.end()) {
        Face f;
        f.verts = {va, vb};
        f.kind = FaceKind::Boundary;
        f.elems = {e, -1};
        const int fi = static_cast<int>(faces_.size());
        faces_.push_back(f);
        edge_index.emplace(key, fi);
        element_faces_[e][k] = fi;
      } else {
        Face& f = faces_[it->second];
        f.kind = FaceKind::Interior;
        f.elems[1] = e;
        element_faces_[e][k] = it->second;
      }
    }
  }

  n_interior_faces_ = 0;
  for (auto& f : faces_) {
    if (f.interior()) {
      ++n_interior_faces_;
      // E1 is the element with the smaller index; normal points E1 -> E2.
      if (f.elems[0] > f.elems[1]) std::swap(f.elems[0], f.elems[1]);
    }
    const Vec2 a = vertices_[f.verts[0]], b = vertices_[f.verts[1]];
    const Vec2 t = b - a;
    f.length = norm(t);
    Vec2 nrm{t.y / f.length, -t.x / f.length};
    const Vec2 mid = (a + b) * 0.5;
    if (f.interior()) {
      if (dot(nrm, centroids_[f.elems[1]] - centroids_[f.elems[0]]) < 0.0) nrm = -nrm;
    } else {
      if (dot(nrm, centroids_[f.elems[0]] - mid) > 0.0) nrm = -nrm;
    }
    f.normal = nrm;
  }
}

bool Mesh::contains(int e, const Vec2& x, double tol) const {
  const Vec2 r = to_reference(e, x);
  return r.x >= -tol && r.y >= -tol && r.x + r.y <= 1.0 + tol;
}

Vec2 Mesh::outward_normal(int e, int f) const {
  const Face& face = faces_[f];
  if (face.elems[0] == e) return face.normal;
  if (face.elems[1] == e) return -face.normal;
  throw std::invalid_argument("outward_normal: element not adjacent to face");
}

void Mesh::dump(std::ostream& os) const {
  os << "VERTICES " << n_vertices() << "\n";
  for (int v = 0; v < n_vertices(); ++v)
    os << v << " " << vertices_[v].x << " " << vertices_[v].y << "\n";
  os << "ELEMENTS " << n_elements() << "\n";
  for (const auto& tri : elements_) os << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
  os << "FACES " << n_faces() << "\n";
  for (const auto& f : faces_) {
    os << f.verts[0] << " " << f.verts[1] << " "
       << (f.interior() ? "interior" : "boundary") << " " << f.elems[0];
    if (f.interior()) os << " " << f.elems[1];
    os << " " << f.normal.x << " " << f.normal.y << " " << f.length << "\n";
  }
}

UpwindSide upwind_indicator(const Mesh& mesh, int elem, int face, const Vec2& x,
                            const std::function<Vec2(const Vec2&)>& z_average) {
  const Face& f = mesh.face(face);
  if (f.elems[0] != elem && f.elems[1] != elem)
    throw std::invalid_argument("upwind_indicator: element not adjacent to face");

  const Vec2 a = mesh.vertex(f.verts[0]);
  const Vec2 b = mesh.vertex(f.verts[1]);
  const Vec2 t = b - a;
  const double s = dot(x - a, t) / dot(t, t);
  const Vec2 proj = a + t * std::clamp(s, 0.0, 1.0);
  if (norm(x - proj) > 1e-12 * std::max(1.0, f.length))
    throw std::invalid_argument("upwind_indicator: point not on face");

  const Vec2 n_e = mesh.outward_normal(elem, face);
  return dot(z_average(x), n_e) < 0.0 ? UpwindSide::Inflow : UpwindSide::OutflowOrTangent;
}

}  // namespace nsdg
