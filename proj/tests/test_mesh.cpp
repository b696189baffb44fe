#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "nsdg/field.hpp"
#include "nsdg/mesh.hpp"

using namespace nsdg;

TEST_CASE("uniform mesh counts") {
  const Mesh m1 = Mesh::uniform_square(1);
  CHECK(m1.n_vertices() == 4);
  CHECK(m1.n_elements() == 2);
  CHECK(m1.n_faces() == 5);
  CHECK(m1.n_interior_faces() == 1);

  const Mesh m2 = Mesh::uniform_square(2);
  CHECK(m2.n_vertices() == 9);
  CHECK(m2.n_elements() == 8);
  CHECK(m2.n_faces() == 16);
  CHECK(m2.n_interior_faces() == 8);
}

TEST_CASE("invalid subdivision count") {
  CHECK_THROWS_AS(Mesh::uniform_square(0), std::invalid_argument);
}

TEST_CASE("areas, h_max, Euler relation") {
  for (int n : {1, 2, 3, 5, 8}) {
    const Mesh mesh = Mesh::uniform_square(n);
    double total = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) total += mesh.area(e);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mesh.h_max() == doctest::Approx(std::sqrt(2.0) / n).epsilon(1e-14));
    // V - E + F = 2 counting the outer face.
    CHECK(mesh.n_vertices() - mesh.n_faces() + (mesh.n_elements() + 1) == 2);
  }
}

TEST_CASE("refinement halves h_max exactly") {
  for (int n : {1, 2, 4}) {
    const Mesh coarse = Mesh::uniform_square(n);
    const Mesh fine = Mesh::uniform_square(2 * n);
    CHECK(fine.h_max() == coarse.h_max() / 2.0);
  }
}

TEST_CASE("face topology invariants") {
  const Mesh mesh = Mesh::uniform_square(3);
  int interior = 0, boundary = 0;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Vec2 a = mesh.vertex(face.verts[0]);
    const Vec2 b = mesh.vertex(face.verts[1]);
    const Vec2 edge = b - a;

    CHECK(norm(face.normal) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(dot(face.normal, edge / norm(edge))) < 1e-14);
    CHECK(face.length == doctest::Approx(norm(edge)).epsilon(1e-14));

    if (face.interior()) {
      ++interior;
      CHECK(face.elems[0] < face.elems[1]);
      // Stored normal is the outward normal of elems[0] and the negation of
      // the outward normal of elems[1].
      const Vec2 n0 = mesh.outward_normal(face.elems[0], f);
      const Vec2 n1 = mesh.outward_normal(face.elems[1], f);
      CHECK(n0.x == doctest::Approx(face.normal.x).epsilon(1e-14));
      CHECK(n0.y == doctest::Approx(face.normal.y).epsilon(1e-14));
      CHECK(n1.x == doctest::Approx(-face.normal.x).epsilon(1e-14));
      CHECK(n1.y == doctest::Approx(-face.normal.y).epsilon(1e-14));
    } else {
      ++boundary;
      CHECK(face.elems[1] == -1);
      const Vec2 mid = (a + b) * 0.5;
      CHECK(dot(face.normal, mid - mesh.centroid(face.elems[0])) > 0.0);
    }
  }
  CHECK(interior + boundary == mesh.n_faces());
  CHECK(boundary == 4 * 3);

  // Each element's three face references are distinct and match its edges.
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& fids = mesh.element_faces(e);
    std::set<int> unique(fids.begin(), fids.end());
    CHECK(unique.size() == 3);
    const auto& tri = mesh.element(e);
    for (int k = 0; k < 3; ++k) {
      const Face& face = mesh.face(fids[k]);
      const std::set<int> fv{face.verts[0], face.verts[1]};
      const std::set<int> ev{tri[k], tri[(k + 1) % 3]};
      CHECK(fv == ev);
    }
  }
}

TEST_CASE("upwind indicator") {
  const Mesh mesh = Mesh::uniform_square(1);
  const auto flow_right = [](const Vec2&) { return Vec2{1.0, 0.0}; };
  const auto still = [](const Vec2&) { return Vec2{0.0, 0.0}; };

  int left_face = -1, right_face = -1;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.interior()) continue;
    const Vec2 mid = (mesh.vertex(face.verts[0]) + mesh.vertex(face.verts[1])) * 0.5;
    if (mid.x == 0.0) left_face = f;
    if (mid.x == 1.0) right_face = f;
  }
  REQUIRE(left_face >= 0);
  REQUIRE(right_face >= 0);

  const Vec2 on_left{0.0, 0.5};
  const Vec2 on_right{1.0, 0.5};
  const int left_elem = mesh.face(left_face).elems[0];
  const int right_elem = mesh.face(right_face).elems[0];

  CHECK(upwind_indicator(mesh, left_elem, left_face, on_left, flow_right) ==
        UpwindSide::Inflow);
  CHECK(upwind_indicator(mesh, right_elem, right_face, on_right, flow_right) ==
        UpwindSide::OutflowOrTangent);
  CHECK(upwind_indicator(mesh, left_elem, left_face, on_left, still) ==
        UpwindSide::OutflowOrTangent);

  CHECK_THROWS_AS(
      upwind_indicator(mesh, left_elem, left_face, Vec2{0.5, 0.5}, flow_right),
      std::invalid_argument);
  CHECK_THROWS_AS(
      upwind_indicator(mesh, right_elem, left_face, on_left, flow_right),
      std::invalid_argument);
}

TEST_CASE("upwind indicator on discrete fields uses the trace average") {
  const Mesh mesh = Mesh::uniform_square(1);
  const FunctionSpace space(mesh, 1, 2);
  const DiscreteField z =
      l2_project(space, [](const Vec2&) { return Vec2{1.0, 0.0}; });

  // The diagonal face: normal has a positive x component toward elems[1].
  int diag = -1;
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (mesh.face(f).interior()) diag = f;
  REQUIRE(diag >= 0);
  const Face& face = mesh.face(diag);
  const Vec2 mid = (mesh.vertex(face.verts[0]) + mesh.vertex(face.verts[1])) * 0.5;
  const int downwind =
      dot(face.normal, Vec2{1.0, 0.0}) > 0.0 ? face.elems[1] : face.elems[0];
  const int upwind_elem = downwind == face.elems[0] ? face.elems[1] : face.elems[0];
  CHECK(upwind_indicator(z, downwind, diag, mid) == UpwindSide::Inflow);
  CHECK(upwind_indicator(z, upwind_elem, diag, mid) == UpwindSide::OutflowOrTangent);
}

TEST_CASE("mesh dump sections") {
  const Mesh mesh = Mesh::uniform_square(1);
  std::ostringstream os;
  mesh.dump(os);
  const std::string text = os.str();
  CHECK(text.find("VERTICES 4") != std::string::npos);
  CHECK(text.find("ELEMENTS 2") != std::string::npos);
  CHECK(text.find("FACES 5") != std::string::npos);
  CHECK(text.find("interior") != std::string::npos);
  CHECK(text.find("boundary") != std::string::npos);
}
