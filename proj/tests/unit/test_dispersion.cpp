#include <doctest.h>

#include "bhs/dispersion.hpp"

using namespace bhs;

TEST_SUITE_BEGIN("dispersion");

TEST_CASE("homogeneous cell: X1 = X2 = 0 and d = 0") {
  double c = 1.5;
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, c);
  Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, 0.12);
  CellWorkspace ws(field, mesh);
  Mat2 m = c * Mat2::Identity();
  DispersionState state;
  double d = burnett_quartic(ws, Vec2::UnitX(), m, &state);
  CHECK(state.x1.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(state.x2.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("X1 and X2 vanish on the boundary") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.1);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  DispersionState state;
  burnett_quartic(ws, Vec2(0.3, 0.8).normalized(), m.entries, &state);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.vertex_on_boundary(v)) continue;
    CHECK(std::abs(state.x1[v]) < 1e-11);
    CHECK(std::abs(state.x2[v]) < 1e-11);
  }
}

TEST_CASE("X2 inherits the mirror symmetry of the data for eta = e1") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.1);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  DispersionState state;
  burnett_quartic(ws, Vec2::UnitX(), m.entries, &state);
  double scale = state.x2.cwiseAbs().maxCoeff();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2& p = mesh.vertices[v];
    int mx = find_vertex(mesh, Vec2(-p.x(), p.y()), 1e-9);
    int my = find_vertex(mesh, Vec2(p.x(), -p.y()), 1e-9);
    REQUIRE(mx >= 0);
    REQUIRE(my >= 0);
    CHECK(std::abs(state.x2[v] - state.x2[mx]) < 1e-9 * scale);
    CHECK(std::abs(state.x2[v] - state.x2[my]) < 1e-9 * scale);
  }
}

TEST_CASE("degree-4 homogeneity is exact") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.12);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  Vec2 eta(0.4, 0.3);
  double d1 = burnett_quartic(ws, eta, m.entries);
  for (double t : {2.0, 3.0}) {
    double dt = burnett_quartic(ws, t * eta, m.entries);
    CHECK(dt == doctest::Approx(std::pow(t, 4) * d1).epsilon(1e-11));
  }
}

TEST_CASE("non-positive on a direction fan, isotropic for the disk") {
  DiskInclusion geom{std::sqrt(0.5)};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.06);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  double d_ref = burnett_quartic(ws, Vec2::UnitX(), m.entries);
  CHECK(d_ref < 0.0);
  for (int i = 0; i < 16; ++i) {
    double a = M_PI * i / 16;
    double d = burnett_quartic(ws, Vec2(std::cos(a), std::sin(a)), m.entries);
    CHECK(d <= 1e-10 * std::abs(d_ref));
  }
  double d_e2 = burnett_quartic(ws, Vec2::UnitY(), m.entries);
  CHECK(std::abs(d_ref - d_e2) / std::abs(d_ref) < 1e-6);
}

TEST_CASE("fan rows carry the fd oracle and small gaps") {
  DiskInclusion geom{std::sqrt(0.5)};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.05);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  auto rows = dispersion_fan(ws, forms, m.entries, 4);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.d_value < 0.0);
    CHECK(row.q4_oracle < 0.0);
    CHECK(row.relative_gap < 0.05);
  }
}

TEST_SUITE_END();
