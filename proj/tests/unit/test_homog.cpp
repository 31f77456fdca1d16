#include <doctest.h>

#include <Eigen/Dense>

#include "bhs/homog.hpp"

using namespace bhs;

TEST_SUITE_BEGIN("homog");

TEST_CASE("corrector of a homogeneous cell is the linear function") {
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, 1.6);
  Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, 0.12);
  CellWorkspace ws(field, mesh);
  Vec2 lambda(0.8, -0.6);
  CorrectorField w = solve_corrector_hs(ws, lambda);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    CHECK(std::abs(w.values[v] - lambda.dot(mesh.vertices[v])) < 1e-11);
}

TEST_CASE("disk corrector has the odd/even mirror symmetry") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.1);
  CellWorkspace ws(field, mesh);
  const CorrectorField& w = ws.coordinate_corrector(0);
  double scale = w.values.cwiseAbs().maxCoeff();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2& p = mesh.vertices[v];
    int mx = find_vertex(mesh, Vec2(-p.x(), p.y()), 1e-9);
    int my = find_vertex(mesh, Vec2(p.x(), -p.y()), 1e-9);
    REQUIRE(mx >= 0);
    REQUIRE(my >= 0);
    CHECK(std::abs(w.values[v] + w.values[mx]) < 1e-9 * scale);  // odd in y1
    CHECK(std::abs(w.values[v] - w.values[my]) < 1e-9 * scale);  // even in y2
  }
}

TEST_CASE("interior residual of the corrector vanishes") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.1);
  CellWorkspace ws(field, mesh);
  const CorrectorField& w = ws.coordinate_corrector(0);
  Eigen::VectorXd res = ws.full_forms().stiffness * w.values;
  double scale = w.values.norm();
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.vertex_on_boundary(v)) CHECK(std::abs(res[v]) < 1e-10 * scale);
}

TEST_CASE("cell integral: homogeneous cell returns c I") {
  double c = 2.2;
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, c);
  Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, 0.15);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  CHECK((m.entries - c * Mat2::Identity()).norm() < 1e-10);
  CHECK(m.provenance == TensorProvenance::CellIntegral);
}

TEST_CASE("cell integral: disk matches the spherical reference") {
  DiskInclusion geom{std::sqrt(0.5)};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.05);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  double gamma = hs_spherical_gamma(1.0, 2.0, 0.5, 2);
  CHECK((m.entries - gamma * Mat2::Identity()).norm() / gamma < 0.02);
}

TEST_CASE("energy identity: corrector energy equals M lambda . lambda") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.1);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  Vec2 lambda = Vec2(0.42, -1.1);
  double energy = corrector_energy(ws, lambda);
  CHECK(energy == doctest::Approx(lambda.dot(m.entries * lambda)).epsilon(1e-10));
}

TEST_CASE("homogenized tensor stays within the volume-fraction means") {
  struct Case {
    CellGeometry geom;
    double alpha, beta;
  };
  std::vector<Case> cases = {{DiskInclusion{0.6}, 1.0, 2.0},
                             {ConfocalEllipse{0.4, 1.0, {0.5, 0.0}}, 1.0, 2.0}};
  for (const auto& c : cases) {
    CoefficientField field = CoefficientField::two_phase(c.geom, c.alpha, c.beta);
    Mesh mesh = generate_cell_mesh(c.geom, 0.06);
    CellWorkspace ws(field, mesh);
    HomogenizedTensor m = homogenized_cell_integral(ws);
    double theta = cell_volume_fraction(c.geom);
    LaminateMeans means = laminate_means(c.alpha, c.beta, theta);
    Eigen::SelfAdjointEigenSolver<Mat2> es(m.entries);
    CHECK(es.eigenvalues()(0) >= means.harmonic - 1e-2);
    CHECK(es.eigenvalues()(1) <= means.arithmetic + 1e-2);
  }
}

TEST_CASE("equivalence check: true M passes, wrong M is an order worse") {
  DiskInclusion geom{std::sqrt(0.5)};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.04);
  CellWorkspace ws(field, mesh);
  const CorrectorField& w = ws.coordinate_corrector(0);
  double gamma = hs_spherical_gamma(1.0, 2.0, 0.5, 2);
  EquivalenceReport good = equivalence_check(ws, w, gamma * Mat2::Identity());
  EquivalenceReport bad = equivalence_check(ws, w, 2.0 * Mat2::Identity());
  CHECK(good.relative_l2() < 0.05);
  CHECK(bad.relative_l2() > 10.0 * good.relative_l2());
}

TEST_CASE("equivalence check: homogeneous cell error is pure recovery noise") {
  // w = x exactly, so the only gap is the O(h) step-vs-P1 flux projection.
  double c = 1.5;
  double prev = 1e300;
  for (double h : {0.08, 0.04}) {
    CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, c);
    Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, h);
    CellWorkspace ws(field, mesh);
    CorrectorField w = solve_corrector_hs(ws, Vec2::UnitX());
    EquivalenceReport rep = equivalence_check(ws, w, c * Mat2::Identity());
    CHECK(rep.relative_l2() < 0.5 * h);
    CHECK(rep.relative_l2() < prev);
    prev = rep.relative_l2();
  }
}

TEST_CASE("hessian route: homogeneous cell") {
  double c = 1.8;
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, c);
  Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, 0.12);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  HomogenizedTensor m = homogenized_from_hessian(forms);
  CHECK((m.entries - c * Mat2::Identity()).norm() < 1e-8);
}

TEST_CASE("hessian route equals the cell integral on the same mesh") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.08);
  CellWorkspace ws(field, mesh);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  HomogenizedTensor ci = homogenized_cell_integral(ws);
  HomogenizedTensor eh = homogenized_from_hessian(forms);
  CHECK((ci.entries - eh.entries).norm() / ci.entries.norm() < 1e-5);
}

TEST_CASE("laminate hessian gives the harmonic/arithmetic means") {
  LaminateCell geom{0.5, 0};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.1);
  CellSpace space = make_cell_space(mesh, CellRegime::PeriodicConstantTrace, 0);
  AssembledForms forms = assemble(field, mesh, space);
  HomogenizedTensor m = homogenized_from_hessian(forms);
  CHECK(m.entries(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-3));
  CHECK(m.entries(1, 1) == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(std::abs(m.entries(0, 1)) < 1e-6 * m.entries.norm());
}

TEST_CASE("eigvec derivative: homogeneous cell, both sides vanish") {
  double c = 1.5;
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, c);
  Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, 0.12);
  CellWorkspace ws(field, mesh);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  EigvecDerivativeReport rep =
      eigvec_first_derivative_check(forms, ws, 0, {0.02}, 1e-13);
  CHECK(rep.l2_error[0] < 1e-6);
  CHECK(rep.real_part_norm[0] < 1e-9);
}

TEST_CASE("eigvec derivative: t^2 decay on the two-phase disk") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.08);
  CellWorkspace ws(field, mesh);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  EigvecDerivativeReport rep =
      eigvec_first_derivative_check(forms, ws, 0, {0.04, 0.02}, 1e-13);
  double ratio = rep.l2_error[0] / rep.l2_error[1];
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
  CHECK(rep.real_part_norm[0] < 1e-8);
}

TEST_CASE("periodic cell: homogeneous coefficient returns c I, chi = 0") {
  double c = 1.4;
  PeriodicSquare geom;
  CoefficientField field = CoefficientField::constant(geom, c);
  Mesh mesh = generate_cell_mesh(geom, 0.1);
  CorrectorField chi = solve_corrector_periodic(field, mesh, 0);
  CHECK(chi.values.cwiseAbs().maxCoeff() < 1e-11);
  HomogenizedTensor m = periodic_homogenized(field, mesh);
  CHECK((m.entries - c * Mat2::Identity()).norm() < 1e-10);
  CHECK(m.provenance == TensorProvenance::PeriodicCell);
}

TEST_CASE("periodic laminate strip: diag(harmonic, arithmetic)") {
  PeriodicSquare geom;
  geom.inclusion = PeriodicSquare::Inclusion::Strip;
  geom.theta = 0.5;
  geom.axis = 0;
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.05);
  HomogenizedTensor m = periodic_homogenized(field, mesh);
  CHECK(m.entries(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(m.entries(1, 1) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(std::abs(m.entries(0, 1)) < 1e-10);
}

TEST_CASE("periodic route agrees with the periodic hessian route") {
  PeriodicSquare geom;
  geom.inclusion = PeriodicSquare::Inclusion::Strip;
  geom.theta = 0.5;
  geom.axis = 0;
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.08);
  HomogenizedTensor cell = periodic_homogenized(field, mesh);
  CellSpace space = make_cell_space(mesh, CellRegime::Periodic);
  AssembledForms forms = assemble(field, mesh, space);
  HomogenizedTensor hess = homogenized_from_hessian(forms);
  CHECK((cell.entries - hess.entries).norm() / cell.entries.norm() < 0.005);
}

TEST_SUITE_END();
