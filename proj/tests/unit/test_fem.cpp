#include <doctest.h>

#include <random>

#include "bhs/fem.hpp"

using namespace bhs;

namespace {

// Degree-5 (7-point) triangle quadrature, used as an independent assembly
// oracle for piecewise-constant coefficients.
void quadrature_assembly(const CoefficientField& field, const Mesh& mesh,
                         SpMat& k_out, SpMat& m_out) {
  const double w0 = 9.0 / 40.0;
  const double a1 = (6.0 + std::sqrt(15.0)) / 21.0;
  const double w1 = (155.0 + std::sqrt(15.0)) / 1200.0;
  const double a2 = (6.0 - std::sqrt(15.0)) / 21.0;
  const double w2 = (155.0 - std::sqrt(15.0)) / 1200.0;
  std::vector<std::array<double, 4>> rule = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w0}, {a1, a1, 1 - 2 * a1, w1},
      {a1, 1 - 2 * a1, a1, w1},              {1 - 2 * a1, a1, a1, w1},
      {a2, a2, 1 - 2 * a2, w2},              {a2, 1 - 2 * a2, a2, w2},
      {1 - 2 * a2, a2, a2, w2}};

  int n = mesh.num_vertices();
  std::vector<Eigen::Triplet<double>> kt, mt;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tri[0]];
    const Vec2& p1 = mesh.vertices[tri[1]];
    const Vec2& p2 = mesh.vertices[tri[2]];
    double area = mesh.triangle_area(t);
    auto perp = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
    std::array<Vec2, 3> grad = {perp(p2 - p1) / (2 * area),
                                perp(p0 - p2) / (2 * area),
                                perp(p1 - p0) / (2 * area)};
    const Mat2& A = field.phase[static_cast<size_t>(mesh.tri_region[t])];
    for (const auto& q : rule) {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          kt.emplace_back(tri[a], tri[b],
                          q[3] * area * (A * grad[b]).dot(grad[a]));
          mt.emplace_back(tri[a], tri[b], q[3] * area * q[a] * q[b]);
        }
    }
  }
  k_out.resize(n, n);
  k_out.setFromTriplets(kt.begin(), kt.end());
  m_out.resize(n, n);
  m_out.setFromTriplets(mt.begin(), mt.end());
}

double max_rel_entry_gap(const SpMat& a, const SpMat& b) {
  SpMat diff = a - b;
  double scale = 0.0, gap = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      gap = std::max(gap, std::abs(it.value()));
  return gap / scale;
}

}  // namespace

TEST_SUITE_BEGIN("fem");

TEST_CASE("constraint maps are idempotent") {
  Mesh disk = generate_cell_mesh(DiskInclusion{0.6}, 0.15);
  Mesh lam = generate_cell_mesh(LaminateCell{0.5, 0}, 0.2);
  PeriodicSquare ps;
  ps.inclusion = PeriodicSquare::Inclusion::Strip;
  Mesh per = generate_cell_mesh(ps, 0.1);
  std::vector<CellSpace> spaces = {
      make_cell_space(disk, CellRegime::ConstantTrace),
      make_cell_space(lam, CellRegime::PeriodicConstantTrace, 0),
      make_cell_space(per, CellRegime::Periodic)};
  for (const auto& s : spaces) {
    for (size_t v = 0; v < s.representative.size(); ++v) {
      int r = s.representative[v];
      CHECK(s.representative[static_cast<size_t>(r)] == r);
    }
    CHECK(s.n_reduced < static_cast<int>(s.representative.size()));
  }
  // constant-trace: one master for all boundary vertices
  CHECK(spaces[0].master >= 0);
  CHECK(spaces[1].master >= 0);
  CHECK(spaces[2].master == -1);
}

TEST_CASE("assembly matches a 7-point quadrature oracle") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.15);
  FullForms forms = assemble_full(field, mesh);
  SpMat k_ref, m_ref;
  quadrature_assembly(field, mesh, k_ref, m_ref);
  CHECK(max_rel_entry_gap(forms.stiffness, k_ref) < 1e-12);
  CHECK(max_rel_entry_gap(forms.mass, m_ref) < 1e-12);
}

TEST_CASE("constants span the stiffness kernel") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.1);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(space.n_reduced);
  double scale = forms.stiffness.coeffs().abs().maxCoeff();
  CHECK((forms.stiffness * ones).cwiseAbs().maxCoeff() < 1e-13 * scale);
}

TEST_CASE("constant field: weighted mass blocks reduce to c delta_kl M") {
  double c = 1.7;
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, c);
  Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, 0.2);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  CHECK(max_rel_entry_gap(forms.wmass(0, 0), SpMat(c * forms.mass)) < 1e-13);
  CHECK(max_rel_entry_gap(forms.wmass(1, 1), SpMat(c * forms.mass)) < 1e-13);
  CHECK(forms.wmass(0, 1).coeffs().abs().maxCoeff() < 1e-14);
}

TEST_CASE("shifted matrix: eta = 0, conjugation, hermiticity") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.15);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);

  SpCMat h0 = shifted_matrix(forms, Vec2::Zero());
  SpCMat zero_gap = SpCMat(h0 - forms.stiffness.cast<Complex>());
  CHECK(zero_gap.coeffs().abs().maxCoeff() == 0.0);

  Vec2 eta(0.3, -0.2);
  SpCMat h = shifted_matrix(forms, eta);
  SpCMat hm = shifted_matrix(forms, -eta);
  SpCMat herm_gap = SpCMat(h - SpCMat(h.adjoint()));
  CHECK(herm_gap.coeffs().abs().maxCoeff() < 1e-14);
  SpCMat conj_gap = SpCMat(hm - h.conjugate());
  CHECK(conj_gap.coeffs().abs().maxCoeff() < 1e-14);
}

TEST_CASE("shifted quadratic form is nonnegative for 100 random momenta") {
  DiskInclusion geom{0.7};
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, 0.14);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(space.n_reduced);
  for (int i = 0; i < space.n_reduced; ++i) v[i] = Complex(u(rng), u(rng));
  double v_mass = std::real(v.dot(forms.mass.cast<Complex>() * v));
  for (int trial = 0; trial < 100; ++trial) {
    Vec2 eta(u(rng), u(rng));
    SpCMat h = shifted_matrix(forms, eta);
    double quad = std::real(v.dot(h * v));
    CHECK(quad >= -1e-12 * v_mass);
  }
}

TEST_CASE("constant field: the constant is an exact eigenvector c|eta|^2") {
  double c = 2.3;
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, c);
  Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, 0.15);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  Vec2 eta(0.2, 0.1);
  SpCMat h = shifted_matrix(forms, eta);
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(space.n_reduced);
  Complex rayleigh = ones.dot(h * ones) /
                     ones.dot(forms.mass.cast<Complex>() * ones);
  CHECK(std::abs(rayleigh - c * eta.squaredNorm()) < 1e-12);
  // eigen-residual of the constant
  Eigen::VectorXcd res =
      h * ones - Complex(c * eta.squaredNorm(), 0.0) *
                     (forms.mass.cast<Complex>() * ones);
  CHECK(res.norm() < 1e-12 * ones.norm());
}

TEST_CASE("dirichlet solver reproduces affine solutions exactly") {
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, 1.0);
  Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, 0.15);
  FullForms forms = assemble_full(field, mesh);
  DirichletSolver solver(mesh, forms.stiffness);
  Eigen::VectorXd g(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    g[v] = 1.5 * mesh.vertices[v].x() - 0.5 * mesh.vertices[v].y();
  Eigen::VectorXd w =
      solver.solve(Eigen::VectorXd::Zero(mesh.num_vertices()), g);
  CHECK((w - g).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("consistent flux of an affine field converges at first order") {
  // The discrete conormal flux is a step function on the polygon while the
  // recovered field is continuous P1, so the L2 gap scales like h.
  double c = 1.4;
  CoefficientField field = CoefficientField::constant(DiskInclusion{0.5}, c);
  Vec2 a(0.7, -0.3);
  double prev = 1e300;
  for (double h : {0.1, 0.05, 0.025}) {
    Mesh mesh = generate_cell_mesh(DiskInclusion{0.5}, h);
    FullForms forms = assemble_full(field, mesh);
    Eigen::VectorXd u(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) u[v] = a.dot(mesh.vertices[v]);
    BoundaryFluxField flux = consistent_boundary_flux(
        mesh, forms.stiffness, u, Eigen::VectorXd::Zero(mesh.num_vertices()));
    FluxComparison cmp = compare_boundary_flux(
        mesh, flux, [&](const Vec2&, const Vec2& nu) { return c * a.dot(nu); });
    double rel = cmp.l2_error / cmp.target_l2;
    CHECK(rel < 0.5 * h);
    CHECK(rel < prev);
    prev = rel;
  }
}

TEST_SUITE_END();
