#include "bhs/homog.hpp"

#include <cmath>

namespace bhs {

namespace {

constexpr double kFormAgreementTol = 1e-8;

struct ElementGrad {
  std::array<Vec2, 3> grad;
  double area;
  Mat2 A;
};

ElementGrad element_grad(const CoefficientField& field, const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2& p0 = mesh.vertices[tri[0]];
  const Vec2& p1 = mesh.vertices[tri[1]];
  const Vec2& p2 = mesh.vertices[tri[2]];
  double area2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                 (p1.y() - p0.y()) * (p2.x() - p0.x());
  auto perp = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
  ElementGrad eg;
  eg.area = 0.5 * area2;
  eg.grad[0] = perp(p2 - p1) / area2;
  eg.grad[1] = perp(p0 - p2) / area2;
  eg.grad[2] = perp(p1 - p0) / area2;
  eg.A = field.phase[static_cast<size_t>(mesh.tri_region[t])];
  return eg;
}

Vec2 p1_gradient(const ElementGrad& eg, const Mesh& mesh, int t,
                 const Eigen::VectorXd& values) {
  const auto& tri = mesh.triangles[t];
  Vec2 g = Vec2::Zero();
  for (int a = 0; a < 3; ++a) g += values[tri[a]] * eg.grad[a];
  return g;
}

}  // namespace

CellWorkspace::CellWorkspace(const CoefficientField& field, const Mesh& mesh)
    : field_(field),
      mesh_(mesh),
      full_(assemble_full(field, mesh)),
      dirichlet_(mesh, full_.stiffness) {}

const CorrectorField& CellWorkspace::coordinate_corrector(int k) {
  auto& slot = cached_[static_cast<size_t>(k)];
  if (!slot) slot = solve_corrector_hs(*this, k == 0 ? Vec2::UnitX() : Vec2::UnitY());
  return *slot;
}

CorrectorField solve_corrector_hs(CellWorkspace& ws, const Vec2& lambda) {
  const Mesh& mesh = ws.mesh();
  Eigen::VectorXd g(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    g[v] = lambda.dot(mesh.vertices[v]);
  CorrectorField corr;
  corr.direction = lambda;
  corr.values =
      ws.dirichlet().solve(Eigen::VectorXd::Zero(mesh.num_vertices()), g);
  return corr;
}

HomogenizedTensor homogenized_cell_integral(CellWorkspace& ws) {
  const Mesh& mesh = ws.mesh();
  const Eigen::VectorXd* w[2] = {&ws.coordinate_corrector(0).values,
                                 &ws.coordinate_corrector(1).values};
  Mat2 flux_form = Mat2::Zero();    // int A grad w_k . e_l
  Mat2 energy_form = Mat2::Zero();  // int A grad w_k . grad w_l
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGrad eg = element_grad(ws.field(), mesh, t);
    Vec2 gw[2] = {p1_gradient(eg, mesh, t, *w[0]), p1_gradient(eg, mesh, t, *w[1])};
    for (int k = 0; k < 2; ++k) {
      Vec2 flux = eg.A * gw[k];
      for (int l = 0; l < 2; ++l) {
        flux_form(k, l) += eg.area * flux[l];
        energy_form(k, l) += eg.area * flux.dot(gw[l]);
      }
    }
  }
  flux_form /= ws.area();
  energy_form /= ws.area();
  double gap = (flux_form - energy_form).norm() / std::max(1.0, flux_form.norm());
  if (gap > 10.0 * kFormAgreementTol)
    throw ConsistencyError(
        "homogenized_cell_integral: the two integral forms disagree beyond "
        "tolerance");
  HomogenizedTensor out;
  Mat2 avg = 0.5 * (flux_form + energy_form);
  out.entries = 0.5 * (avg + avg.transpose());
  out.provenance = TensorProvenance::CellIntegral;
  return out;
}

double corrector_energy(CellWorkspace& ws, const Vec2& lambda) {
  CorrectorField corr = solve_corrector_hs(ws, lambda);
  return corr.values.dot(ws.full_forms().stiffness * corr.values) / ws.area();
}

EquivalenceReport equivalence_check(CellWorkspace& ws,
                                    const CorrectorField& corrector,
                                    const Mat2& m_candidate) {
  BoundaryFluxField flux = consistent_boundary_flux(
      ws.mesh(), ws.full_forms().stiffness, corrector.values,
      Eigen::VectorXd::Zero(ws.mesh().num_vertices()));
  Vec2 m_lambda = m_candidate * corrector.direction;
  FluxComparison cmp = compare_boundary_flux(
      ws.mesh(), flux,
      [&](const Vec2&, const Vec2& nu) { return m_lambda.dot(nu); });
  EquivalenceReport rep;
  rep.flux_l2_error = cmp.l2_error;
  rep.flux_max_error = cmp.max_error;
  rep.target_l2 = cmp.target_l2;
  return rep;
}

HomogenizedTensor homogenized_from_hessian(const AssembledForms& forms,
                                           const std::vector<double>& steps,
                                           double tol) {
  FdLambdaDerivatives fd_x =
      fd_derivatives_lambda1(forms, Vec2::UnitX(), steps, tol);
  FdLambdaDerivatives fd_y =
      fd_derivatives_lambda1(forms, Vec2::UnitY(), steps, tol);
  FdLambdaDerivatives fd_d =
      fd_derivatives_lambda1(forms, Vec2(1.0, 1.0).normalized(), steps, tol);
  HomogenizedTensor out;
  double m00 = fd_x.half_hessian;
  double m11 = fd_y.half_hessian;
  double m01 = fd_d.half_hessian - 0.5 * (m00 + m11);
  out.entries << m00, m01, m01, m11;
  out.provenance = TensorProvenance::EigHessian;
  return out;
}

EigvecDerivativeReport eigvec_first_derivative_check(
    const AssembledForms& forms, CellWorkspace& ws, int direction,
    const std::vector<double>& steps, double tol) {
  if (forms.space.master < 0)
    throw ArgumentError(
        "eigvec_first_derivative_check requires a constant-trace regime");
  const Mesh& mesh = ws.mesh();
  const SpMat& mass = ws.full_forms().mass;
  auto mass_norm = [&](const Eigen::VectorXcd& v) {
    return std::sqrt(std::abs(v.dot(mass.cast<Complex>() * v)));
  };

  const CorrectorField& w = ws.coordinate_corrector(direction);
  Eigen::VectorXcd target(mesh.num_vertices());
  double amp = std::pow(ws.area(), -0.5);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    target[v] = Complex(0.0, amp * (w.values[v] - mesh.vertices[v][direction]));
  // For a homogeneous cell the target vanishes; fall back to the scale of
  // the ground state itself.
  double target_norm = std::max(mass_norm(target), amp * std::sqrt(ws.area()));

  EigvecDerivativeReport rep;
  rep.direction = direction;
  rep.steps = steps;
  rep.l2_error.resize(steps.size());
  rep.real_part_norm.resize(steps.size());
  Vec2 e = direction == 0 ? Vec2::UnitX() : Vec2::UnitY();
  for (size_t s = 0; s < steps.size(); ++s) {
    double t = steps[s];
    GroundState plus = solve_ground_state(forms, t * e, tol);
    GroundState minus = solve_ground_state(forms, -t * e, tol);
    Eigen::VectorXcd fd =
        (expand(forms.space, plus.phi) - expand(forms.space, minus.phi)) /
        (2.0 * t);
    rep.l2_error[s] = mass_norm(fd - target) / target_norm;
    Eigen::VectorXcd real_part = fd.real().cast<Complex>();
    rep.real_part_norm[s] = mass_norm(real_part) / target_norm;
  }
  return rep;
}

CorrectorField solve_corrector_periodic(const CoefficientField& field,
                                        const Mesh& mesh, int k) {
  CellSpace space = make_cell_space(mesh, CellRegime::Periodic);
  AssembledForms forms = assemble(field, mesh, space);
  int n = space.n_reduced;

  // rhs_i = -int (A e_k) . grad phi_i, accumulated in the constrained basis.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGrad eg = element_grad(field, mesh, t);
    Vec2 load = eg.A * (k == 0 ? Vec2::UnitX() : Vec2::UnitY());
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      rhs[space.reduced_index[tri[a]]] -= eg.area * load.dot(eg.grad[a]);
  }

  // K is singular with kernel = constants; pin dof 0, then fix the zero-mean
  // gauge afterwards.
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < forms.stiffness.outerSize(); ++c)
    for (SpMat::InnerIterator it(forms.stiffness, c); it; ++it)
      if (it.row() > 0 && it.col() > 0)
        trip.emplace_back(it.row() - 1, it.col() - 1, it.value());
  SpMat pinned(n - 1, n - 1);
  pinned.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> fact(pinned);
  if (fact.info() != Eigen::Success)
    throw NumericError("periodic corrector: factorization failed");
  Eigen::VectorXd sol = fact.solve(rhs.tail(n - 1));
  Eigen::VectorXd chi(n);
  chi[0] = 0.0;
  chi.tail(n - 1) = sol;
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  double vol = ones.dot(forms.mass * ones);
  chi.array() -= chi.dot(forms.mass * ones) / vol;

  CorrectorField corr;
  corr.direction = k == 0 ? Vec2::UnitX() : Vec2::UnitY();
  corr.values = expand(space, chi);
  return corr;
}

HomogenizedTensor periodic_homogenized(const CoefficientField& field,
                                       const Mesh& mesh) {
  CorrectorField chi[2] = {solve_corrector_periodic(field, mesh, 0),
                           solve_corrector_periodic(field, mesh, 1)};
  double area = mesh.total_area();
  Mat2 flux_form = Mat2::Zero();
  Mat2 energy_form = Mat2::Zero();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGrad eg = element_grad(field, mesh, t);
    Vec2 g[2];
    for (int k = 0; k < 2; ++k) {
      g[k] = p1_gradient(eg, mesh, t, chi[k].values);
      g[k][k] += 1.0;  // grad chi_k + e_k
    }
    for (int k = 0; k < 2; ++k) {
      Vec2 flux = eg.A * g[k];
      for (int l = 0; l < 2; ++l) {
        flux_form(k, l) += eg.area * flux[l];
        energy_form(k, l) += eg.area * flux.dot(g[l]);
      }
    }
  }
  flux_form /= area;
  energy_form /= area;
  double gap = (flux_form - energy_form).norm() / std::max(1.0, flux_form.norm());
  if (gap > 10.0 * kFormAgreementTol)
    throw ConsistencyError("periodic_homogenized: integral forms disagree");
  HomogenizedTensor out;
  Mat2 avg = 0.5 * (flux_form + energy_form);
  out.entries = 0.5 * (avg + avg.transpose());
  out.provenance = TensorProvenance::PeriodicCell;
  return out;
}

}  // namespace bhs
