#pragma once

#include "bhs/spectra.hpp"

namespace bhs {

enum class TensorProvenance { CellIntegral, EigHessian, Analytic, PeriodicCell };

struct HomogenizedTensor {
  Mat2 entries = Mat2::Identity();
  TensorProvenance provenance = TensorProvenance::Analytic;
};

// Cell corrector: w_lambda with Dirichlet data lambda . y (constant-trace
// regime) or chi_k with zero mean (periodic regime). Values live on the full
// vertex basis.
struct CorrectorField {
  Vec2 direction = Vec2::UnitX();
  Eigen::VectorXd values;
};

// Shared state for the corrector-based operations on one cell: full-basis
// forms and the factorized interior stiffness, with the two coordinate
// correctors cached.
class CellWorkspace {
 public:
  CellWorkspace(const CoefficientField& field, const Mesh& mesh);

  const CoefficientField& field() const { return field_; }
  const Mesh& mesh() const { return mesh_; }
  const FullForms& full_forms() const { return full_; }
  const DirichletSolver& dirichlet() const { return dirichlet_; }
  double area() const { return full_.area; }

  const CorrectorField& coordinate_corrector(int k);

 private:
  const CoefficientField& field_;
  const Mesh& mesh_;
  FullForms full_;
  DirichletSolver dirichlet_;
  std::array<std::optional<CorrectorField>, 2> cached_;
};

// Discrete solution of -div(A grad w) = 0 with w = lambda . y on the boundary.
CorrectorField solve_corrector_hs(CellWorkspace& ws, const Vec2& lambda);

// Eq-style cell integral in both algebraic forms; they must agree to
// assembly roundoff on the same discrete solution.
HomogenizedTensor homogenized_cell_integral(CellWorkspace& ws);

// (1/|omega|) int A grad w_lambda . grad w_lambda  (energy identity check).
double corrector_energy(CellWorkspace& ws, const Vec2& lambda);

// Overdetermination test: conormal flux of the Dirichlet corrector against
// M lambda . nu on the boundary. Report-only.
struct EquivalenceReport {
  double flux_l2_error = 0.0;
  double flux_max_error = 0.0;
  double target_l2 = 0.0;
  double relative_l2() const { return flux_l2_error / target_l2; }
};
EquivalenceReport equivalence_check(CellWorkspace& ws,
                                    const CorrectorField& corrector,
                                    const Mat2& m_candidate);

// m_kl = 1/2 Hessian of lambda1 at eta = 0; off-diagonals by polarization
// along (e_k + e_l)/sqrt(2).
HomogenizedTensor homogenized_from_hessian(
    const AssembledForms& forms,
    const std::vector<double>& steps = default_fd_steps(), double tol = 1e-12);

// Central finite differences of the boundary-normalized ground state against
// i |omega|^{-1/2} (w_{e_k} - y_k), per step size.
struct EigvecDerivativeReport {
  int direction = 0;
  std::vector<double> steps;
  std::vector<double> l2_error;        // relative to the target L2 norm
  std::vector<double> real_part_norm;  // relative, should vanish
};
EigvecDerivativeReport eigvec_first_derivative_check(
    const AssembledForms& forms, CellWorkspace& ws, int direction,
    const std::vector<double>& steps, double tol = 1e-12);

// Periodic cell problems and the periodic homogenized tensor.
HomogenizedTensor periodic_homogenized(const CoefficientField& field,
                                       const Mesh& mesh);

// Periodic corrector chi_k (zero-mean gauge), full vertex values.
CorrectorField solve_corrector_periodic(const CoefficientField& field,
                                        const Mesh& mesh, int k);

}  // namespace bhs
