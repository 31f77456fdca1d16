#pragma once

#include "bhs/homog.hpp"

namespace bhs {

// Auxiliary state of the fourth-order (Burnett) form in a direction eta:
// X1 = eta_k (w_{e_k} - y_k), X2 the second-order cell solve, both vanishing
// on the cell boundary.
struct DispersionState {
  Vec2 eta = Vec2::UnitX();
  Eigen::VectorXd x1;             // full vertex values
  Eigen::VectorXd x2;
  double boundary_flux_residual = 0.0;  // reported, not imposed
};

// X1 reconstructed from the coordinate correctors (exact by construction).
Eigen::VectorXd build_x1(CellWorkspace& ws, const Vec2& eta);

// Solves -div(A grad X2) = (Atilde - Mtilde) - C_omega X1 in H^1_0, with the
// first-order operator applied in weak form (test functions vanish on the
// boundary, so the boundary term drops).
Eigen::VectorXd solve_x2(CellWorkspace& ws, const Vec2& eta,
                         const Eigen::VectorXd& x1, const Mat2& m_tensor);

// d(eta) = -(1/|omega|) E[X2 - (X1)^2/2] with E[v] = int A grad v . grad v.
// Homogeneous of degree 4 in eta and non-positive.
double burnett_quartic(CellWorkspace& ws, const Vec2& eta, const Mat2& m_tensor,
                       DispersionState* state = nullptr);

// Directional fan evaluation with the finite-difference quartic oracle.
struct DispersionFanRow {
  double angle = 0.0;
  double d_value = 0.0;
  double q4_oracle = 0.0;
  double relative_gap = 0.0;
};
std::vector<DispersionFanRow> dispersion_fan(CellWorkspace& ws,
                                             const AssembledForms& forms,
                                             const Mat2& m_tensor,
                                             int directions,
                                             const std::vector<double>& fd_steps =
                                                 default_fd_steps());

}  // namespace bhs
