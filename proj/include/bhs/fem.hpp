#pragma once

#include <Eigen/SparseCholesky>
#include <memory>

#include "bhs/mesh.hpp"

namespace bhs {

// Constraint regime of the trial/test space on the cell:
//  - ConstantTrace: H^1_c, all boundary dofs share one master (floating constant)
//  - Periodic: H^1_#, opposite-face dofs identified pairwise
//  - PeriodicConstantTrace(axis): H^1_{c,#}, one shared constant on the two
//    faces normal to `axis`, the remaining faces periodic
enum class CellRegime { ConstantTrace, Periodic, PeriodicConstantTrace };

struct CellSpace {
  CellRegime regime = CellRegime::ConstantTrace;
  int axis = 0;
  std::vector<int> representative;  // full vertex -> master full vertex
  std::vector<int> reduced_index;   // full vertex -> constrained dof
  int n_reduced = 0;
  int master = -1;  // constrained index of the shared trace dof (-1 if none)
};

CellSpace make_cell_space(const Mesh& mesh, CellRegime regime, int axis = 0);

// Real blocks of the shifted sesquilinear form, stored once so eta sweeps
// reuse a single assembly:
//   K(eta) = K + i eta_k (C_k^T - C_k) + eta_k eta_l W_kl
// with K_ij = int a_kl d_l phi_j d_k phi_i, C_k[i][j] = int (A grad phi_j)_k phi_i,
// W_kl[i][j] = int a_kl phi_i phi_j.
struct AssembledForms {
  CellSpace space;
  SpMat stiffness;
  std::array<SpMat, 2> coupling;        // C_0, C_1
  std::array<SpMat, 3> weighted_mass;   // W_00, W_01 (= W_10), W_11
  SpMat mass;
  double cell_volume = 0.0;

  const SpMat& wmass(int k, int l) const {
    return weighted_mass[static_cast<size_t>(k + l)];
  }
};

// Same blocks on the unconstrained vertex basis; used for Dirichlet solves
// and flux recovery.
struct FullForms {
  SpMat stiffness;
  std::array<SpMat, 2> coupling;
  std::array<SpMat, 3> weighted_mass;
  SpMat mass;
  double area = 0.0;
};

FullForms assemble_full(const CoefficientField& field, const Mesh& mesh);
AssembledForms assemble(const CoefficientField& field, const Mesh& mesh,
                        const CellSpace& space);

// Hermitian K(eta); exactly K at eta = 0.
SpCMat shifted_matrix(const AssembledForms& forms, const Vec2& eta);

// Constrained dofs <-> full vertex values.
Eigen::VectorXd expand(const CellSpace& space, const Eigen::VectorXd& reduced);
Eigen::VectorXcd expand(const CellSpace& space, const Eigen::VectorXcd& reduced);

// Interior solve with prescribed boundary values (boundary = marker != 0).
// The interior stiffness block is factorized once and reused per right-hand
// side / boundary datum.
class DirichletSolver {
 public:
  DirichletSolver(const Mesh& mesh, const SpMat& stiffness_full);

  // Solves K w = rhs on interior rows with w = g on boundary vertices.
  // `boundary_values` and `rhs` are full-length (boundary rhs rows ignored).
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs,
                        const Eigen::VectorXd& boundary_values) const;

  int num_interior() const { return static_cast<int>(interior_.size()); }

 private:
  const SpMat& stiffness_;
  std::vector<int> interior_;
  std::vector<int> interior_of_;  // full -> interior index or -1
  Eigen::SimplicialLDLT<SpMat> factorization_;
};

// Conormal flux on the boundary loop recovered from the discrete residual
// (consistent flux), returned as a P1 function on the boundary polyline.
struct BoundaryFluxField {
  std::vector<int> loop;     // CCW boundary vertices
  Eigen::VectorXd values;    // flux value per loop vertex
};

BoundaryFluxField consistent_boundary_flux(const Mesh& mesh, const SpMat& stiffness_full,
                                           const Eigen::VectorXd& solution,
                                           const Eigen::VectorXd& rhs_full);

// L2(boundary) and max-pointwise distance between a recovered flux and a
// target evaluated at edge quadrature points (target sees the edge midpoint
// and the outward edge normal).
struct FluxComparison {
  double l2_error = 0.0;
  double max_error = 0.0;
  double target_l2 = 0.0;
};
FluxComparison compare_boundary_flux(
    const Mesh& mesh, const BoundaryFluxField& flux,
    const std::function<double(const Vec2&, const Vec2&)>& target);

}  // namespace bhs
