#pragma once

#include "bhs/covering.hpp"
#include "bhs/homog.hpp"

namespace bhs {

using CoefficientFn = std::function<Mat2(const Vec2&)>;
using SourceFn = std::function<double(const Vec2&)>;

// P1 Galerkin solution with homogeneous Dirichlet data on the domain
// boundary; the coefficient is sampled at the 3 edge midpoints per element.
struct MacroSolve {
  Eigen::VectorXd u;  // full vertex values, zero trace
  double galerkin_residual = 0.0;
  int iterations = 0;
};

MacroSolve solve_macro(const CoefficientFn& coefficient, const SourceFn& f,
                       const Mesh& mesh, double tol = 1e-11);

// Heterogeneous problem A^n u^n = f; refuses meshes with h > eps_min/4.
MacroSolve solve_heterogeneous(const MicroField& field, const SourceFn& f,
                               const Mesh& mesh, double tol = 1e-11);

MacroSolve solve_homogenized(const Mat2& m_tensor, const SourceFn& f,
                             const Mesh& mesh, double tol = 1e-11);

// || u - v ||_L2 / || v ||_L2 (element-exact P1 integration).
double l2_relative_error(const Mesh& mesh, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& v);

double l2_norm(const Mesh& mesh, const Eigen::VectorXd& u);

// int A grad u . grad u with the sampled coefficient.
double dns_energy(const Mesh& mesh, const CoefficientFn& coefficient,
                  const Eigen::VectorXd& u);

double dns_load_product(const Mesh& mesh, const SourceFn& f,
                        const Eigen::VectorXd& u);

// The fixed family of 6 smooth test vector fields for the weak flux error.
std::vector<std::function<Vec2(const Vec2&)>> dns_flux_test_fields();

// max_j | int (sigma^n - M grad u) . psi_j | / ||psi_j||_L2  and the maximal
// pointwise gap (the strong-convergence negative control).
struct FluxGap {
  double weak_error = 0.0;
  double max_pointwise = 0.0;
};
FluxGap flux_weak_gap(const Mesh& mesh, const CoefficientFn& hetero,
                      const Eigen::VectorXd& u_hetero, const Mat2& m_tensor,
                      const Eigen::VectorXd& u_homog);

struct DnsLevel {
  double kappa = 0.0;
  double residual_fraction = 0.0;
  double l2_error = 0.0;
  double flux_weak_error = 0.0;
  double max_pointwise_flux_gap = 0.0;
  double h1_seminorm = 0.0;  // |u^n|_H1, for the coercivity bound
  int dofs = 0;
  double seconds = 0.0;
};

// Per covering level: relative L2 distance of u^n to the homogenized u and
// the weak flux error, both on the same macro mesh.
std::vector<DnsLevel> convergence_study(const CoefficientField& cell_field,
                                        const Mat2& background,
                                        const std::vector<VitaliCovering>& levels,
                                        const SourceFn& f, const Mesh& mesh,
                                        double tol = 1e-11);

}  // namespace bhs
