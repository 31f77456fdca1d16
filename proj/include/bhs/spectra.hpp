#pragma once

#include "bhs/fem.hpp"

namespace bhs {

inline constexpr double kDefaultEtaMax = 0.5;

// Ground state of the pencil (K(eta), Mass) in the constrained basis.
// Gauge: in constant-trace regimes the eigenvector is rescaled so the
// boundary master value equals |omega|^{-1/2}; periodic regimes fall back to
// Mass normalization with a real positive mean.
struct GroundState {
  Vec2 eta = Vec2::Zero();
  double lambda1 = 0.0;
  Eigen::VectorXcd phi;
  double residual = 0.0;
  int iterations = 0;
  enum class Gauge { BoundaryTrace, MassNormalized } gauge = Gauge::MassNormalized;
};

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXcd phi;  // Mass-normalized
  double residual = 0.0;
};

GroundState solve_ground_state(const AssembledForms& forms, const Vec2& eta,
                               double tol = 1e-11, int max_iterations = 100);

// m smallest eigenpairs, Mass-orthonormal, sorted nondecreasing.
std::vector<EigenPair> solve_lowest_band(const AssembledForms& forms,
                                         const Vec2& eta, int m,
                                         double tol = 1e-10,
                                         int max_iterations = 200);

struct SweepRow {
  Vec2 eta;
  double lambda1 = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double max_lipschitz_quotient = 0.0;  // max |dlambda| / |deta| over grid pairs
};

SweepResult sweep_lambda1(const AssembledForms& forms,
                          const std::vector<Vec2>& grid, double tol = 1e-11,
                          double eta_max = kDefaultEtaMax);

// Fits lambda1(t e) = q2 t^2 + q4 t^4 (+ even nuisance terms) over +-t pairs.
// The constant and odd contributions are asserted small before the even fit
// constrains them to zero; `gradient` is the measured first-order term.
struct FdLambdaDerivatives {
  double gradient = 0.0;       // central difference at the smallest step
  double half_hessian = 0.0;   // q2
  double quartic = 0.0;        // q4
  double lambda0 = 0.0;
  double odd_residual = 0.0;   // max |lambda(t)-lambda(-t)|/2 over steps
  double fit_condition = 0.0;
};

std::vector<double> default_fd_steps();

FdLambdaDerivatives fd_derivatives_lambda1(const AssembledForms& forms,
                                           const Vec2& direction,
                                           const std::vector<double>& steps,
                                           double tol = 1e-12,
                                           double odd_tol = 1e-6,
                                           double eta_max = kDefaultEtaMax);

}  // namespace bhs
