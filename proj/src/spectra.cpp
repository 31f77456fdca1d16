#include "bhs/spectra.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>

namespace bhs {

namespace {

double matrix_scale(const AssembledForms& forms) {
  // trace K / dofs; also the normalization for the lambda1(0) = 0 check.
  double tr = 0.0;
  for (int k = 0; k < forms.stiffness.outerSize(); ++k)
    for (SpMat::InnerIterator it(forms.stiffness, k); it; ++it)
      if (it.row() == it.col()) tr += it.value();
  return tr / std::max(1, static_cast<int>(forms.stiffness.rows()));
}

double inf_norm(const SpCMat& h) {
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(h.rows());
  for (int k = 0; k < h.outerSize(); ++k)
    for (SpCMat::InnerIterator it(h, k); it; ++it)
      rowsum[it.row()] += std::abs(it.value());
  return rowsum.maxCoeff();
}

struct ShiftedFactorization {
  SpCMat h;
  SpCMat m;
  Eigen::SimplicialLDLT<SpCMat> ldlt;
  double h_norm = 0.0;

  ShiftedFactorization(const AssembledForms& forms, const Vec2& eta) {
    h = shifted_matrix(forms, eta);
    m = forms.mass.cast<Complex>();
    h_norm = inf_norm(h);
    double sigma = -1e-3 * matrix_scale(forms);
    SpCMat shifted = h - sigma * m;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("eigensolver: factorization of the shifted pencil failed");
  }

  double mass_norm(const Eigen::VectorXcd& x) const {
    return std::sqrt(std::real(x.dot(m * x)));
  }
};

void apply_gauge(const AssembledForms& forms, GroundState& gs) {
  if (forms.space.master >= 0) {
    Complex c = gs.phi[forms.space.master];
    double scale = gs.phi.cwiseAbs().maxCoeff();
    if (std::abs(c) < 1e-8 * scale)
      throw NormalizationError(
          "ground state: boundary master value degenerates (eta outside the "
          "normalization neighborhood)",
          std::abs(c));
    gs.phi *= std::pow(forms.cell_volume, -0.5) / c;
    gs.gauge = GroundState::Gauge::BoundaryTrace;
  } else {
    Complex mean = (forms.mass * gs.phi).sum();
    if (std::abs(mean) > 1e-12 * gs.phi.norm()) gs.phi *= std::abs(mean) / mean;
    gs.gauge = GroundState::Gauge::MassNormalized;
  }
}

}  // namespace

GroundState solve_ground_state(const AssembledForms& forms, const Vec2& eta,
                               double tol, int max_iterations) {
  if (!(tol > 0.0)) throw ArgumentError("solve_ground_state: tol must be positive");
  ShiftedFactorization fact(forms, eta);
  int n = forms.stiffness.rows();

  // The constant function is the exact ground state at eta = 0 and an
  // excellent start nearby.
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(n);
  x /= fact.mass_norm(x);

  GroundState gs;
  gs.eta = eta;
  double lambda = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXcd y = fact.ldlt.solve(fact.m * x);
    y /= fact.mass_norm(y);
    lambda = std::real(y.dot(fact.h * y));
    Eigen::VectorXcd res = fact.h * y - lambda * (fact.m * y);
    double rel = res.norm() / (fact.h_norm * y.norm());
    x = y;
    gs.iterations = it;
    gs.residual = rel;
    if (rel <= tol) break;
  }
  if (gs.residual > tol)
    throw NumericError("ground state iteration did not converge", gs.residual);
  gs.lambda1 = lambda;
  gs.phi = x;
  apply_gauge(forms, gs);
  return gs;
}

std::vector<EigenPair> solve_lowest_band(const AssembledForms& forms,
                                         const Vec2& eta, int m, double tol,
                                         int max_iterations) {
  if (m < 1) throw ArgumentError("solve_lowest_band: m must be >= 1");
  ShiftedFactorization fact(forms, eta);
  int n = forms.stiffness.rows();
  int p = std::min(n, m + 2);

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd x(n, p);
  x.col(0).setOnes();
  for (int c = 1; c < p; ++c)
    for (int r = 0; r < n; ++r) x(r, c) = Complex(gauss(rng), gauss(rng));

  auto orthonormalize = [&](Eigen::MatrixXcd& v) {
    for (int c = 0; c < v.cols(); ++c) {
      for (int rep = 0; rep < 2; ++rep)
        for (int b = 0; b < c; ++b) {
          Complex proj = v.col(b).dot(fact.m * v.col(c));
          v.col(c) -= proj * v.col(b);
        }
      v.col(c) /= fact.mass_norm(v.col(c));
    }
  };
  orthonormalize(x);

  std::vector<EigenPair> out(static_cast<size_t>(m));
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::MatrixXcd y(n, p);
    for (int c = 0; c < p; ++c) y.col(c) = fact.ldlt.solve(fact.m * x.col(c));
    orthonormalize(y);
    Eigen::MatrixXcd small = y.adjoint() * (fact.h * y);
    small = Complex(0.5, 0.0) * (small + small.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(small);
    x = y * es.eigenvectors();

    bool done = true;
    for (int j = 0; j < m; ++j) {
      double lam = es.eigenvalues()[j];
      Eigen::VectorXcd res = fact.h * x.col(j) - lam * (fact.m * x.col(j));
      double rel = res.norm() / (fact.h_norm * x.col(j).norm());
      out[static_cast<size_t>(j)].lambda = lam;
      out[static_cast<size_t>(j)].residual = rel;
      if (rel > tol) done = false;
    }
    if (done) {
      for (int j = 0; j < m; ++j) out[static_cast<size_t>(j)].phi = x.col(j);
      return out;
    }
  }
  throw NumericError("band iteration did not converge",
                     out.empty() ? 0.0 : out.back().residual);
}

SweepResult sweep_lambda1(const AssembledForms& forms,
                          const std::vector<Vec2>& grid, double tol,
                          double eta_max) {
  for (const auto& eta : grid)
    if (eta.norm() > eta_max + 1e-12)
      throw ArgumentError("sweep_lambda1: grid point outside eta_max");
  SweepResult result;
  result.rows.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    GroundState gs = solve_ground_state(forms, grid[static_cast<size_t>(i)], tol);
    result.rows[static_cast<size_t>(i)] = {gs.eta, gs.lambda1, gs.residual,
                                           gs.iterations};
  });
  for (size_t a = 0; a < result.rows.size(); ++a)
    for (size_t b = a + 1; b < result.rows.size(); ++b) {
      double d = (result.rows[a].eta - result.rows[b].eta).norm();
      if (d < 1e-14) continue;
      double q = std::abs(result.rows[a].lambda1 - result.rows[b].lambda1) / d;
      result.max_lipschitz_quotient = std::max(result.max_lipschitz_quotient, q);
    }
  return result;
}

std::vector<double> default_fd_steps() {
  return {0.02, 0.04, 0.06, 0.08, 0.10, 0.12};
}

FdLambdaDerivatives fd_derivatives_lambda1(const AssembledForms& forms,
                                           const Vec2& direction,
                                           const std::vector<double>& steps,
                                           double tol, double odd_tol,
                                           double eta_max) {
  if (steps.size() < 4)
    throw ArgumentError("fd_derivatives_lambda1: need at least 4 step sizes");
  Vec2 e = direction.normalized();
  for (double t : steps)
    if (!(t > 0.0) || t > eta_max)
      throw ArgumentError("fd_derivatives_lambda1: steps must lie in (0, eta_max]");

  int ns = static_cast<int>(steps.size());
  std::vector<double> lam_plus(steps.size()), lam_minus(steps.size());
  double lambda0 = 0.0;
  parallel_for(2 * ns + 1, [&](int i) {
    if (i == 2 * ns) {
      lambda0 = solve_ground_state(forms, Vec2::Zero(), tol).lambda1;
    } else {
      int s = i / 2;
      double t = steps[static_cast<size_t>(s)];
      Vec2 eta = (i % 2 == 0 ? t : -t) * e;
      double lam = solve_ground_state(forms, eta, tol).lambda1;
      (i % 2 == 0 ? lam_plus : lam_minus)[static_cast<size_t>(s)] = lam;
    }
  });

  FdLambdaDerivatives fd;
  fd.lambda0 = lambda0;
  double scale = matrix_scale(forms);
  for (size_t s = 0; s < steps.size(); ++s)
    fd.odd_residual =
        std::max(fd.odd_residual, 0.5 * std::abs(lam_plus[s] - lam_minus[s]));
  size_t smallest = 0;
  for (size_t s = 1; s < steps.size(); ++s)
    if (steps[s] < steps[smallest]) smallest = s;
  fd.gradient =
      (lam_plus[smallest] - lam_minus[smallest]) / (2.0 * steps[smallest]);

  if (std::abs(lambda0) > odd_tol * std::max(1.0, scale))
    throw NumericError("fd_derivatives_lambda1: lambda1(0) does not vanish",
                       std::abs(lambda0));
  if (fd.odd_residual > odd_tol * std::max(1.0, scale))
    throw NumericError("fd_derivatives_lambda1: odd residuals exceed tolerance",
                       fd.odd_residual);

  // Even part: lambda(t)/t^2 = q2 + q4 s + q6 s^2 + q8 s^3 in s = t^2,
  // least squares with the s axis normalized for conditioning.
  int ncoef = std::min(4, ns);
  double smax = 0.0;
  for (double t : steps) smax = std::max(smax, t * t);
  Eigen::MatrixXd vand(ns, ncoef);
  Eigen::VectorXd y(ns);
  for (int r = 0; r < ns; ++r) {
    double t = steps[static_cast<size_t>(r)];
    double s = t * t / smax;
    double even = 0.5 * (lam_plus[static_cast<size_t>(r)] +
                         lam_minus[static_cast<size_t>(r)]) -
                  lambda0;
    y[r] = even / (t * t);
    double p = 1.0;
    for (int c = 0; c < ncoef; ++c) {
      vand(r, c) = p;
      p *= s;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vand,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  fd.fit_condition =
      svd.singularValues()(0) / svd.singularValues()(svd.nonzeroSingularValues() - 1);
  if (fd.fit_condition > 1e10)
    throw NumericError("fd_derivatives_lambda1: ill-conditioned quartic fit",
                       fd.fit_condition);
  Eigen::VectorXd coef = svd.solve(y);
  fd.half_hessian = coef[0];
  fd.quartic = coef[1] / smax;
  return fd;
}

}  // namespace bhs
