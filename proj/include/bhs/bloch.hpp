#pragma once

#include <map>

#include "bhs/covering.hpp"
#include "bhs/homog.hpp"

namespace bhs {

// Compactly supported scalar function on the macroscopic domain, with the
// norms and a resolution hint the oscillatory quadrature needs.
struct ScalarField {
  std::function<double(const Vec2&)> f;
  Rect support;
  double wavenumber = 0.0;
  double l2_norm = 0.0;
  double l1_norm = 0.0;
};

// C^infty bump: amplitude * exp(1 - 1/(1 - |x-c|^2/r^2)) inside |x-c| < r.
ScalarField make_smooth_bump(const Vec2& center, double radius, double amplitude);

// Quadrature on the reference disk: composite 4-point Gauss panels in the
// squared radius and in angle, split at the given discontinuity loci.
struct CellRule {
  std::vector<Vec2> points;
  std::vector<double> weights;  // sum to pi
};
CellRule disk_cell_rule(const std::vector<double>& radial_splits,
                        const std::vector<double>& angular_splits, int n_radial,
                        int n_angular);

enum class BlochMode { Exact, Taylor1 };

struct BlochOptions {
  double cell_mesh_h = 0.06;
  int eta_grid_n = 9;           // per-axis nodes of the eta cache
  double eta_cache_max = 0.85;  // transform dual-cell radius; >= kappa * max|xi|
  double points_per_wavelength = 8.0;
  int min_radial = 6;
  int min_angular = 16;
  double solver_tol = 1e-11;
};

struct BlochTransformResult {
  std::vector<Vec2> xi;
  std::vector<Complex> values;
  bool taylor_mode = false;
};

// First Bloch transform over one covering. The ground state phi_1(.; eta) is
// solved on a 2D eta grid once and interpolated (exact mode), or replaced by
// its first-order expansion through the correctors (taylor1 mode).
class BlochEngine {
 public:
  BlochEngine(const MicroField& field, BlochOptions opt = {});

  BlochTransformResult transform(const ScalarField& g,
                                 const std::vector<Vec2>& xi,
                                 BlochMode mode) const;

  // |omega|^{-1/2} int g e^{-i x.xi} dx with the same discrete normalization.
  std::vector<Complex> reference(const ScalarField& g,
                                 const std::vector<Vec2>& xi) const;

  // int_{kappa^{-1} omega'} |B g|^2 dxi / ||g||^2 over the scaled dual cell
  // [-eta_max/kappa, eta_max/kappa]^2.
  double bessel_constant(const ScalarField& g,
                         double eta_max = kDefaultEtaMax,
                         int per_axis = 21) const;

  double admissible_xi_radius() const;
  double discrete_cell_area() const { return cell_area_h_; }
  const MicroField& field() const { return field_; }

 private:
  struct RuleData {
    CellRule rule;
    std::vector<P1Evaluator::Location> locations;
  };
  const RuleData& rule_for(double eps, double xi_max, double wavenumber) const;
  Complex phi_conj_exact(const RuleData& rd, size_t q, const Vec2& eta) const;

  const MicroField& field_;
  BlochOptions opt_;
  Mesh cell_mesh_;
  std::unique_ptr<CellWorkspace> workspace_;
  std::unique_ptr<P1Evaluator> evaluator_;
  std::vector<double> z_corrector_[2];  // w_k - y_k nodal values
  std::vector<Eigen::VectorXcd> eta_cache_;
  double cell_area_h_ = 0.0;
  mutable std::map<std::pair<int, int>, RuleData> rules_;
};

// Standalone reference transform (the Fourier limit object):
// F g(xi) = |omega|^{-1/2} int g e^{-i x.xi} dx.
std::vector<Complex> reference_transform(const ScalarField& g,
                                         const std::vector<Vec2>& xi,
                                         double cell_area = M_PI);

// Per-level error table of the Fourier-limit check.
struct FourierLimitRow {
  double kappa = 0.0;
  double residual_fraction = 0.0;
  double max_error = 0.0;         // max over the xi grid of |B g - F g|
  double bound_ratio = 0.0;       // max_error / (kappa * max|xi| * ||g||)
};
std::vector<FourierLimitRow> fourier_limit_check(
    const ScalarField& g, const std::vector<const MicroField*>& levels,
    const std::vector<Vec2>& xi, const BlochOptions& opt = {});

// Scalar function on the reference disk cell for the weak-average check.
struct CellFunction {
  std::function<double(const Vec2&)> f;
  std::vector<double> radial_splits;
  std::vector<double> angular_splits;
  double mean = 0.0;      // M_omega(f)
  double abs_mean = 0.0;  // M_omega(|f|)
};

// |int f_n phi - M_omega(f) int phi| per test function, residual region
// carrying the mean value.
std::vector<double> weak_average_errors(
    const CellFunction& f, const VitaliCovering& covering,
    const std::vector<std::function<double(const Vec2&)>>& tests,
    int n_radial = 24, int n_angular = 48);

}  // namespace bhs
