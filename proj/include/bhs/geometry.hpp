#pragma once

#include <array>
#include <variant>

#include "bhs/common.hpp"

namespace bhs {

// Ellipticity class M(alpha, beta): alpha |xi|^2 <= A xi . xi, |A xi| <= beta |xi|.
struct MaterialBounds {
  double alpha = 1.0;
  double beta = 1.0;
  MaterialBounds() = default;
  MaterialBounds(double a, double b);
};

// Reference cell geometries. All are 2D; the closed-form relations below are
// written for general N so a 3D extension only has to supply meshes.

// Unit disk B(0,1) with a concentric core of radius R (core/coating medium).
struct DiskInclusion {
  double core_radius = 0.5;
};

// S = [-1,1]^2 with a slab |y . e_axis| <= half_width filled with the core
// phase. `axis` is 0-based internally (the CLI uses 1-based).
struct LaminateCell {
  double half_width = 0.5;
  int axis = 0;
};

// Cell bounded by the confocal ellipse rho = rho2 of the family
// sum_j y_j^2 / (rho + m_j) = 1; the core is rho <= rho1.
struct ConfocalEllipse {
  double rho1 = 0.5;
  double rho2 = 1.0;
  std::array<double, 2> offsets{0.0, 0.0};  // m_1, m_2
};

// Unit square Y = [0,1]^2 with 0/1-periodic structure. The inclusion is
// either absent (single phase), a strip of volume fraction theta normal to
// `axis`, or a centered disk of radius R.
struct PeriodicSquare {
  enum class Inclusion { None, Strip, Disk };
  Inclusion inclusion = Inclusion::None;
  double theta = 0.5;   // strip volume fraction
  double radius = 0.3;  // disk radius, must be < 1/2
  int axis = 0;
};

using CellGeometry =
    std::variant<DiskInclusion, LaminateCell, ConfocalEllipse, PeriodicSquare>;

// Region ids used by two-phase fields.
inline constexpr int kCoreRegion = 0;
inline constexpr int kCoatingRegion = 1;

// Piecewise-constant matrix-valued coefficient A(y) on a reference cell.
// Both phases are symmetric positive definite; for the two-phase media of
// interest they are alpha*I (core) and beta*I (coating).
struct CoefficientField {
  CellGeometry geometry;
  std::array<Mat2, 2> phase;  // indexed by region id
  MaterialBounds bounds;

  static CoefficientField two_phase(const CellGeometry& geom, double alpha,
                                    double beta);
  static CoefficientField constant(const CellGeometry& geom, double value);
};

// Closure of the reference cell for a geometry; used for domain checks.
bool cell_contains(const CellGeometry& geom, const Vec2& y, double slack = 1e-12);

// Phase membership (core-wins on the interface: the core region is closed).
int region_of(const CellGeometry& geom, const Vec2& y);

// A(y); throws DomainError if y is outside the cell closure.
Mat2 evaluate_coefficient(const CoefficientField& field, const Vec2& y);

// Exact area of the reference cell (continuum, not mesh).
double cell_area(const CellGeometry& geom);

// Core volume fraction theta of the two-phase cell.
double cell_volume_fraction(const CellGeometry& geom);

// Effective conductivity gamma of the core/coating sphere:
//   (gamma - beta) / (gamma + (N-1) beta) = theta (alpha - beta) / (alpha + (N-1) beta).
double hs_spherical_gamma(double alpha, double beta, double theta, int dim);

// Harmonic and arithmetic means of (alpha, beta) with core proportion theta.
struct LaminateMeans {
  double harmonic;
  double arithmetic;
};
LaminateMeans laminate_means(double alpha, double beta, double theta);

// Residual of the confocal-ellipsoid sum relation
//   sum_j 1/(beta - gamma_jj) - ((1-theta) alpha + (N+theta-1) beta) / (theta beta (beta-alpha)).
double hs_elliptical_residual(const std::vector<double>& gamma_diag, double alpha,
                              double beta, double theta, int dim);

// Implicit confocal coordinate: the rho with sum_j y_j^2/(rho + m_j) = 1,
// solved by safeguarded Newton. Requires y != 0 region of validity.
double confocal_rho(const std::array<double, 2>& offsets, const Vec2& y);

}  // namespace bhs
