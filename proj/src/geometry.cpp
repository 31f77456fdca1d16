#include "bhs/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace bhs {

MaterialBounds::MaterialBounds(double a, double b) : alpha(a), beta(b) {
  if (!(alpha > 0.0) || !(beta >= alpha))
    throw ArgumentError("MaterialBounds requires 0 < alpha <= beta");
}

CoefficientField CoefficientField::two_phase(const CellGeometry& geom,
                                             double alpha, double beta) {
  CoefficientField f;
  f.geometry = geom;
  f.bounds = MaterialBounds(std::min(alpha, beta), std::max(alpha, beta));
  f.phase[kCoreRegion] = alpha * Mat2::Identity();
  f.phase[kCoatingRegion] = beta * Mat2::Identity();
  return f;
}

CoefficientField CoefficientField::constant(const CellGeometry& geom,
                                            double value) {
  return two_phase(geom, value, value);
}

bool cell_contains(const CellGeometry& geom, const Vec2& y, double slack) {
  return std::visit(
      [&](const auto& g) -> bool {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DiskInclusion>) {
          return y.norm() <= 1.0 + slack;
        } else if constexpr (std::is_same_v<T, LaminateCell>) {
          return std::abs(y.x()) <= 1.0 + slack && std::abs(y.y()) <= 1.0 + slack;
        } else if constexpr (std::is_same_v<T, ConfocalEllipse>) {
          double s = y.x() * y.x() / (g.rho2 + g.offsets[0]) +
                     y.y() * y.y() / (g.rho2 + g.offsets[1]);
          return s <= 1.0 + slack;
        } else {
          return y.x() >= -slack && y.x() <= 1.0 + slack && y.y() >= -slack &&
                 y.y() <= 1.0 + slack;
        }
      },
      geom);
}

int region_of(const CellGeometry& geom, const Vec2& y) {
  return std::visit(
      [&](const auto& g) -> int {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DiskInclusion>) {
          return y.norm() <= g.core_radius ? kCoreRegion : kCoatingRegion;
        } else if constexpr (std::is_same_v<T, LaminateCell>) {
          return std::abs(y[g.axis]) <= g.half_width ? kCoreRegion
                                                     : kCoatingRegion;
        } else if constexpr (std::is_same_v<T, ConfocalEllipse>) {
          double s1 = y.x() * y.x() / (g.rho1 + g.offsets[0]) +
                      y.y() * y.y() / (g.rho1 + g.offsets[1]);
          return s1 <= 1.0 ? kCoreRegion : kCoatingRegion;
        } else {
          switch (g.inclusion) {
            case PeriodicSquare::Inclusion::None:
              return kCoatingRegion;
            case PeriodicSquare::Inclusion::Strip:
              return std::abs(y[g.axis] - 0.5) <= 0.5 * g.theta ? kCoreRegion
                                                                : kCoatingRegion;
            case PeriodicSquare::Inclusion::Disk:
              return (y - Vec2(0.5, 0.5)).norm() <= g.radius ? kCoreRegion
                                                             : kCoatingRegion;
          }
          return kCoatingRegion;
        }
      },
      geom);
}

Mat2 evaluate_coefficient(const CoefficientField& field, const Vec2& y) {
  if (!cell_contains(field.geometry, y))
    throw DomainError("evaluate_coefficient: point outside the cell closure");
  return field.phase[static_cast<size_t>(region_of(field.geometry, y))];
}

double cell_area(const CellGeometry& geom) {
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DiskInclusion>) {
          (void)g;
          return M_PI;
        } else if constexpr (std::is_same_v<T, LaminateCell>) {
          (void)g;
          return 4.0;
        } else if constexpr (std::is_same_v<T, ConfocalEllipse>) {
          return M_PI * std::sqrt((g.rho2 + g.offsets[0]) * (g.rho2 + g.offsets[1]));
        } else {
          (void)g;
          return 1.0;
        }
      },
      geom);
}

double cell_volume_fraction(const CellGeometry& geom) {
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DiskInclusion>) {
          return g.core_radius * g.core_radius;
        } else if constexpr (std::is_same_v<T, LaminateCell>) {
          return g.half_width;
        } else if constexpr (std::is_same_v<T, ConfocalEllipse>) {
          return std::sqrt((g.rho1 + g.offsets[0]) / (g.rho2 + g.offsets[0])) *
                 std::sqrt((g.rho1 + g.offsets[1]) / (g.rho2 + g.offsets[1]));
        } else {
          switch (g.inclusion) {
            case PeriodicSquare::Inclusion::None:
              return 0.0;
            case PeriodicSquare::Inclusion::Strip:
              return g.theta;
            case PeriodicSquare::Inclusion::Disk:
              return M_PI * g.radius * g.radius;
          }
          return 0.0;
        }
      },
      geom);
}

double hs_spherical_gamma(double alpha, double beta, double theta, int dim) {
  if (!(theta > 0.0 && theta < 1.0))
    throw ArgumentError("hs_spherical_gamma: theta must lie in (0,1)");
  if (!(alpha > 0.0 && beta > 0.0) || dim < 2)
    throw ArgumentError("hs_spherical_gamma: invalid alpha/beta/dim");
  double n1 = static_cast<double>(dim - 1);
  // (gamma - beta)/(gamma + n1*beta) = t  with  t = theta*(alpha-beta)/(alpha+n1*beta)
  double t = theta * (alpha - beta) / (alpha + n1 * beta);
  double gamma = beta * (1.0 + n1 * t) / (1.0 - t);
  return gamma;
}

LaminateMeans laminate_means(double alpha, double beta, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw ArgumentError("laminate_means: theta must lie in (0,1)");
  if (!(alpha > 0.0 && beta > 0.0))
    throw ArgumentError("laminate_means: alpha, beta must be positive");
  LaminateMeans m;
  m.harmonic = alpha * beta / (theta * beta + (1.0 - theta) * alpha);
  m.arithmetic = theta * alpha + (1.0 - theta) * beta;
  return m;
}

double hs_elliptical_residual(const std::vector<double>& gamma_diag,
                              double alpha, double beta, double theta,
                              int dim) {
  if (!(theta > 0.0 && theta < 1.0))
    throw ArgumentError("hs_elliptical_residual: theta must lie in (0,1)");
  if (alpha == beta)
    throw ArgumentError("hs_elliptical_residual: relation undefined for alpha == beta");
  if (static_cast<int>(gamma_diag.size()) != dim)
    throw ArgumentError("hs_elliptical_residual: gamma_diag size mismatch");
  double lhs = 0.0;
  for (double g : gamma_diag) {
    if (g == beta)
      throw ArgumentError("hs_elliptical_residual: gamma_jj == beta");
    lhs += 1.0 / (beta - g);
  }
  double rhs = ((1.0 - theta) * alpha + (dim + theta - 1.0) * beta) /
               (theta * beta * (beta - alpha));
  return lhs - rhs;
}

double confocal_rho(const std::array<double, 2>& offsets, const Vec2& y) {
  double mmin = std::min(offsets[0], offsets[1]);
  auto g = [&](double rho) {
    return y.x() * y.x() / (rho + offsets[0]) + y.y() * y.y() / (rho + offsets[1]) -
           1.0;
  };
  // g is strictly decreasing in rho; bracket [lo, hi] with g(lo) >= 0 >= g(hi).
  double hi = y.squaredNorm() - mmin;
  if (hi <= -mmin) return hi;  // y == 0 corner case: degenerate level
  double lo = -mmin + 1e-300;
  double step = std::max(1e-12, 1e-8 * (std::abs(hi) + 1.0));
  while (g(-mmin + step) < 0.0 && step > 1e-280) step *= 0.5;
  lo = -mmin + step;
  double rho = hi;
  for (int it = 0; it < 200; ++it) {
    double val = g(rho);
    if (std::abs(val) < 1e-14) break;
    if (val > 0.0)
      lo = rho;
    else
      hi = rho;
    double d = -(y.x() * y.x() / ((rho + offsets[0]) * (rho + offsets[0])) +
                 y.y() * y.y() / ((rho + offsets[1]) * (rho + offsets[1])));
    double next = rho - val / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - rho) < 1e-15 * (1.0 + std::abs(rho))) {
      rho = next;
      break;
    }
    rho = next;
  }
  return rho;
}

}  // namespace bhs
