#pragma once

#include "bhs/geometry.hpp"

namespace bhs {

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Vec2& p) const {
    return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1;
  }
};

enum class CoveringKind { DiskPack, LaminateBands };

struct CoveringCell {
  Vec2 center = Vec2::Zero();
  double eps = 0.0;  // scale: the cell is eps * omega + center
};

// Finite Vitali covering of the domain by disjoint scaled copies of the
// reference cell. residual_fraction is defined by the measure bookkeeping
// sum_p eps_p^N |omega| + residual |Omega| = |Omega|.
struct VitaliCovering {
  Rect domain;
  CoveringKind kind = CoveringKind::DiskPack;
  int axis = 0;  // laminate band direction
  std::vector<CoveringCell> cells;
  double reference_cell_area = M_PI;
  double kappa = 0.0;
  double residual_fraction = 1.0;
  std::uint64_t seed = 0;
  bool target_missed = false;

  double covered_area() const {
    double a = 0.0;
    for (const auto& c : cells) a += c.eps * c.eps * reference_cell_area;
    return a;
  }
};

// Greedy packing: repeatedly place the largest admissible disk centered near
// the point of maximal distance to (covered union boundary) on a background
// grid. Radii are clamped by exact clearances, so disjointness is exact.
// Deterministic for a fixed seed; ties in the grid search break in
// lexicographic order.
VitaliCovering generate_disk_covering(const Rect& domain, double eps_max,
                                      double eps_min, double residual_target,
                                      std::uint64_t seed, int grid_n = 1024);

// Bands normal to `axis` tiling the domain width exactly (1D Vitali), each
// filled with eps_p-periodic square cells in the orthogonal direction;
// boundary-clipped translates are left to the background.
VitaliCovering generate_laminate_covering(const Rect& domain, int axis,
                                          const std::vector<double>& half_widths,
                                          std::uint64_t seed);

// Micro-structured coefficient A^n on the domain: rescaled cell evaluation
// inside covering cells, the equivalent background tensor on the residual.
class MicroField {
 public:
  MicroField(VitaliCovering covering, CoefficientField cell_field,
             Mat2 background);

  const VitaliCovering& covering() const { return covering_; }
  const CoefficientField& cell_field() const { return cell_field_; }
  const Mat2& background() const { return background_; }

  // Index of the covering cell containing x (-1 in the residual region).
  int find_cell(const Vec2& x) const;
  Mat2 evaluate(const Vec2& x) const;

 private:
  VitaliCovering covering_;
  CoefficientField cell_field_;
  Mat2 background_;
  // uniform-bin spatial index
  int nx_ = 0, ny_ = 0;
  double bin_ = 0.0;
  std::vector<std::vector<int>> bins_;
};

}  // namespace bhs
