#include "bhs/covering.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bhs {

namespace {

double boundary_distance(const Rect& r, const Vec2& p) {
  return std::min(std::min(p.x() - r.x0, r.x1 - p.x()),
                  std::min(p.y() - r.y0, r.y1 - p.y()));
}

}  // namespace

VitaliCovering generate_disk_covering(const Rect& domain, double eps_max,
                                      double eps_min, double residual_target,
                                      std::uint64_t seed, int grid_n) {
  if (!(eps_min > 0.0 && eps_min < eps_max))
    throw ArgumentError("generate_disk_covering: need 0 < eps_min < eps_max");
  if (!(residual_target > 0.0 && residual_target < 0.5))
    throw ArgumentError("generate_disk_covering: residual_target in (0, 0.5)");
  if (grid_n < 16) throw ArgumentError("generate_disk_covering: grid too coarse");

  VitaliCovering cov;
  cov.domain = domain;
  cov.kind = CoveringKind::DiskPack;
  cov.reference_cell_area = M_PI;
  cov.seed = seed;

  const int nx = grid_n, ny = grid_n;
  const double dx = domain.width() / nx;
  const double dy = domain.height() / ny;
  std::vector<double> dist(static_cast<size_t>(nx) * ny);
  auto grid_point = [&](int i, int j) {
    return Vec2(domain.x0 + (i + 0.5) * dx, domain.y0 + (j + 0.5) * dy);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      dist[static_cast<size_t>(j) * nx + i] =
          boundary_distance(domain, grid_point(i, j));

  // Coarse block maxima so the per-placement argmax does not rescan the
  // whole grid.
  const int block = 32;
  const int bnx = (nx + block - 1) / block;
  const int bny = (ny + block - 1) / block;
  std::vector<double> block_max(static_cast<size_t>(bnx) * bny, 0.0);
  auto recompute_block = [&](int bi, int bj) {
    double m = -1.0;
    for (int j = bj * block; j < std::min(ny, (bj + 1) * block); ++j)
      for (int i = bi * block; i < std::min(nx, (bi + 1) * block); ++i)
        m = std::max(m, dist[static_cast<size_t>(j) * nx + i]);
    block_max[static_cast<size_t>(bj) * bnx + bi] = m;
  };
  for (int bj = 0; bj < bny; ++bj)
    for (int bi = 0; bi < bnx; ++bi) recompute_block(bi, bj);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);

  // Spatial bins over placed disks so clearance queries stay local.
  const double bin = 2.0 * eps_max;
  const int bx = std::max(1, static_cast<int>(std::ceil(domain.width() / bin)));
  const int by = std::max(1, static_cast<int>(std::ceil(domain.height() / bin)));
  std::vector<std::vector<int>> bins(static_cast<size_t>(bx) * by);
  auto bin_range = [&](double lo, double hi, int count, double origin) {
    int i0 = std::clamp(static_cast<int>((lo - origin) / bin), 0, count - 1);
    int i1 = std::clamp(static_cast<int>((hi - origin) / bin), 0, count - 1);
    return std::make_pair(i0, i1);
  };
  auto register_cell = [&](int index) {
    const auto& c = cov.cells[static_cast<size_t>(index)];
    auto [i0, i1] = bin_range(c.center.x() - c.eps, c.center.x() + c.eps, bx,
                              domain.x0);
    auto [j0, j1] = bin_range(c.center.y() - c.eps, c.center.y() + c.eps, by,
                              domain.y0);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        bins[static_cast<size_t>(j) * bx + i].push_back(index);
  };
  auto exact_clearance = [&](const Vec2& p) {
    double c = boundary_distance(domain, p);
    auto [i0, i1] = bin_range(p.x() - c - eps_max, p.x() + c + eps_max, bx,
                              domain.x0);
    auto [j0, j1] = bin_range(p.y() - c - eps_max, p.y() + c + eps_max, by,
                              domain.y0);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        for (int idx : bins[static_cast<size_t>(j) * bx + i]) {
          const auto& cell = cov.cells[static_cast<size_t>(idx)];
          c = std::min(c, (p - cell.center).norm() - cell.eps);
        }
    return c;
  };

  // The grid only proposes a start; a compass search then recovers the local
  // medial point, which matters once disk radii approach the grid step.
  auto refine_center = [&](Vec2 p, double step) {
    double best = exact_clearance(p);
    for (int round = 0; round < 40 && step > 1e-4 * eps_min; ++round) {
      bool moved = false;
      for (const Vec2& dir :
           {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1), Vec2(1, 1),
            Vec2(1, -1), Vec2(-1, 1), Vec2(-1, -1)}) {
        Vec2 q = p + step * dir;
        double c = exact_clearance(q);
        if (c > best) {
          best = c;
          p = q;
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    return p;
  };

  double area = domain.area();
  double covered = 0.0;
  for (;;) {
    cov.residual_fraction = 1.0 - covered / area;
    if (cov.residual_fraction <= residual_target) break;

    // Argmax of the distance field; ties break in lexicographic (row, col)
    // order. The block maxima prune both passes.
    double dmax = -1.0;
    for (double bm : block_max) dmax = std::max(dmax, bm);
    int best_i = -1, best_j = -1;
    for (int j = 0; j < ny && best_i < 0; ++j) {
      int bj = j / block;
      for (int bi = 0; bi < bnx && best_i < 0; ++bi) {
        if (block_max[static_cast<size_t>(bj) * bnx + bi] < dmax) continue;
        for (int i = bi * block; i < std::min(nx, (bi + 1) * block); ++i) {
          if (dist[static_cast<size_t>(j) * nx + i] == dmax) {
            best_i = i;
            best_j = j;
            break;
          }
        }
      }
    }
    if (dmax < eps_min) {
      cov.target_missed = true;
      break;
    }

    Vec2 candidate = grid_point(best_i, best_j) +
                     Vec2(jitter(rng) * dx, jitter(rng) * dy);
    candidate = refine_center(candidate, std::max(dx, dy));
    double clearance = exact_clearance(candidate);
    if (clearance < eps_min) {
      candidate = grid_point(best_i, best_j);
      clearance = dmax;  // grid distances are exact minima over placed cells
    }
    double radius = std::min(eps_max, clearance) * (1.0 - 1e-12);
    cov.cells.push_back({candidate, radius});
    register_cell(static_cast<int>(cov.cells.size()) - 1);
    covered += M_PI * radius * radius;
    cov.kappa = std::max(cov.kappa, radius);

    // The distance field only needs updating where the new disk can lower
    // it: no point farther than radius + dmax from the center qualifies.
    double reach = radius + dmax;
    int i0 = std::max(0, static_cast<int>((candidate.x() - reach - domain.x0) / dx) - 1);
    int i1 = std::min(nx - 1, static_cast<int>((candidate.x() + reach - domain.x0) / dx) + 1);
    int j0 = std::max(0, static_cast<int>((candidate.y() - reach - domain.y0) / dy) - 1);
    int j1 = std::min(ny - 1, static_cast<int>((candidate.y() + reach - domain.y0) / dy) + 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        size_t idx = static_cast<size_t>(j) * nx + i;
        double d = (grid_point(i, j) - candidate).norm() - radius;
        if (d < dist[idx]) dist[idx] = d;
      }
    for (int bj = j0 / block; bj <= j1 / block; ++bj)
      for (int bi = i0 / block; bi <= i1 / block; ++bi) recompute_block(bi, bj);
  }
  cov.residual_fraction = 1.0 - covered / area;
  return cov;
}

VitaliCovering generate_laminate_covering(const Rect& domain, int axis,
                                          const std::vector<double>& half_widths,
                                          std::uint64_t seed) {
  if (axis != 0 && axis != 1)
    throw ArgumentError("generate_laminate_covering: axis must be 0 or 1");
  if (half_widths.empty())
    throw ArgumentError("generate_laminate_covering: no bands given");
  double along = axis == 0 ? domain.width() : domain.height();
  double perp = axis == 0 ? domain.height() : domain.width();
  double total = 0.0;
  for (double hw : half_widths) {
    if (!(hw > 0.0))
      throw ArgumentError("generate_laminate_covering: band widths must be positive");
    total += 2.0 * hw;
  }
  if (std::abs(total - along) > 1e-9 * along)
    throw ArgumentError(
        "generate_laminate_covering: band widths must tile the domain width");

  VitaliCovering cov;
  cov.domain = domain;
  cov.kind = CoveringKind::LaminateBands;
  cov.axis = axis;
  cov.reference_cell_area = 4.0;  // S = [-1,1]^2
  cov.seed = seed;

  double along0 = axis == 0 ? domain.x0 : domain.y0;
  double perp0 = axis == 0 ? domain.y0 : domain.x0;
  double offset = along0;
  for (double hw : half_widths) {
    double side = 2.0 * hw;
    int count = static_cast<int>(std::floor(perp / side + 1e-12));
    double center_along = offset + hw;
    for (int z = 0; z < count; ++z) {
      double center_perp = perp0 + (z + 0.5) * side;
      Vec2 c = axis == 0 ? Vec2(center_along, center_perp)
                         : Vec2(center_perp, center_along);
      cov.cells.push_back({c, hw});
    }
    cov.kappa = std::max(cov.kappa, hw);
    offset += side;
  }
  cov.residual_fraction = 1.0 - cov.covered_area() / domain.area();
  return cov;
}

MicroField::MicroField(VitaliCovering covering, CoefficientField cell_field,
                       Mat2 background)
    : covering_(std::move(covering)),
      cell_field_(std::move(cell_field)),
      background_(std::move(background)) {
  // Bin size follows the smallest cell: big cells simply span several bins,
  // and point queries then scan only a handful of candidates.
  double min_extent = std::numeric_limits<double>::infinity();
  for (const auto& c : covering_.cells) min_extent = std::min(min_extent, c.eps);
  double width = std::max(covering_.domain.width(), covering_.domain.height());
  if (covering_.cells.empty()) min_extent = width;
  bin_ = std::clamp(2.0 * min_extent, width / 2048.0, width / 8.0);
  nx_ = std::max(1, static_cast<int>(std::ceil(covering_.domain.width() / bin_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(covering_.domain.height() / bin_)));
  bins_.resize(static_cast<size_t>(nx_) * ny_);
  for (size_t p = 0; p < covering_.cells.size(); ++p) {
    const auto& c = covering_.cells[p];
    double extent = covering_.kind == CoveringKind::DiskPack
                        ? c.eps
                        : c.eps;  // laminate cells are axis-aligned squares
    int i0 = std::clamp(
        static_cast<int>((c.center.x() - extent - covering_.domain.x0) / bin_), 0,
        nx_ - 1);
    int i1 = std::clamp(
        static_cast<int>((c.center.x() + extent - covering_.domain.x0) / bin_), 0,
        nx_ - 1);
    int j0 = std::clamp(
        static_cast<int>((c.center.y() - extent - covering_.domain.y0) / bin_), 0,
        ny_ - 1);
    int j1 = std::clamp(
        static_cast<int>((c.center.y() + extent - covering_.domain.y0) / bin_), 0,
        ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        bins_[static_cast<size_t>(j) * nx_ + i].push_back(static_cast<int>(p));
  }
}

int MicroField::find_cell(const Vec2& x) const {
  if (!covering_.domain.contains(x)) return -1;
  int i = std::clamp(static_cast<int>((x.x() - covering_.domain.x0) / bin_), 0,
                     nx_ - 1);
  int j = std::clamp(static_cast<int>((x.y() - covering_.domain.y0) / bin_), 0,
                     ny_ - 1);
  for (int p : bins_[static_cast<size_t>(j) * nx_ + i]) {
    const auto& c = covering_.cells[static_cast<size_t>(p)];
    if (covering_.kind == CoveringKind::DiskPack) {
      if ((x - c.center).norm() <= c.eps) return p;
    } else {
      if (std::abs(x.x() - c.center.x()) <= c.eps &&
          std::abs(x.y() - c.center.y()) <= c.eps)
        return p;
    }
  }
  return -1;
}

Mat2 MicroField::evaluate(const Vec2& x) const {
  int p = find_cell(x);
  if (p < 0) return background_;
  const auto& c = covering_.cells[static_cast<size_t>(p)];
  Vec2 y = (x - c.center) / c.eps;
  return cell_field_.phase[static_cast<size_t>(region_of(cell_field_.geometry, y))];
}

}  // namespace bhs
