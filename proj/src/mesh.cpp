#include "bhs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

namespace bhs {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (b.y() - a.y()) * (c.x() - a.x()));
}

int round_up_multiple(int n, int m) { return ((n + m - 1) / m) * m; }

// Subdivision of [a, b] into ceil((b-a)/h) uniform steps, endpoints exact.
std::vector<double> segment_ticks(double a, double b, double h) {
  int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-12)));
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = a + (b - a) * i / n;
  t.front() = a;
  t.back() = b;
  return t;
}

std::vector<double> concat_ticks(std::initializer_list<std::vector<double>> parts) {
  std::vector<double> out;
  for (const auto& p : parts) {
    for (double v : p) {
      if (out.empty() || v > out.back() + 1e-15) out.push_back(v);
    }
  }
  return out;
}

struct MeshBuilder {
  Mesh mesh;

  int add_vertex(const Vec2& p, int marker = kMarkerInterior) {
    mesh.vertices.push_back(p);
    mesh.vertex_marker.push_back(marker);
    return static_cast<int>(mesh.vertices.size()) - 1;
  }

  void add_triangle(int a, int b, int c) {
    if (signed_area(mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]) < 0.0)
      std::swap(b, c);
    mesh.triangles.push_back({a, b, c});
  }

  void assign_regions(const CellGeometry& geom) {
    mesh.tri_region.resize(mesh.triangles.size());
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tri = mesh.triangles[t];
      Vec2 c = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] +
                mesh.vertices[tri[2]]) /
               3.0;
      mesh.tri_region[t] = region_of(geom, c);
    }
  }
};

// Ring-structured mesh: concentric vertex rings with a common angular count
// and alternating quad diagonals. With n a multiple of 8 the triangulation is
// invariant under the dihedral symmetries of the rings, which the symmetry
// tests rely on.
void build_ring_mesh(MeshBuilder& b, const std::vector<std::vector<int>>& rings,
                     int center_vertex) {
  int n = static_cast<int>(rings.front().size());
  if (center_vertex >= 0) {
    const auto& first = rings.front();
    for (int k = 0; k < n; ++k)
      b.add_triangle(center_vertex, first[k], first[(k + 1) % n]);
  }
  for (size_t j = 0; j + 1 < rings.size(); ++j) {
    const auto& in = rings[j];
    const auto& out = rings[j + 1];
    for (int k = 0; k < n; ++k) {
      int k1 = (k + 1) % n;
      if (k % 2 == 0) {
        b.add_triangle(in[k], out[k1], in[k1]);
        b.add_triangle(in[k], out[k], out[k1]);
      } else {
        b.add_triangle(in[k], out[k], in[k1]);
        b.add_triangle(in[k1], out[k], out[k1]);
      }
    }
  }
}

Mesh disk_mesh(const DiskInclusion& g, double h) {
  if (!(g.core_radius > 0.0 && g.core_radius < 1.0))
    throw GeometryError("DiskInclusion: core radius must lie in (0,1)");
  if (h > 0.5 * std::min(g.core_radius, 1.0 - g.core_radius))
    throw GeometryError("disk mesh: h does not resolve the interface");
  MeshBuilder b;
  int n = round_up_multiple(static_cast<int>(std::ceil(2.0 * M_PI / h)), 8);
  auto radii = concat_ticks({segment_ticks(0.0, g.core_radius, h),
                             segment_ticks(g.core_radius, 1.0, h)});
  int center = b.add_vertex(Vec2::Zero());
  std::vector<std::vector<int>> rings;
  for (size_t j = 1; j < radii.size(); ++j) {
    bool outer = (j + 1 == radii.size());
    std::vector<int> ring(n);
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * M_PI * k / n;
      ring[k] = b.add_vertex(radii[j] * Vec2(std::cos(th), std::sin(th)),
                             outer ? kFaceXMin : kMarkerInterior);
    }
    rings.push_back(std::move(ring));
  }
  build_ring_mesh(b, rings, center);
  b.assign_regions(g);
  return std::move(b.mesh);
}

Mesh confocal_mesh(const ConfocalEllipse& g, double h) {
  double mmin = std::min(g.offsets[0], g.offsets[1]);
  if (!(g.rho2 + mmin > 0.0) || !(g.rho1 < g.rho2) || !(g.rho1 + mmin > 0.0))
    throw GeometryError("ConfocalEllipse: invalid rho1/rho2/offsets");
  auto point = [&](double rho, double th) {
    return Vec2(std::sqrt(rho + g.offsets[0]) * std::cos(th),
                std::sqrt(rho + g.offsets[1]) * std::sin(th));
  };
  // Radial levels uniform in sqrt(rho + mmin): bounds physical spacing on
  // both semi-axes.
  double rho_min = g.rho1 - 0.5 * (g.rho1 + mmin);
  auto s_of = [&](double rho) { return std::sqrt(rho + mmin); };
  auto rho_of = [&](double s) { return s * s - mmin; };
  auto level_run = [&](double r0, double r1) {
    auto s = segment_ticks(s_of(r0), s_of(r1), 0.9 * h);
    std::vector<double> out;
    for (double v : s) out.push_back(rho_of(v));
    out.front() = r0;
    out.back() = r1;
    return out;
  };
  auto levels = concat_ticks({level_run(rho_min, g.rho1), level_run(g.rho1, g.rho2)});
  double smax = std::sqrt(g.rho2 + std::max(g.offsets[0], g.offsets[1]));
  int n = round_up_multiple(static_cast<int>(std::ceil(2.0 * M_PI * smax / h)), 8);

  MeshBuilder b;
  int center = b.add_vertex(Vec2::Zero());
  std::vector<std::vector<int>> rings;
  // Core filled by shrunk copies of the rho_min ellipse (entirely inside the
  // core phase, so no conformity constraint there).
  double a0 = std::sqrt(rho_min + g.offsets[0]);
  double b0 = std::sqrt(rho_min + g.offsets[1]);
  int m0 = std::max(1, static_cast<int>(std::ceil(std::max(a0, b0) / h)));
  for (int j = 1; j <= m0; ++j) {
    double t = static_cast<double>(j) / m0;
    std::vector<int> ring(n);
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * M_PI * k / n;
      ring[k] = b.add_vertex(t * Vec2(a0 * std::cos(th), b0 * std::sin(th)));
    }
    rings.push_back(std::move(ring));
  }
  for (size_t j = 1; j < levels.size(); ++j) {
    bool outer = (j + 1 == levels.size());
    std::vector<int> ring(n);
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * M_PI * k / n;
      ring[k] = b.add_vertex(point(levels[j], th),
                             outer ? kFaceXMin : kMarkerInterior);
    }
    rings.push_back(std::move(ring));
  }
  build_ring_mesh(b, rings, center);
  b.assign_regions(g);
  return std::move(b.mesh);
}

int box_marker(double x, double y, double x0, double y0, double x1, double y1) {
  int m = 0;
  double tol = 1e-12 * (std::abs(x1 - x0) + std::abs(y1 - y0));
  if (std::abs(x - x0) <= tol) m |= kFaceXMin;
  if (std::abs(x - x1) <= tol) m |= kFaceXMax;
  if (std::abs(y - y0) <= tol) m |= kFaceYMin;
  if (std::abs(y - y1) <= tol) m |= kFaceYMax;
  return m;
}

Mesh laminate_mesh(const LaminateCell& g, double h) {
  if (!(g.half_width > 0.0 && g.half_width < 1.0))
    throw GeometryError("LaminateCell: half-width must lie in (0,1)");
  if (g.axis != 0 && g.axis != 1)
    throw GeometryError("LaminateCell: axis must be 0 or 1");
  double a = g.half_width;
  auto along = concat_ticks({segment_ticks(-1.0, -a, h), segment_ticks(-a, a, h),
                             segment_ticks(a, 1.0, h)});
  auto perp = segment_ticks(-1.0, 1.0, h);
  Mesh mesh = g.axis == 0 ? structured_box_mesh(along, perp)
                          : structured_box_mesh(perp, along);
  mesh.target_h = h;
  MeshBuilder b;
  b.mesh = std::move(mesh);
  b.assign_regions(g);
  return std::move(b.mesh);
}

Mesh periodic_square_mesh(const PeriodicSquare& g, double h) {
  if (g.inclusion == PeriodicSquare::Inclusion::Disk) {
    if (!(g.radius > 0.0 && g.radius < 0.5))
      throw GeometryError("PeriodicSquare: disk radius must lie in (0, 1/2)");
    if (h > 0.5 * std::min(g.radius, 0.5 - g.radius))
      throw GeometryError("periodic square mesh: h does not resolve the disk");
    // Polar core up to the interface, then rings blended from the circle to
    // the square boundary. Opposite boundary faces get mirror-matched
    // vertices because the angle set is symmetric.
    MeshBuilder b;
    Vec2 c(0.5, 0.5);
    int n = round_up_multiple(static_cast<int>(std::ceil(2.0 * M_PI / h)), 8);
    auto inner_radii = segment_ticks(0.0, g.radius, h);
    auto square_dist = [&](double th) {
      return 0.5 / std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
    };
    int blend = std::max(
        1, static_cast<int>(std::ceil((0.5 * std::sqrt(2.0) - g.radius) / h)));
    int center = b.add_vertex(c);
    std::vector<std::vector<int>> rings;
    for (size_t j = 1; j < inner_radii.size(); ++j) {
      std::vector<int> ring(n);
      for (int k = 0; k < n; ++k) {
        double th = 2.0 * M_PI * k / n;
        ring[k] =
            b.add_vertex(c + inner_radii[j] * Vec2(std::cos(th), std::sin(th)));
      }
      rings.push_back(std::move(ring));
    }
    for (int j = 1; j <= blend; ++j) {
      double t = static_cast<double>(j) / blend;
      std::vector<int> ring(n);
      for (int k = 0; k < n; ++k) {
        double th = 2.0 * M_PI * k / n;
        double r = (1.0 - t) * g.radius + t * square_dist(th);
        Vec2 p = c + r * Vec2(std::cos(th), std::sin(th));
        int marker = 0;
        if (j == blend) {
          p.x() = std::clamp(p.x(), 0.0, 1.0);
          p.y() = std::clamp(p.y(), 0.0, 1.0);
          marker = box_marker(p.x(), p.y(), 0.0, 0.0, 1.0, 1.0);
        }
        ring[k] = b.add_vertex(p, marker);
      }
      rings.push_back(std::move(ring));
    }
    build_ring_mesh(b, rings, center);
    b.assign_regions(g);
    b.mesh.target_h = h;
    return std::move(b.mesh);
  }
  std::vector<double> xt, yt;
  if (g.inclusion == PeriodicSquare::Inclusion::Strip) {
    double lo = 0.5 - 0.5 * g.theta, hi = 0.5 + 0.5 * g.theta;
    auto along = concat_ticks({segment_ticks(0.0, lo, h), segment_ticks(lo, hi, h),
                               segment_ticks(hi, 1.0, h)});
    auto perp = segment_ticks(0.0, 1.0, h);
    xt = g.axis == 0 ? along : perp;
    yt = g.axis == 0 ? perp : along;
  } else {
    xt = yt = segment_ticks(0.0, 1.0, h);
  }
  Mesh mesh = structured_box_mesh(xt, yt);
  mesh.target_h = h;
  MeshBuilder b;
  b.mesh = std::move(mesh);
  b.assign_regions(g);
  return std::move(b.mesh);
}

}  // namespace

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < num_triangles(); ++t) a += triangle_area(t);
  return a;
}

double Mesh::max_element_diameter() const {
  double d2 = 0.0;
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      Vec2 diff = vertices[tri[e]] - vertices[tri[(e + 1) % 3]];
      d2 = std::max(d2, diff.squaredNorm());
    }
  }
  return std::sqrt(d2);
}

std::vector<int> Mesh::boundary_loop() const {
  // Directed edges of positively oriented triangles; an edge on the boundary
  // has no reverse partner, and the loop is traversed counterclockwise.
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      count[{a, b}] += 1;
    }
  }
  std::map<int, int> next;
  for (const auto& [edge, c] : count) {
    (void)c;
    if (count.find({edge.second, edge.first}) == count.end())
      next[edge.first] = edge.second;
  }
  if (next.empty()) throw GeometryError("boundary_loop: mesh has no boundary");
  std::vector<int> loop;
  int start = next.begin()->first;
  int v = start;
  do {
    loop.push_back(v);
    auto it = next.find(v);
    if (it == next.end())
      throw GeometryError("boundary_loop: boundary is not a closed loop");
    v = it->second;
  } while (v != start && loop.size() <= next.size());
  if (loop.size() != next.size())
    throw GeometryError("boundary_loop: boundary has several components");
  return loop;
}

Mesh generate_cell_mesh(const CellGeometry& geom, double h) {
  if (!(h > 0.0)) throw ArgumentError("generate_cell_mesh: h must be positive");
  Mesh mesh = std::visit(
      [&](const auto& g) -> Mesh {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DiskInclusion>) {
          return disk_mesh(g, h);
        } else if constexpr (std::is_same_v<T, LaminateCell>) {
          return laminate_mesh(g, h);
        } else if constexpr (std::is_same_v<T, ConfocalEllipse>) {
          return confocal_mesh(g, h);
        } else {
          return periodic_square_mesh(g, h);
        }
      },
      geom);
  mesh.target_h = h;
  return mesh;
}

Mesh structured_box_mesh(const std::vector<double>& xticks,
                         const std::vector<double>& yticks) {
  if (xticks.size() < 2 || yticks.size() < 2)
    throw GeometryError("structured_box_mesh: need at least one cell");
  Mesh mesh;
  int nx = static_cast<int>(xticks.size());
  int ny = static_cast<int>(yticks.size());
  mesh.vertices.reserve(static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.vertices.emplace_back(xticks[i], yticks[j]);
      mesh.vertex_marker.push_back(box_marker(xticks[i], yticks[j], xticks.front(),
                                              yticks.front(), xticks.back(),
                                              yticks.back()));
    }
  }
  auto vid = [&](int i, int j) { return j * nx + i; };
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j);
      int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }
  mesh.tri_region.assign(mesh.triangles.size(), 0);
  return mesh;
}

Mesh unit_square_mesh(int n) {
  auto t = segment_ticks(0.0, 1.0, 1.0 / n);
  Mesh mesh = structured_box_mesh(t, t);
  mesh.target_h = 1.0 / n;
  mesh.structured_n = n;
  return mesh;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os.precision(17);
  os << mesh.num_vertices() << " " << mesh.num_triangles() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    os << mesh.vertices[v].x() << " " << mesh.vertices[v].y() << " "
       << mesh.vertex_marker[v] << "\n";
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << " " << tri[1] << " " << tri[2] << " " << mesh.tri_region[t]
       << "\n";
  }
}

Mesh read_mesh(std::istream& is) {
  Mesh mesh;
  int nv = 0, nt = 0;
  if (!(is >> nv >> nt)) throw ArgumentError("read_mesh: bad header");
  mesh.vertices.resize(nv);
  mesh.vertex_marker.resize(nv);
  for (int v = 0; v < nv; ++v) {
    if (!(is >> mesh.vertices[v].x() >> mesh.vertices[v].y() >>
          mesh.vertex_marker[v]))
      throw ArgumentError("read_mesh: bad vertex line");
  }
  mesh.triangles.resize(nt);
  mesh.tri_region.resize(nt);
  for (int t = 0; t < nt; ++t) {
    auto& tri = mesh.triangles[t];
    if (!(is >> tri[0] >> tri[1] >> tri[2] >> mesh.tri_region[t]))
      throw ArgumentError("read_mesh: bad triangle line");
  }
  return mesh;
}

P1Evaluator::P1Evaluator(const Mesh& mesh) : mesh_(mesh) {
  lo_ = mesh.vertices.front();
  hi_ = lo_;
  for (const auto& v : mesh.vertices) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  int target = std::max(1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
  nx_ = ny_ = target;
  cell_ = std::max((hi_.x() - lo_.x()) / nx_, (hi_.y() - lo_.y()) / ny_);
  if (cell_ <= 0.0) cell_ = 1.0;
  bins_.resize(static_cast<size_t>(nx_) * ny_);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    Vec2 bl = mesh.vertices[tri[0]], tr = bl;
    for (int e = 1; e < 3; ++e) {
      bl = bl.cwiseMin(mesh.vertices[tri[e]]);
      tr = tr.cwiseMax(mesh.vertices[tri[e]]);
    }
    int i0 = std::clamp(static_cast<int>((bl.x() - lo_.x()) / cell_), 0, nx_ - 1);
    int i1 = std::clamp(static_cast<int>((tr.x() - lo_.x()) / cell_), 0, nx_ - 1);
    int j0 = std::clamp(static_cast<int>((bl.y() - lo_.y()) / cell_), 0, ny_ - 1);
    int j1 = std::clamp(static_cast<int>((tr.y() - lo_.y()) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        bins_[static_cast<size_t>(j) * nx_ + i].push_back(t);
  }
}

std::optional<P1Evaluator::Location> P1Evaluator::locate(const Vec2& p) const {
  int i = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_), 0, nx_ - 1);
  int j = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_), 0, ny_ - 1);
  const double tol = -1e-11;
  for (int t : bins_[static_cast<size_t>(j) * nx_ + i]) {
    const auto& tri = mesh_.triangles[t];
    const Vec2& a = mesh_.vertices[tri[0]];
    const Vec2& b = mesh_.vertices[tri[1]];
    const Vec2& c = mesh_.vertices[tri[2]];
    double area = signed_area(a, b, c);
    double l0 = signed_area(p, b, c) / area;
    double l1 = signed_area(a, p, c) / area;
    double l2 = 1.0 - l0 - l1;
    if (l0 >= tol && l1 >= tol && l2 >= tol)
      return Location{t, {l0, l1, l2}};
  }
  return std::nullopt;
}

double P1Evaluator::evaluate(const Eigen::VectorXd& dof, const Location& loc) const {
  const auto& tri = mesh_.triangles[loc.triangle];
  return loc.bary[0] * dof[tri[0]] + loc.bary[1] * dof[tri[1]] +
         loc.bary[2] * dof[tri[2]];
}

Complex P1Evaluator::evaluate(const Eigen::VectorXcd& dof, const Location& loc) const {
  const auto& tri = mesh_.triangles[loc.triangle];
  return loc.bary[0] * dof[tri[0]] + loc.bary[1] * dof[tri[1]] +
         loc.bary[2] * dof[tri[2]];
}

double P1Evaluator::evaluate(const Eigen::VectorXd& dof, const Vec2& p) const {
  auto loc = locate(p);
  if (!loc) throw DomainError("P1Evaluator: point outside mesh");
  return evaluate(dof, *loc);
}

Complex P1Evaluator::evaluate(const Eigen::VectorXcd& dof, const Vec2& p) const {
  auto loc = locate(p);
  if (!loc) throw DomainError("P1Evaluator: point outside mesh");
  return evaluate(dof, *loc);
}

int find_vertex(const Mesh& mesh, const Vec2& p, double tol) {
  int best = -1;
  double best_d2 = tol * tol;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double d2 = (mesh.vertices[v] - p).squaredNorm();
    if (d2 <= best_d2) {
      best_d2 = d2;
      best = v;
    }
  }
  return best;
}

}  // namespace bhs
