#include "bhs/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bhs {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);  // keep the smallest index as the root
    parent[b] = a;
  }
};

// Pairs vertices on two opposite faces by the running coordinate.
void merge_periodic_faces(const Mesh& mesh, UnionFind& uf, int face_lo,
                          int face_hi, int run_axis) {
  std::vector<int> lo, hi;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vertex_marker[v] & face_lo) lo.push_back(v);
    if (mesh.vertex_marker[v] & face_hi) hi.push_back(v);
  }
  auto by_run = [&](int a, int b) {
    return mesh.vertices[a][run_axis] < mesh.vertices[b][run_axis];
  };
  std::sort(lo.begin(), lo.end(), by_run);
  std::sort(hi.begin(), hi.end(), by_run);
  if (lo.size() != hi.size())
    throw AssemblyError("periodic faces have mismatched vertex counts");
  for (size_t i = 0; i < lo.size(); ++i) {
    double gap = std::abs(mesh.vertices[lo[i]][run_axis] -
                          mesh.vertices[hi[i]][run_axis]);
    if (gap > 1e-9)
      throw AssemblyError("periodic faces have mismatched vertex positions");
    uf.merge(lo[i], hi[i]);
  }
}

}  // namespace

CellSpace make_cell_space(const Mesh& mesh, CellRegime regime, int axis) {
  CellSpace space;
  space.regime = regime;
  space.axis = axis;
  int n = mesh.num_vertices();
  UnionFind uf(n);

  int trace_root = -1;
  switch (regime) {
    case CellRegime::ConstantTrace: {
      for (int v = 0; v < n; ++v) {
        if (!mesh.vertex_on_boundary(v)) continue;
        if (trace_root < 0)
          trace_root = v;
        else
          uf.merge(trace_root, v);
      }
      break;
    }
    case CellRegime::Periodic: {
      merge_periodic_faces(mesh, uf, kFaceXMin, kFaceXMax, 1);
      merge_periodic_faces(mesh, uf, kFaceYMin, kFaceYMax, 0);
      break;
    }
    case CellRegime::PeriodicConstantTrace: {
      int lo = axis == 0 ? kFaceXMin : kFaceYMin;
      int hi = axis == 0 ? kFaceXMax : kFaceYMax;
      for (int v = 0; v < n; ++v) {
        if (!(mesh.vertex_marker[v] & (lo | hi))) continue;
        if (trace_root < 0)
          trace_root = v;
        else
          uf.merge(trace_root, v);
      }
      if (axis == 0)
        merge_periodic_faces(mesh, uf, kFaceYMin, kFaceYMax, 0);
      else
        merge_periodic_faces(mesh, uf, kFaceXMin, kFaceXMax, 1);
      break;
    }
  }

  space.representative.resize(n);
  for (int v = 0; v < n; ++v) space.representative[v] = uf.find(v);
  space.reduced_index.assign(n, -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    if (space.representative[v] == v) space.reduced_index[v] = next++;
  }
  for (int v = 0; v < n; ++v)
    space.reduced_index[v] = space.reduced_index[space.representative[v]];
  space.n_reduced = next;
  if (trace_root >= 0) space.master = space.reduced_index[uf.find(trace_root)];
  return space;
}

namespace {

struct ElementGeometry {
  std::array<Vec2, 3> grad;
  double area;
};

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2& p0 = mesh.vertices[tri[0]];
  const Vec2& p1 = mesh.vertices[tri[1]];
  const Vec2& p2 = mesh.vertices[tri[2]];
  double area2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                 (p1.y() - p0.y()) * (p2.x() - p0.x());
  if (area2 <= 0.0) throw AssemblyError("element with non-positive area");
  auto perp = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
  ElementGeometry eg;
  eg.area = 0.5 * area2;
  eg.grad[0] = perp(p2 - p1) / area2;
  eg.grad[1] = perp(p0 - p2) / area2;
  eg.grad[2] = perp(p1 - p0) / area2;
  return eg;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

template <typename IndexMap>
void assemble_blocks(const CoefficientField& field, const Mesh& mesh,
                     const IndexMap& index, Triplets& k_t, Triplets& c0_t,
                     Triplets& c1_t, Triplets& w00_t, Triplets& w01_t,
                     Triplets& w11_t, Triplets& m_t) {
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    ElementGeometry eg = element_geometry(mesh, t);
    Vec2 centroid =
        (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) /
        3.0;
    if (region_of(field.geometry, centroid) != mesh.tri_region[t])
      throw AssemblyError("mesh does not conform to the coefficient interfaces");
    const Mat2& A = field.phase[static_cast<size_t>(mesh.tri_region[t])];
    std::array<Vec2, 3> flux;
    for (int a = 0; a < 3; ++a) flux[a] = A * eg.grad[a];
    for (int a = 0; a < 3; ++a) {
      int ia = index(tri[a]);
      for (int bb = 0; bb < 3; ++bb) {
        int ib = index(tri[bb]);
        double mass_ab = eg.area / 12.0 * (a == bb ? 2.0 : 1.0);
        k_t.emplace_back(ia, ib, eg.area * flux[bb].dot(eg.grad[a]));
        c0_t.emplace_back(ia, ib, flux[bb].x() * eg.area / 3.0);
        c1_t.emplace_back(ia, ib, flux[bb].y() * eg.area / 3.0);
        w00_t.emplace_back(ia, ib, A(0, 0) * mass_ab);
        w01_t.emplace_back(ia, ib, A(0, 1) * mass_ab);
        w11_t.emplace_back(ia, ib, A(1, 1) * mass_ab);
        m_t.emplace_back(ia, ib, mass_ab);
      }
    }
  }
}

SpMat from_triplets(int rows, int cols, Triplets& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

FullForms assemble_full(const CoefficientField& field, const Mesh& mesh) {
  FullForms f;
  int n = mesh.num_vertices();
  Triplets k_t, c0_t, c1_t, w00_t, w01_t, w11_t, m_t;
  assemble_blocks(field, mesh, [](int v) { return v; }, k_t, c0_t, c1_t, w00_t,
                  w01_t, w11_t, m_t);
  f.stiffness = from_triplets(n, n, k_t);
  f.coupling[0] = from_triplets(n, n, c0_t);
  f.coupling[1] = from_triplets(n, n, c1_t);
  f.weighted_mass[0] = from_triplets(n, n, w00_t);
  f.weighted_mass[1] = from_triplets(n, n, w01_t);
  f.weighted_mass[2] = from_triplets(n, n, w11_t);
  f.mass = from_triplets(n, n, m_t);
  f.area = mesh.total_area();
  return f;
}

AssembledForms assemble(const CoefficientField& field, const Mesh& mesh,
                        const CellSpace& space) {
  AssembledForms f;
  f.space = space;
  int n = space.n_reduced;
  Triplets k_t, c0_t, c1_t, w00_t, w01_t, w11_t, m_t;
  assemble_blocks(field, mesh,
                  [&](int v) { return space.reduced_index[v]; }, k_t, c0_t,
                  c1_t, w00_t, w01_t, w11_t, m_t);
  f.stiffness = from_triplets(n, n, k_t);
  f.coupling[0] = from_triplets(n, n, c0_t);
  f.coupling[1] = from_triplets(n, n, c1_t);
  f.weighted_mass[0] = from_triplets(n, n, w00_t);
  f.weighted_mass[1] = from_triplets(n, n, w01_t);
  f.weighted_mass[2] = from_triplets(n, n, w11_t);
  f.mass = from_triplets(n, n, m_t);
  f.cell_volume = mesh.total_area();
  return f;
}

SpCMat shifted_matrix(const AssembledForms& forms, const Vec2& eta) {
  int n = forms.stiffness.rows();
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<size_t>(forms.stiffness.nonZeros()) * 3);
  for (int k = 0; k < forms.stiffness.outerSize(); ++k)
    for (SpMat::InnerIterator it(forms.stiffness, k); it; ++it)
      t.emplace_back(it.row(), it.col(), Complex(it.value(), 0.0));
  for (int c = 0; c < 2; ++c) {
    if (eta[c] == 0.0) continue;
    const SpMat& C = forms.coupling[c];
    for (int k = 0; k < C.outerSize(); ++k)
      for (SpMat::InnerIterator it(C, k); it; ++it) {
        // i eta_c (C^T - C)
        t.emplace_back(it.col(), it.row(), Complex(0.0, eta[c] * it.value()));
        t.emplace_back(it.row(), it.col(), Complex(0.0, -eta[c] * it.value()));
      }
  }
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      double w = eta[k] * eta[l];
      if (w == 0.0) continue;
      const SpMat& W = forms.wmass(k, l);
      for (int c = 0; c < W.outerSize(); ++c)
        for (SpMat::InnerIterator it(W, c); it; ++it)
          t.emplace_back(it.row(), it.col(), Complex(w * it.value(), 0.0));
    }
  SpCMat H(n, n);
  H.setFromTriplets(t.begin(), t.end());
  H.makeCompressed();
  return H;
}

Eigen::VectorXd expand(const CellSpace& space, const Eigen::VectorXd& reduced) {
  Eigen::VectorXd full(space.reduced_index.size());
  for (size_t v = 0; v < space.reduced_index.size(); ++v)
    full[static_cast<Eigen::Index>(v)] = reduced[space.reduced_index[v]];
  return full;
}

Eigen::VectorXcd expand(const CellSpace& space, const Eigen::VectorXcd& reduced) {
  Eigen::VectorXcd full(space.reduced_index.size());
  for (size_t v = 0; v < space.reduced_index.size(); ++v)
    full[static_cast<Eigen::Index>(v)] = reduced[space.reduced_index[v]];
  return full;
}

DirichletSolver::DirichletSolver(const Mesh& mesh, const SpMat& stiffness_full)
    : stiffness_(stiffness_full) {
  int n = mesh.num_vertices();
  interior_of_.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!mesh.vertex_on_boundary(v)) {
      interior_of_[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
  }
  Triplets t;
  for (int k = 0; k < stiffness_full.outerSize(); ++k)
    for (SpMat::InnerIterator it(stiffness_full, k); it; ++it) {
      int i = interior_of_[it.row()];
      int j = interior_of_[it.col()];
      if (i >= 0 && j >= 0) t.emplace_back(i, j, it.value());
    }
  SpMat kii(num_interior(), num_interior());
  kii.setFromTriplets(t.begin(), t.end());
  kii.makeCompressed();
  factorization_.compute(kii);
  if (factorization_.info() != Eigen::Success)
    throw NumericError("DirichletSolver: factorization failed");
}

Eigen::VectorXd DirichletSolver::solve(const Eigen::VectorXd& rhs,
                                       const Eigen::VectorXd& boundary_values) const {
  Eigen::VectorXd lifted = boundary_values;
  for (int v : interior_) lifted[v] = 0.0;
  Eigen::VectorXd residual = rhs - stiffness_ * lifted;
  Eigen::VectorXd ri(num_interior());
  for (int i = 0; i < num_interior(); ++i) ri[i] = residual[interior_[i]];
  Eigen::VectorXd wi = factorization_.solve(ri);
  if (factorization_.info() != Eigen::Success)
    throw NumericError("DirichletSolver: solve failed");
  Eigen::VectorXd w = lifted;
  for (int i = 0; i < num_interior(); ++i) w[interior_[i]] = wi[i];
  return w;
}

BoundaryFluxField consistent_boundary_flux(const Mesh& mesh,
                                           const SpMat& stiffness_full,
                                           const Eigen::VectorXd& solution,
                                           const Eigen::VectorXd& rhs_full) {
  BoundaryFluxField out;
  out.loop = mesh.boundary_loop();
  int nb = static_cast<int>(out.loop.size());
  Eigen::VectorXd residual = stiffness_full * solution - rhs_full;

  // 1D P1 mass matrix on the closed boundary polyline.
  Triplets t;
  Eigen::VectorXd g(nb);
  for (int i = 0; i < nb; ++i) g[i] = residual[out.loop[i]];
  for (int i = 0; i < nb; ++i) {
    int j = (i + 1) % nb;
    double len = (mesh.vertices[out.loop[j]] - mesh.vertices[out.loop[i]]).norm();
    t.emplace_back(i, i, len / 3.0);
    t.emplace_back(j, j, len / 3.0);
    t.emplace_back(i, j, len / 6.0);
    t.emplace_back(j, i, len / 6.0);
  }
  SpMat mb(nb, nb);
  mb.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<SpMat> fact(mb);
  if (fact.info() != Eigen::Success)
    throw NumericError("consistent_boundary_flux: boundary mass factorization");
  out.values = fact.solve(g);
  return out;
}

FluxComparison compare_boundary_flux(
    const Mesh& mesh, const BoundaryFluxField& flux,
    const std::function<double(const Vec2&, const Vec2&)>& target) {
  FluxComparison cmp;
  int nb = static_cast<int>(flux.loop.size());
  // Two-point Gauss per edge; the outward normal is the edge normal of the
  // counterclockwise loop.
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  double err2 = 0.0, tgt2 = 0.0;
  for (int i = 0; i < nb; ++i) {
    int j = (i + 1) % nb;
    Vec2 a = mesh.vertices[flux.loop[i]];
    Vec2 b = mesh.vertices[flux.loop[j]];
    Vec2 tangent = b - a;
    double len = tangent.norm();
    Vec2 normal(tangent.y() / len, -tangent.x() / len);
    for (double s : gp) {
      Vec2 x = a + s * tangent;
      double q = (1.0 - s) * flux.values[i] + s * flux.values[j];
      double ref = target(x, normal);
      double d = q - ref;
      err2 += 0.5 * len * d * d;
      tgt2 += 0.5 * len * ref * ref;
      cmp.max_error = std::max(cmp.max_error, std::abs(d));
    }
  }
  cmp.l2_error = std::sqrt(err2);
  cmp.target_l2 = std::sqrt(tgt2);
  return cmp;
}

}  // namespace bhs
