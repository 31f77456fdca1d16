#include "bhs/dispersion.hpp"

#include <cmath>

namespace bhs {

Eigen::VectorXd build_x1(CellWorkspace& ws, const Vec2& eta) {
  const Mesh& mesh = ws.mesh();
  const Eigen::VectorXd& w0 = ws.coordinate_corrector(0).values;
  const Eigen::VectorXd& w1 = ws.coordinate_corrector(1).values;
  Eigen::VectorXd x1(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    x1[v] = eta.x() * (w0[v] - mesh.vertices[v].x()) +
            eta.y() * (w1[v] - mesh.vertices[v].y());
  }
  return x1;
}

Eigen::VectorXd solve_x2(CellWorkspace& ws, const Vec2& eta,
                         const Eigen::VectorXd& x1, const Mat2& m_tensor) {
  const Mesh& mesh = ws.mesh();
  const FullForms& full = ws.full_forms();
  int n = mesh.num_vertices();
  double m_tilde = eta.dot(m_tensor * eta);

  // int (Atilde - Mtilde) phi_i
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Mat2& A = ws.field().phase[static_cast<size_t>(mesh.tri_region[t])];
    double a_tilde = eta.dot(A * eta);
    double contrib = (a_tilde - m_tilde) * mesh.triangle_area(t) / 3.0;
    for (int a = 0; a < 3; ++a) rhs[tri[a]] += contrib;
  }
  // - int (C_omega X1) phi_i = -eta_k [ (C_k^T - C_k) X1 ]_i
  for (int k = 0; k < 2; ++k) {
    if (eta[k] == 0.0) continue;
    rhs -= eta[k] * (full.coupling[static_cast<size_t>(k)].transpose() * x1 -
                     full.coupling[static_cast<size_t>(k)] * x1);
  }
  return ws.dirichlet().solve(rhs, Eigen::VectorXd::Zero(n));
}

double burnett_quartic(CellWorkspace& ws, const Vec2& eta, const Mat2& m_tensor,
                       DispersionState* state) {
  Eigen::VectorXd x1 = build_x1(ws, eta);
  Eigen::VectorXd x2 = solve_x2(ws, eta, x1, m_tensor);
  // (X1)^2 formed nodally, then the energy of v = X2 - (X1)^2/2.
  Eigen::VectorXd v = x2 - 0.5 * x1.cwiseProduct(x1);
  double energy = v.dot(ws.full_forms().stiffness * v);
  double d = -energy / ws.area();
  if (state) {
    state->eta = eta;
    state->x1 = std::move(x1);
    // Total conormal flux of X2 over the boundary (the overdetermined
    // condition), recovered from the residual.
    double flux = 0.0;
    Eigen::VectorXd residual = ws.full_forms().stiffness * x2;
    for (int vtx = 0; vtx < ws.mesh().num_vertices(); ++vtx)
      if (ws.mesh().vertex_on_boundary(vtx)) flux += residual[vtx];
    state->boundary_flux_residual = flux;
    state->x2 = std::move(x2);
  }
  return d;
}

std::vector<DispersionFanRow> dispersion_fan(CellWorkspace& ws,
                                             const AssembledForms& forms,
                                             const Mat2& m_tensor,
                                             int directions,
                                             const std::vector<double>& fd_steps) {
  if (directions < 1) throw ArgumentError("dispersion_fan: directions >= 1");
  std::vector<DispersionFanRow> rows(static_cast<size_t>(directions));
  // Correctors are shared; solve them before the parallel section.
  ws.coordinate_corrector(0);
  ws.coordinate_corrector(1);
  std::vector<double> d_values(static_cast<size_t>(directions));
  for (int i = 0; i < directions; ++i) {
    double angle = M_PI * i / directions;  // d(-eta) = d(eta)
    Vec2 eta(std::cos(angle), std::sin(angle));
    d_values[static_cast<size_t>(i)] = burnett_quartic(ws, eta, m_tensor);
  }
  parallel_for(directions, [&](int i) {
    double angle = M_PI * i / directions;
    Vec2 eta(std::cos(angle), std::sin(angle));
    FdLambdaDerivatives fd = fd_derivatives_lambda1(forms, eta, fd_steps);
    auto& row = rows[static_cast<size_t>(i)];
    row.angle = angle;
    row.d_value = d_values[static_cast<size_t>(i)];
    row.q4_oracle = fd.quartic;
    row.relative_gap = std::abs(row.d_value - row.q4_oracle) /
                       std::max(std::abs(row.q4_oracle), 1e-300);
  });
  return rows;
}

}  // namespace bhs
