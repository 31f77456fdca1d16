#include "bhs/bloch.hpp"

#include <cmath>

namespace bhs {

namespace {

const double kGauss4Nodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                0.3399810435848563, 0.8611363115940526};
const double kGauss4Weights[4] = {0.3478548451374538, 0.6521451548625461,
                                  0.6521451548625461, 0.3478548451374538};

// Composite 4-point Gauss rule over [a, b] with m sub-intervals.
void gauss4_panels(double a, double b, int m, std::vector<double>& nodes,
                   std::vector<double>& weights) {
  double len = (b - a) / m;
  for (int p = 0; p < m; ++p) {
    double lo = a + p * len;
    for (int q = 0; q < 4; ++q) {
      nodes.push_back(lo + 0.5 * len * (1.0 + kGauss4Nodes[q]));
      weights.push_back(0.5 * len * kGauss4Weights[q]);
    }
  }
}

std::vector<double> with_bounds(std::vector<double> splits, double lo, double hi) {
  std::vector<double> out{lo};
  std::sort(splits.begin(), splits.end());
  for (double s : splits)
    if (s > lo + 1e-14 && s < hi - 1e-14 &&
        (out.empty() || s > out.back() + 1e-14))
      out.push_back(s);
  out.push_back(hi);
  return out;
}

}  // namespace

ScalarField make_smooth_bump(const Vec2& center, double radius,
                             double amplitude) {
  if (!(radius > 0.0)) throw ArgumentError("make_smooth_bump: radius > 0");
  ScalarField g;
  g.f = [center, radius, amplitude](const Vec2& x) {
    double s2 = (x - center).squaredNorm() / (radius * radius);
    if (s2 >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - s2));
  };
  g.support = Rect{center.x() - radius, center.y() - radius, center.x() + radius,
                   center.y() + radius};
  g.wavenumber = 2.0 * M_PI / radius;
  // Norms by a radial rule (the bump is radial).
  std::vector<double> r, w;
  gauss4_panels(0.0, radius, 64, r, w);
  double l1 = 0.0, l2 = 0.0;
  for (size_t q = 0; q < r.size(); ++q) {
    double v = g.f(center + Vec2(r[q], 0.0));
    l1 += w[q] * 2.0 * M_PI * r[q] * std::abs(v);
    l2 += w[q] * 2.0 * M_PI * r[q] * v * v;
  }
  g.l1_norm = l1;
  g.l2_norm = std::sqrt(l2);
  return g;
}

CellRule disk_cell_rule(const std::vector<double>& radial_splits,
                        const std::vector<double>& angular_splits, int n_radial,
                        int n_angular) {
  CellRule rule;
  auto rsplit = with_bounds(radial_splits, 0.0, 1.0);
  auto asplit = with_bounds(angular_splits, 0.0, 2.0 * M_PI);

  // Radial integration in s = r^2 (so weights carry the area element).
  std::vector<double> snodes, sweights;
  for (size_t p = 0; p + 1 < rsplit.size(); ++p) {
    double s0 = rsplit[p] * rsplit[p], s1 = rsplit[p + 1] * rsplit[p + 1];
    int m = std::max(1, static_cast<int>(std::ceil(
                            n_radial * (rsplit[p + 1] - rsplit[p]) / 4.0)));
    gauss4_panels(s0, s1, m, snodes, sweights);
  }
  std::vector<double> anodes, aweights;
  for (size_t p = 0; p + 1 < asplit.size(); ++p) {
    double span = asplit[p + 1] - asplit[p];
    int m = std::max(1, static_cast<int>(
                            std::ceil(n_angular * span / (2.0 * M_PI) / 4.0)));
    gauss4_panels(asplit[p], asplit[p + 1], m, anodes, aweights);
  }
  rule.points.reserve(snodes.size() * anodes.size());
  rule.weights.reserve(snodes.size() * anodes.size());
  for (size_t i = 0; i < snodes.size(); ++i) {
    double radius = std::sqrt(snodes[i]);
    for (size_t j = 0; j < anodes.size(); ++j) {
      rule.points.emplace_back(radius * std::cos(anodes[j]),
                               radius * std::sin(anodes[j]));
      rule.weights.push_back(0.5 * sweights[i] * aweights[j]);
    }
  }
  return rule;
}

BlochEngine::BlochEngine(const MicroField& field, BlochOptions opt)
    : field_(field), opt_(opt) {
  if (field_.covering().kind != CoveringKind::DiskPack)
    throw ArgumentError("BlochEngine: disk coverings only");
  cell_mesh_ = generate_cell_mesh(field_.cell_field().geometry, opt_.cell_mesh_h);
  cell_area_h_ = cell_mesh_.total_area();
  workspace_ = std::make_unique<CellWorkspace>(field_.cell_field(), cell_mesh_);
  evaluator_ = std::make_unique<P1Evaluator>(cell_mesh_);
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd& w = workspace_->coordinate_corrector(k).values;
    z_corrector_[k].resize(static_cast<size_t>(cell_mesh_.num_vertices()));
    for (int v = 0; v < cell_mesh_.num_vertices(); ++v)
      z_corrector_[k][static_cast<size_t>(v)] = w[v] - cell_mesh_.vertices[v][k];
  }

  // Boundary-normalized ground states on the eta grid; the gauge makes
  // phi(.;-eta) the conjugate of phi(.;eta) up to solver tolerance.
  CellSpace space = make_cell_space(cell_mesh_, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field_.cell_field(), cell_mesh_, space);
  int n = opt_.eta_grid_n;
  eta_cache_.resize(static_cast<size_t>(n) * n);
  parallel_for(n * n, [&](int idx) {
    int i = idx % n, j = idx / n;
    double m = opt_.eta_cache_max;
    Vec2 eta(-m + 2.0 * m * i / (n - 1), -m + 2.0 * m * j / (n - 1));
    GroundState gs = solve_ground_state(forms, eta, opt_.solver_tol);
    eta_cache_[static_cast<size_t>(idx)] = expand(space, gs.phi);
  });
}

double BlochEngine::admissible_xi_radius() const {
  return opt_.eta_cache_max / field_.covering().kappa;
}

const BlochEngine::RuleData& BlochEngine::rule_for(double eps, double xi_max,
                                                   double wavenumber) const {
  double k_eff = eps * (xi_max + wavenumber);
  int nr = std::max(opt_.min_radial,
                    static_cast<int>(std::ceil(opt_.points_per_wavelength *
                                               k_eff / (2.0 * M_PI) * 2.0)));
  int na = std::max(opt_.min_angular,
                    static_cast<int>(std::ceil(opt_.points_per_wavelength * k_eff)));
  auto key = std::make_pair(nr, na);
  auto it = rules_.find(key);
  if (it != rules_.end()) return it->second;

  RuleData rd;
  std::vector<double> rsplits;
  if (const auto* disk = std::get_if<DiskInclusion>(&field_.cell_field().geometry))
    rsplits.push_back(disk->core_radius);
  rd.rule = disk_cell_rule(rsplits, {}, nr, na);
  rd.locations.reserve(rd.rule.points.size());
  for (const auto& p : rd.rule.points) {
    auto loc = evaluator_->locate(p);
    if (!loc) throw NumericError("BlochEngine: quadrature point outside cell mesh");
    rd.locations.push_back(*loc);
  }
  return rules_.emplace(key, std::move(rd)).first->second;
}

Complex BlochEngine::phi_conj_exact(const RuleData& rd, size_t q,
                                    const Vec2& eta) const {
  int n = opt_.eta_grid_n;
  double m = opt_.eta_cache_max;
  double gx = (eta.x() + m) / (2.0 * m) * (n - 1);
  double gy = (eta.y() + m) / (2.0 * m) * (n - 1);
  int i0 = std::clamp(static_cast<int>(gx), 0, n - 2);
  int j0 = std::clamp(static_cast<int>(gy), 0, n - 2);
  double fx = gx - i0, fy = gy - j0;
  const auto& loc = rd.locations[q];
  Complex v00 = evaluator_->evaluate(eta_cache_[static_cast<size_t>(j0) * n + i0], loc);
  Complex v10 =
      evaluator_->evaluate(eta_cache_[static_cast<size_t>(j0) * n + i0 + 1], loc);
  Complex v01 =
      evaluator_->evaluate(eta_cache_[(static_cast<size_t>(j0) + 1) * n + i0], loc);
  Complex v11 = evaluator_->evaluate(
      eta_cache_[(static_cast<size_t>(j0) + 1) * n + i0 + 1], loc);
  Complex v = (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
              (1 - fx) * fy * v01 + fx * fy * v11;
  return std::conj(v);
}

BlochTransformResult BlochEngine::transform(const ScalarField& g,
                                            const std::vector<Vec2>& xi,
                                            BlochMode mode) const {
  double xi_max = 0.0;
  double xi_comp = 0.0;  // the eta cache is a square: admissibility per axis
  for (const auto& x : xi) {
    xi_max = std::max(xi_max, x.norm());
    xi_comp = std::max({xi_comp, std::abs(x.x()), std::abs(x.y())});
  }
  const auto& cov = field_.covering();
  if (cov.kappa * xi_comp > opt_.eta_cache_max + 1e-12)
    throw ArgumentError(
        "bloch transform: xi outside the admissible range kappa^{-1} * "
        "dual-cell radius");

  // Per-cell quadrature data, shared across xi.
  struct CellData {
    const RuleData* rd;
    double eps;
    Vec2 center;
    std::vector<double> gw;        // weight * g(x_q)
    std::vector<Vec2> x;           // macro-coordinates of the points
    std::vector<double> z0, z1;    // corrector values (taylor1)
  };
  std::vector<CellData> cells;
  cells.reserve(cov.cells.size());
  double c0 = std::pow(cell_area_h_, -0.5);
  for (const auto& cell : cov.cells) {
    if (cell.center.x() + cell.eps < g.support.x0 ||
        cell.center.x() - cell.eps > g.support.x1 ||
        cell.center.y() + cell.eps < g.support.y0 ||
        cell.center.y() - cell.eps > g.support.y1)
      continue;
    CellData cd;
    cd.rd = &rule_for(cell.eps, xi_max, g.wavenumber);
    cd.eps = cell.eps;
    cd.center = cell.center;
    size_t np = cd.rd->rule.points.size();
    cd.gw.resize(np);
    cd.x.resize(np);
    bool any = false;
    for (size_t q = 0; q < np; ++q) {
      cd.x[q] = cell.center + cell.eps * cd.rd->rule.points[q];
      cd.gw[q] = cd.rd->rule.weights[q] * g.f(cd.x[q]);
      if (cd.gw[q] != 0.0) any = true;
    }
    if (!any) continue;
    if (mode == BlochMode::Taylor1) {
      cd.z0.resize(np);
      cd.z1.resize(np);
      Eigen::Map<const Eigen::VectorXd> zc0(z_corrector_[0].data(),
                                            static_cast<Eigen::Index>(
                                                z_corrector_[0].size()));
      Eigen::Map<const Eigen::VectorXd> zc1(z_corrector_[1].data(),
                                            static_cast<Eigen::Index>(
                                                z_corrector_[1].size()));
      for (size_t q = 0; q < np; ++q) {
        cd.z0[q] = evaluator_->evaluate(Eigen::VectorXd(zc0), cd.rd->locations[q]);
        cd.z1[q] = evaluator_->evaluate(Eigen::VectorXd(zc1), cd.rd->locations[q]);
      }
    }
    cells.push_back(std::move(cd));
  }

  BlochTransformResult out;
  out.xi = xi;
  out.taylor_mode = (mode == BlochMode::Taylor1);
  out.values.assign(xi.size(), Complex(0.0, 0.0));
  parallel_for(static_cast<int>(xi.size()), [&](int i) {
    const Vec2& k = xi[static_cast<size_t>(i)];
    Complex acc(0.0, 0.0);
    for (const auto& cd : cells) {
      Vec2 eta = cd.eps * k;
      Complex cell_sum(0.0, 0.0);
      for (size_t q = 0; q < cd.gw.size(); ++q) {
        if (cd.gw[q] == 0.0) continue;
        double phase = -cd.x[q].dot(k);
        Complex osc(std::cos(phase), std::sin(phase));
        Complex phi_conj =
            (mode == BlochMode::Taylor1)
                ? c0 * Complex(1.0, -(eta.x() * cd.z0[q] + eta.y() * cd.z1[q]))
                : phi_conj_exact(*cd.rd, q, eta);
        cell_sum += cd.gw[q] * osc * phi_conj;
      }
      acc += cd.eps * cd.eps * cell_sum;
    }
    out.values[static_cast<size_t>(i)] = acc;
  });
  return out;
}

std::vector<Complex> BlochEngine::reference(const ScalarField& g,
                                            const std::vector<Vec2>& xi) const {
  return reference_transform(g, xi, cell_area_h_);
}

double BlochEngine::bessel_constant(const ScalarField& g, double eta_max,
                                    int per_axis) const {
  double r = eta_max / field_.covering().kappa;
  double dxi = 2.0 * r / per_axis;
  std::vector<Vec2> grid;
  grid.reserve(static_cast<size_t>(per_axis) * per_axis);
  for (int j = 0; j < per_axis; ++j)
    for (int i = 0; i < per_axis; ++i)
      grid.emplace_back(-r + (i + 0.5) * dxi, -r + (j + 0.5) * dxi);
  BlochTransformResult b = transform(g, grid, BlochMode::Exact);
  double integral = 0.0;
  for (const auto& v : b.values) integral += std::norm(v) * dxi * dxi;
  return integral / (g.l2_norm * g.l2_norm);
}

std::vector<Complex> reference_transform(const ScalarField& g,
                                         const std::vector<Vec2>& xi,
                                         double cell_area) {
  double xi_max = 0.0;
  for (const auto& x : xi) xi_max = std::max(xi_max, x.norm());
  double k_eff = xi_max + g.wavenumber;
  auto axis_rule = [&](double lo, double hi, std::vector<double>& nodes,
                       std::vector<double>& weights) {
    int panels = std::max(
        24, static_cast<int>(std::ceil((hi - lo) * k_eff * 8.0 / (2.0 * M_PI) / 4.0)));
    gauss4_panels(lo, hi, panels, nodes, weights);
  };
  std::vector<double> xn, xw, yn, yw;
  axis_rule(g.support.x0, g.support.x1, xn, xw);
  axis_rule(g.support.y0, g.support.y1, yn, yw);

  // Tabulate g once; the xi loop only re-evaluates phases.
  std::vector<double> gv(xn.size() * yn.size());
  for (size_t j = 0; j < yn.size(); ++j)
    for (size_t i = 0; i < xn.size(); ++i)
      gv[j * xn.size() + i] = xw[i] * yw[j] * g.f(Vec2(xn[i], yn[j]));

  std::vector<Complex> out(xi.size());
  double amp = std::pow(cell_area, -0.5);
  parallel_for(static_cast<int>(xi.size()), [&](int t) {
    const Vec2& k = xi[static_cast<size_t>(t)];
    std::vector<Complex> ex(xn.size()), ey(yn.size());
    for (size_t i = 0; i < xn.size(); ++i)
      ex[i] = Complex(std::cos(-xn[i] * k.x()), std::sin(-xn[i] * k.x()));
    for (size_t j = 0; j < yn.size(); ++j)
      ey[j] = Complex(std::cos(-yn[j] * k.y()), std::sin(-yn[j] * k.y()));
    Complex acc(0.0, 0.0);
    for (size_t j = 0; j < yn.size(); ++j) {
      Complex row(0.0, 0.0);
      for (size_t i = 0; i < xn.size(); ++i) row += gv[j * xn.size() + i] * ex[i];
      acc += row * ey[j];
    }
    out[static_cast<size_t>(t)] = amp * acc;
  });
  return out;
}

std::vector<FourierLimitRow> fourier_limit_check(
    const ScalarField& g, const std::vector<const MicroField*>& levels,
    const std::vector<Vec2>& xi, const BlochOptions& opt) {
  double xi_max = 0.0;
  for (const auto& x : xi) xi_max = std::max(xi_max, x.norm());
  std::vector<FourierLimitRow> rows;
  for (const MicroField* level : levels) {
    BlochEngine engine(*level, opt);
    BlochTransformResult b = engine.transform(g, xi, BlochMode::Exact);
    std::vector<Complex> f = engine.reference(g, xi);
    FourierLimitRow row;
    row.kappa = level->covering().kappa;
    row.residual_fraction = level->covering().residual_fraction;
    for (size_t i = 0; i < xi.size(); ++i)
      row.max_error = std::max(row.max_error, std::abs(b.values[i] - f[i]));
    row.bound_ratio = row.max_error / (row.kappa * xi_max * g.l2_norm);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> weak_average_errors(
    const CellFunction& f, const VitaliCovering& covering,
    const std::vector<std::function<double(const Vec2&)>>& tests, int n_radial,
    int n_angular) {
  if (covering.kind != CoveringKind::DiskPack)
    throw ArgumentError("weak_average_errors: disk coverings only");
  CellRule rule =
      disk_cell_rule(f.radial_splits, f.angular_splits, n_radial, n_angular);
  std::vector<double> fw(rule.points.size());
  for (size_t q = 0; q < rule.points.size(); ++q)
    fw[q] = rule.weights[q] * (f.f(rule.points[q]) - f.mean);

  // With the residual region carrying the mean, the error reduces to the
  // in-cell fluctuation integrals sum_p int_p (f_n - mean) phi.
  std::vector<double> errors(tests.size(), 0.0);
  for (size_t j = 0; j < tests.size(); ++j) {
    double acc = 0.0;
    for (const auto& cell : covering.cells) {
      double cell_acc = 0.0;
      for (size_t q = 0; q < rule.points.size(); ++q) {
        if (fw[q] == 0.0) continue;
        cell_acc += fw[q] * tests[j](cell.center + cell.eps * rule.points[q]);
      }
      acc += cell.eps * cell.eps * cell_acc;
    }
    errors[j] = std::abs(acc);
  }
  return errors;
}

}  // namespace bhs
