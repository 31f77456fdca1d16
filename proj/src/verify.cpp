#include "bhs/verify.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "bhs/bloch.hpp"
#include "bhs/dispersion.hpp"
#include "bhs/dns.hpp"
#include "bhs/io.hpp"

namespace bhs {

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[FAILED " << what << "] ";
    }
  }
  template <typename T>
  Check& operator<<(const T& v) {
    detail << v;
    return *this;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double rel_err(const Mat2& a, const Mat2& b) {
  return (a - b).norm() / b.norm();
}

CellDescriptor disk_cell() {
  CellDescriptor c;
  c.geometry = DiskInclusion{std::sqrt(0.5)};  // theta = 1/2
  c.alpha = 1.0;
  c.beta = 2.0;
  return c;
}

struct LevelSpec {
  double eps_max, eps_min, residual_target;
  std::uint64_t seed;
  int grid_n;
};

std::vector<LevelSpec> standard_levels(bool fast) {
  // Scale ratios chosen from the measured greedy-packing residual floors so
  // the targets are reachable and the residual fractions decrease with kappa.
  if (fast)
    return {{0.2, 0.025, 0.13, 11, 512},
            {0.1, 0.0125, 0.11, 12, 512},
            {0.05, 0.00625, 0.11, 13, 512}};
  return {{0.2, 0.0125, 0.085, 11, 1024},
          {0.1, 0.00417, 0.055, 12, 1024},
          {0.05, 0.00114, 0.036, 13, 2048}};
}

Rect unit_domain() { return Rect{0.0, 0.0, 1.0, 1.0}; }

// -------------------------------------------------------------------------
// 1. Spherical-inclusion homogenization by both routes.
CriterionResult criterion_1(const VerifySettings& s) {
  CriterionResult r{1, "spherical-inclusion homogenization (both routes)", false,
                    "", 0.0};
  Check c;
  double h = s.fast ? 0.05 : 0.02;
  double gamma = hs_spherical_gamma(1.0, 2.0, 0.5, 2);
  CellDescriptor cell = disk_cell();
  CoefficientField field = cell.make_field();
  Mesh mesh = generate_cell_mesh(cell.geometry, h);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m_ci = homogenized_cell_integral(ws);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);
  HomogenizedTensor m_eig = homogenized_from_hessian(forms);

  Mat2 reference = gamma * Mat2::Identity();
  double err_ci = rel_err(m_ci.entries, reference);
  double err_eig = rel_err(m_eig.entries, reference);
  double route_gap = (m_ci.entries - m_eig.entries).norm() / m_ci.entries.norm();
  double tol = 0.01 * s.tolerance_scale();
  c.require(err_ci <= tol, "cell-integral within 1% of gamma I");
  c.require(err_eig <= tol, "eigenvalue-Hessian within 1% of gamma I");
  c.require(route_gap <= 0.005 * s.tolerance_scale(), "routes agree within 0.5%");
  c << "gamma=" << fmt(gamma) << " err_ci=" << fmt(err_ci)
    << " err_eig=" << fmt(err_eig) << " route_gap=" << fmt(route_gap);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 2. Laminate: harmonic/arithmetic means on the diagonal.
CriterionResult criterion_2(const VerifySettings& s) {
  CriterionResult r{2, "laminate diag(harmonic, arithmetic) means", false, "", 0.0};
  Check c;
  double h = s.fast ? 0.1 : 0.05;
  LaminateCell geom{0.5, 0};  // theta = 0.5, lamination along e_1
  CoefficientField field = CoefficientField::two_phase(geom, 1.0, 2.0);
  Mesh mesh = generate_cell_mesh(geom, h);
  CellSpace space = make_cell_space(mesh, CellRegime::PeriodicConstantTrace, 0);
  AssembledForms forms = assemble(field, mesh, space);
  HomogenizedTensor m = homogenized_from_hessian(forms);
  LaminateMeans means = laminate_means(1.0, 2.0, 0.5);

  double e11 = std::abs(m.entries(0, 0) - means.harmonic) / means.harmonic;
  double e22 = std::abs(m.entries(1, 1) - means.arithmetic) / means.arithmetic;
  double off = std::abs(m.entries(0, 1)) / m.entries.norm();
  double tol = 0.01 * s.tolerance_scale();
  c.require(e11 <= tol, "m11 = harmonic mean within 1%");
  c.require(e22 <= tol, "m22 = arithmetic mean within 1%");
  c.require(off <= 1e-6, "off-diagonal <= 1e-6 * |M|");
  c << "m=diag(" << fmt(m.entries(0, 0)) << "," << fmt(m.entries(1, 1))
    << ") expected (4/3,3/2), e11=" << fmt(e11) << " e22=" << fmt(e22)
    << " offdiag=" << fmt(off);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 3. Ground-state structure at eta = 0 and evenness on a fan.
CriterionResult criterion_3(const VerifySettings& s) {
  CriterionResult r{3, "ground-state structure: lambda1(0), gradient, evenness",
                    false, "", 0.0};
  Check c;
  double h = s.fast ? 0.08 : 0.04;
  CellDescriptor cell = disk_cell();
  CoefficientField field = cell.make_field();
  Mesh mesh = generate_cell_mesh(cell.geometry, h);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);

  double scale = 0.0;
  for (int k = 0; k < forms.stiffness.outerSize(); ++k)
    for (SpMat::InnerIterator it(forms.stiffness, k); it; ++it)
      if (it.row() == it.col()) scale += it.value();
  scale /= forms.stiffness.rows();

  double lambda0 = solve_ground_state(forms, Vec2::Zero()).lambda1;
  c.require(std::abs(lambda0) <= 1e-10 * scale, "lambda1(0) vanishes");

  double t = 0.01;
  double grad = 0.0;
  for (int k = 0; k < 2; ++k) {
    Vec2 e = k == 0 ? Vec2::UnitX() : Vec2::UnitY();
    double lp = solve_ground_state(forms, t * e).lambda1;
    double lm = solve_ground_state(forms, -t * e).lambda1;
    grad = std::max(grad, std::abs(lp - lm) / (2.0 * t));
  }
  c.require(grad <= 1e-6, "central-difference gradient <= 1e-6");

  double evenness = 0.0;
  int fan = 16;
  for (int i = 0; i < fan; ++i) {
    double a = 2.0 * M_PI * i / fan;
    Vec2 eta = 0.3 * Vec2(std::cos(a), std::sin(a));
    double lp = solve_ground_state(forms, eta).lambda1;
    double lm = solve_ground_state(forms, -eta).lambda1;
    evenness = std::max(evenness,
                        std::abs(lp - lm) / (1e-9 * std::max(1.0, std::abs(lp))));
  }
  c.require(evenness <= 1.0, "evenness within 1e-9 on the 16-point fan");
  c << "lambda0=" << fmt(lambda0) << " grad=" << fmt(grad)
    << " evenness_ratio=" << fmt(evenness);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 4. First-derivative eigenvector identity.
CriterionResult criterion_4(const VerifySettings& s) {
  CriterionResult r{4, "eigenvector derivative identity (order t^2)", false, "",
                    0.0};
  Check c;
  double h = s.fast ? 0.06 : 0.03;
  CellDescriptor cell = disk_cell();
  CoefficientField field = cell.make_field();
  Mesh mesh = generate_cell_mesh(cell.geometry, h);
  CellWorkspace ws(field, mesh);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);

  std::vector<double> steps = {0.04, 0.02, 0.01};
  EigvecDerivativeReport rep =
      eigvec_first_derivative_check(forms, ws, 0, steps, 1e-13);
  double ratio1 = rep.l2_error[0] / rep.l2_error[1];
  double ratio2 = rep.l2_error[1] / rep.l2_error[2];
  double max_real = *std::max_element(rep.real_part_norm.begin(),
                                      rep.real_part_norm.end());
  c.require(ratio1 >= 3.0 && ratio1 <= 5.0, "error ratio (t=0.04/0.02) in [3,5]");
  c.require(ratio2 >= 3.0 && ratio2 <= 5.0, "error ratio (t=0.02/0.01) in [3,5]");
  c.require(max_real <= 1e-6, "real part <= 1e-6");
  c << "errors=" << fmt(rep.l2_error[0]) << "/" << fmt(rep.l2_error[1]) << "/"
    << fmt(rep.l2_error[2]) << " ratios=" << fmt(ratio1) << "," << fmt(ratio2)
    << " max_real=" << fmt(max_real);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 5. Burnett quartic: non-positive, oracle agreement, isotropy.
CriterionResult criterion_5(const VerifySettings& s) {
  CriterionResult r{5, "Burnett form: sign, oracle agreement, isotropy", false,
                    "", 0.0};
  Check c;
  double h = s.fast ? 0.06 : 0.02;
  CellDescriptor cell = disk_cell();
  CoefficientField field = cell.make_field();
  Mesh mesh = generate_cell_mesh(cell.geometry, h);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);
  CellSpace space = make_cell_space(mesh, CellRegime::ConstantTrace);
  AssembledForms forms = assemble(field, mesh, space);

  auto rows = dispersion_fan(ws, forms, m.entries, 16);
  double d_scale = 0.0;
  for (const auto& row : rows) d_scale = std::max(d_scale, std::abs(row.d_value));
  double worst_sign = 0.0, worst_gap = 0.0;
  for (const auto& row : rows) {
    worst_sign = std::max(worst_sign, row.d_value);
    worst_gap = std::max(worst_gap, row.relative_gap);
  }
  double d_e1 = burnett_quartic(ws, Vec2::UnitX(), m.entries);
  double d_e2 = burnett_quartic(ws, Vec2::UnitY(), m.entries);
  double iso = std::abs(d_e1 - d_e2) / std::abs(d_e1);

  c.require(worst_sign <= 1e-10 * d_scale, "d(eta) <= 0 on the fan");
  c.require(worst_gap <= 0.02 * s.tolerance_scale(),
            "fd quartic oracle within 2%");
  c.require(iso <= 0.01 * s.tolerance_scale(), "disk isotropy d(e1)=d(e2)");
  c << "d(e1)=" << fmt(d_e1) << " max_gap=" << fmt(worst_gap)
    << " iso=" << fmt(iso);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 6. Equivalence (overdetermination) flux test with negative control.
CriterionResult criterion_6(const VerifySettings& s) {
  CriterionResult r{6, "equivalence flux test + negative control", false, "",
                    0.0};
  Check c;
  std::vector<double> hs = s.fast ? std::vector<double>{0.08, 0.04}
                                  : std::vector<double>{0.04, 0.02, 0.01};
  double gamma = hs_spherical_gamma(1.0, 2.0, 0.5, 2);
  CellDescriptor cell = disk_cell();
  CoefficientField field = cell.make_field();

  std::vector<double> rel_errors;
  double negative_control = 0.0;
  for (double h : hs) {
    Mesh mesh = generate_cell_mesh(cell.geometry, h);
    CellWorkspace ws(field, mesh);
    const CorrectorField& w = ws.coordinate_corrector(0);
    EquivalenceReport rep =
        equivalence_check(ws, w, gamma * Mat2::Identity());
    rel_errors.push_back(rep.relative_l2());
    if (h == hs.back()) {
      EquivalenceReport bad =
          equivalence_check(ws, w, 2.0 * Mat2::Identity());
      negative_control = bad.relative_l2();
    }
  }
  for (size_t i = 1; i < rel_errors.size(); ++i)
    c.require(rel_errors[i] < rel_errors[i - 1],
              "flux error decreases under mesh halving");
  c.require(rel_errors.back() <= 0.02 * s.tolerance_scale(),
            "flux error <= 2% at the finest mesh");
  c.require(negative_control >= 10.0 * rel_errors.back(),
            "negative control (M = beta I) stays 10x larger");
  c << "errors=";
  for (double e : rel_errors) c << fmt(e) << " ";
  c << "negative=" << fmt(negative_control);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 7. Elliptical cells: confocal sum relation.
CriterionResult criterion_7(const VerifySettings& s) {
  CriterionResult r{7, "confocal ellipse sum relation", false, "", 0.0};
  Check c;
  double h = s.fast ? 0.05 : 0.02;
  ConfocalEllipse geom{0.4, 1.0, {0.5, 0.0}};
  double alpha = 1.0, beta = 2.0;
  CoefficientField field = CoefficientField::two_phase(geom, alpha, beta);
  double theta = cell_volume_fraction(geom);
  Mesh mesh = generate_cell_mesh(geom, h);
  CellWorkspace ws(field, mesh);
  HomogenizedTensor m = homogenized_cell_integral(ws);

  std::vector<double> gamma_diag = {m.entries(0, 0), m.entries(1, 1)};
  double residual =
      hs_elliptical_residual(gamma_diag, alpha, beta, theta, 2);
  double rhs = ((1.0 - theta) * alpha + (2.0 + theta - 1.0) * beta) /
               (theta * beta * (beta - alpha));
  double rel = std::abs(residual) / rhs;
  c.require(rel <= 0.02 * s.tolerance_scale(), "sum-relation residual <= 2%");
  double off = std::abs(m.entries(0, 1)) / m.entries.norm();
  c.require(off <= 1e-6 * s.tolerance_scale() * 100.0,
            "tensor is diagonal");
  c << "theta=" << fmt(theta) << " gamma=(" << fmt(gamma_diag[0]) << ","
    << fmt(gamma_diag[1]) << ") residual/rhs=" << fmt(rel)
    << " offdiag=" << fmt(off);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 8. Bloch transform tends to the Fourier transform.
CriterionResult criterion_8(const VerifySettings& s) {
  CriterionResult r{8, "Bloch -> Fourier limit over covering refinements", false,
                    "", 0.0};
  Check c;
  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.3, 1.0);
  CellDescriptor cell = disk_cell();
  CoefficientField field = cell.make_field();
  double gamma = hs_spherical_gamma(1.0, 2.0, 0.5, 2);
  Mat2 background = gamma * Mat2::Identity();

  std::vector<VitaliCovering> coverings;
  std::vector<std::unique_ptr<MicroField>> micros;
  std::vector<const MicroField*> level_ptr;
  for (const auto& spec : standard_levels(s.fast)) {
    coverings.push_back(generate_disk_covering(unit_domain(), spec.eps_max,
                                               spec.eps_min,
                                               spec.residual_target, spec.seed,
                                               spec.grid_n));
    micros.push_back(
        std::make_unique<MicroField>(coverings.back(), field, background));
    level_ptr.push_back(micros.back().get());
  }

  std::vector<Vec2> xi;
  xi.emplace_back(0.0, 0.0);
  for (int ring = 1; ring <= 4; ++ring)
    for (int a = 0; a < 8; ++a) {
      double ang = 2.0 * M_PI * a / 8.0;
      xi.emplace_back(ring * std::cos(ang), ring * std::sin(ang));
    }

  BlochOptions opt;
  opt.cell_mesh_h = s.fast ? 0.1 : 0.06;
  auto rows = fourier_limit_check(g, level_ptr, xi, opt);

  std::vector<Complex> f_ref = reference_transform(g, xi);
  double f_max = 0.0;
  for (const auto& v : f_ref) f_max = std::max(f_max, std::abs(v));

  for (size_t i = 1; i < rows.size(); ++i)
    c.require(rows[i].max_error <= 1.1 * rows[i - 1].max_error,
              "errors decreasing across levels (10% slack)");
  c.require(rows.back().max_error <= rows.front().max_error,
            "overall decrease");
  c.require(rows.back().max_error <= 0.05 * s.tolerance_scale() * f_max,
            "final error <= 5% of max |F g|");
  for (const auto& row : rows)
    c.require(row.bound_ratio <= 2.0, "proof-bound ratio bounded (<= 2)");
  c << "errors=";
  for (const auto& row : rows) c << fmt(row.max_error) << " ";
  c << "ratios=";
  for (const auto& row : rows) c << fmt(row.bound_ratio) << " ";
  c << "maxF=" << fmt(f_max);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 9. Bessel bound stability across refinements.
CriterionResult criterion_9(const VerifySettings& s) {
  CriterionResult r{9, "Bessel constant stable across covering levels", false,
                    "", 0.0};
  Check c;
  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.42, 1.0);
  CellDescriptor cell = disk_cell();
  CoefficientField field = cell.make_field();
  double gamma = hs_spherical_gamma(1.0, 2.0, 0.5, 2);
  Mat2 background = gamma * Mat2::Identity();

  // The dual-cell radius is configured wide enough that the coarsest level
  // already sees most of the spectral mass of g; the ground state stays
  // simple with a healthy boundary normalization out to these momenta.
  BlochOptions opt;
  opt.cell_mesh_h = s.fast ? 0.1 : 0.06;
  opt.eta_cache_max = 1.25;
  double dual_radius = 1.2;
  std::vector<double> constants;
  for (const auto& spec : standard_levels(s.fast)) {
    VitaliCovering cov =
        generate_disk_covering(unit_domain(), spec.eps_max, spec.eps_min,
                               spec.residual_target, spec.seed, spec.grid_n);
    MicroField micro(cov, field, background);
    BlochEngine engine(micro, opt);
    constants.push_back(
        engine.bessel_constant(g, dual_radius, s.fast ? 13 : 25));
  }
  double cmin = *std::min_element(constants.begin(), constants.end());
  double cmax = *std::max_element(constants.begin(), constants.end());
  c.require(cmax <= 2.0 * cmin, "constants within a factor 2");
  c << "constants=";
  for (double v : constants) c << fmt(v) << " ";
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 10. Lemma A2 weak-average bound and decay.
CriterionResult criterion_10(const VerifySettings& s) {
  CriterionResult r{10, "covering weak-average (Lemma A2) bound", false, "", 0.0};
  Check c;
  // Two-phase indicator on the cell, non-radial so the Riemann-sum error is
  // genuinely visible: f = 1 on the half-disk y1 > 0.
  CellFunction f;
  f.f = [](const Vec2& y) { return y.x() > 0.0 ? 1.0 : 0.0; };
  f.angular_splits = {0.5 * M_PI, 1.5 * M_PI};
  f.mean = 0.5;
  f.abs_mean = 0.5;

  struct TestFn {
    std::function<double(const Vec2&)> phi;
    double lipschitz;
  };
  std::vector<TestFn> tests = {
      {[](const Vec2& x) { return x.x(); }, 1.0},
      {[](const Vec2& x) { return x.y(); }, 1.0},
      {[](const Vec2& x) { return x.x() + x.y() - 1.0; }, std::sqrt(2.0)}};
  std::vector<std::function<double(const Vec2&)>> phis;
  for (auto& t : tests) phis.push_back(t.phi);

  double cell_ratio = 1.0 / M_PI;  // |Omega| / |omega|
  std::vector<double> level_max;
  for (const auto& spec : standard_levels(s.fast)) {
    VitaliCovering cov =
        generate_disk_covering(unit_domain(), spec.eps_max, spec.eps_min,
                               spec.residual_target, spec.seed, spec.grid_n);
    auto errors = weak_average_errors(f, cov, phis);
    double worst = 0.0;
    for (size_t j = 0; j < tests.size(); ++j) {
      double bound = cell_ratio * f.abs_mean * tests[j].lipschitz * cov.kappa;
      c.require(errors[j] <= bound, "error within the Lemma A2 bound");
      worst = std::max(worst, errors[j]);
    }
    level_max.push_back(worst);
  }
  for (size_t i = 1; i < level_max.size(); ++i)
    c.require(level_max[i] < level_max[i - 1], "error decreasing across levels");
  c << "errors=";
  for (double e : level_max) c << fmt(e) << " ";
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 11. Homogenization theorem by direct simulation.
CriterionResult criterion_11(const VerifySettings& s) {
  CriterionResult r{11, "homogenization theorem: DNS convergence study", false,
                    "", 0.0};
  Check c;
  CellDescriptor cell = disk_cell();
  CoefficientField field = cell.make_field();
  double gamma = hs_spherical_gamma(1.0, 2.0, 0.5, 2);
  Mat2 background = gamma * Mat2::Identity();

  std::vector<LevelSpec> specs;
  int n_mesh;
  if (s.fast) {
    specs = {{0.2, 0.05, 0.23, 21, 512},
             {0.14, 0.035, 0.19, 22, 512},
             {0.1, 0.025, 0.17, 23, 512}};
    n_mesh = 512;  // h = eps_min/8 at the finest fast level (512 = 2^9)
  } else {
    specs = {{0.2, 0.025, 0.12, 21, 1024},
             {0.1, 0.0125, 0.10, 22, 1024},
             {0.05, 0.00196, 0.048, 23, 2048}};
    n_mesh = 4096;  // h = 1/4096 <= eps_min/8 at the finest level
  }

  std::vector<VitaliCovering> levels;
  for (const auto& spec : specs)
    levels.push_back(generate_disk_covering(unit_domain(), spec.eps_max,
                                            spec.eps_min, spec.residual_target,
                                            spec.seed, spec.grid_n));
  c.require(levels.back().residual_fraction <= 0.05,
            "residual <= 0.05 at the finest level");

  Mesh mesh = unit_square_mesh(n_mesh);
  auto rows = convergence_study(field, background, levels,
                                [](const Vec2&) { return 1.0; }, mesh);
  for (size_t i = 1; i < rows.size(); ++i) {
    c.require(rows[i].l2_error < rows[i - 1].l2_error,
              "L2 errors strictly decreasing");
    c.require(rows[i].flux_weak_error < rows[i - 1].flux_weak_error,
              "flux weak errors strictly decreasing");
  }
  c.require(rows.back().l2_error <= 0.10, "finest L2 error <= 10%");
  c << "l2=";
  for (const auto& row : rows) c << fmt(row.l2_error) << " ";
  c << "flux=";
  for (const auto& row : rows) c << fmt(row.flux_weak_error) << " ";
  c << "residuals=";
  for (const auto& row : rows) c << fmt(row.residual_fraction) << " ";
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

// 12. Covering invariants: disjointness, bookkeeping, determinism.
CriterionResult criterion_12(const VerifySettings& s) {
  CriterionResult r{12, "covering invariants and seeded determinism", false, "",
                    0.0};
  Check c;
  int grid = s.fast ? 256 : 1024;
  Rect dom = unit_domain();
  VitaliCovering cov = generate_disk_covering(dom, 0.2, 0.025, 0.1, 7, grid);

  double min_gap = 1e300;
  for (size_t p = 0; p < cov.cells.size(); ++p)
    for (size_t q = p + 1; q < cov.cells.size(); ++q) {
      double gap = (cov.cells[p].center - cov.cells[q].center).norm() -
                   cov.cells[p].eps - cov.cells[q].eps;
      min_gap = std::min(min_gap, gap);
    }
  c.require(min_gap > 0.0, "pairwise disjointness strict");
  bool inside = true;
  for (const auto& cell : cov.cells) {
    inside = inside && cell.center.x() - cell.eps >= dom.x0 &&
             cell.center.x() + cell.eps <= dom.x1 &&
             cell.center.y() - cell.eps >= dom.y0 &&
             cell.center.y() + cell.eps <= dom.y1;
  }
  c.require(inside, "every cell inside the domain");

  double bookkeeping = std::abs(cov.covered_area() +
                                cov.residual_fraction * dom.area() - dom.area());
  c.require(bookkeeping <= 1e-9, "measure bookkeeping <= 1e-9");

  VitaliCovering again = generate_disk_covering(dom, 0.2, 0.025, 0.1, 7, grid);
  std::string dump1 = covering_to_json(cov).dump();
  std::string dump2 = covering_to_json(again).dump();
  c.require(dump1 == dump2, "seeded determinism byte-identical");
  c << "cells=" << cov.cells.size() << " min_gap=" << fmt(min_gap)
    << " residual=" << fmt(cov.residual_fraction)
    << " bookkeeping=" << fmt(bookkeeping);
  r.pass = c.pass;
  r.detail = c.detail.str();
  return r;
}

using CriterionFn = CriterionResult (*)(const VerifySettings&);
const CriterionFn kCriteria[] = {
    criterion_1, criterion_2, criterion_3,  criterion_4,  criterion_5,
    criterion_6, criterion_7, criterion_8,  criterion_9,  criterion_10,
    criterion_11, criterion_12};

const char* kCriterionNames[] = {
    "spherical-inclusion homogenization (both routes)",
    "laminate diag(harmonic, arithmetic) means",
    "ground-state structure: lambda1(0), gradient, evenness",
    "eigenvector derivative identity (order t^2)",
    "Burnett form: sign, oracle agreement, isotropy",
    "equivalence flux test + negative control",
    "confocal ellipse sum relation",
    "Bloch -> Fourier limit over covering refinements",
    "Bessel constant stable across covering levels",
    "covering weak-average (Lemma A2) bound",
    "homogenization theorem: DNS convergence study",
    "covering invariants and seeded determinism"};

const double kRuntimeLimit[] = {60.0,  30.0,  120.0, 120.0, 120.0, 120.0,
                                120.0, 120.0, 120.0, 120.0, 300.0, 60.0};

}  // namespace

int criterion_count() { return 12; }

CriterionResult run_criterion(int id, const VerifySettings& settings) {
  if (id < 1 || id > criterion_count())
    throw ArgumentError("unknown criterion id");
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = kCriteria[id - 1](settings);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.id = id;
  r.name = kCriterionNames[id - 1];
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double limit = kRuntimeLimit[id - 1];
  if (r.seconds > limit) {
    r.pass = false;
    r.detail += " [FAILED runtime " + fmt(r.seconds) + "s > " + fmt(limit) + "s]";
  }
  return r;
}

std::vector<CriterionResult> run_all_criteria(const VerifySettings& settings) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= criterion_count(); ++id)
    out.push_back(run_criterion(id, settings));
  return out;
}

}  // namespace bhs
