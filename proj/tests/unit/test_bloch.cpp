#include <doctest.h>

#include "bhs/bloch.hpp"

using namespace bhs;

namespace {

CoefficientField disk_field() {
  return CoefficientField::two_phase(DiskInclusion{std::sqrt(0.5)}, 1.0, 2.0);
}

Mat2 disk_background() {
  return hs_spherical_gamma(1.0, 2.0, 0.5, 2) * Mat2::Identity();
}

MicroField small_micro(double eps_max = 0.2, double residual = 0.15,
                       std::uint64_t seed = 4) {
  VitaliCovering cov = generate_disk_covering(Rect{0, 0, 1, 1}, eps_max,
                                              eps_max / 6.0, residual, seed, 384);
  return MicroField(cov, disk_field(), disk_background());
}

BlochOptions coarse_options() {
  BlochOptions opt;
  opt.cell_mesh_h = 0.12;
  opt.eta_grid_n = 7;
  return opt;
}

}  // namespace

TEST_SUITE_BEGIN("bloch");

TEST_CASE("disk rule integrates area, moments and phase jumps") {
  CellRule rule = disk_cell_rule({0.7}, {}, 8, 24);
  double area = 0.0, moment = 0.0, core = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    area += rule.weights[q];
    moment += rule.weights[q] * rule.points[q].x() * rule.points[q].x();
    if (rule.points[q].norm() <= 0.7) core += rule.weights[q];
  }
  CHECK(area == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(moment == doctest::Approx(M_PI / 4.0).epsilon(1e-10));
  CHECK(core == doctest::Approx(M_PI * 0.49).epsilon(1e-10));
}

TEST_CASE("smooth bump has the stated support and positive norms") {
  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.3, 1.0);
  CHECK(g.f(Vec2(0.5, 0.5)) == doctest::Approx(1.0));
  CHECK(g.f(Vec2(0.81, 0.5)) == 0.0);
  CHECK(g.l2_norm > 0.0);
  CHECK(g.l1_norm > 0.0);
}

TEST_CASE("reference transform: zero frequency and linearity") {
  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.3, 1.0);
  auto f0 = reference_transform(g, {Vec2::Zero()});
  CHECK(std::abs(f0[0].imag()) < 1e-12);
  CHECK(f0[0].real() ==
        doctest::Approx(std::pow(M_PI, -0.5) * g.l1_norm).epsilon(1e-6));

  ScalarField g2 = g;
  g2.f = [base = g.f](const Vec2& x) { return 2.0 * base(x); };
  auto f2 = reference_transform(g2, {Vec2(1.0, -2.0)});
  auto f1 = reference_transform(g, {Vec2(1.0, -2.0)});
  CHECK(std::abs(f2[0] - 2.0 * f1[0]) < 1e-12 * std::abs(f1[0]) + 1e-15);
}

TEST_CASE("reference transform agrees with a dense midpoint oracle") {
  // band-limited g on its support square
  ScalarField g;
  g.support = Rect{0.2, 0.2, 0.8, 0.8};
  g.wavenumber = 4.0 * M_PI / 0.6;
  g.f = [](const Vec2& x) {
    if (x.x() < 0.2 || x.x() > 0.8 || x.y() < 0.2 || x.y() > 0.8) return 0.0;
    double sx = std::sin(M_PI * (x.x() - 0.2) / 0.6);
    double sy = std::sin(2.0 * M_PI * (x.y() - 0.2) / 0.6);
    return sx * sx * sy;
  };
  g.l2_norm = 1.0;
  std::vector<Vec2> xi = {Vec2(0.0, 0.0), Vec2(2.0, 1.0), Vec2(-3.0, 4.0)};
  auto fast = reference_transform(g, xi);
  // independent oracle: dense midpoint rule
  int n = 1024;
  double hx = 0.6 / n;
  for (size_t t = 0; t < xi.size(); ++t) {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Vec2 x(0.2 + (i + 0.5) * hx, 0.2 + (j + 0.5) * hx);
        double phase = -x.dot(xi[t]);
        acc += hx * hx * g.f(x) * Complex(std::cos(phase), std::sin(phase));
      }
    acc *= std::pow(M_PI, -0.5);
    CHECK(std::abs(fast[t] - acc) < 1e-6);
  }
}

TEST_CASE("single-cell transform at xi = 0 against a local quadrature") {
  VitaliCovering cov;
  cov.domain = Rect{0, 0, 1, 1};
  cov.kind = CoveringKind::DiskPack;
  cov.cells = {{Vec2(0.45, 0.55), 0.18}};
  cov.kappa = 0.18;
  cov.reference_cell_area = M_PI;
  cov.residual_fraction = 1.0 - M_PI * 0.18 * 0.18;
  MicroField micro(cov, disk_field(), disk_background());
  BlochEngine engine(micro, coarse_options());

  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.3, 1.0);
  auto b = engine.transform(g, {Vec2::Zero()}, BlochMode::Exact);

  // oracle: phi(.;0) = |omega|^{-1/2}, so B(0) = |omega|^{-1/2} int_cell g
  CellRule rule = disk_cell_rule({std::sqrt(0.5)}, {}, 20, 48);
  double integral = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q)
    integral += rule.weights[q] * g.f(cov.cells[0].center +
                                      cov.cells[0].eps * rule.points[q]);
  integral *= 0.18 * 0.18;
  Complex expected(std::pow(engine.discrete_cell_area(), -0.5) * integral, 0.0);
  CHECK(std::abs(b.values[0] - expected) < 1e-6 * std::abs(expected));
}

TEST_CASE("transform is linear in g and vanishes for g = 0") {
  MicroField micro = small_micro();
  BlochEngine engine(micro, coarse_options());
  ScalarField zero;
  zero.f = [](const Vec2&) { return 0.0; };
  zero.support = Rect{0, 0, 1, 1};
  zero.wavenumber = 1.0;
  auto b0 = engine.transform(zero, {Vec2(1.0, 0.5)}, BlochMode::Exact);
  CHECK(std::abs(b0.values[0]) == 0.0);

  ScalarField g1 = make_smooth_bump(Vec2(0.45, 0.5), 0.25, 1.0);
  ScalarField g2 = make_smooth_bump(Vec2(0.55, 0.5), 0.3, 0.7);
  // pin one wavenumber so all three transforms share the same quadrature
  g2.wavenumber = g1.wavenumber;
  ScalarField sum;
  sum.support = Rect{0.15, 0.2, 0.85, 0.85};
  sum.wavenumber = g1.wavenumber;
  sum.f = [f1 = g1.f, f2 = g2.f](const Vec2& x) { return f1(x) + f2(x); };
  std::vector<Vec2> xi = {Vec2(0.7, -1.3)};
  auto bs = engine.transform(sum, xi, BlochMode::Exact);
  auto b1 = engine.transform(g1, xi, BlochMode::Exact);
  auto b2 = engine.transform(g2, xi, BlochMode::Exact);
  CHECK(std::abs(bs.values[0] - b1.values[0] - b2.values[0]) <
        1e-10 * (std::abs(b1.values[0]) + std::abs(b2.values[0])));
}

TEST_CASE("conjugation symmetry for real g") {
  MicroField micro = small_micro();
  BlochEngine engine(micro, coarse_options());
  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.3, 1.0);
  std::vector<Vec2> xi = {Vec2(1.2, 0.7), Vec2(-1.2, -0.7)};
  auto b = engine.transform(g, xi, BlochMode::Exact);
  CHECK(std::abs(b.values[1] - std::conj(b.values[0])) <
        1e-7 * std::abs(b.values[0]));
}

TEST_CASE("xi admissibility is enforced") {
  MicroField micro = small_micro();
  BlochEngine engine(micro, coarse_options());
  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.3, 1.0);
  double bad = engine.admissible_xi_radius() * 1.05;
  CHECK_THROWS_AS(engine.transform(g, {Vec2(bad, 0.0)}, BlochMode::Exact),
                  ArgumentError);
}

TEST_CASE("taylor1 tracks the exact mode at second order in kappa |xi|") {
  MicroField micro = small_micro();
  BlochEngine engine(micro, coarse_options());
  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.3, 1.0);
  // compare the modes at two frequency radii: the gap must shrink ~ 4x
  std::vector<Vec2> xi1 = {Vec2(2.0, 0.0)};
  std::vector<Vec2> xi2 = {Vec2(1.0, 0.0)};
  double gap1 = std::abs(engine.transform(g, xi1, BlochMode::Exact).values[0] -
                         engine.transform(g, xi1, BlochMode::Taylor1).values[0]);
  double gap2 = std::abs(engine.transform(g, xi2, BlochMode::Exact).values[0] -
                         engine.transform(g, xi2, BlochMode::Taylor1).values[0]);
  double kappa_xi1 = micro.covering().kappa * 2.0;
  CHECK(gap1 / (kappa_xi1 * kappa_xi1) < 1.0 * g.l2_norm);  // measured C
  CHECK(gap2 < 0.5 * gap1);
}

TEST_CASE("bessel constant: homogeneity in g") {
  MicroField micro = small_micro();
  BlochEngine engine(micro, coarse_options());
  ScalarField g = make_smooth_bump(Vec2(0.5, 0.5), 0.35, 1.0);
  ScalarField g2 = make_smooth_bump(Vec2(0.5, 0.5), 0.35, 2.0);
  double c1 = engine.bessel_constant(g, 0.5, 9);
  double c2 = engine.bessel_constant(g2, 0.5, 9);
  CHECK(c1 > 0.0);
  CHECK(c2 == doctest::Approx(c1).epsilon(1e-9));  // ratio test: scale-free
}

TEST_CASE("weak average: radial f cancels, half-disk f obeys the bound") {
  VitaliCovering cov = generate_disk_covering(Rect{0, 0, 1, 1}, 0.2, 0.03,
                                              0.12, 5, 384);
  std::vector<std::function<double(const Vec2&)>> tests = {
      [](const Vec2& x) { return x.x(); },
      [](const Vec2& x) { return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()); }};

  CellFunction radial;
  radial.f = [](const Vec2& y) { return y.norm() <= 0.7 ? 1.0 : 2.0; };
  radial.radial_splits = {0.7};
  radial.mean = 0.49 * 1.0 + 0.51 * 2.0;
  radial.abs_mean = radial.mean;
  auto re = weak_average_errors(radial, cov, tests);
  CHECK(re[0] < 1e-12);  // linear phi: exact per-cell cancellation

  CellFunction half;
  half.f = [](const Vec2& y) { return y.x() > 0.0 ? 1.0 : 0.0; };
  half.angular_splits = {0.5 * M_PI, 1.5 * M_PI};
  half.mean = 0.5;
  half.abs_mean = 0.5;
  auto he = weak_average_errors(half, cov, tests);
  double bound = (1.0 / M_PI) * half.abs_mean * 1.0 * cov.kappa;
  CHECK(he[0] > 1e-8);  // genuinely nonzero
  CHECK(he[0] <= bound);
}

TEST_CASE("weak average errors decrease under covering refinement") {
  CellFunction half;
  half.f = [](const Vec2& y) { return y.x() > 0.0 ? 1.0 : 0.0; };
  half.angular_splits = {0.5 * M_PI, 1.5 * M_PI};
  half.mean = 0.5;
  half.abs_mean = 0.5;
  std::vector<std::function<double(const Vec2&)>> tests = {
      [](const Vec2& x) { return x.x(); }};
  double prev = 1e300;
  for (double eps : {0.2, 0.1, 0.05}) {
    VitaliCovering cov = generate_disk_covering(Rect{0, 0, 1, 1}, eps, eps / 6.0,
                                                0.1, 6, 384);
    auto e = weak_average_errors(half, cov, tests);
    CHECK(e[0] < prev);
    prev = e[0];
  }
}

TEST_SUITE_END();
