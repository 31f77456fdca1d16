#include <doctest.h>

#include <random>

#include "bhs/geometry.hpp"

using namespace bhs;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("material bounds validation") {
  CHECK_THROWS_AS(MaterialBounds(0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(MaterialBounds(2.0, 1.0), ArgumentError);
  CHECK_NOTHROW(MaterialBounds(1.0, 1.0));
}

TEST_CASE("coefficient evaluation on the disk cell") {
  CoefficientField f = CoefficientField::two_phase(DiskInclusion{0.7}, 1.0, 2.0);
  CHECK(evaluate_coefficient(f, Vec2(0.0, 0.0)) == Mat2(Mat2::Identity()));
  CHECK(evaluate_coefficient(f, Vec2(0.9, 0.0)) == Mat2(2.0 * Mat2::Identity()));
  // interface point: core-wins
  CHECK(evaluate_coefficient(f, Vec2(0.7, 0.0))(0, 0) == 1.0);
  CHECK_THROWS_AS(evaluate_coefficient(f, Vec2(1.5, 0.0)), DomainError);
}

TEST_CASE("coefficient evaluation on the laminate cell") {
  CoefficientField f =
      CoefficientField::two_phase(LaminateCell{0.5, 0}, 1.0, 2.0);
  CHECK(evaluate_coefficient(f, Vec2(0.2, 0.9))(0, 0) == 1.0);
  CHECK(evaluate_coefficient(f, Vec2(0.8, 0.0))(0, 0) == 2.0);
}

TEST_CASE("sampled coefficients stay within the ellipticity class") {
  std::vector<CoefficientField> fields = {
      CoefficientField::two_phase(DiskInclusion{0.6}, 1.0, 2.0),
      CoefficientField::two_phase(LaminateCell{0.3, 1}, 0.5, 3.0),
      CoefficientField::two_phase(ConfocalEllipse{0.4, 1.0, {0.5, 0.0}}, 1.0,
                                  2.0)};
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& f : fields) {
    int checked = 0;
    while (checked < 1000000) {
      Vec2 y(u(rng), u(rng));
      if (!cell_contains(f.geometry, y, 0.0)) continue;
      ++checked;
      Mat2 a = f.phase[static_cast<size_t>(region_of(f.geometry, y))];
      REQUIRE(a(0, 1) == a(1, 0));
      double lo = std::min(a(0, 0), a(1, 1));
      double hi = std::max(a(0, 0), a(1, 1));
      REQUIRE(lo >= f.bounds.alpha);
      REQUIRE(hi <= f.bounds.beta);
    }
  }
}

TEST_CASE("spherical gamma closed form") {
  CHECK(hs_spherical_gamma(1.0, 2.0, 0.5, 2) == doctest::Approx(10.0 / 7.0).epsilon(1e-14));
  CHECK(hs_spherical_gamma(3.0, 3.0, 0.3, 2) == doctest::Approx(3.0));
  CHECK(hs_spherical_gamma(1.0, 2.0, 0.999999, 2) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(hs_spherical_gamma(1.0, 2.0, 0.0, 2), ArgumentError);
  CHECK_THROWS_AS(hs_spherical_gamma(1.0, 2.0, 1.0, 2), ArgumentError);
}

TEST_CASE("spherical gamma monotone in theta") {
  double prev_up = hs_spherical_gamma(2.0, 1.0, 0.05, 2);
  double prev_down = hs_spherical_gamma(1.0, 2.0, 0.05, 2);
  for (double theta = 0.1; theta < 1.0; theta += 0.05) {
    double up = hs_spherical_gamma(2.0, 1.0, theta, 2);
    double down = hs_spherical_gamma(1.0, 2.0, theta, 2);
    CHECK(up > prev_up);     // alpha > beta: increasing
    CHECK(down < prev_down); // alpha < beta: decreasing
    prev_up = up;
    prev_down = down;
  }
}

TEST_CASE("laminate means") {
  LaminateMeans m = laminate_means(1.0, 2.0, 0.5);
  CHECK(m.harmonic == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(m.arithmetic == doctest::Approx(1.5).epsilon(1e-14));
  LaminateMeans same = laminate_means(2.5, 2.5, 0.7);
  CHECK(same.harmonic == doctest::Approx(2.5));
  CHECK(same.arithmetic == doctest::Approx(2.5));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::uniform_real_distribution<double> t(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng), theta = t(rng);
    LaminateMeans mm = laminate_means(a, b, theta);
    CHECK(mm.harmonic <= mm.arithmetic + 1e-14);
    if (std::abs(a - b) > 1e-3) CHECK(mm.harmonic < mm.arithmetic);
  }
}

TEST_CASE("elliptical residual argument validation") {
  CHECK_THROWS_AS(hs_elliptical_residual({1.5, 1.5}, 2.0, 2.0, 0.5, 2),
                  ArgumentError);
  CHECK_THROWS_AS(hs_elliptical_residual({2.0, 1.5}, 1.0, 2.0, 0.5, 2),
                  ArgumentError);
}

TEST_CASE("elliptical residual degenerates to the spherical relation") {
  // Concentric circles are the zero-offset confocal family; the diagonal
  // tensor gamma I must satisfy the sum relation exactly.
  for (double theta : {0.2, 0.5, 0.8}) {
    double gamma = hs_spherical_gamma(1.0, 2.0, theta, 2);
    double res = hs_elliptical_residual({gamma, gamma}, 1.0, 2.0, theta, 2);
    CHECK(std::abs(res) < 1e-12);
  }
}

TEST_CASE("confocal rho recovers the level of on-ellipse points") {
  std::array<double, 2> m{0.5, 0.0};
  for (double rho : {0.1, 0.4, 1.0}) {
    for (double th = 0.1; th < 6.2; th += 0.7) {
      Vec2 y(std::sqrt(rho + m[0]) * std::cos(th),
             std::sqrt(rho + m[1]) * std::sin(th));
      CHECK(confocal_rho(m, y) == doctest::Approx(rho).epsilon(1e-10));
    }
  }
}

TEST_CASE("cell volume fractions") {
  CHECK(cell_volume_fraction(DiskInclusion{std::sqrt(0.5)}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cell_volume_fraction(LaminateCell{0.5, 0}) == doctest::Approx(0.5));
  double theta = cell_volume_fraction(ConfocalEllipse{0.4, 1.0, {0.5, 0.0}});
  CHECK(theta == doctest::Approx(std::sqrt(0.24)).epsilon(1e-12));
}

TEST_SUITE_END();
