#include <doctest.h>

#include <random>

#include "bhs/covering.hpp"
#include "bhs/io.hpp"

using namespace bhs;

TEST_SUITE_BEGIN("covering");

TEST_CASE("greedy disk covering meets its contract") {
  Rect dom{0.0, 0.0, 1.0, 1.0};
  VitaliCovering cov = generate_disk_covering(dom, 0.25, 0.02, 0.1, 5, 512);
  CHECK(!cov.target_missed);
  CHECK(cov.residual_fraction <= 0.1);
  CHECK(cov.kappa <= 0.25);

  // pairwise disjoint, strictly inside
  for (size_t p = 0; p < cov.cells.size(); ++p) {
    const auto& a = cov.cells[p];
    CHECK(a.eps >= 0.02 * (1.0 - 1e-9));
    CHECK(a.center.x() - a.eps >= dom.x0);
    CHECK(a.center.x() + a.eps <= dom.x1);
    CHECK(a.center.y() - a.eps >= dom.y0);
    CHECK(a.center.y() + a.eps <= dom.y1);
    for (size_t q = p + 1; q < cov.cells.size(); ++q) {
      const auto& b = cov.cells[q];
      CHECK((a.center - b.center).norm() > a.eps + b.eps);
    }
  }
  // measure bookkeeping
  CHECK(std::abs(cov.covered_area() + cov.residual_fraction * dom.area() -
                 dom.area()) < 1e-9);
}

TEST_CASE("halving eps_max roughly halves kappa") {
  Rect dom{0.0, 0.0, 1.0, 1.0};
  VitaliCovering c1 = generate_disk_covering(dom, 0.2, 0.025, 0.12, 3, 512);
  VitaliCovering c2 = generate_disk_covering(dom, 0.1, 0.0125, 0.12, 3, 512);
  double ratio = c1.kappa / c2.kappa;
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
}

TEST_CASE("refinement sequence has strictly decreasing kappa") {
  Rect dom{0.0, 0.0, 1.0, 1.0};
  double prev = 1e9;
  for (double eps : {0.2, 0.1, 0.05}) {
    VitaliCovering cov =
        generate_disk_covering(dom, eps, eps / 8.0, 0.1, 9, 512);
    CHECK(cov.kappa < prev);
    prev = cov.kappa;
  }
}

TEST_CASE("unreachable residual target sets the flag") {
  Rect dom{0.0, 0.0, 1.0, 1.0};
  VitaliCovering cov = generate_disk_covering(dom, 0.3, 0.28, 0.05, 1, 256);
  CHECK(cov.target_missed);
  CHECK(cov.residual_fraction > 0.05);
}

TEST_CASE("seeded determinism is byte-identical; seeds vary the layout") {
  Rect dom{0.0, 0.0, 1.0, 1.0};
  VitaliCovering a = generate_disk_covering(dom, 0.2, 0.04, 0.15, 7, 256);
  VitaliCovering b = generate_disk_covering(dom, 0.2, 0.04, 0.15, 7, 256);
  CHECK(covering_to_json(a).dump() == covering_to_json(b).dump());
  VitaliCovering c = generate_disk_covering(dom, 0.2, 0.04, 0.15, 8, 256);
  CHECK(covering_to_json(a).dump() != covering_to_json(c).dump());
}

TEST_CASE("laminate bands tile and stay disjoint") {
  Rect dom{0.0, 0.0, 1.0, 1.0};
  std::vector<double> half_widths = {0.15, 0.1, 0.15, 0.1};  // sums to 1.0
  VitaliCovering cov = generate_laminate_covering(dom, 0, half_widths, 0);
  CHECK(cov.kind == CoveringKind::LaminateBands);
  for (size_t p = 0; p < cov.cells.size(); ++p)
    for (size_t q = p + 1; q < cov.cells.size(); ++q) {
      const auto& a = cov.cells[p];
      const auto& b = cov.cells[q];
      bool overlap =
          std::abs(a.center.x() - b.center.x()) < a.eps + b.eps - 1e-12 &&
          std::abs(a.center.y() - b.center.y()) < a.eps + b.eps - 1e-12;
      CHECK(!overlap);
    }
  CHECK(std::abs(cov.covered_area() + cov.residual_fraction * dom.area() -
                 dom.area()) < 1e-9);
  // equal widths tile the perpendicular direction exactly: residual 0
  VitaliCovering uniform =
      generate_laminate_covering(dom, 0, {0.25, 0.25}, 0);
  CHECK(uniform.residual_fraction < 1e-12);
  CHECK_THROWS_AS(generate_laminate_covering(dom, 0, {0.2, 0.2}, 0),
                  ArgumentError);
}

TEST_CASE("micro field evaluation: centers, residual, rescaling consistency") {
  Rect dom{0.0, 0.0, 1.0, 1.0};
  VitaliCovering cov = generate_disk_covering(dom, 0.2, 0.03, 0.12, 4, 512);
  CoefficientField cell =
      CoefficientField::two_phase(DiskInclusion{0.7}, 1.0, 2.0);
  Mat2 background = 1.4286 * Mat2::Identity();
  MicroField micro(cov, cell, background);

  for (const auto& c : cov.cells) {
    CHECK(micro.evaluate(c.center)(0, 0) == 1.0);  // cell center is core
  }

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int inside_checked = 0, residual_checked = 0;
  for (int i = 0; i < 100000; ++i) {
    Vec2 x(u(rng), u(rng));
    int p = micro.find_cell(x);
    Mat2 a = micro.evaluate(x);
    if (p < 0) {
      ++residual_checked;
      CHECK(a == background);
    } else {
      ++inside_checked;
      const auto& c = cov.cells[static_cast<size_t>(p)];
      Vec2 y = (x - c.center) / c.eps;
      CHECK(a == evaluate_coefficient(cell, y));
    }
  }
  CHECK(inside_checked > 0);
  CHECK(residual_checked > 0);
}

TEST_SUITE_END();
