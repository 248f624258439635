#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "fraclab/grid.hpp"

using namespace fraclab;

TEST_CASE("uniform grid cell layout") {
  const Grid g = build_grid(1, 2.0, 4);
  const auto cells = detail::make_cells(g);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].center[0] == Catch::Approx(-1.5));
  CHECK(cells[1].center[0] == Catch::Approx(-0.5));
  CHECK(cells[2].center[0] == Catch::Approx(0.5));
  CHECK(cells[3].center[0] == Catch::Approx(1.5));
  CHECK(g.spacing() == Catch::Approx(1.0));

  const Grid g2 = build_grid(2, 1.0, 2);
  CHECK(detail::make_cells(g2).size() == 4);
  CHECK(g2.spacing() == Catch::Approx(1.0));

  CHECK_THROWS_AS(build_grid(3, 1.0, 2), std::invalid_argument);
}

TEST_CASE("power cell integrals") {
  CHECK(power_cell_integral(0.0, Cube{{0.75, 0.0}, 0.5, 1}) == Catch::Approx(0.5));
  CHECK(power_cell_integral(-0.5, Cube{{0.5, 0.0}, 1.0, 1}) == Catch::Approx(2.0));

  // Against a fine log-radial refinement of [0, h].
  const double h = 0.25, a = -0.9;
  const double direct = power_cell_integral(a, Cube{{0.5 * h, 0.0}, h, 1});
  double refined = 0.0;
  const int panels = 20000;
  const double r0 = 1e-12;
  const double ratio = std::pow(h / r0, 1.0 / panels);
  refined += std::pow(r0, a + 1.0) / (a + 1.0);  // head, closed form
  double lo = r0;
  for (int i = 0; i < panels; ++i) {
    const double hi = lo * ratio;
    refined += power_cell_integral(a, Cube{{0.5 * (lo + hi), 0.0}, hi - lo, 1});
    lo = hi;
  }
  CHECK(refined == Catch::Approx(direct).epsilon(1e-6));
}

TEST_CASE("integration over regions") {
  const Mesh mesh{build_grid(1, 2.0, 256)};
  const GridFunction one = GridFunction::sample(mesh, [](const auto&) { return 1.0; });
  CHECK(integrate(one, Cube{{0.0, 0.0}, 2.0, 1}) == Catch::Approx(2.0));

  const Mesh coarse{build_grid(1, 2.0, 8)};
  const GridFunction c1 = GridFunction::sample(coarse, [](const auto&) { return 1.0; });
  CHECK(integrate(c1, Cube{{0.25, 0.0}, 0.5, 1}) == Catch::Approx(0.5));

  // |x|^{-1/2} sampled at cell centers on a log-radial mesh over [0,1].
  const Mesh radial{build_radial_grid(1e-12, 1.0, 4000, 1)};
  const GridFunction f = GridFunction::sample(radial, [](const std::array<double, 2>& x) {
    return std::pow(std::abs(x[0]), -0.5);
  });
  CHECK(integrate(f, Cube{{0.5, 0.0}, 1.0, 1}) == Catch::Approx(2.0).margin(1e-3));
}

TEST_CASE("cube family counts") {
  const Mesh m1{build_grid(1, 1.0, 4)};
  CHECK(enumerate_cubes(m1, FamilyKind::Dyadic).members.size() == 7);
  CHECK(enumerate_cubes(m1, FamilyKind::AllGridIntervals).members.size() == 10);

  const Mesh m2{build_grid(2, 1.0, 4)};
  CHECK(enumerate_cubes(m2, FamilyKind::Dyadic).members.size() == 21);
}

TEST_CASE("dyadic additivity of integration") {
  const Mesh mesh{build_grid(2, 1.0, 8)};
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ud(0.1, 2.0);
  GridFunction f(mesh);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = ud(rng);

  const Cube parent{{0.5, 0.5}, 1.0, 2};
  double children = 0.0;
  for (double sx : {-0.25, 0.25})
    for (double sy : {-0.25, 0.25})
      children += integrate(f, Cube{{0.5 + sx, 0.5 + sy}, 0.5, 2});
  CHECK(integrate(f, parent) == Catch::Approx(children).epsilon(1e-14));
}

TEST_CASE("grid function file round trip") {
  const Mesh mesh{build_grid(1, 2.0, 16)};
  const GridFunction f = GridFunction::sample(mesh, [](const std::array<double, 2>& x) {
    return std::sin(3.0 * x[0]) + 2.0;
  });
  std::stringstream ss;
  save_grid_function(f, ss);
  const GridFunction g = load_grid_function(ss);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == f[i]);

  const Mesh radial{build_radial_grid(1e-6, 1.0, 32, 1)};
  const GridFunction r = GridFunction::sample(radial, [](const std::array<double, 2>& x) {
    return std::abs(x[0]) + 1.0;
  });
  std::stringstream sr;
  save_grid_function(r, sr);
  const GridFunction r2 = load_grid_function(sr);
  REQUIRE(r2.size() == r.size());
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r2[i] == r[i]);
}

TEST_CASE("family name parsing") {
  CHECK(family_from_name("dyadic") == FamilyKind::Dyadic);
  CHECK(family_from_name("thirds") == FamilyKind::ShiftedDyadicThirds);
  CHECK(family_from_name("all-intervals") == FamilyKind::AllGridIntervals);
  CHECK_THROWS_AS(family_from_name("bogus"), std::invalid_argument);
}
