#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fraclab/operators.hpp"

using namespace fraclab;

namespace {

GridFunction random_nonnegative(const Mesh& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.0, 2.0);
  GridFunction g(mesh);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = ud(rng);
  return g;
}

}  // namespace

TEST_CASE("riesz potential spot value") {
  // I_{1/2} chi_{[0,1]} at x = 2 has closed form 2(sqrt 2 - 1).
  const Mesh mesh{build_grid(1, 2.0, 4096)};
  const GridFunction f = GridFunction::sample(mesh, [](const std::array<double, 2>& x) {
    return (x[0] >= 0.0 && x[0] <= 1.0) ? 1.0 : 0.0;
  });
  const GridFunction pot = riesz_potential(f, 0.5);
  const double at_right_edge = pot[pot.size() - 1];
  CHECK(at_right_edge == Catch::Approx(2.0 * (std::sqrt(2.0) - 1.0)).margin(2e-3));
}

TEST_CASE("riesz potential linearity and positivity") {
  const Mesh mesh{build_grid(1, 2.0, 128)};
  std::mt19937_64 rng(5);
  const GridFunction f = random_nonnegative(mesh, rng);
  const GridFunction twice = f.map([](double v) { return 2.0 * v; });
  const GridFunction a = riesz_potential(f, 0.5);
  const GridFunction b = riesz_potential(twice, 0.5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i] == 2.0 * a[i]);
    CHECK(a[i] >= 0.0);
  }
}

TEST_CASE("fractional maximal spot value") {
  const Mesh mesh{build_grid(1, 2.0, 2048)};
  const GridFunction f = GridFunction::sample(mesh, [](const std::array<double, 2>& x) {
    return std::abs(x[0]) <= 1.0 ? 1.0 : 0.0;
  });
  const GridFunction m = fractional_maximal(f, 0.5, MaximalMode::UncenteredCube);
  // optimal interval at the origin is [-1,1]: |I|^{-1/2} * 2 = sqrt 2
  const std::size_t mid = m.size() / 2;
  CHECK(m[mid] == Catch::Approx(std::sqrt(2.0)).margin(2e-3));
}

TEST_CASE("maximal of the constant function is 1 in every mode") {
  const Mesh mesh{build_grid(1, 1.0, 64)};
  const GridFunction one = GridFunction::sample(mesh, [](const auto&) { return 1.0; });
  for (MaximalMode mode : {MaximalMode::UncenteredCube, MaximalMode::CenteredCube,
                           MaximalMode::CenteredBall, MaximalMode::Dyadic}) {
    const GridFunction m = fractional_maximal(one, 0.0, mode);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == Catch::Approx(1.0));
  }

  const Mesh mesh2{build_grid(2, 1.0, 16)};
  const GridFunction one2 = GridFunction::sample(mesh2, [](const auto&) { return 1.0; });
  for (MaximalMode mode : {MaximalMode::UncenteredCube, MaximalMode::CenteredCube,
                           MaximalMode::Dyadic}) {
    const GridFunction m = fractional_maximal(one2, 0.0, mode);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == Catch::Approx(1.0));
  }
}

TEST_CASE("maximal operator monotonicity") {
  const Mesh mesh{build_grid(1, 1.0, 128)};
  std::mt19937_64 rng(9);
  const GridFunction f = random_nonnegative(mesh, rng);
  const GridFunction g = f.map([](double v) { return v + 0.5; });
  const GridFunction mf = fractional_maximal(f, 0.25);
  const GridFunction mg = fractional_maximal(g, 0.25);
  for (std::size_t i = 0; i < mf.size(); ++i) CHECK(mf[i] <= mg[i] + 1e-14);
}

TEST_CASE("weighted maximal with Lebesgue measure matches centered mode") {
  const Mesh mesh{build_grid(1, 1.0, 128)};
  std::mt19937_64 rng(13);
  const GridFunction f = random_nonnegative(mesh, rng);
  const GridFunction nu = GridFunction::sample(mesh, [](const auto&) { return 1.0; });
  const GridFunction a = weighted_centered_fractional_maximal(f, 0.25, nu);
  const GridFunction b = fractional_maximal(f, 0.25, MaximalMode::CenteredCube);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == Catch::Approx(b[i]).epsilon(1e-12));

  // indicator averages stay in [0,1] for alpha = 0
  const GridFunction chi = GridFunction::sample(mesh, [](const std::array<double, 2>& x) {
    return x[0] > 0.0 ? 1.0 : 0.0;
  });
  const GridFunction m = weighted_centered_fractional_maximal(chi, 0.0, nu);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m[i] >= 0.0);
    CHECK(m[i] <= 1.0 + 1e-14);
  }
}

TEST_CASE("dyadic model operator against direct summation") {
  const Mesh mesh{build_grid(1, 1.0, 8)};
  const GridFunction f = GridFunction::sample(mesh, [](const std::array<double, 2>& x) {
    return x[0] < 0.0 ? 1.0 : 0.0;  // left-half root cube
  });
  const double alpha = 0.5;
  const GridFunction s = dyadic_model_operator(f, alpha);

  // brute force: S f(x) = sum over dyadic Q containing x of |Q|^{alpha-1} int_{3Q} f
  const auto fam = enumerate_cubes(mesh, FamilyKind::Dyadic);
  const auto& cells = f.cells();
  for (std::size_t i = 0; i < f.size(); ++i) {
    double direct = 0.0;
    for (const Cube& q : fam.members) {
      if (!q.contains(cells[i].center)) continue;
      direct += std::pow(q.volume(), alpha - 1.0) * integrate(f, q.scaled(3.0));
    }
    CHECK(s[i] == Catch::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("dyadic model operator monotone in f") {
  const Mesh mesh{build_grid(1, 1.0, 32)};
  std::mt19937_64 rng(17);
  const GridFunction f = random_nonnegative(mesh, rng);
  const GridFunction g = f.map([](double v) { return v + 0.25; });
  const GridFunction sf = dyadic_model_operator(f, 0.5);
  const GridFunction sg = dyadic_model_operator(g, 0.5);
  for (std::size_t i = 0; i < sf.size(); ++i) CHECK(sf[i] <= sg[i] + 1e-14);
}

TEST_CASE("pointwise domination of the maximal by the potential") {
  // M_alpha f <= n^{(n-alpha)/2} (1+eps) I_alpha f with eps <= 0.02 at N=2048.
  const Mesh mesh{build_grid(1, 2.0, 2048)};
  std::mt19937_64 rng(21);
  const GridFunction f = random_nonnegative(mesh, rng);
  const double alpha = 0.5;
  const GridFunction m = fractional_maximal(f, alpha);
  const GridFunction pot = riesz_potential(f, alpha);
  const double c = std::pow(1.0, (1.0 - alpha) / 2.0) * 1.02;
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] <= c * pot[i]);
}

TEST_CASE("cz selection hand oracle") {
  // gu = indicator of the left half of the root cube, a = 4: at the level with
  // a^k = 1/4 the unique stopping cube is the root with average 1/2.
  const Mesh mesh{build_grid(1, 0.5, 8)};  // domain [-1/2, 1/2], root side 1
  const GridFunction gu = GridFunction::sample(mesh, [](const std::array<double, 2>& x) {
    return x[0] < 0.0 ? 1.0 : 0.0;
  });
  const CzSelection sel = cz_stopping_cubes(gu, 4.0);
  bool found_root = false;
  for (std::size_t lv = 0; lv < sel.per_level.size(); ++lv) {
    for (const auto& sc : sel.per_level[lv]) {
      if (sc.cube.side == 1.0) {
        found_root = true;
        CHECK(sc.average == Catch::Approx(0.5));
      }
    }
  }
  CHECK(found_root);

  // dyadic maximal: 1 on the support, 1/2 on the complement half
  const GridFunction md = fractional_maximal(gu, 0.0, MaximalMode::Dyadic);
  for (std::size_t i = 0; i < md.size(); ++i) {
    const double expect = gu.cells()[i].center[0] < 0.0 ? 1.0 : 0.5;
    CHECK(md[i] == Catch::Approx(expect));
  }
}

TEST_CASE("cz selection uniform input stops at the root") {
  const Mesh mesh{build_grid(1, 0.5, 16)};
  const GridFunction five = GridFunction::sample(mesh, [](const auto&) { return 5.0; });
  const CzSelection sel = cz_stopping_cubes(five, 4.0);
  REQUIRE(!sel.per_level.empty());
  for (const auto& level : sel.per_level) {
    REQUIRE(level.size() == 1);
    CHECK(level[0].cube.side == Catch::Approx(1.0));
    CHECK(level[0].average == Catch::Approx(5.0));
  }
}

TEST_CASE("cz mass bound on random inputs") {
  const Mesh mesh{build_grid(1, 0.5, 64)};
  std::mt19937_64 rng(29);
  for (double a : {6.0, 10.0}) {
    for (int t = 0; t < 5; ++t) {
      const GridFunction gu = random_nonnegative(mesh, rng);
      const CzSelection sel = cz_stopping_cubes(gu, a);
      for (const auto& level : sel.per_level)
        for (const auto& sc : level)
          CHECK(sc.exceptional_measure >= (1.0 - 2.0 / a) * sc.cube_measure - 1e-12);
    }
  }
}

TEST_CASE("truncation branches and contraction") {
  const Mesh mesh{build_grid(1, 1.0, 8)};
  auto constant = [&](double v) {
    return GridFunction::sample(mesh, [v](const auto&) { return v; });
  };
  CHECK(truncate(constant(3.0), 1.0)[0] == Catch::Approx(1.0));
  CHECK(truncate(constant(1.5), 1.0)[0] == Catch::Approx(0.5));
  CHECK(truncate(constant(0.5), 1.0)[0] == Catch::Approx(0.0));

  // tau_lambda is a 1-Lipschitz map pointwise
  std::mt19937_64 rng(31);
  const GridFunction g = random_nonnegative(mesh, rng);
  const GridFunction h = random_nonnegative(mesh, rng);
  const GridFunction tg = truncate(g, 0.7), th = truncate(h, 0.7);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(std::abs(tg[i] - th[i]) <= std::abs(g[i] - h[i]) + 1e-14);
}
