#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fraclab/weight.hpp"

using namespace fraclab;

namespace {

GridFunction random_weight(const Mesh& mesh, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> nd(0.0, sigma);
  GridFunction g(mesh);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(nd(rng));
  return g;
}

}  // namespace

TEST_CASE("apq constant basics") {
  const Mesh mesh{build_grid(1, 1.0, 64)};
  const auto F = enumerate_cubes(mesh, FamilyKind::Dyadic);
  const auto e = ExponentTriple::make(1, 4.0 / 3.0, 4.0, 0.5);
  CHECK(apq_constant(WeightDescriptor::power(0.0), e, mesh, F).value ==
        Catch::Approx(1.0));

  // Single cube with avg w^q = 2, avg w^{-p'} = 3 at q/p' = 1 gives 2*3 = 6.
  const Mesh two{build_grid(1, 1.0, 2)};
  const auto e2 = ExponentTriple::make(1, 2.0, 2.0, 0.0);
  // two cells with w^2 averaging to 2 and w^{-2} averaging to 3
  const double s1 = 2.0 + std::sqrt(10.0 / 3.0), s2 = 2.0 - std::sqrt(10.0 / 3.0);
  GridFunction wv(two, {std::sqrt(s1), std::sqrt(s2)});
  CubeFamily single;
  single.members.push_back(Cube{{0.0, 0.0}, 2.0, 1});
  const double v =
      apq_constant(WeightDescriptor::sampled(wv), e2, two, single).value;
  CHECK(v == Catch::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("ap and a1q constants") {
  const Mesh mesh{build_grid(1, 1.0, 64)};
  const auto F = enumerate_cubes(mesh, FamilyKind::Dyadic);
  CHECK(ap_constant(WeightDescriptor::power(0.0), 2.0, mesh, F).value ==
        Catch::Approx(1.0));
  CHECK(a1q_constant(WeightDescriptor::power(0.0), 1.0, mesh, F).value ==
        Catch::Approx(1.0));

  // Hoelder forces every per-cube value >= 1.
  std::mt19937_64 rng(7);
  for (int t = 0; t < 5; ++t) {
    const auto w = WeightDescriptor::sampled(random_weight(mesh, rng));
    CHECK(ap_constant(w, 1.5, mesh, F).value >= 1.0);
  }

  // Two cells (1, 4), one covering cube, q = 1: avg 2.5 over min 1.
  const Mesh two{build_grid(1, 1.0, 2)};
  GridFunction wv(two, {1.0, 4.0});
  CubeFamily single;
  single.members.push_back(Cube{{0.0, 0.0}, 2.0, 1});
  CHECK(a1q_constant(WeightDescriptor::sampled(wv), 1.0, two, single).value ==
        Catch::Approx(2.5));
}

TEST_CASE("power weight constants scale like 1/delta") {
  // [w_delta]_{A_{p,q}} ~ delta^{-q/p'} = delta^{-1} at (1, 1/2, 4/3, 4), and
  // [u_delta]_{A_1} ~ delta^{-1}; both via the grid estimator.
  const Mesh mesh{build_radial_grid(1e-12, 1.0, 400, 1)};
  const auto F = enumerate_cubes(mesh, FamilyKind::AllGridIntervals, 1'000'000);
  const auto e = ExponentTriple::make(1, 4.0 / 3.0, 4.0, 0.5);
  const std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
  // The A_1 extremal interval keeps shifting until delta is small, so its
  // asymptotic slope needs a deeper sweep than the A_{p,q} one.
  const std::vector<double> a1_deltas{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> apq_vals, a1_vals;
  for (double d : deltas)
    apq_vals.push_back(
        apq_constant(WeightDescriptor::power((1.0 - d) / e.p_dual()), e, mesh, F).value);
  for (double d : a1_deltas)
    a1_vals.push_back(
        a1q_constant(WeightDescriptor::power(d - 1.0), 1.0, mesh, F).value);
  auto slope = [](const std::vector<double>& v, const std::vector<double>& ds) {
    // two-point slope over the extremes is enough for a 1.0 +/- 0.1 check
    return std::log(v.back() / v.front()) / std::log(ds.front() / ds.back());
  };
  CHECK(slope(apq_vals, deltas) == Catch::Approx(1.0).margin(0.1));
  CHECK(slope(a1_vals, a1_deltas) == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("duality identities") {
  const Mesh mesh{build_grid(1, 2.0, 64)};
  const auto F = enumerate_cubes(mesh, FamilyKind::Dyadic);
  const auto e = ExponentTriple::make(1, 4.0 / 3.0, 4.0, 0.5);

  const auto rep = duality_identities(WeightDescriptor::power(0.125), e, mesh, F);
  CHECK(rep.lhs1 == Catch::Approx(rep.rhs1).epsilon(1e-10));
  CHECK(rep.lhs2 == Catch::Approx(rep.rhs2).epsilon(1e-10));

  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto w = WeightDescriptor::sampled(random_weight(mesh, rng));
    const auto r = duality_identities(w, e, mesh, F);
    CHECK(r.lhs1 == Catch::Approx(r.rhs1).epsilon(1e-10));
    CHECK(r.lhs2 == Catch::Approx(r.rhs2).epsilon(1e-10));
  }
}

TEST_CASE("reverse doubling") {
  const Mesh mesh{build_grid(1, 1.0, 16)};
  const auto F = enumerate_cubes(mesh, FamilyKind::Dyadic);
  const auto e = ExponentTriple::make(1, 4.0 / 3.0, 4.0, 0.5);

  // Uniform weight: rho = 1/2 and bound = 1 - (1/2)^4; margin 0.4375 per cube.
  const auto rep = reverse_doubling_report(WeightDescriptor::power(0.0), e, mesh, F);
  REQUIRE(!rep.entries.empty());
  for (const auto& en : rep.entries) {
    CHECK(en.ratio == Catch::Approx(0.5));
    CHECK(en.bound == Catch::Approx(0.9375));
  }
  CHECK(rep.worst_margin == Catch::Approx(0.4375));

  // Power weight: the bound is a theorem, so every margin must be >= 0.
  const auto rp =
      reverse_doubling_report(WeightDescriptor::power((1.0 - 0.2) / e.p_dual()), e, mesh, F);
  CHECK(rp.worst_margin >= 0.0);
}

TEST_CASE("subset measure inequality") {
  // (|E|/|Q|)^q <= [w]_{A_{p,q}} * w^q(E) / w^q(Q) for random cell subsets.
  const Mesh mesh{build_grid(1, 1.0, 64)};
  const auto F = enumerate_cubes(mesh, FamilyKind::Dyadic);
  const auto e = ExponentTriple::make(1, 4.0 / 3.0, 4.0, 0.5);
  std::mt19937_64 rng(3);
  const auto w = WeightDescriptor::sampled(random_weight(mesh, rng));
  const double X = apq_constant(w, e, mesh, F).value;
  const auto cells = detail::make_cells(mesh);
  const auto uq = w.cell_masses(e.q, cells, 1);

  std::uniform_int_distribution<std::size_t> pick(0, F.members.size() - 1);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 100; ++t) {
    const Cube Q = F.members[pick(rng)];
    double massE = 0.0, massQ = 0.0, wqE = 0.0, wqQ = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!Q.contains(cells[i].center)) continue;
      massQ += cells[i].measure;
      wqQ += uq[i];
      if (coin(rng)) {
        massE += cells[i].measure;
        wqE += uq[i];
      }
    }
    if (massE == 0.0) continue;
    CHECK(std::pow(massE / massQ, e.q) <= X * wqE / wqQ * (1.0 + 1e-12));
  }
}

TEST_CASE("global and local testing constants are scale invariant for w = 1") {
  // The per-cube quantity has total homogeneity 0, so singleton families of
  // different sizes give the same value.
  const Mesh mesh{build_grid(1, 2.0, 64)};
  const auto e = ExponentTriple::make(1, 4.0 / 3.0, 4.0, 0.5);
  const auto one = WeightDescriptor::power(0.0);
  std::vector<double> glo_vals;
  for (double side : {0.5, 1.0, 2.0}) {
    CubeFamily single;
    single.members.push_back(Cube{{0.0, 0.0}, side, 1});
    glo_vals.push_back(global_testing_constant(one, one, e, mesh, single).value);
  }
  CHECK(glo_vals[0] == Catch::Approx(glo_vals[1]).epsilon(0.01));
  CHECK(glo_vals[1] == Catch::Approx(glo_vals[2]).epsilon(0.01));
}

TEST_CASE("analytic power constants match the grid estimator") {
  const auto e = ExponentTriple::make(1, 4.0 / 3.0, 4.0, 0.5);
  CHECK(power_apq_analytic(0.0, e) == Catch::Approx(1.0));

  const double a = (1.0 - 0.1) / e.p_dual();
  const Mesh mesh{build_radial_grid(1e-12, 1.0, 600, 1)};
  const auto F = enumerate_cubes(mesh, FamilyKind::AllGridIntervals, 2'000'000);
  const double grid_est = apq_constant(WeightDescriptor::power(a), e, mesh, F).value;
  CHECK(power_apq_analytic(a, e) == Catch::Approx(grid_est).epsilon(0.05));
}
