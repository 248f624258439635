#pragma once

// The operators: Riesz potential with singular-kernel quadrature, the maximal
// function variants, the dyadic model operator, Calderon-Zygmund stopping-cube
// selection, and value truncation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// Riesz potential
// ---------------------------------------------------------------------------

// (I_alpha f)(x_i) = sum_j K_ij f_j mu_j.  On uniform grids K_ij is the
// midpoint kernel |x_i - x_j|^{alpha-n} off the diagonal and the exact cell
// integral on it; on radial meshes every entry uses the exact per-cell kernel
// integral, since midpoint evaluation is poor on strongly graded cells.
inline GridFunction riesz_potential(const GridFunction& f, double alpha) {
  const int n = f.dim();
  if (!(alpha > 0.0) || !(alpha < n)) throw std::invalid_argument("exponent out of range");
  const auto& cells = f.cells();
  const std::size_t N = cells.size();
  std::vector<double> out(N, 0.0);

  if (std::holds_alternative<Grid>(f.mesh())) {
    const Grid& g = std::get<Grid>(f.mesh());
    const double h = g.spacing();
    if (n == 1) {
      const double diag = power_interval_integral(alpha - 1.0, -0.5 * h, 0.5 * h);
      for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        const double xi = cells[i].center[0];
        for (std::size_t j = 0; j < N; ++j) {
          if (i == j) continue;
          s += std::pow(std::abs(xi - cells[j].center[0]), alpha - 1.0) * f[j] * h;
        }
        out[i] = s + diag * f[i];
      }
    } else {
      const double diag =
          detail::power_rect_integral_2d(alpha - 2.0, -0.5 * h, 0.5 * h, -0.5 * h, 0.5 * h);
      for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        const auto& xi = cells[i].center;
        for (std::size_t j = 0; j < N; ++j) {
          if (i == j) continue;
          const double dx = xi[0] - cells[j].center[0];
          const double dy = xi[1] - cells[j].center[1];
          s += std::pow(dx * dx + dy * dy, 0.5 * (alpha - 2.0)) * f[j] * h * h;
        }
        out[i] = s + diag * f[i];
      }
    }
    return f.like(std::move(out));
  }

  const RadialGrid& rg = std::get<RadialGrid>(f.mesh());
  if (rg.dim != 1)
    throw std::invalid_argument("riesz potential on radial meshes implemented in dim 1");
  for (std::size_t i = 0; i < N; ++i) {
    const double xi = cells[i].center[0];
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double width = cells[j].hi[0] - cells[j].lo[0];
      const double dist = std::abs(cells[j].center[0] - xi);
      if (width <= 0.125 * dist) {
        // Far cell: mass times midpoint kernel.  The antiderivative difference
        // cancels catastrophically here (the cell endpoints shifted by xi can
        // collapse to the same double), while the midpoint rule is exact to
        // O((width/dist)^2).
        s += f[j] * cells[j].measure * std::pow(dist, alpha - 1.0);
      } else {
        const double lo = cells[j].lo[0] - xi;
        const double hi = cells[j].hi[0] - xi;
        s += f[j] * (detail::abs_power_antiderivative(alpha - 1.0, hi) -
                     detail::abs_power_antiderivative(alpha - 1.0, lo));
      }
    }
    out[i] = s;
  }
  return f.like(std::move(out));
}

// ---------------------------------------------------------------------------
// Maximal functions
// ---------------------------------------------------------------------------

enum class MaximalMode { UncenteredCube, CenteredCube, CenteredBall, Dyadic };

namespace detail {

// Dim 1, uncentered, exact over all grid intervals.  For each left endpoint i
// the values over right endpoints are suffix-maxed once, giving the max over
// all intervals containing each cell in O(N^2) total.
inline std::vector<double> uncentered_maximal_1d(const std::vector<Cell>& cells,
                                                 const std::vector<double>& absf,
                                                 double alpha) {
  const std::size_t N = cells.size();
  std::vector<double> best(N, 0.0), val(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double mass = 0.0;
    const double left = cells[i].lo[0];
    for (std::size_t j = i; j < N; ++j) {
      mass += absf[j] * cells[j].measure;
      const double len = cells[j].hi[0] - left;
      val[j] = std::pow(len, alpha - 1.0) * mass;
    }
    for (std::size_t j = N - 1; j > i; --j) val[j - 1] = std::max(val[j - 1], val[j]);
    for (std::size_t j = i; j < N; ++j) best[j] = std::max(best[j], val[j]);
  }
  return best;
}

// Centered modes: expand symmetric windows around each cell center in order of
// distance.  The discrete window is the union of the included cells, and the
// normalizer is its measure; this makes M(1) = 1 in every mode and agrees with
// the weighted operator at nu = 1.
inline std::vector<double> centered_maximal_1d(const std::vector<Cell>& cells,
                                               const std::vector<double>& absf, double alpha,
                                               bool /*ball: same as cube in dim 1*/) {
  const std::size_t N = cells.size();
  std::vector<double> best(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double x = cells[i].center[0];
    double mass = absf[i] * cells[i].measure;
    double vol = cells[i].measure;
    std::ptrdiff_t l = static_cast<std::ptrdiff_t>(i) - 1, r = i + 1;
    best[i] = std::pow(vol, alpha - 1.0) * mass;
    while (l >= 0 || r < static_cast<std::ptrdiff_t>(N)) {
      const double dl = l >= 0 ? x - cells[l].center[0] : std::numeric_limits<double>::infinity();
      const double dr = r < static_cast<std::ptrdiff_t>(N)
                            ? cells[r].center[0] - x
                            : std::numeric_limits<double>::infinity();
      double d;
      if (dl <= dr) {
        mass += absf[l] * cells[l].measure;
        vol += cells[l].measure;
        d = dl;
        --l;
      } else {
        mass += absf[r] * cells[r].measure;
        vol += cells[r].measure;
        d = dr;
        ++r;
      }
      // Include ties before evaluating.
      while (l >= 0 && x - cells[l].center[0] == d) {
        mass += absf[l] * cells[l].measure;
        vol += cells[l].measure;
        --l;
      }
      while (r < static_cast<std::ptrdiff_t>(N) && cells[r].center[0] - x == d) {
        mass += absf[r] * cells[r].measure;
        vol += cells[r].measure;
        ++r;
      }
      best[i] = std::max(best[i], std::pow(vol, alpha - 1.0) * mass);
    }
  }
  return best;
}

// Same union-of-cells convention as dim 1; cube and ball differ only in which
// cells a given radius includes.
inline std::vector<double> centered_maximal_2d(const std::vector<Cell>& cells,
                                               const std::vector<double>& absf, double alpha,
                                               bool ball) {
  const std::size_t N = cells.size();
  std::vector<double> best(N, 0.0);
  std::vector<std::tuple<double, double, double>> by_dist(N);  // (distance, measure, mass)
  for (std::size_t i = 0; i < N; ++i) {
    const auto& x = cells[i].center;
    for (std::size_t j = 0; j < N; ++j) {
      const double dx = std::abs(x[0] - cells[j].center[0]);
      const double dy = std::abs(x[1] - cells[j].center[1]);
      const double d = ball ? std::hypot(dx, dy) : std::max(dx, dy);
      by_dist[j] = {d, cells[j].measure, absf[j] * cells[j].measure};
    }
    std::sort(by_dist.begin(), by_dist.end());
    double vol = 0.0, mass = 0.0;
    std::size_t j = 0;
    while (j < N) {
      const double d = std::get<0>(by_dist[j]);
      while (j < N && std::get<0>(by_dist[j]) == d) {
        vol += std::get<1>(by_dist[j]);
        mass += std::get<2>(by_dist[j]);
        ++j;
      }
      best[i] = std::max(best[i], std::pow(vol, alpha / 2.0 - 1.0) * mass);
    }
  }
  return best;
}

inline std::vector<double> uncentered_maximal_2d(const Grid& g, const std::vector<Cell>& cells,
                                                 const std::vector<double>& absf,
                                                 double alpha) {
  const int n = g.points_per_axis;
  const double h = g.spacing();
  // 2-D prefix sums of |f| * measure over the cell lattice (row-major).
  std::vector<double> pre((n + 1) * (n + 1), 0.0);
  auto P = [&](int i, int j) -> double& { return pre[j * (n + 1) + i]; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      P(i + 1, j + 1) = absf[j * n + i] * h * h + P(i, j + 1) + P(i + 1, j) - P(i, j);
  std::vector<double> best(cells.size(), 0.0);
  for (int s = 1; s <= n; ++s) {
    const double scale = std::pow(s * h * s * h, alpha / 2.0 - 1.0);
    for (int j0 = 0; j0 + s <= n; ++j0)
      for (int i0 = 0; i0 + s <= n; ++i0) {
        const double mass =
            P(i0 + s, j0 + s) - P(i0, j0 + s) - P(i0 + s, j0) + P(i0, j0);
        const double v = scale * mass;
        for (int j = j0; j < j0 + s; ++j)
          for (int i = i0; i < i0 + s; ++i) {
            double& b = best[j * n + i];
            if (v > b) b = v;
          }
      }
  }
  return best;
}

inline std::vector<Cube> dyadic_cubes_of(const Mesh& mesh) {
  if (!std::holds_alternative<Grid>(mesh))
    throw std::invalid_argument("dyadic cubes require a uniform grid");
  std::vector<Cube> out;
  dyadic_cubes(std::get<Grid>(mesh), out);
  return out;
}

}  // namespace detail

inline GridFunction fractional_maximal(const GridFunction& f, double alpha,
                                       MaximalMode mode = MaximalMode::UncenteredCube) {
  const int n = f.dim();
  if (!(alpha >= 0.0) || !(alpha < n)) throw std::invalid_argument("exponent out of range");
  const auto& cells = f.cells();
  std::vector<double> absf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) absf[i] = std::abs(f[i]);

  if (mode == MaximalMode::Dyadic) {
    const auto cubes = detail::dyadic_cubes_of(f.mesh());
    std::vector<double> best(f.size(), 0.0);
    for (const Cube& q : cubes) {
      double mass = 0.0;
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (q.contains(cells[i].center)) mass += absf[i] * cells[i].measure;
      const double v = std::pow(q.volume(), alpha / n - 1.0) * mass;
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (q.contains(cells[i].center)) best[i] = std::max(best[i], v);
    }
    return f.like(std::move(best));
  }

  if (n == 1) {
    if (mode == MaximalMode::UncenteredCube)
      return f.like(detail::uncentered_maximal_1d(cells, absf, alpha));
    return f.like(detail::centered_maximal_1d(cells, absf, alpha,
                                              mode == MaximalMode::CenteredBall));
  }
  if (mode == MaximalMode::UncenteredCube) {
    if (!std::holds_alternative<Grid>(f.mesh()))
      throw std::invalid_argument("uncentered dim-2 maximal requires a uniform grid");
    return f.like(detail::uncentered_maximal_2d(std::get<Grid>(f.mesh()), cells, absf, alpha));
  }
  return f.like(
      detail::centered_maximal_2d(cells, absf, alpha, mode == MaximalMode::CenteredBall));
}

// M^c_{alpha,nu}: centered maximal function with respect to the measure
// nu(x) dx; cubes with nu(Q) = 0 are skipped.
inline GridFunction weighted_centered_fractional_maximal(const GridFunction& f, double alpha,
                                                         const GridFunction& nu) {
  const int n = f.dim();
  if (!(alpha >= 0.0) || !(alpha < n)) throw std::invalid_argument("exponent out of range");
  if (nu.size() != f.size()) throw std::invalid_argument("measure lives on a different mesh");
  bool any = false;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] < 0.0) throw std::invalid_argument("measure must be nonnegative");
    if (nu[i] > 0.0) any = true;
  }
  if (!any) throw std::invalid_argument("measure must not vanish identically");

  const auto& cells = f.cells();
  const std::size_t N = cells.size();
  std::vector<double> best(N, 0.0);
  std::vector<std::tuple<double, double, double>> by_dist(N);  // (dist, nu mass, |f| nu mass)
  for (std::size_t i = 0; i < N; ++i) {
    const auto& x = cells[i].center;
    for (std::size_t j = 0; j < N; ++j) {
      double d = std::abs(x[0] - cells[j].center[0]);
      if (n == 2) d = std::max(d, std::abs(x[1] - cells[j].center[1]));
      const double numass = nu[j] * cells[j].measure;
      by_dist[j] = {d, numass, std::abs(f[j]) * numass};
    }
    std::sort(by_dist.begin(), by_dist.end());
    double numass = 0.0, fnumass = 0.0;
    std::size_t j = 0;
    while (j < N) {
      const double d = std::get<0>(by_dist[j]);
      while (j < N && std::get<0>(by_dist[j]) == d) {
        numass += std::get<1>(by_dist[j]);
        fnumass += std::get<2>(by_dist[j]);
        ++j;
      }
      if (numass > 0.0)
        best[i] = std::max(best[i], std::pow(numass, alpha / n - 1.0) * fnumass);
    }
  }
  return f.like(std::move(best));
}

// ---------------------------------------------------------------------------
// Dyadic model operator
// ---------------------------------------------------------------------------

// S f(x) = sum_{Q dyadic} chi_Q(x) |Q|^{alpha/n - 1} int_{3Q} f, with the
// lattice truncated to sides in [h, 2L] and 3Q clipped to the domain.
inline GridFunction dyadic_model_operator(const GridFunction& f, double alpha) {
  const int n = f.dim();
  if (!(alpha > 0.0) || !(alpha < n)) throw std::invalid_argument("exponent out of range");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] < 0.0) throw std::invalid_argument("model operator defined for nonnegative f");
  const auto cubes = detail::dyadic_cubes_of(f.mesh());
  const auto& cells = f.cells();
  std::vector<double> out(f.size(), 0.0);
  for (const Cube& q : cubes) {
    const Cube tq = q.scaled(3.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (tq.contains(cells[i].center)) mass += f[i] * cells[i].measure;
    const double v = std::pow(q.volume(), alpha / n - 1.0) * mass;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (q.contains(cells[i].center)) out[i] += v;
  }
  return f.like(std::move(out));
}

// ---------------------------------------------------------------------------
// Calderon-Zygmund stopping cubes
// ---------------------------------------------------------------------------

struct CzSelection {
  struct StoppingCube {
    Cube cube;
    double average = 0.0;
    std::vector<std::size_t> cube_cells;
    std::vector<std::size_t> exceptional_cells;  // E_{k,j}
    double cube_measure = 0.0;
    double exceptional_measure = 0.0;
  };
  double base_ratio = 0.0;
  std::vector<int> levels;
  std::vector<std::vector<StoppingCube>> per_level;  // parallel to levels
};

namespace detail {

struct DyadicNode {
  Cube cube;
  double mass = 0.0;
  std::vector<std::size_t> cell_indices;
  std::vector<std::size_t> children;
};

inline std::vector<DyadicNode> dyadic_tree(const GridFunction& f) {
  if (!std::holds_alternative<Grid>(f.mesh()))
    throw std::invalid_argument("dyadic tree requires a uniform grid");
  const Grid& g = std::get<Grid>(f.mesh());
  const int n = g.points_per_axis;
  if ((n & (n - 1)) != 0)
    throw std::invalid_argument("dyadic tree requires a power-of-two grid");
  std::vector<DyadicNode> nodes;
  // Build recursively from the root.
  std::function<std::size_t(Cube)> build = [&](Cube q) -> std::size_t {
    const std::size_t id = nodes.size();
    nodes.push_back({});
    nodes[id].cube = q;
    if (q.side > g.spacing() * (1.0 + 1e-12)) {
      const double half = 0.5 * q.side;
      std::vector<std::size_t> kids;
      for (int sy = 0; sy < (g.dim == 2 ? 2 : 1); ++sy)
        for (int sx = 0; sx < 2; ++sx) {
          Cube c;
          c.dim = g.dim;
          c.side = half;
          c.center[0] = q.center[0] + (sx ? 0.25 : -0.25) * q.side;
          c.center[1] = g.dim == 2 ? q.center[1] + (sy ? 0.25 : -0.25) * q.side : 0.0;
          kids.push_back(build(c));
        }
      nodes[id].children = kids;
      for (std::size_t k : kids) {
        nodes[id].mass += nodes[k].mass;
        nodes[id].cell_indices.insert(nodes[id].cell_indices.end(),
                                      nodes[k].cell_indices.begin(),
                                      nodes[k].cell_indices.end());
      }
    } else {
      // Leaf: the single cell with matching center.
      for (std::size_t i = 0; i < f.size(); ++i)
        if (q.contains(f.cells()[i].center)) {
          nodes[id].cell_indices.push_back(i);
          nodes[id].mass += f[i] * f.cells()[i].measure;
        }
    }
    return id;
  };
  Cube root;
  root.dim = g.dim;
  root.side = 2.0 * g.extent;
  build(root);
  return nodes;
}

}  // namespace detail

inline CzSelection cz_stopping_cubes(const GridFunction& gu, double base_ratio) {
  const int n = gu.dim();
  const double twon = std::pow(2.0, n);
  if (!(base_ratio > twon)) throw std::invalid_argument("base ratio must exceed 2^n");
  double total = 0.0;
  for (std::size_t i = 0; i < gu.size(); ++i) {
    if (gu[i] < 0.0) throw std::invalid_argument("cz selection requires nonnegative input");
    total += gu[i];
  }
  if (!(total > 0.0)) throw std::invalid_argument("cz selection requires nonzero input");

  const auto nodes = detail::dyadic_tree(gu);
  auto avg = [&](std::size_t id) { return nodes[id].mass / nodes[id].cube.volume(); };

  // Dyadic maximal function on the truncated lattice.
  std::vector<double> md(gu.size(), 0.0);
  for (const auto& nd : nodes) {
    const double a = nd.mass / nd.cube.volume();
    for (std::size_t i : nd.cell_indices) md[i] = std::max(md[i], a);
  }

  const double root_avg = avg(0);
  double max_avg = 0.0;
  for (const auto& nd : nodes) max_avg = std::max(max_avg, nd.mass / nd.cube.volume());

  // Admissible levels: a^k below the max average (so cubes exist) and
  // a^k >= root_avg / 2^n (so the two-sided bound holds even at the root).
  const int k_max = static_cast<int>(std::floor(std::log(max_avg) / std::log(base_ratio) -
                                                1e-12));
  const int k_min = static_cast<int>(std::ceil(std::log(root_avg / twon) /
                                               std::log(base_ratio) - 1e-12));

  CzSelection sel;
  sel.base_ratio = base_ratio;
  for (int k = k_min; k <= k_max; ++k) {
    const double thr = std::pow(base_ratio, k);
    std::vector<CzSelection::StoppingCube> cubes;
    std::function<void(std::size_t)> select = [&](std::size_t id) {
      if (avg(id) > thr) {
        CzSelection::StoppingCube sc;
        sc.cube = nodes[id].cube;
        sc.average = avg(id);
        sc.cube_cells = nodes[id].cell_indices;
        for (std::size_t i : sc.cube_cells) {
          const double m = gu.cells()[i].measure;
          sc.cube_measure += m;
          if (md[i] > thr && md[i] <= thr * base_ratio) {
            sc.exceptional_cells.push_back(i);
            sc.exceptional_measure += m;
          }
        }
        cubes.push_back(std::move(sc));
        return;
      }
      for (std::size_t c : nodes[id].children) select(c);
    };
    select(0);
    if (cubes.empty()) continue;
    // Re-verify the construction invariants.
    for (const auto& sc : cubes) {
      if (!(sc.average > thr && sc.average <= twon * thr + 1e-12 * twon * thr))
        throw std::logic_error("cz selection: two-sided average bound violated");
      if (sc.exceptional_measure < (1.0 - twon / base_ratio) * sc.cube_measure - 1e-12)
        throw std::logic_error("cz selection: exceptional mass bound violated");
    }
    sel.levels.push_back(k);
    sel.per_level.push_back(std::move(cubes));
  }
  return sel;
}

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

// tau_lambda g = min{g, 2 lambda} - min{g, lambda}.
inline GridFunction truncate(const GridFunction& g, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("truncation level must be positive");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] < 0.0) throw std::invalid_argument("truncation defined for nonnegative g");
  return g.map([lambda](double v) {
    return std::min(v, 2.0 * lambda) - std::min(v, lambda);
  });
}

}  // namespace fraclab
