#pragma once

// Weighted norms, weak-type quasinorms, certified operator-norm lower bounds,
// and log-log slope fitting.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fraclab/grid.hpp"
#include "fraclab/weight.hpp"

namespace fraclab {

// ||w f||_{L^p} with the piecewise-constant f integrated exactly against the
// weight: for power weights the per-cell mass of w^p is a closed form.
inline double weighted_lp_norm(const GridFunction& f, const WeightDescriptor& w, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
  const auto masses = w.cell_masses(p, f.cells(), f.dim());
  double s = 0.0;
  // Fold the mass into the base before raising to p: cells deep in a log-radial
  // mesh pair huge values with tiny masses, and |f|^p alone can overflow.
  for (std::size_t i = 0; i < f.size(); ++i)
    s += std::pow(std::abs(f[i]) * std::pow(masses[i], 1.0 / p), p);
  return std::pow(s, 1.0 / p);
}

inline double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += std::pow(std::abs(f[i]), p) * f.cells()[i].measure;
  return std::pow(s, 1.0 / p);
}

// ||g||_{L^{q,inf}(u)} = sup_v v u({|g| >= v})^{1/q}, exact for a function
// that is constant on cells: the sup is attained at a distinct value of |g|.
inline double weak_quasinorm(const GridFunction& g, const std::vector<double>& u_cell_masses,
                             double q) {
  if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
  if (u_cell_masses.size() != g.size())
    throw std::invalid_argument("mass vector lives on a different mesh");
  std::vector<std::size_t> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = std::abs(g[a]), vb = std::abs(g[b]);
    if (va != vb) return va > vb;
    return a < b;
  });
  double best = 0.0, cum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = std::abs(g[order[i]]);
    while (i < order.size() && std::abs(g[order[i]]) == v) cum += u_cell_masses[order[i++]];
    if (v > 0.0) best = std::max(best, v * std::pow(cum, 1.0 / q));
  }
  return best;
}

inline double weak_quasinorm(const GridFunction& g, const WeightDescriptor& u, double q) {
  return weak_quasinorm(g, u.cell_masses(1.0, g.cells(), g.dim()), q);
}

// Identity check: with q0 = (n/alpha)', the weak L^{q0}(u) quasinorm of the
// kernel x -> |x - y|^{alpha - n} satisfies
//   ||K_y||^{q0}_{L^{q0,inf}(u)} = sup_t t^{-n} u(B(y,t)).
struct KernelIdentityReport {
  double q0 = 0.0;
  double lhs = 0.0;  // quasinorm^{q0}
  double rhs = 0.0;  // sup_t t^{-n} u(B(y,t))
  double ratio = 0.0;
};

inline KernelIdentityReport kernel_weak_norm_identity_check(const WeightDescriptor& u,
                                                            const Mesh& mesh, double alpha,
                                                            std::array<double, 2> y) {
  const int n = mesh_dim(mesh);
  if (!(alpha > 0.0) || !(alpha < n)) throw std::invalid_argument("exponent out of range");
  KernelIdentityReport rep;
  rep.q0 = static_cast<double>(n) / (n - alpha);

  GridFunction kernel = GridFunction::sample(mesh, [&](const std::array<double, 2>& x) {
    double d = std::abs(x[0] - y[0]);
    if (n == 2) d = std::hypot(d, x[1] - y[1]);
    if (d == 0.0) return 0.0;  // center coincides with y; excluded from the sup
    return std::pow(d, alpha - n);
  });
  const auto masses = u.cell_masses(1.0, kernel.cells(), n);
  const double wq = weak_quasinorm(kernel, masses, rep.q0);
  rep.lhs = std::pow(wq, rep.q0);

  // sup over radii where the discrete ball gains a cell.
  std::vector<std::pair<double, double>> by_dist(kernel.size());
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const auto& c = kernel.cells()[i].center;
    double d = std::abs(c[0] - y[0]);
    if (n == 2) d = std::hypot(d, c[1] - y[1]);
    by_dist[i] = {d, masses[i]};
  }
  std::sort(by_dist.begin(), by_dist.end());
  double cum = 0.0;
  std::size_t i = 0;
  while (i < by_dist.size()) {
    const double d = by_dist[i].first;
    while (i < by_dist.size() && by_dist[i].first == d) cum += by_dist[i++].second;
    if (d > 0.0) rep.rhs = std::max(rep.rhs, std::pow(d, -static_cast<double>(n)) * cum);
  }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Certified operator-norm lower bounds
// ---------------------------------------------------------------------------

struct LowerBoundResult {
  double value = 0.0;  // certified: the ratio of an explicit trial function
  GridFunction witness;
  int iterations = 0;
};

// sup_f ||w T f||_q / ||w f||_p over trial functions.  Every reported value is
// the ratio of an explicitly evaluated trial function, so it is a true lower
// bound regardless of whether the fixed-point iteration converged.  The
// iteration assumes T is linear with a kernel symmetric in the unweighted
// inner product (the adjoint defaults to T itself).
inline LowerBoundResult operator_norm_lower_bound(
    const std::function<GridFunction(const GridFunction&)>& op, const WeightDescriptor& w,
    const ExponentTriple& e, const std::vector<GridFunction>& candidates,
    std::function<GridFunction(const GridFunction&)> adjoint = nullptr, int max_iters = 200,
    double tol = 1e-6) {
  if (candidates.empty()) throw std::invalid_argument("need at least one trial function");
  if (!adjoint) adjoint = op;

  auto ratio = [&](const GridFunction& f) -> double {
    const double den = weighted_lp_norm(f, w, e.p);
    if (!(den > 0.0) || !std::isfinite(den)) return 0.0;
    const double num = weighted_lp_norm(op(f), w, e.q);
    if (!std::isfinite(num)) return 0.0;
    return num / den;
  };

  LowerBoundResult res;
  res.witness = candidates.front();
  for (const GridFunction& f : candidates) {
    const double r = ratio(f);
    if (r > res.value) {
      res.value = r;
      res.witness = f;
    }
  }
  if (e.p <= 1.0) return res;  // the fixed-point update needs p > 1

  const auto& cells = res.witness.cells();
  const int n = res.witness.dim();
  const auto wq = w.cell_values(e.q, cells, n);
  const auto wmp = w.cell_values(-e.p, cells, n);
  GridFunction f = res.witness;
  double prev = res.value;
  for (int it = 1; it <= max_iters; ++it) {
    GridFunction g = op(f);
    for (std::size_t i = 0; i < g.size(); ++i)
      g.values()[i] = wq[i] * std::pow(std::max(g[i], 0.0), e.q - 1.0);
    GridFunction h = adjoint(g);
    double peak = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      h.values()[i] = std::pow(std::max(h[i], 0.0) * wmp[i], 1.0 / (e.p - 1.0));
      peak = std::max(peak, h[i]);
    }
    if (!(peak > 0.0) || !std::isfinite(peak)) break;
    for (std::size_t i = 0; i < h.size(); ++i) h.values()[i] /= peak;
    f = std::move(h);
    const double r = ratio(f);
    res.iterations = it;
    if (r > res.value) {
      res.value = r;
      res.witness = f;
    }
    if (std::abs(r - prev) < tol * std::max(r, 1e-300)) break;
    prev = r;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Log-log slope fitting
// ---------------------------------------------------------------------------

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares of log V against log(1/delta).
inline SlopeFit fit_exponent(const std::vector<double>& deltas,
                             const std::vector<double>& values) {
  if (deltas.size() != values.size() || deltas.size() < 2)
    throw std::invalid_argument("need at least two points to fit");
  const std::size_t m = deltas.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(deltas[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("slope fit needs positive data");
    x[i] = std::log(1.0 / deltas[i]);
    y[i] = std::log(values[i]);
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace fraclab
