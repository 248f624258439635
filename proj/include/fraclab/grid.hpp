#pragma once

// Discrete geometry and quadrature: uniform and log-radial meshes, axis-aligned
// cubes, exact integration of power functions, cube-family enumeration, and the
// grid-function text format.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fraclab {

// Uniform mesh on [-L,L]^dim with N cells per axis, cell centers at
// -L + (i+1/2)h.
struct Grid {
  int dim = 1;
  double extent = 1.0;
  int points_per_axis = 2;
  double spacing() const { return 2.0 * extent / points_per_axis; }
};

// Geometric shells r_k = r_min * ratio^k on [r_min, r_max], plus an innermost
// head cell [0, r_min] so that integrals over the whole ball are not missing
// the singular head.  In dim 1 every shell contributes a mirrored pair of
// cells at +/-(r_k + r_{k+1})/2; in dim 2 each shell is a single annulus cell.
struct RadialGrid {
  int dim = 1;
  double r_min = 1e-12;
  double r_max = 2.0;
  int shells = 2;
  double ratio() const { return std::pow(r_max / r_min, 1.0 / shells); }
  std::vector<double> edges() const {
    std::vector<double> e(shells + 1);
    const double rho = std::log(r_max / r_min) / shells;
    for (int k = 0; k <= shells; ++k) e[k] = r_min * std::exp(rho * k);
    e.front() = r_min;
    e.back() = r_max;
    return e;
  }
};

using Mesh = std::variant<Grid, RadialGrid>;

inline int mesh_dim(const Mesh& m) {
  return std::visit([](const auto& g) { return g.dim; }, m);
}

// Axis-aligned box cell.  For radial meshes in dim 2 the cell is an annulus;
// lo/hi then hold the radial bounds and center[0] the midpoint radius.
struct Cell {
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  double measure = 0.0;
  bool annulus = false;
};

struct Cube {
  std::array<double, 2> center{0.0, 0.0};
  double side = 0.0;
  int dim = 1;

  double volume() const { return dim == 1 ? side : side * side; }
  double lo(int axis) const { return center[axis] - 0.5 * side; }
  double hi(int axis) const { return center[axis] + 0.5 * side; }
  Cube scaled(double r) const { return Cube{center, r * side, dim}; }
  // Half-open membership so that grid-aligned cubes tile without overlap.
  bool contains(const std::array<double, 2>& x) const {
    for (int a = 0; a < dim; ++a)
      if (x[a] < lo(a) || x[a] >= hi(a)) return false;
    return true;
  }
};

inline Grid build_grid(int dim, double extent, int points_per_axis) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("unsupported dimension");
  if (!(extent > 0)) throw std::invalid_argument("extent must be positive");
  if (points_per_axis < 2) throw std::invalid_argument("need at least 2 points per axis");
  return Grid{dim, extent, points_per_axis};
}

inline RadialGrid build_radial_grid(double r_min, double r_max, int shells, int dim = 1) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("unsupported dimension");
  if (!(r_min > 0) || !(r_min < r_max)) throw std::invalid_argument("need 0 < r_min < r_max");
  if (shells < 2) throw std::invalid_argument("need at least 2 shells");
  return RadialGrid{dim, r_min, r_max, shells};
}

namespace detail {

inline std::vector<Cell> make_cells(const Grid& g) {
  std::vector<Cell> cells;
  const double h = g.spacing();
  const int n = g.points_per_axis;
  if (g.dim == 1) {
    cells.reserve(n);
    for (int i = 0; i < n; ++i) {
      Cell c;
      c.lo[0] = -g.extent + i * h;
      c.hi[0] = c.lo[0] + h;
      c.center[0] = -g.extent + (i + 0.5) * h;
      c.measure = h;
      cells.push_back(c);
    }
  } else {
    cells.reserve(static_cast<std::size_t>(n) * n);
    // Row-major: y outer, x inner.
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Cell c;
        c.lo = {-g.extent + i * h, -g.extent + j * h};
        c.hi = {c.lo[0] + h, c.lo[1] + h};
        c.center = {-g.extent + (i + 0.5) * h, -g.extent + (j + 0.5) * h};
        c.measure = h * h;
        cells.push_back(c);
      }
  }
  return cells;
}

inline std::vector<Cell> make_cells(const RadialGrid& g) {
  std::vector<Cell> cells;
  const auto e = g.edges();
  if (g.dim == 1) {
    // Sorted left to right: negative shells, head pair, positive shells.
    cells.reserve(2 * g.shells + 2);
    for (int k = g.shells - 1; k >= 0; --k) {
      Cell c;
      c.lo[0] = -e[k + 1];
      c.hi[0] = -e[k];
      c.center[0] = -0.5 * (e[k] + e[k + 1]);
      c.measure = e[k + 1] - e[k];
      cells.push_back(c);
    }
    Cell neg_head, pos_head;
    neg_head.lo[0] = -e[0];
    neg_head.hi[0] = 0.0;
    neg_head.center[0] = -0.5 * e[0];
    neg_head.measure = e[0];
    cells.push_back(neg_head);
    pos_head.lo[0] = 0.0;
    pos_head.hi[0] = e[0];
    pos_head.center[0] = 0.5 * e[0];
    pos_head.measure = e[0];
    cells.push_back(pos_head);
    for (int k = 0; k < g.shells; ++k) {
      Cell c;
      c.lo[0] = e[k];
      c.hi[0] = e[k + 1];
      c.center[0] = 0.5 * (e[k] + e[k + 1]);
      c.measure = e[k + 1] - e[k];
      cells.push_back(c);
    }
  } else {
    const double pi = 3.14159265358979323846;
    cells.reserve(g.shells + 1);
    Cell head;
    head.annulus = true;
    head.lo[0] = 0.0;
    head.hi[0] = e[0];
    head.center[0] = 0.5 * e[0];
    head.measure = pi * e[0] * e[0];
    cells.push_back(head);
    for (int k = 0; k < g.shells; ++k) {
      Cell c;
      c.annulus = true;
      c.lo[0] = e[k];
      c.hi[0] = e[k + 1];
      c.center[0] = 0.5 * (e[k] + e[k + 1]);
      c.measure = pi * (e[k + 1] * e[k + 1] - e[k] * e[k]);
      cells.push_back(c);
    }
  }
  return cells;
}

inline std::vector<Cell> make_cells(const Mesh& m) {
  return std::visit([](const auto& g) { return make_cells(g); }, m);
}

}  // namespace detail

// Sampled real-valued function, one value per cell.  The cell list is shared
// so that derived functions on the same mesh are cheap.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(Mesh mesh)
      : mesh_(std::move(mesh)),
        cells_(std::make_shared<const std::vector<Cell>>(detail::make_cells(mesh_))),
        values_(cells_->size(), 0.0) {}
  GridFunction(Mesh mesh, std::vector<double> values)
      : mesh_(std::move(mesh)),
        cells_(std::make_shared<const std::vector<Cell>>(detail::make_cells(mesh_))),
        values_(std::move(values)) {
    if (values_.size() != cells_->size())
      throw std::invalid_argument("value count does not match cell count");
  }

  const Mesh& mesh() const { return mesh_; }
  const std::vector<Cell>& cells() const { return *cells_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  int dim() const { return mesh_dim(mesh_); }

  GridFunction like(std::vector<double> values) const {
    GridFunction g;
    g.mesh_ = mesh_;
    g.cells_ = cells_;
    g.values_ = std::move(values);
    if (g.values_.size() != cells_->size())
      throw std::invalid_argument("value count does not match cell count");
    return g;
  }

  template <class F>
  GridFunction map(F&& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
    return like(std::move(v));
  }

  // Sample a pointwise function of the cell center.
  template <class F>
  static GridFunction sample(const Mesh& mesh, F&& f) {
    GridFunction g(mesh);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Cell& c = g.cells()[i];
      if (c.annulus)
        g[i] = f(std::array<double, 2>{c.center[0], 0.0});
      else
        g[i] = f(c.center);
    }
    return g;
  }

 private:
  Mesh mesh_;
  std::shared_ptr<const std::vector<Cell>> cells_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Exact power-function quadrature
// ---------------------------------------------------------------------------

namespace detail {

// Antiderivative of |t|^a: sign(t) |t|^{a+1} / (a+1), valid for a > -1.
inline double abs_power_antiderivative(double a, double t) {
  if (t == 0.0) return 0.0;
  const double s = t > 0 ? 1.0 : -1.0;
  if (a == -1.0) return s * std::log(std::abs(t));
  return s * std::pow(std::abs(t), a + 1.0) / (a + 1.0);
}

// 20-point Gauss-Legendre nodes/weights on [-1,1].
inline const std::array<double, 10>& gauss20_nodes() {
  static const std::array<double, 10> x = {
      0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
      0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
      0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
      0.9931285991850949};
  return x;
}
inline const std::array<double, 10>& gauss20_weights() {
  static const std::array<double, 10> w = {
      0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
      0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
      0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
      0.0176140071391521};
  return w;
}

// Tensor Gauss on a rectangle where |x|^a is smooth (origin well outside).
inline double power_rect_gauss(double a, double x0, double x1, double y0, double y1) {
  const auto& xs = gauss20_nodes();
  const auto& ws = gauss20_weights();
  const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
  const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
  double sum = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int si = -1; si <= 1; si += 2) {
      const double x = cx + si * hx * xs[i];
      double inner = 0.0;
      for (int j = 0; j < 10; ++j)
        for (int sj = -1; sj <= 1; sj += 2) {
          const double y = cy + sj * hy * xs[j];
          inner += ws[j] * std::pow(x * x + y * y, 0.5 * a);
        }
      sum += ws[i] * inner * hy;
    }
  return sum * hx;
}

// Integral of |x|^a over the origin-corner rectangle [0,A]x[0,B], computed in
// polar coordinates: the radial integral is exact and the angular one is
// smooth, so Gauss quadrature in the angle gives near machine accuracy.
//   C(A,B) = 1/(a+2) [ int_0^phi (A/cos t)^{a+2} dt + int_phi^{pi/2} (B/sin t)^{a+2} dt ]
// with phi = atan(B/A).
inline double power_corner_rect(double a, double A, double B) {
  if (A <= 0.0 || B <= 0.0) return 0.0;
  const double pi = 3.14159265358979323846;
  const double phi = std::atan2(B, A);
  const auto& xs = gauss20_nodes();
  const auto& ws = gauss20_weights();
  auto segment = [&](double t0, double t1, double len, bool use_cos) {
    const double c = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
    double s = 0.0;
    for (int i = 0; i < 10; ++i)
      for (int si = -1; si <= 1; si += 2) {
        const double t = c + si * h * xs[i];
        const double trig = use_cos ? std::cos(t) : std::sin(t);
        s += ws[i] * std::pow(len / trig, a + 2.0);
      }
    return s * h;
  };
  // Split each angular segment in two for a little extra accuracy when the
  // aspect ratio is extreme.
  double acc = 0.0;
  acc += segment(0.0, 0.5 * phi, A, true);
  acc += segment(0.5 * phi, phi, A, true);
  acc += segment(phi, 0.5 * (phi + 0.5 * pi), B, false);
  acc += segment(0.5 * (phi + 0.5 * pi), 0.5 * pi, B, false);
  return acc / (a + 2.0);
}

// Rectangle strictly away from the origin: adaptive tensor Gauss, splitting
// until the rectangle is small compared to its distance from the origin.
inline double power_rect_away(double a, double x0, double x1, double y0, double y1,
                              int depth = 0) {
  const double dx = std::max({x0, -x1, 0.0});
  const double dy = std::max({y0, -y1, 0.0});
  const double dist = std::hypot(dx, dy);
  const double diam = std::hypot(x1 - x0, y1 - y0);
  if (depth >= 48 || dist >= 0.5 * diam)
    return power_rect_gauss(a, x0, x1, y0, y1);
  if (x1 - x0 >= y1 - y0) {
    const double xm = 0.5 * (x0 + x1);
    return power_rect_away(a, x0, xm, y0, y1, depth + 1) +
           power_rect_away(a, xm, x1, y0, y1, depth + 1);
  }
  const double ym = 0.5 * (y0 + y1);
  return power_rect_away(a, x0, x1, y0, ym, depth + 1) +
         power_rect_away(a, x0, x1, ym, y1, depth + 1);
}

inline double power_rect_integral_2d(double a, double x0, double x1, double y0, double y1) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  const bool touches_origin = x0 <= 0.0 && x1 >= 0.0 && y0 <= 0.0 && y1 >= 0.0;
  if (touches_origin && a <= -2.0)
    throw std::domain_error("non-integrable singularity");
  if (x0 < 0.0 && x1 > 0.0)
    return power_rect_integral_2d(a, x0, 0.0, y0, y1) +
           power_rect_integral_2d(a, 0.0, x1, y0, y1);
  if (y0 < 0.0 && y1 > 0.0)
    return power_rect_integral_2d(a, x0, x1, y0, 0.0) +
           power_rect_integral_2d(a, x0, x1, 0.0, y1);
  // One closed quadrant; reflect into the first.
  const double ax0 = std::min(std::abs(x0), std::abs(x1));
  const double ax1 = std::max(std::abs(x0), std::abs(x1));
  const double ay0 = std::min(std::abs(y0), std::abs(y1));
  const double ay1 = std::max(std::abs(y0), std::abs(y1));
  if (ax0 == 0.0 && ay0 == 0.0) return power_corner_rect(a, ax1, ay1);
  return power_rect_away(a, ax0, ax1, ay0, ay1);
}

}  // namespace detail

// Exact (dim 1) or certified-quadrature (dim 2) integral of |x|^a over an
// interval [x0,x1] / rectangle.  Throws on a non-integrable singularity.
inline double power_interval_integral(double a, double x0, double x1) {
  if (x0 > x1) std::swap(x0, x1);
  const bool touches_origin = x0 <= 0.0 && x1 >= 0.0;
  if (touches_origin && a <= -1.0 && !(x0 == 0.0 && x1 == 0.0))
    throw std::domain_error("non-integrable singularity");
  return detail::abs_power_antiderivative(a, x1) - detail::abs_power_antiderivative(a, x0);
}

inline double power_cell_integral(double a, const Cube& region) {
  if (!(region.side > 0)) throw std::invalid_argument("degenerate region");
  if (region.dim == 1)
    return power_interval_integral(a, region.lo(0), region.hi(0));
  return detail::power_rect_integral_2d(a, region.lo(0), region.hi(0),
                                        region.lo(1), region.hi(1));
}

// Integral of |x|^a over one mesh cell (annulus cells use the exact radial
// formula; in dim 2 that is 2*pi*r^{a+1} dr).
inline double power_cell_integral(double a, const Cell& cell, int dim) {
  if (cell.annulus) {
    const double pi = 3.14159265358979323846;
    if (a <= -2.0 && cell.lo[0] == 0.0)
      throw std::domain_error("non-integrable singularity");
    return 2.0 * pi *
           (std::pow(cell.hi[0], a + 2.0) - std::pow(cell.lo[0], a + 2.0)) / (a + 2.0);
  }
  if (dim == 1) return power_interval_integral(a, cell.lo[0], cell.hi[0]);
  return detail::power_rect_integral_2d(a, cell.lo[0], cell.hi[0], cell.lo[1], cell.hi[1]);
}

// ---------------------------------------------------------------------------
// Integration of grid functions
// ---------------------------------------------------------------------------

// Sum of value * measure over cells whose centers lie in the region, in cell
// order (row-major for uniform dim-2 grids).  Annulus cells are matched by
// midpoint radius, which only makes sense for origin-centered regions; the
// radial dim-2 mesh is used for whole-domain integrals only.
inline double integrate(const GridFunction& f, const Cube& region) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Cell& c = f.cells()[i];
    if (region.contains(c.center)) sum += f[i] * c.measure;
  }
  return sum;
}

inline double integrate(const GridFunction& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * f.cells()[i].measure;
  return sum;
}

// ---------------------------------------------------------------------------
// Cube families
// ---------------------------------------------------------------------------

enum class FamilyKind { Dyadic, ShiftedDyadicThirds, AllGridIntervals, CenteredAt };

inline const char* family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Dyadic: return "dyadic";
    case FamilyKind::ShiftedDyadicThirds: return "shifted-dyadic-thirds";
    case FamilyKind::AllGridIntervals: return "all-grid-intervals";
    case FamilyKind::CenteredAt: return "centered-at";
  }
  return "?";
}

inline FamilyKind family_from_name(const std::string& s) {
  if (s == "dyadic") return FamilyKind::Dyadic;
  if (s == "thirds" || s == "shifted-dyadic-thirds") return FamilyKind::ShiftedDyadicThirds;
  if (s == "all-intervals" || s == "all-grid-intervals") return FamilyKind::AllGridIntervals;
  throw std::invalid_argument("unknown cube family: " + s);
}

struct CubeFamily {
  FamilyKind kind = FamilyKind::Dyadic;
  std::vector<Cube> members;
};

namespace detail {

inline void dyadic_cubes(const Grid& g, std::vector<Cube>& out,
                         const std::array<double, 2>& shift = {0.0, 0.0}) {
  const int n = g.points_per_axis;
  for (int cubes_per_axis = n; cubes_per_axis >= 1; cubes_per_axis /= 2) {
    if (n % cubes_per_axis != 0) break;
    const double side = 2.0 * g.extent / cubes_per_axis;
    if (g.dim == 1) {
      for (int i = 0; i < cubes_per_axis; ++i) {
        Cube q{{-g.extent + (i + 0.5) * side + shift[0], 0.0}, side, 1};
        out.push_back(q);
      }
    } else {
      for (int j = 0; j < cubes_per_axis; ++j)
        for (int i = 0; i < cubes_per_axis; ++i) {
          Cube q{{-g.extent + (i + 0.5) * side + shift[0],
                  -g.extent + (j + 0.5) * side + shift[1]},
                 side, 2};
          out.push_back(q);
        }
    }
    if (cubes_per_axis == 1) break;
  }
}

inline std::vector<double> mesh_edges_1d(const Mesh& m) {
  const auto cells = make_cells(m);
  std::vector<double> edges;
  edges.reserve(cells.size() + 1);
  edges.push_back(cells.front().lo[0]);
  for (const Cell& c : cells) edges.push_back(c.hi[0]);
  return edges;
}

}  // namespace detail

inline CubeFamily enumerate_cubes(const Mesh& mesh, FamilyKind kind,
                                  std::size_t max_count = 50'000'000,
                                  std::optional<std::array<double, 2>> at = std::nullopt) {
  CubeFamily fam;
  fam.kind = kind;
  const int dim = mesh_dim(mesh);
  if (kind == FamilyKind::AllGridIntervals) {
    if (dim != 1)
      throw std::invalid_argument("family too large; use dyadic or shifted-dyadic-thirds");
    const auto edges = detail::mesh_edges_1d(mesh);
    const std::size_t ne = edges.size();
    if (ne * (ne - 1) / 2 > max_count) throw std::invalid_argument("family too large");
    for (std::size_t i = 0; i + 1 < ne; ++i)
      for (std::size_t j = i + 1; j < ne; ++j)
        fam.members.push_back(Cube{{0.5 * (edges[i] + edges[j]), 0.0}, edges[j] - edges[i], 1});
    return fam;
  }
  if (std::holds_alternative<RadialGrid>(mesh))
    throw std::invalid_argument("only all-grid-intervals is supported on radial meshes");
  const Grid& g = std::get<Grid>(mesh);
  if (kind == FamilyKind::Dyadic) {
    detail::dyadic_cubes(g, fam.members);
  } else if (kind == FamilyKind::ShiftedDyadicThirds) {
    std::vector<Cube> base;
    detail::dyadic_cubes(g, base);
    for (const Cube& q : base)
      for (int sx = -1; sx <= 1; ++sx)
        for (int sy = (g.dim == 2 ? -1 : 0); sy <= (g.dim == 2 ? 1 : 0); ++sy) {
          Cube s = q;
          s.center[0] += sx * q.side / 3.0;
          if (g.dim == 2) s.center[1] += sy * q.side / 3.0;
          // Keep only shifts that still intersect the domain.
          bool ok = true;
          for (int a = 0; a < g.dim; ++a)
            if (s.hi(a) <= -g.extent || s.lo(a) >= g.extent) ok = false;
          if (ok) fam.members.push_back(s);
        }
  } else if (kind == FamilyKind::CenteredAt) {
    if (!at) throw std::invalid_argument("centered-at family needs a center");
    const double h = g.spacing();
    for (int k = 1; k <= 2 * g.points_per_axis; ++k)
      fam.members.push_back(Cube{*at, k * h, g.dim});
  }
  if (fam.members.size() > max_count) throw std::invalid_argument("family too large");
  return fam;
}

// ---------------------------------------------------------------------------
// Grid-function text format
// ---------------------------------------------------------------------------

inline void save_grid_function(const GridFunction& f, std::ostream& os) {
  os << std::setprecision(17);
  if (std::holds_alternative<Grid>(f.mesh())) {
    const Grid& g = std::get<Grid>(f.mesh());
    os << "# fraclab-grid v1 dim=" << g.dim << " extent=" << g.extent
       << " points=" << g.points_per_axis << "\n";
  } else {
    const RadialGrid& g = std::get<RadialGrid>(f.mesh());
    os << "# fraclab-radial v1 rmin=" << g.r_min << " rmax=" << g.r_max
       << " shells=" << g.shells;
    if (g.dim != 1) os << " dim=" << g.dim;
    os << "\n";
  }
  for (double v : f.values()) os << v << "\n";
}

inline void save_grid_function(const GridFunction& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  save_grid_function(f, os);
}

inline GridFunction load_grid_function(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("empty grid-function file");
  auto field = [&](const std::string& key) -> std::optional<std::string> {
    const auto pos = header.find(key + "=");
    if (pos == std::string::npos) return std::nullopt;
    const auto start = pos + key.size() + 1;
    const auto end = header.find(' ', start);
    return header.substr(start, end == std::string::npos ? std::string::npos : end - start);
  };
  Mesh mesh;
  if (header.rfind("# fraclab-grid v1", 0) == 0) {
    mesh = build_grid(std::stoi(*field("dim")), std::stod(*field("extent")),
                      std::stoi(*field("points")));
  } else if (header.rfind("# fraclab-radial v1", 0) == 0) {
    const auto d = field("dim");
    mesh = build_radial_grid(std::stod(*field("rmin")), std::stod(*field("rmax")),
                             std::stoi(*field("shells")), d ? std::stoi(*d) : 1);
  } else {
    throw std::runtime_error("unrecognized grid-function header");
  }
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    values.push_back(std::stod(line));
  }
  return GridFunction(mesh, std::move(values));
}

inline GridFunction load_grid_function(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_grid_function(is);
}

}  // namespace fraclab
