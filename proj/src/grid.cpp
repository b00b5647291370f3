#include "fracdecomp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracdecomp/parallel.hpp"

namespace fracdecomp {

namespace {
void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

ExponentFamily::ExponentFamily(std::vector<ExponentPair> pairs)
    : pairs_(std::move(pairs)) {
  require(!pairs_.empty(), "ExponentFamily: at least one (s,p) pair required");
  for (const auto& e : pairs_) {
    require(std::isfinite(e.s) && std::isfinite(e.p),
            "ExponentFamily: non-finite exponent");
    require(e.s > 0.0 && e.s < 1.0, "ExponentFamily: s must lie in (0,1)");
    require(e.p >= 1.0, "ExponentFamily: p must be >= 1");
  }
}

Domain Domain::whole_space(int dim, double support_radius, double half_width) {
  require(dim == 1 || dim == 2, "Domain: dimension must be 1 or 2");
  require(support_radius > 0.0 && std::isfinite(support_radius),
          "Domain: support radius must be positive");
  if (half_width <= 0.0) half_width = 2.0 * support_radius;
  require(half_width >= support_radius,
          "Domain: box must contain the declared support");
  Domain d;
  d.dim_ = dim;
  d.kind_ = DomainKind::WholeSpaceBox;
  d.half_width_ = half_width;
  d.support_radius_ = support_radius;
  for (int i = 0; i < dim; ++i) {
    d.lo_[static_cast<std::size_t>(i)] = -half_width;
    d.hi_[static_cast<std::size_t>(i)] = half_width;
  }
  return d;
}

Domain Domain::ball(int dim, double radius) {
  require(dim == 1 || dim == 2, "Domain: dimension must be 1 or 2");
  require(radius > 0.0 && std::isfinite(radius),
          "Domain: ball radius must be positive");
  Domain d;
  d.dim_ = dim;
  d.kind_ = DomainKind::Ball;
  d.radius_ = radius;
  for (int i = 0; i < dim; ++i) {
    d.lo_[static_cast<std::size_t>(i)] = -radius;
    d.hi_[static_cast<std::size_t>(i)] = radius;
  }
  return d;
}

Domain Domain::box(int dim, Point lo, Point hi) {
  require(dim == 1 || dim == 2, "Domain: dimension must be 1 or 2");
  for (int i = 0; i < dim; ++i) {
    require(lo[static_cast<std::size_t>(i)] < hi[static_cast<std::size_t>(i)],
            "Domain: box bounds must satisfy lo < hi");
  }
  Domain d;
  d.dim_ = dim;
  d.kind_ = DomainKind::Box;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

bool Domain::contains(const Point& x) const {
  if (kind_ == DomainKind::Ball) {
    double r2 = 0.0;
    for (int i = 0; i < dim_; ++i)
      r2 += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    return r2 <= radius_ * radius_;
  }
  for (int i = 0; i < dim_; ++i) {
    const auto d = static_cast<std::size_t>(i);
    if (x[d] < lo_[d] || x[d] > hi_[d]) return false;
  }
  return true;
}

double Domain::volume() const {
  if (kind_ == DomainKind::Ball) {
    return dim_ == 1 ? 2.0 * radius_ : std::numbers::pi * radius_ * radius_;
  }
  double v = 1.0;
  for (int i = 0; i < dim_; ++i)
    v *= hi_[static_cast<std::size_t>(i)] - lo_[static_cast<std::size_t>(i)];
  return v;
}

double Domain::distance(const Point& a, const Point& b, int dim) {
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d =
        a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    r2 += d * d;
  }
  return std::sqrt(r2);
}

Grid::Grid(int dim, std::array<int, 2> cells, Point lo, Point hi)
    : dim_(dim), cells_(cells), lo_(lo), hi_(hi) {
  require(dim == 1 || dim == 2, "Grid: dimension must be 1 or 2");
  for (int i = 0; i < dim; ++i) {
    const auto d = static_cast<std::size_t>(i);
    require(cells_[d] >= 1, "Grid: need at least one cell per dimension");
    require(lo_[d] < hi_[d], "Grid: bounds must satisfy lo < hi");
    spacing_[d] = (hi_[d] - lo_[d]) / cells_[d];
  }
  if (dim == 1) {
    cells_[1] = 1;
    spacing_[1] = 0.0;
  }
}

Grid Grid::over(const Domain& dom, int cells_per_dim) {
  std::array<int, 2> c{cells_per_dim, cells_per_dim};
  Point lo{dom.lo(0), 0}, hi{dom.hi(0), 0};
  if (dom.dim() == 2) {
    lo[1] = dom.lo(1);
    hi[1] = dom.hi(1);
  }
  return Grid(dom.dim(), c, lo, hi);
}

double Grid::cell_volume() const {
  double v = spacing_[0];
  if (dim_ == 2) v *= spacing_[1];
  return v;
}

std::size_t Grid::size() const {
  std::size_t n = static_cast<std::size_t>(cells_[0]);
  if (dim_ == 2) n *= static_cast<std::size_t>(cells_[1]);
  return n;
}

Point Grid::node(std::size_t flat) const {
  Point x{0, 0};
  if (dim_ == 1) {
    x[0] = coord(0, static_cast<int>(flat));
  } else {
    const auto ny = static_cast<std::size_t>(cells_[1]);
    x[0] = coord(0, static_cast<int>(flat / ny));
    x[1] = coord(1, static_cast<int>(flat % ny));
  }
  return x;
}

bool Grid::same_layout(const Grid& other) const {
  if (dim_ != other.dim_) return false;
  for (int d = 0; d < dim_; ++d) {
    if (cells(d) != other.cells(d)) return false;
    if (std::abs(lo(d) - other.lo(d)) > 1e-12 * (1.0 + std::abs(lo(d))))
      return false;
    if (std::abs(hi(d) - other.hi(d)) > 1e-12 * (1.0 + std::abs(hi(d))))
      return false;
  }
  return true;
}

std::vector<double> cell_quadrature_weights(const Grid& grid, QuadRule rule) {
  const std::size_t n = grid.size();
  std::vector<double> w(n, grid.cell_volume());
  if (rule == QuadRule::Trapezoid) {
    // Composite trapezoid over midpoint nodes, rescaled once so the
    // partition-of-unity invariant (sum = box volume) is preserved.
    auto factor = [&](int d, int i) {
      return (i == 0 || i == grid.cells(d) - 1) ? 0.5 : 1.0;
    };
    double total = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      double c = 1.0;
      if (grid.dim() == 1) {
        c = factor(0, static_cast<int>(f));
      } else {
        const auto ny = static_cast<std::size_t>(grid.cells(1));
        c = factor(0, static_cast<int>(f / ny)) *
            factor(1, static_cast<int>(f % ny));
      }
      w[f] *= c;
      total += w[f];
    }
    double volume = 1.0;
    for (int d = 0; d < grid.dim(); ++d) volume *= grid.hi(d) - grid.lo(d);
    const double scale = volume / total;
    for (auto& v : w) v *= scale;
  }
  return w;
}

std::vector<double> domain_quadrature_weights(const Domain& dom,
                                              const Grid& grid, QuadRule rule) {
  std::vector<double> w = cell_quadrature_weights(grid, rule);
  if (dom.kind() == DomainKind::Ball) {
    for (std::size_t f = 0; f < w.size(); ++f) {
      if (!dom.contains(grid.node(f))) w[f] = 0.0;
    }
  }
  return w;
}

SampledFunction::SampledFunction(Domain domain, Grid grid,
                                 std::vector<double> values)
    : domain_(domain), grid_(grid), values_(std::move(values)) {
  require(domain_.dim() == grid_.dim(),
          "SampledFunction: domain/grid dimension mismatch");
  require(values_.size() == grid_.size(),
          "SampledFunction: value count does not match grid");
  for (double v : values_)
    require(std::isfinite(v), "SampledFunction: non-finite sample");
}

SampledFunction::SampledFunction(Domain domain, Grid grid,
                                 const std::function<double(const Point&)>& f)
    : domain_(domain), grid_(grid) {
  require(domain_.dim() == grid_.dim(),
          "SampledFunction: domain/grid dimension mismatch");
  values_.resize(grid_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] = f(grid_.node(i));
    require(std::isfinite(values_[i]), "SampledFunction: non-finite sample");
  }
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SampledFunction::mean() const {
  const auto w = domain_quadrature_weights(domain_, grid_);
  Accumulator num, den;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    num.add(w[i] * values_[i]);
    den.add(w[i]);
  }
  return num.total() / den.total();
}

double interpolate(const Grid& grid, const std::vector<double>& values,
                   const Point& x) {
  for (int d = 0; d < grid.dim(); ++d) {
    if (!std::isfinite(x[static_cast<std::size_t>(d)]))
      throw std::invalid_argument("interpolate: non-finite query point");
  }
  int i0[2] = {0, 0};
  double f[2] = {0.0, 0.0};
  for (int d = 0; d < grid.dim(); ++d) {
    const double lo = grid.coord(d, 0);
    const double hi = grid.coord(d, grid.cells(d) - 1);
    const double xd = x[static_cast<std::size_t>(d)];
    if (xd < lo || xd > hi) return 0.0;  // zero extension
    if (grid.cells(d) == 1) {
      i0[d] = 0;
      f[d] = 0.0;
      continue;
    }
    double u = (xd - lo) / grid.spacing(d);
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, grid.cells(d) - 2);
    i0[d] = i;
    f[d] = u - i;
  }
  if (grid.dim() == 1) {
    const auto a = static_cast<std::size_t>(i0[0]);
    const std::size_t b = std::min(a + 1, grid.size() - 1);
    return values[a] * (1.0 - f[0]) + values[b] * f[0];
  }
  const int nx = grid.cells(0), ny = grid.cells(1);
  const int ia = i0[0], ib = std::min(i0[0] + 1, nx - 1);
  const int ja = i0[1], jb = std::min(i0[1] + 1, ny - 1);
  const double v00 = values[grid.flat(ia, ja)];
  const double v01 = values[grid.flat(ia, jb)];
  const double v10 = values[grid.flat(ib, ja)];
  const double v11 = values[grid.flat(ib, jb)];
  return (v00 * (1 - f[0]) + v10 * f[0]) * (1 - f[1]) +
         (v01 * (1 - f[0]) + v11 * f[0]) * f[1];
}

double interpolate(const SampledFunction& fn, const Point& x) {
  return interpolate(fn.grid(), fn.values(), x);
}

TGrid TGrid::geometric(double t_min, double t_max, int levels) {
  if (!(t_min > 0.0) || !(t_max > t_min))
    throw std::invalid_argument("TGrid: need 0 < t_min < t_max");
  if (levels < 2) throw std::invalid_argument("TGrid: need at least 2 levels");
  TGrid g;
  g.t_min_ = t_min;
  g.t_max_ = t_max;
  g.ratio_ = std::pow(t_max / t_min, 1.0 / (levels - 1));
  g.nodes_.resize(static_cast<std::size_t>(levels));
  g.weights_.resize(static_cast<std::size_t>(levels));
  const double sr = std::sqrt(g.ratio_);
  for (int k = 0; k < levels; ++k) {
    const double t = t_min * std::pow(g.ratio_, k);
    g.nodes_[static_cast<std::size_t>(k)] = t;
    g.weights_[static_cast<std::size_t>(k)] = t * (sr - 1.0 / sr);
  }
  return g;
}

TGrid TGrid::default_for(const Grid& grid, double half_width) {
  return geometric(grid.spacing(0) / 4.0, 4.0 * half_width, 64);
}

double TGrid::clipped_weight(int k, double a, double b) const {
  const double t = node(k);
  const double sr = std::sqrt(ratio_);
  const double lo = std::max(t / sr, a);
  const double hi = std::min(t * sr, b);
  return std::max(0.0, hi - lo);
}

int TGrid::nearest_level(double t) const {
  int best = 0;
  double best_err = std::abs(std::log(nodes_[0] / t));
  for (int k = 1; k < levels(); ++k) {
    const double e = std::abs(std::log(node(k) / t));
    if (e < best_err) {
      best_err = e;
      best = k;
    }
  }
  return best;
}

HalfSpaceField::HalfSpaceField(Grid xgrid, TGrid tgrid, int components)
    : xgrid_(xgrid), tgrid_(tgrid), components_(components) {
  if (components < 1)
    throw std::invalid_argument("HalfSpaceField: need >= 1 component");
  data_.assign(static_cast<std::size_t>(tgrid_.levels()) * xgrid_.size() *
                   static_cast<std::size_t>(components_),
               0.0);
}

double HalfSpaceField::norm_at(int level, std::size_t flat) const {
  double r2 = 0.0;
  for (int c = 0; c < components_; ++c) {
    const double v = at(level, flat, c);
    r2 += v * v;
  }
  return std::sqrt(r2);
}

double HalfSpaceField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Grid widen_to(const Grid& grid, double half_width) {
  std::array<int, 2> cells{grid.cells(0), grid.dim() == 2 ? grid.cells(1) : 1};
  Point lo{grid.lo(0), 0}, hi{grid.hi(0), 0};
  if (grid.dim() == 2) {
    lo[1] = grid.lo(1);
    hi[1] = grid.hi(1);
  }
  for (int d = 0; d < grid.dim(); ++d) {
    const auto ds = static_cast<std::size_t>(d);
    const double h = grid.spacing(d);
    const int extra_lo =
        std::max(0, static_cast<int>(std::ceil((lo[ds] + half_width) / h - 1e-9)));
    const int extra_hi =
        std::max(0, static_cast<int>(std::ceil((half_width - hi[ds]) / h - 1e-9)));
    lo[ds] -= extra_lo * h;
    hi[ds] += extra_hi * h;
    cells[ds] += extra_lo + extra_hi;
  }
  return Grid(grid.dim(), cells, lo, hi);
}

std::vector<double> transfer_values(const SampledFunction& f,
                                    const Grid& target) {
  const Grid& src = f.grid();
  if (src.dim() != target.dim())
    throw std::invalid_argument("transfer_values: dimension mismatch");
  int off[2] = {0, 0};
  for (int d = 0; d < src.dim(); ++d) {
    const double h = src.spacing(d);
    if (std::abs(h - target.spacing(d)) > 1e-12 * h)
      throw std::invalid_argument("transfer_values: spacing mismatch");
    const double shift = (src.lo(d) - target.lo(d)) / h;
    off[d] = static_cast<int>(std::llround(shift));
    if (std::abs(shift - off[d]) > 1e-9)
      throw std::invalid_argument("transfer_values: grids are not aligned");
  }
  std::vector<double> out(target.size(), 0.0);
  if (src.dim() == 1) {
    for (int i = 0; i < src.cells(0); ++i) {
      const int j = i + off[0];
      if (j >= 0 && j < target.cells(0))
        out[static_cast<std::size_t>(j)] = f[static_cast<std::size_t>(i)];
    }
  } else {
    for (int ix = 0; ix < src.cells(0); ++ix) {
      const int jx = ix + off[0];
      if (jx < 0 || jx >= target.cells(0)) continue;
      for (int iy = 0; iy < src.cells(1); ++iy) {
        const int jy = iy + off[1];
        if (jy < 0 || jy >= target.cells(1)) continue;
        out[target.flat(jx, jy)] = f[src.flat(ix, iy)];
      }
    }
  }
  return out;
}

}  // namespace fracdecomp
