#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdecomp {

// Spatial dimension is 1 or 2 throughout; points are stored in a fixed-size
// array with unused trailing entries equal to zero.
using Point = std::array<double, 2>;

struct ExponentPair {
  double s = 0.5;  // smoothness order, in (0,1)
  double p = 2.0;  // integrability exponent, >= 1
};

/// The family (s_1,p_1),...,(s_l,p_l) driving every min/max functional.
class ExponentFamily {
 public:
  ExponentFamily() = default;
  explicit ExponentFamily(std::vector<ExponentPair> pairs);

  std::size_t size() const { return pairs_.size(); }
  const ExponentPair& operator[](std::size_t i) const { return pairs_[i]; }
  const std::vector<ExponentPair>& pairs() const { return pairs_; }

  static ExponentFamily single(double s, double p) {
    return ExponentFamily({{s, p}});
  }

 private:
  std::vector<ExponentPair> pairs_{{0.5, 2.0}};
};

enum class DomainKind : std::uint8_t {
  WholeSpaceBox,  // R^n truncated to [-L,L]^n, inputs compactly supported
  Ball,           // closed ball of radius R centred at the origin
  Box,            // bounded axis-aligned box
};

class Grid;

class Domain {
 public:
  static Domain whole_space(int dim, double support_radius,
                            double half_width = 0.0);
  static Domain ball(int dim, double radius);
  static Domain box(int dim, Point lo, Point hi);
  static Domain interval(double a, double b) { return box(1, {a, 0}, {b, 0}); }

  int dim() const { return dim_; }
  DomainKind kind() const { return kind_; }
  bool bounded() const { return kind_ != DomainKind::WholeSpaceBox; }

  double half_width() const { return half_width_; }      // WholeSpaceBox
  double radius() const { return radius_; }               // Ball
  double support_radius() const { return support_radius_; }

  // Bounding box of the computational region.
  double lo(int d) const { return lo_[static_cast<std::size_t>(d)]; }
  double hi(int d) const { return hi_[static_cast<std::size_t>(d)]; }

  /// Membership test used to mask quadrature cells for ball domains.
  bool contains(const Point& x) const;
  double volume() const;

  static double distance(const Point& a, const Point& b, int dim);

 private:
  int dim_ = 1;
  DomainKind kind_ = DomainKind::Box;
  double half_width_ = 0.0;
  double radius_ = 0.0;
  double support_radius_ = 0.0;
  Point lo_{0, 0};
  Point hi_{0, 0};
};

/// Uniform tensor grid whose nodes are cell midpoints.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, std::array<int, 2> cells, Point lo, Point hi);
  static Grid over(const Domain& dom, int cells_per_dim);

  int dim() const { return dim_; }
  int cells(int d) const { return cells_[static_cast<std::size_t>(d)]; }
  double lo(int d) const { return lo_[static_cast<std::size_t>(d)]; }
  double hi(int d) const { return hi_[static_cast<std::size_t>(d)]; }
  double spacing(int d) const { return spacing_[static_cast<std::size_t>(d)]; }
  double cell_volume() const;

  std::size_t size() const;  // total number of nodes
  double coord(int d, int i) const {
    return lo_[static_cast<std::size_t>(d)] +
           (i + 0.5) * spacing_[static_cast<std::size_t>(d)];
  }
  Point node(std::size_t flat) const;
  std::size_t flat(int i0, int i1 = 0) const {
    return dim_ == 1 ? static_cast<std::size_t>(i0)
                     : static_cast<std::size_t>(i0) *
                               static_cast<std::size_t>(cells_[1]) +
                           static_cast<std::size_t>(i1);
  }

  bool same_layout(const Grid& other) const;

 private:
  int dim_ = 1;
  std::array<int, 2> cells_{1, 1};
  Point lo_{0, 0};
  Point hi_{0, 0};
  Point spacing_{0, 0};
};

enum class QuadRule : std::uint8_t { Midpoint, Trapezoid };

/// Cell weights over the full tensor grid; they sum to the box volume.
std::vector<double> cell_quadrature_weights(const Grid& grid,
                                            QuadRule rule = QuadRule::Midpoint);

/// Cell weights masked to the domain (zero outside a ball domain).
std::vector<double> domain_quadrature_weights(const Domain& dom,
                                              const Grid& grid,
                                              QuadRule rule = QuadRule::Midpoint);

/// Scalar samples over a grid, tied to the domain they discretize.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(Domain domain, Grid grid, std::vector<double> values);
  SampledFunction(Domain domain, Grid grid,
                  const std::function<double(const Point&)>& f);

  const Domain& domain() const { return domain_; }
  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double max_abs() const;
  /// Quadrature mean over the domain.
  double mean() const;

 private:
  Domain domain_;
  Grid grid_;
  std::vector<double> values_;
};

/// Multilinear interpolation of f at x; exactly 0 outside the node hull.
double interpolate(const SampledFunction& f, const Point& x);
double interpolate(const Grid& grid, const std::vector<double>& values,
                   const Point& x);

/// Geometric grid in the scale variable t with log-midpoint cell weights.
class TGrid {
 public:
  TGrid() = default;
  static TGrid geometric(double t_min, double t_max, int levels);
  /// Spec defaults: t_min = h/4, t_max = 4L, 64 levels.
  static TGrid default_for(const Grid& grid, double half_width);

  int levels() const { return static_cast<int>(nodes_.size()); }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double ratio() const { return ratio_; }
  double node(int k) const { return nodes_[static_cast<std::size_t>(k)]; }
  double weight(int k) const { return weights_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Cell [node/sqrt(r), node*sqrt(r)] clipped to [a, b]; used by the
  /// scale-identity quadrature over a sub-range of levels.
  double clipped_weight(int k, double a, double b) const;
  int nearest_level(double t) const;

 private:
  double t_min_ = 0.0, t_max_ = 0.0, ratio_ = 1.0;
  std::vector<double> nodes_, weights_;
};

/// Samples of a (possibly vector-valued) field on an x-slab times a
/// geometric t-grid. Scalar extensions carry 1 component, gradient fields
/// carry dim+1.
class HalfSpaceField {
 public:
  HalfSpaceField() = default;
  HalfSpaceField(Grid xgrid, TGrid tgrid, int components);

  const Grid& xgrid() const { return xgrid_; }
  const TGrid& tgrid() const { return tgrid_; }
  int components() const { return components_; }

  double at(int level, std::size_t flat, int comp) const {
    return data_[index(level, flat, comp)];
  }
  double& at(int level, std::size_t flat, int comp) {
    return data_[index(level, flat, comp)];
  }
  /// Euclidean norm over components at one node.
  double norm_at(int level, std::size_t flat) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }
  double max_abs() const;

  // Base descriptor: the compactly supported sample box the field was
  // built from. Reconstruction targets default to it.
  void set_base(const Domain& dom, const Grid& grid) {
    base_domain_ = dom;
    base_grid_ = grid;
    has_base_ = true;
  }
  bool has_base() const { return has_base_; }
  const Domain& base_domain() const { return base_domain_; }
  const Grid& base_grid() const { return base_grid_; }

 private:
  std::size_t index(int level, std::size_t flat, int comp) const {
    return (static_cast<std::size_t>(level) * xgrid_.size() + flat) *
               static_cast<std::size_t>(components_) +
           static_cast<std::size_t>(comp);
  }

  Grid xgrid_;
  TGrid tgrid_;
  int components_ = 1;
  std::vector<double> data_;
  Domain base_domain_;
  Grid base_grid_;
  bool has_base_ = false;
};

/// Widen `grid` symmetrically to cover at least [-half_width, half_width]^n
/// keeping spacing and node alignment.
Grid widen_to(const Grid& grid, double half_width);

/// Values of `f` transferred to an aligned wider/narrower grid; nodes that
/// do not exist in `f` get zero. Throws if the grids are not aligned.
std::vector<double> transfer_values(const SampledFunction& f,
                                    const Grid& target);

}  // namespace fracdecomp
