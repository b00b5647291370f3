#include "fracdecomp/extension.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracdecomp/parallel.hpp"

namespace fracdecomp {

namespace {

double bump_raw(double r2) {
  // exp(-1/(1-r^2)) for r^2 < 1, else 0
  return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

// One-time normalization by midpoint quadrature, 8192 points per dimension.
double bump_normalization(int dim) {
  constexpr int n = 8192;
  const double h = 2.0 / n;
  Accumulator acc;
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + (i + 0.5) * h;
      acc.add(bump_raw(x * x) * h);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + (i + 0.5) * h;
      Accumulator row;
      for (int j = 0; j < n; ++j) {
        const double y = -1.0 + (j + 0.5) * h;
        row.add(bump_raw(x * x + y * y));
      }
      acc.add(row.total() * h * h);
    }
  }
  return 1.0 / acc.total();
}

}  // namespace

Mollifier::Mollifier(int dim) : dim_(dim) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("Mollifier: dimension must be 1 or 2");
  static const double c1 = bump_normalization(1);
  static const double c2 = bump_normalization(2);
  c_norm_ = dim == 1 ? c1 : c2;
}

double Mollifier::value(const Point& h) const {
  double r2 = h[0] * h[0];
  if (dim_ == 2) r2 += h[1] * h[1];
  return c_norm_ * bump_raw(r2);
}

Point Mollifier::gradient(const Point& h) const {
  double r2 = h[0] * h[0];
  if (dim_ == 2) r2 += h[1] * h[1];
  Point g{0, 0};
  if (r2 >= 1.0) return g;
  const double d = 1.0 - r2;
  const double f = c_norm_ * std::exp(-1.0 / d) * (-2.0 / (d * d));
  g[0] = f * h[0];
  if (dim_ == 2) g[1] = f * h[1];
  return g;
}

Mollifier make_bump_mollifier(int dim) { return Mollifier(dim); }

std::array<double, 3> XiKernel::eval(const Point& h) const {
  const int n = dim();
  const double v = phi->value(h);
  const Point g = phi->gradient(h);
  std::array<double, 3> out{0, 0, 0};
  double hg = h[0] * g[0];
  if (n == 2) hg += h[1] * g[1];
  out[0] = g[0];
  if (n == 2) out[1] = g[1];
  out[static_cast<std::size_t>(n)] = -(n * v + hg);
  return out;
}

std::array<double, 3> xi_moment(const XiKernel& xi, int points_per_dim) {
  const int n = xi.dim();
  const double h = 2.0 / points_per_dim;
  Accumulator acc[3];
  if (n == 1) {
    for (int i = 0; i < points_per_dim; ++i) {
      const Point p{-1.0 + (i + 0.5) * h, 0.0};
      const auto v = xi.eval(p);
      acc[0].add(v[0] * h);
      acc[1].add(v[1] * h);
    }
  } else {
    for (int i = 0; i < points_per_dim; ++i) {
      for (int j = 0; j < points_per_dim; ++j) {
        const Point p{-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h};
        const auto v = xi.eval(p);
        for (int c = 0; c < 3; ++c) acc[c].add(v[static_cast<std::size_t>(c)] * h * h);
      }
    }
  }
  return {acc[0].total(), acc[1].total(), acc[2].total()};
}

BallQuadrature make_ball_quadrature(const Mollifier& phi, int total_points) {
  if (total_points < 2)
    throw std::invalid_argument("make_ball_quadrature: need >= 2 points");
  const int n = phi.dim();
  BallQuadrature q;
  if (n == 1) {
    const double h = 2.0 / total_points;
    for (int i = 0; i < total_points; ++i) {
      q.points.push_back({-1.0 + (i + 0.5) * h, 0.0});
      q.weights.push_back(h);
    }
  } else {
    const int per_dim =
        static_cast<int>(std::lround(std::sqrt(static_cast<double>(total_points))));
    const double h = 2.0 / per_dim;
    for (int i = 0; i < per_dim; ++i) {
      for (int j = 0; j < per_dim; ++j) {
        const Point p{-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h};
        if (p[0] * p[0] + p[1] * p[1] >= 1.0) continue;  // rejection
        q.points.push_back(p);
        q.weights.push_back(h * h);
      }
    }
  }
  // Renormalize once against the mollifier mass so constants extend exactly.
  Accumulator acc;
  for (std::size_t k = 0; k < q.points.size(); ++k)
    acc.add(q.weights[k] * phi.value(q.points[k]));
  const double scale = 1.0 / acc.total();
  for (auto& w : q.weights) w *= scale;
  return q;
}

namespace {

void check_extension_input(const SampledFunction& u, const TGrid& tgrid) {
  if (u.domain().kind() != DomainKind::WholeSpaceBox)
    throw std::invalid_argument(
        "extension: input must live on a whole-space box with compact "
        "support");
  if (!(tgrid.t_min() > 0.0))
    throw std::invalid_argument("extension: t_min must be positive");
}

Grid slab_for(const SampledFunction& u, const TGrid& tgrid) {
  const double reach = u.domain().support_radius() + tgrid.t_max();
  return widen_to(u.grid(), reach);
}

}  // namespace

HalfSpaceField extend_half_space(const SampledFunction& u,
                                 const Mollifier& phi, const TGrid& tgrid,
                                 const ExtensionParams& params, int threads) {
  check_extension_input(u, tgrid);
  if (phi.dim() != u.grid().dim())
    throw std::invalid_argument("extension: mollifier dimension mismatch");
  const Grid slab = slab_for(u, tgrid);
  const BallQuadrature q = make_ball_quadrature(phi, params.quad_points);
  std::vector<double> phi_at(q.points.size());
  for (std::size_t k = 0; k < q.points.size(); ++k)
    phi_at[k] = phi.value(q.points[k]);

  HalfSpaceField field(slab, tgrid, 1);
  field.set_base(u.domain(), u.grid());
  const std::size_t nx = slab.size();
  for (int lev = 0; lev < tgrid.levels(); ++lev) {
    const double t = tgrid.node(lev);
    parallel_for(
        nx,
        [&](std::size_t i) {
          const Point x = slab.node(i);
          Accumulator acc;
          for (std::size_t k = 0; k < q.points.size(); ++k) {
            Point y{x[0] - t * q.points[k][0], 0.0};
            if (slab.dim() == 2) y[1] = x[1] - t * q.points[k][1];
            acc.add(q.weights[k] * phi_at[k] * interpolate(u, y));
          }
          field.at(lev, i, 0) = acc.total();
        },
        threads);
  }
  return field;
}

HalfSpaceField gradient_field(const SampledFunction& u, const Mollifier& phi,
                              const TGrid& tgrid, const ExtensionParams& params,
                              int threads) {
  check_extension_input(u, tgrid);
  if (phi.dim() != u.grid().dim())
    throw std::invalid_argument("extension: mollifier dimension mismatch");
  const int n = u.grid().dim();
  const Grid slab = slab_for(u, tgrid);
  const XiKernel xi(phi);
  const BallQuadrature q = make_ball_quadrature(phi, params.quad_points);
  std::vector<std::array<double, 3>> xi_at(q.points.size());
  for (std::size_t k = 0; k < q.points.size(); ++k)
    xi_at[k] = xi.eval(q.points[k]);

  HalfSpaceField field(slab, tgrid, n + 1);
  field.set_base(u.domain(), u.grid());
  const std::size_t nx = slab.size();
  for (int lev = 0; lev < tgrid.levels(); ++lev) {
    const double t = tgrid.node(lev);
    parallel_for(
        nx,
        [&](std::size_t i) {
          const Point x = slab.node(i);
          const double ux = interpolate(u, x);
          Accumulator acc[3];
          for (std::size_t k = 0; k < q.points.size(); ++k) {
            Point y{x[0] - t * q.points[k][0], 0.0};
            if (n == 2) y[1] = x[1] - t * q.points[k][1];
            const double diff = interpolate(u, y) - ux;
            if (diff == 0.0) continue;
            const double w = q.weights[k] * diff;
            for (int c = 0; c <= n; ++c)
              acc[c].add(w * xi_at[k][static_cast<std::size_t>(c)]);
          }
          for (int c = 0; c <= n; ++c)
            field.at(lev, i, c) = acc[static_cast<std::size_t>(c)].total() / t;
        },
        threads);
  }
  return field;
}

namespace {

template <class PerNode>
double field_energy(const HalfSpaceField& field, PerNode&& value, int threads) {
  const std::size_t nx = field.xgrid().size();
  const double wx = field.xgrid().cell_volume();
  const int levels = field.tgrid().levels();
  Accumulator acc;
  for (int lev = 0; lev < levels; ++lev) {
    const double wt = field.tgrid().weight(lev);
    const double t = field.tgrid().node(lev);
    const double level_sum = parallel_block_sum(
        nx, [&](std::size_t i) { return value(lev, i, t); }, threads);
    acc.add(wt * wx * level_sum);
  }
  return acc.total();
}

}  // namespace

double weighted_min_energy(const HalfSpaceField& field,
                           const ExponentFamily& fam, int threads) {
  for (const auto& e : fam.pairs()) {
    if (!(e.s > 0.0 && e.s < 1.0) || !(e.p >= 1.0))
      throw std::invalid_argument("weighted_min_energy: exponent out of range");
  }
  return field_energy(
      field,
      [&](int lev, std::size_t i, double t) {
        const double a = field.norm_at(lev, i);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : fam.pairs())
          best = std::min(best, scale_weighted_power(a, t, e));
        return best;
      },
      threads);
}

double weighted_energy(const HalfSpaceField& field, double s, double p,
                       int threads) {
  if (!(s > 0.0 && s < 1.0) || !(p >= 1.0))
    throw std::invalid_argument("weighted_energy: exponent out of range");
  return field_energy(
      field,
      [&](int lev, std::size_t i, double t) {
        return scale_weighted_power(field.norm_at(lev, i), t, {s, p});
      },
      threads);
}

}  // namespace fracdecomp
