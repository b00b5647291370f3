#include "fracdecomp/decomposition.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracdecomp/functionals.hpp"
#include "fracdecomp/parallel.hpp"

namespace fracdecomp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double radius_of(const Point& x, int dim) {
  double r2 = x[0] * x[0];
  if (dim == 2) r2 += x[1] * x[1];
  return std::sqrt(r2);
}

}  // namespace

Partition partition_argmin(const HalfSpaceField& gradient,
                           const ExponentFamily& fam) {
  require(gradient.components() == gradient.xgrid().dim() + 1,
          "partition_argmin: field must carry dim+1 components");
  const std::size_t l = fam.size();
  require(l <= 255, "partition_argmin: family too large");
  const Grid& xg = gradient.xgrid();
  const TGrid& tg = gradient.tgrid();
  const std::size_t nx = xg.size();

  Partition part;
  part.mask.xgrid = xg;
  part.mask.tgrid = tg;
  part.mask.index.assign(static_cast<std::size_t>(tg.levels()) * nx, 0);
  part.thetas.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    part.thetas.emplace_back(xg, tg, gradient.components());
    part.thetas.back().set_base(gradient.base_domain(), gradient.base_grid());
  }

  for (int lev = 0; lev < tg.levels(); ++lev) {
    const double t = tg.node(lev);
    for (std::size_t f = 0; f < nx; ++f) {
      const double a = gradient.norm_at(lev, f);
      // smallest index attaining the minimum: strict improvement only
      std::size_t best = 0;
      double best_val = scale_weighted_power(a, t, fam[0]);
      for (std::size_t i = 1; i < l; ++i) {
        const double v = scale_weighted_power(a, t, fam[i]);
        if (v < best_val) {
          best_val = v;
          best = i;
        }
      }
      part.mask.index[static_cast<std::size_t>(lev) * nx + f] =
          static_cast<std::uint8_t>(best);
      for (int c = 0; c < gradient.components(); ++c)
        part.thetas[best].at(lev, f, c) = gradient.at(lev, f, c);
    }
  }
  return part;
}

std::vector<double> partition_energies(const Partition& part,
                                       const ExponentFamily& fam,
                                       int threads) {
  require(part.thetas.size() == fam.size(),
          "partition_energies: family size mismatch");
  std::vector<double> energies(fam.size());
  for (std::size_t i = 0; i < fam.size(); ++i)
    energies[i] = weighted_energy(part.thetas[i], fam[i].s, fam[i].p, threads);
  return energies;
}

PipelineParams PipelineParams::resolved(const Grid& grid,
                                        double support_radius) const {
  PipelineParams out = *this;
  const double h = grid.spacing(0);
  if (out.t_min <= 0.0) out.t_min = h / 4.0;
  if (out.t_max <= 0.0) {
    // Truncation window that refines together with the grid: the dropped
    // scale tail shrinks like h at fixed support radius.
    out.t_max = 0.75 * support_radius * support_radius / h;
    out.t_max = std::max(out.t_max, 8.0 * support_radius);
  }
  if (out.levels <= 0) out.levels = std::max(48, grid.cells(0) / 4);
  return out;
}

namespace {

// Extension values U(., t) over a grid at a single scale.
std::vector<double> extension_at_scale(const SampledFunction& u,
                                       const BallQuadrature& q,
                                       const Mollifier& phi, const Grid& grid,
                                       double t, int threads) {
  std::vector<double> out(grid.size(), 0.0);
  std::vector<double> phi_at(q.points.size());
  for (std::size_t k = 0; k < q.points.size(); ++k)
    phi_at[k] = phi.value(q.points[k]);
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        const Point x = grid.node(i);
        Accumulator acc;
        for (std::size_t k = 0; k < q.points.size(); ++k) {
          Point y{x[0] - t * q.points[k][0], 0.0};
          if (grid.dim() == 2) y[1] = x[1] - t * q.points[k][1];
          acc.add(q.weights[k] * phi_at[k] * interpolate(u, y));
        }
        out[i] = acc.total();
      },
      threads);
  return out;
}

// Dropped boundary term of the scale integral: sup over base nodes of the
// mollified trace of U(., t_max) at scale t_max.
double tail_estimate(const SampledFunction& u, const Mollifier& phi,
                     const ReconstructionKernel& psi, const Grid& slab,
                     double t_max, int quad_points, int threads) {
  const BallQuadrature q = make_ball_quadrature(phi, quad_points);
  const std::vector<double> top =
      extension_at_scale(u, q, phi, slab, t_max, threads);
  const Grid& base = u.grid();
  const int n = base.dim();
  double worst = 0.0;
  const double wx = slab.cell_volume();
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Point x = base.node(i);
    Accumulator acc;
    for (std::size_t j = 0; j < slab.size(); ++j) {
      const Point y = slab.node(j);
      Point z{(x[0] - y[0]) / t_max, 0.0};
      if (n == 2) z[1] = (x[1] - y[1]) / t_max;
      const double pt = psi.eval(z).psi_t;
      if (pt != 0.0) acc.add(pt * top[j]);
    }
    worst = std::max(worst,
                     std::abs(acc.total() * wx / std::pow(t_max, n)));
  }
  return worst;
}

double head_estimate(const SampledFunction& u, const Mollifier& phi,
                     double t_min, int quad_points, int threads) {
  const BallQuadrature q = make_ball_quadrature(phi, quad_points);
  const std::vector<double> bottom =
      extension_at_scale(u, q, phi, u.grid(), t_min, threads);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.grid().size(); ++i)
    worst = std::max(worst, std::abs(bottom[i] - u[i]));
  return worst;
}

}  // namespace

Decomposition decompose_whole_space(const SampledFunction& u,
                                    const ExponentFamily& fam,
                                    const Mollifier& phi,
                                    const ReconstructionKernel& psi,
                                    const PipelineParams& params) {
  require(u.domain().kind() == DomainKind::WholeSpaceBox,
          "decompose_whole_space: input must be compactly supported on a "
          "whole-space box");
  const PipelineParams pp =
      params.resolved(u.grid(), u.domain().support_radius());
  const TGrid tgrid = TGrid::geometric(pp.t_min, pp.t_max, pp.levels);
  ExtensionParams ext{pp.quad_points};

  const HalfSpaceField grad = gradient_field(u, phi, tgrid, ext, pp.threads);
  Partition part = partition_argmin(grad, fam);

  Decomposition dec;
  dec.fam = fam;
  dec.components.reserve(fam.size());
  for (std::size_t i = 0; i < fam.size(); ++i) {
    dec.components.push_back(
        reconstruct(psi, part.thetas[i], u.domain(), u.grid(), pp.threads));
  }

  auto& d = dec.diagnostics;
  std::vector<double> sum(u.grid().size(), 0.0);
  for (std::size_t f = 0; f < sum.size(); ++f) {
    Accumulator acc;
    for (const auto& c : dec.components) acc.add(c[f]);
    sum[f] = acc.total();
  }
  for (std::size_t f = 0; f < sum.size(); ++f)
    d.residual_inf = std::max(d.residual_inf, std::abs(sum[f] - u[f]));
  const double scale = u.max_abs();
  d.residual_rel = scale > 0.0 ? d.residual_inf / scale : d.residual_inf;
  for (const auto& c : dec.components) d.component_means.push_back(c.mean());
  if (pp.with_energies) {
    d.e_min = min_functional(u, fam, pp.threads);
    d.e_max = max_functional(dec.components, fam, pp.threads);
    d.constant = d.e_min > 0.0 ? d.e_max / d.e_min : 0.0;
  }
  d.head_estimate = head_estimate(u, phi, pp.t_min, pp.quad_points, pp.threads);
  d.tail_estimate = tail_estimate(u, phi, psi, grad.xgrid(), pp.t_max,
                                  pp.quad_points, pp.threads);
  return dec;
}

double CutoffProfile::operator()(double r) const {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (2.0 * r - 1.0)));
}

double CutoffProfile::derivative(double r) const {
  if (r <= 0.5 || r >= 1.0) return 0.0;
  return -std::numbers::pi * std::sin(std::numbers::pi * (2.0 * r - 1.0));
}

double CutoffProfile::lipschitz() const { return std::numbers::pi; }

CutoffResult cutoff(const SampledFunction& u, const SampledFunction& eta,
                    double eta_lipschitz, const ExponentFamily& fam,
                    int threads) {
  require(u.domain().kind() == DomainKind::Ball,
          "cutoff: u must live on a ball");
  require(eta.grid().same_layout(u.grid()),
          "cutoff: eta must share the grid of u");
  const double R = u.domain().radius();
  const int dim = u.grid().dim();
  const double h = u.grid().spacing(0);

  const double mean = u.mean();
  require(std::abs(mean) <= 1e-9 * (1.0 + u.max_abs()),
          "cutoff: u must have zero mean over the ball (subtract it first)");

  if (eta_lipschitz <= 0.0) {
    // estimate from grid differences along each axis
    const Grid& g = u.grid();
    for (std::size_t f = 0; f < g.size(); ++f) {
      const Point x = g.node(f);
      if (dim == 1) {
        const int i = static_cast<int>(f);
        if (i + 1 < g.cells(0))
          eta_lipschitz = std::max(
              eta_lipschitz, std::abs(eta[f + 1] - eta[f]) / h);
      } else {
        const int i = static_cast<int>(f) / g.cells(1);
        const int j = static_cast<int>(f) % g.cells(1);
        if (i + 1 < g.cells(0))
          eta_lipschitz =
              std::max(eta_lipschitz,
                       std::abs(eta[g.flat(i + 1, j)] - eta[f]) / h);
        if (j + 1 < g.cells(1))
          eta_lipschitz =
              std::max(eta_lipschitz,
                       std::abs(eta[g.flat(i, j + 1)] - eta[f]) /
                           g.spacing(1));
      }
      (void)x;
    }
  }

  // Support check: eta must vanish outside the ball and decay to zero at
  // the boundary no slower than its Lipschitz rate allows.
  const double eta_max = eta.max_abs();
  for (std::size_t f = 0; f < u.grid().size(); ++f) {
    const Point x = u.grid().node(f);
    const double r = radius_of(x, dim);
    if (r > R) {
      require(eta[f] == 0.0, "cutoff: eta must vanish outside the ball");
    } else if (R - r <= h) {
      require(std::abs(eta[f]) <= eta_lipschitz * h * (1.0 + 1e-9),
              "cutoff: eta is not supported inside the ball");
    }
  }
  (void)eta_max;

  // eta*u extended by zero to a whole-space box with 2x support margin.
  const Domain box_dom = Domain::whole_space(dim, R, 2.0 * R);
  const Grid box_grid = widen_to(u.grid(), 2.0 * R);
  std::vector<double> prod_ball(u.grid().size());
  for (std::size_t f = 0; f < prod_ball.size(); ++f)
    prod_ball[f] = u.domain().contains(u.grid().node(f)) ? eta[f] * u[f] : 0.0;
  const SampledFunction prod_on_ball(
      Domain::ball(dim, R), u.grid(), std::move(prod_ball));
  SampledFunction product(box_dom, box_grid,
                          transfer_values(prod_on_ball, box_grid));

  CutoffResult res{product, 0.0, 0.0, 0.0};
  res.lhs = min_functional(product, fam, threads);
  // rhs: min functional of (R |eta|_lip) * u over the ball
  std::vector<double> scaled(u.values());
  const double c = R * eta_lipschitz;
  for (auto& v : scaled) v *= c;
  const SampledFunction su(u.domain(), u.grid(), std::move(scaled));
  res.rhs = min_functional(su, fam, threads);
  res.constant = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
  return res;
}

SampledFunction truncate_uR(const SampledFunction& u, double R,
                            const CutoffProfile& profile) {
  const int dim = u.grid().dim();
  for (int d = 0; d < dim; ++d) {
    require(u.grid().lo(d) <= -R && u.grid().hi(d) >= R,
            "truncate_uR: R exceeds the sample box");
  }
  const Domain ball = Domain::ball(dim, R);
  // mean over B(0,R) on the grid
  Accumulator num, den;
  const auto w = cell_quadrature_weights(u.grid());
  for (std::size_t f = 0; f < u.grid().size(); ++f) {
    if (!ball.contains(u.grid().node(f))) continue;
    num.add(w[f] * u[f]);
    den.add(w[f]);
  }
  const double mean = num.total() / den.total();
  std::vector<double> values(u.grid().size());
  for (std::size_t f = 0; f < values.size(); ++f) {
    const Point x = u.grid().node(f);
    values[f] = profile(radius_of(x, dim) / R) * (u[f] - mean);
  }
  return SampledFunction(u.domain(), u.grid(), std::move(values));
}

BallExtensionResult ball_extension(const SampledFunction& u,
                                   const ExponentFamily& fam,
                                   bool with_energies, int threads) {
  require(u.domain().kind() == DomainKind::Ball,
          "ball_extension: input must live on a ball");
  const double R = u.domain().radius();
  const int dim = u.grid().dim();
  require(u.grid().cells(0) % 2 == 0,
          "ball_extension: need an even cell count for node alignment");

  const Domain big = Domain::ball(dim, 2.0 * R);
  const Grid big_grid = widen_to(u.grid(), 2.0 * R);
  std::vector<double> inner = transfer_values(u, big_grid);
  std::vector<double> values(big_grid.size());
  for (std::size_t f = 0; f < big_grid.size(); ++f) {
    const Point x = big_grid.node(f);
    const double r = radius_of(x, dim);
    if (r <= R) {
      values[f] = inner[f];  // identity at matching nodes
    } else {
      const double scale = R * R / (r * r);
      Point y{x[0] * scale, 0.0};
      if (dim == 2) y[1] = x[1] * scale;
      values[f] = interpolate(u, y);
    }
  }
  BallExtensionResult res{SampledFunction(big, big_grid, std::move(values)),
                          0.0, 0.0, 0.0};
  if (with_energies) {
    res.lhs = min_functional(res.extended, fam, threads);
    res.rhs = min_functional(u, fam, threads);
    res.constant = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
  }
  return res;
}

Decomposition decompose_ball(const SampledFunction& u,
                             const ExponentFamily& fam, const Mollifier& phi,
                             const ReconstructionKernel& psi,
                             const PipelineParams& params) {
  require(u.domain().kind() == DomainKind::Ball,
          "decompose_ball: input must live on a ball");
  const double R = u.domain().radius();
  const int dim = u.grid().dim();
  const std::size_t l = fam.size();

  BallExtensionResult ext = ball_extension(u, fam, false, params.threads);
  const SampledFunction& ut = ext.extended;

  const double m = ut.mean();  // over B(0,2R)
  const CutoffProfile profile;
  std::vector<double> v_vals(ut.grid().size());
  for (std::size_t f = 0; f < v_vals.size(); ++f) {
    const Point x = ut.grid().node(f);
    v_vals[f] = profile(radius_of(x, dim) / (2.0 * R)) * (ut[f] - m);
  }
  const Domain box_dom = Domain::whole_space(dim, 2.0 * R);
  const Grid box_grid = widen_to(ut.grid(), box_dom.half_width());
  const SampledFunction v(
      box_dom, box_grid,
      transfer_values(
          SampledFunction(Domain::ball(dim, 2.0 * R), ut.grid(),
                          std::move(v_vals)),
          box_grid));

  PipelineParams inner = params;
  inner.with_energies = false;
  Decomposition whole = decompose_whole_space(v, fam, phi, psi, inner);

  Decomposition dec;
  dec.fam = fam;
  const double shift = m / static_cast<double>(l);
  for (std::size_t i = 0; i < l; ++i) {
    SampledFunction comp(
        u.domain(), u.grid(),
        transfer_values(whole.components[i], u.grid()));
    for (auto& val : comp.values()) val += shift;
    dec.components.push_back(std::move(comp));
  }

  auto& d = dec.diagnostics;
  for (std::size_t f = 0; f < u.grid().size(); ++f) {
    if (!u.domain().contains(u.grid().node(f))) continue;
    Accumulator acc;
    for (const auto& c : dec.components) acc.add(c[f]);
    d.residual_inf = std::max(d.residual_inf, std::abs(acc.total() - u[f]));
  }
  const double scale = u.max_abs();
  d.residual_rel = scale > 0.0 ? d.residual_inf / scale : d.residual_inf;
  for (const auto& c : dec.components) d.component_means.push_back(c.mean());
  if (params.with_energies) {
    d.e_min = min_functional(u, fam, params.threads);
    d.e_max = max_functional(dec.components, fam, params.threads);
    d.constant = d.e_min > 0.0 ? d.e_max / d.e_min : 0.0;
  }
  d.head_estimate = whole.diagnostics.head_estimate;
  d.tail_estimate = whole.diagnostics.tail_estimate;
  return dec;
}

}  // namespace fracdecomp
