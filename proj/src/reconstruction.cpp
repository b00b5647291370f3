#include "fracdecomp/reconstruction.hpp"

#include <cmath>
#include <stdexcept>

#include "fracdecomp/functionals.hpp"
#include "fracdecomp/parallel.hpp"

namespace fracdecomp {

ReconstructionKernel canonical_kernel(const Mollifier& phi) {
  const int n = phi.dim();
  return ReconstructionKernel(n, [phi, n](const Point& h) {
    ReconstructionKernel::Eval e;
    const double v = phi.value(h);
    const Point g = phi.gradient(h);
    double hg = h[0] * g[0];
    if (n == 2) hg += h[1] * g[1];
    e.psi_x[0] = -h[0] * v;
    if (n == 2) e.psi_x[1] = -h[1] * v;
    e.psi_t = v;
    e.div_psi_x = -(n * v + hg);
    e.grad_psi_t = g;
    return e;
  });
}

namespace {

double halton(std::size_t index, int base) {
  double f = 1.0, r = 0.0;
  std::size_t i = index;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::size_t>(base));
    i /= static_cast<std::size_t>(base);
  }
  return r;
}

}  // namespace

KernelValidation validate_kernel(const ReconstructionKernel& k,
                                 int sample_count) {
  const int n = k.dim();
  KernelValidation out;
  for (std::size_t i = 1; i <= static_cast<std::size_t>(sample_count); ++i) {
    Point h{2.0 * halton(i, 2) - 1.0, 0.0};
    if (n == 2) h[1] = 2.0 * halton(i, 3) - 1.0;
    const auto e = k.eval(h);
    double hg = h[0] * e.grad_psi_t[0];
    if (n == 2) hg += h[1] * e.grad_psi_t[1];
    const double residual = e.div_psi_x + hg + n * e.psi_t;
    out.max_residual = std::max(out.max_residual, std::abs(residual));
  }
  // psi_t mass by midpoint quadrature, independent resolution.
  constexpr int q = 2048;
  const double h = 2.0 / q;
  Accumulator acc;
  if (n == 1) {
    for (int i = 0; i < q; ++i)
      acc.add(k.eval({-1.0 + (i + 0.5) * h, 0.0}).psi_t * h);
  } else {
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        acc.add(k.eval({-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h}).psi_t * h *
                h);
  }
  out.psi_t_mass_error = std::abs(acc.total() - 1.0);
  return out;
}

namespace {

// Mollified trace (1/t^n) sum_y psi_t((x-y)/t) U(y, t) w_y at one t-level.
double mollified_trace(const ReconstructionKernel& k,
                       const HalfSpaceField& ext, int level, const Point& x) {
  const Grid& g = ext.xgrid();
  const double t = ext.tgrid().node(level);
  const double wx = g.cell_volume();
  const int n = g.dim();
  Accumulator acc;
  // restrict the scan to the kernel support |x - y| < t
  const int i_lo =
      std::max(0, static_cast<int>(std::floor((x[0] - t - g.lo(0)) / g.spacing(0))));
  const int i_hi = std::min(
      g.cells(0) - 1,
      static_cast<int>(std::ceil((x[0] + t - g.lo(0)) / g.spacing(0))));
  if (n == 1) {
    for (int i = i_lo; i <= i_hi; ++i) {
      const Point z{(x[0] - g.coord(0, i)) / t, 0.0};
      const double pt = k.eval(z).psi_t;
      if (pt != 0.0)
        acc.add(pt * ext.at(level, static_cast<std::size_t>(i), 0));
    }
  } else {
    const int j_lo = std::max(
        0, static_cast<int>(std::floor((x[1] - t - g.lo(1)) / g.spacing(1))));
    const int j_hi = std::min(
        g.cells(1) - 1,
        static_cast<int>(std::ceil((x[1] + t - g.lo(1)) / g.spacing(1))));
    for (int i = i_lo; i <= i_hi; ++i) {
      for (int j = j_lo; j <= j_hi; ++j) {
        const Point z{(x[0] - g.coord(0, i)) / t, (x[1] - g.coord(1, j)) / t};
        const double pt = k.eval(z).psi_t;
        if (pt != 0.0) acc.add(pt * ext.at(level, g.flat(i, j), 0));
      }
    }
  }
  return acc.total() * wx / std::pow(t, n);
}

// psi((x-y)/t) . F(y,t) / t^n integrated over y at one t-level.
double cone_integrand(const ReconstructionKernel& k, const HalfSpaceField& F,
                      int level, const Point& x) {
  const Grid& g = F.xgrid();
  const double t = F.tgrid().node(level);
  const double wx = g.cell_volume();
  const int n = g.dim();
  Accumulator acc;
  const int i_lo =
      std::max(0, static_cast<int>(std::floor((x[0] - t - g.lo(0)) / g.spacing(0))));
  const int i_hi = std::min(
      g.cells(0) - 1,
      static_cast<int>(std::ceil((x[0] + t - g.lo(0)) / g.spacing(0))));
  if (n == 1) {
    for (int i = i_lo; i <= i_hi; ++i) {
      const Point z{(x[0] - g.coord(0, i)) / t, 0.0};
      if (std::abs(z[0]) >= 1.0) continue;
      const auto e = k.eval(z);
      const auto fi = static_cast<std::size_t>(i);
      acc.add(e.psi_x[0] * F.at(level, fi, 0) + e.psi_t * F.at(level, fi, 1));
    }
  } else {
    const int j_lo = std::max(
        0, static_cast<int>(std::floor((x[1] - t - g.lo(1)) / g.spacing(1))));
    const int j_hi = std::min(
        g.cells(1) - 1,
        static_cast<int>(std::ceil((x[1] + t - g.lo(1)) / g.spacing(1))));
    for (int i = i_lo; i <= i_hi; ++i) {
      for (int j = j_lo; j <= j_hi; ++j) {
        const Point z{(x[0] - g.coord(0, i)) / t, (x[1] - g.coord(1, j)) / t};
        if (z[0] * z[0] + z[1] * z[1] >= 1.0) continue;
        const auto e = k.eval(z);
        const std::size_t fi = g.flat(i, j);
        acc.add(e.psi_x[0] * F.at(level, fi, 0) +
                e.psi_x[1] * F.at(level, fi, 1) + e.psi_t * F.at(level, fi, 2));
      }
    }
  }
  return acc.total() * wx / std::pow(t, n);
}

}  // namespace

ScaleIdentityResult scale_identity_check(const ReconstructionKernel& k,
                                         const HalfSpaceField& extension,
                                         const HalfSpaceField& gradient,
                                         const Point& x, double tau, double T) {
  if (!(tau < T))
    throw std::invalid_argument("scale_identity_check: need tau < T");
  if (extension.components() != 1)
    throw std::invalid_argument(
        "scale_identity_check: extension must be scalar");
  if (gradient.components() != extension.xgrid().dim() + 1)
    throw std::invalid_argument(
        "scale_identity_check: gradient component count mismatch");
  const TGrid& tg = extension.tgrid();
  const int k_tau = tg.nearest_level(tau);
  const int k_T = tg.nearest_level(T);
  const double tau_s = tg.node(k_tau);
  const double T_s = tg.node(k_T);

  ScaleIdentityResult res;
  res.lhs = mollified_trace(k, extension, k_tau, x);
  double upper = mollified_trace(k, extension, k_T, x);
  Accumulator cone;
  for (int lev = k_tau; lev <= k_T; ++lev) {
    const double w = tg.clipped_weight(lev, tau_s, T_s);
    if (w <= 0.0) continue;
    cone.add(w * cone_integrand(k, gradient, lev, x));
  }
  res.rhs = upper - cone.total();
  res.gap = std::abs(res.lhs - res.rhs);
  return res;
}

SampledFunction reconstruct(const ReconstructionKernel& k,
                            const HalfSpaceField& field, const Domain& target,
                            const Grid& target_grid, int threads) {
  if (field.components() != field.xgrid().dim() + 1)
    throw std::invalid_argument(
        "reconstruct: field must carry dim+1 components");
  const TGrid& tg = field.tgrid();
  std::vector<double> values(target_grid.size(), 0.0);
  parallel_for(
      target_grid.size(),
      [&](std::size_t i) {
        const Point x = target_grid.node(i);
        Accumulator acc;
        for (int lev = 0; lev < tg.levels(); ++lev) {
          acc.add(tg.weight(lev) * cone_integrand(k, field, lev, x));
        }
        values[i] = -acc.total();
      },
      threads);
  for (double v : values) {
    if (!std::isfinite(v))
      throw std::runtime_error(
          "reconstruct: non-finite partial sums; the field violates the "
          "cone integrability precondition");
  }
  return SampledFunction(target, target_grid, std::move(values));
}

SampledFunction reconstruct(const ReconstructionKernel& k,
                            const HalfSpaceField& field, int threads) {
  if (!field.has_base())
    throw std::invalid_argument(
        "reconstruct: field has no base grid; pass a target explicitly");
  return reconstruct(k, field, field.base_domain(), field.base_grid(), threads);
}

TraceEstimateResult trace_estimate_check(const ReconstructionKernel& k,
                                         const HalfSpaceField& theta, double s,
                                         double p, int threads) {
  TraceEstimateResult res;
  const SampledFunction v = reconstruct(k, theta, threads);
  res.lhs = gagliardo_seminorm(v, s, p, threads);
  res.rhs = weighted_energy(theta, s, p, threads);
  if (res.rhs == 0.0 && res.lhs > 0.0)
    throw std::runtime_error(
        "trace_estimate_check: zero field energy with nonzero seminorm "
        "(quadrature inconsistency)");
  res.constant = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
  return res;
}

TruncationEstimate truncation_estimate(const ReconstructionKernel& k,
                                       const SampledFunction& u,
                                       const HalfSpaceField& extension) {
  TruncationEstimate est;
  const Grid& base = u.grid();
  const Grid& slab = extension.xgrid();
  const int last = extension.tgrid().levels() - 1;
  std::vector<double> level0(slab.size());
  for (std::size_t j = 0; j < slab.size(); ++j)
    level0[j] = extension.at(0, j, 0);
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Point x = base.node(i);
    // tail: the mollified trace at the top scale is exactly the dropped
    // boundary term of the scale integral
    est.tail =
        std::max(est.tail, std::abs(mollified_trace(k, extension, last, x)));
    // head: |U(x, t_min) - u(x)|
    est.head = std::max(est.head, std::abs(interpolate(slab, level0, x) - u[i]));
  }
  return est;
}

}  // namespace fracdecomp
