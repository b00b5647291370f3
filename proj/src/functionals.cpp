#include "fracdecomp/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fracdecomp/parallel.hpp"

namespace fracdecomp {

namespace {

constexpr double kExactTol = 1e-12;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void validate_exponents(double s, double p) {
  require(s > 0.0 && s < 1.0 && std::isfinite(s), "s must lie in (0,1)");
  require(p >= 1.0 && std::isfinite(p), "p must be >= 1");
}

// Pair-loop driver: sums w_x w_y f(i, j, d) over ordered node pairs with
// positive weights and i != j (diagonal cells excluded). Deterministic for
// any thread count.
template <class F>
double pair_sum(const Domain& dom, const Grid& grid, F&& f, int threads) {
  const auto w = domain_quadrature_weights(dom, grid);
  const std::size_t n = grid.size();
  std::vector<Point> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = grid.node(i);
  const int dim = grid.dim();
  return parallel_block_sum(
      n,
      [&](std::size_t i) {
        if (w[i] == 0.0) return 0.0;
        Accumulator row;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || w[j] == 0.0) continue;
          const double d = Domain::distance(nodes[i], nodes[j], dim);
          row.add(w[i] * w[j] * f(i, j, d));
        }
        return row.total();
      },
      threads);
}

}  // namespace

double gagliardo_seminorm(const SampledFunction& u, double s, double p,
                          int threads) {
  validate_exponents(s, p);
  const double expo = u.grid().dim() + s * p;
  const auto& v = u.values();
  return pair_sum(
      u.domain(), u.grid(),
      [&](std::size_t i, std::size_t j, double d) {
        return std::pow(std::abs(v[i] - v[j]), p) / std::pow(d, expo);
      },
      threads);
}

double min_functional(const SampledFunction& u, const ExponentFamily& fam,
                      int threads) {
  for (const auto& e : fam.pairs()) validate_exponents(e.s, e.p);
  const int n = u.grid().dim();
  const auto& v = u.values();
  return pair_sum(
      u.domain(), u.grid(),
      [&](std::size_t i, std::size_t j, double d) {
        const double du = std::abs(v[i] - v[j]);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : fam.pairs()) {
          const double val = std::pow(du, e.p) / std::pow(d, n + e.s * e.p);
          best = std::min(best, val);
        }
        return best;
      },
      threads);
}

double max_functional(std::span<const SampledFunction> u_list,
                      const ExponentFamily& fam, int threads) {
  require(u_list.size() == fam.size(),
          "max_functional: need one function per family member");
  for (std::size_t k = 1; k < u_list.size(); ++k) {
    require(u_list[k].grid().same_layout(u_list[0].grid()),
            "max_functional: functions must share one grid");
  }
  const int n = u_list[0].grid().dim();
  return pair_sum(
      u_list[0].domain(), u_list[0].grid(),
      [&](std::size_t i, std::size_t j, double d) {
        double worst = 0.0;
        for (std::size_t k = 0; k < fam.size(); ++k) {
          const auto& e = fam[k];
          const double du = std::abs(u_list[k][i] - u_list[k][j]);
          worst = std::max(worst,
                           std::pow(du, e.p) / std::pow(d, n + e.s * e.p));
        }
        return worst;
      },
      threads);
}

SumEstimateResult sum_estimate_check(std::span<const SampledFunction> u_list,
                                     const ExponentFamily& fam, int threads) {
  require(u_list.size() == fam.size(),
          "sum_estimate_check: need one function per family member");
  const std::size_t l = fam.size();
  const Grid& grid = u_list[0].grid();
  const Domain& dom = u_list[0].domain();
  for (std::size_t k = 1; k < l; ++k)
    require(u_list[k].grid().same_layout(grid),
            "sum_estimate_check: functions must share one grid");

  std::vector<double> sum_values(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Accumulator acc;
    for (std::size_t k = 0; k < l; ++k) acc.add(u_list[k][i]);
    sum_values[i] = acc.total();
  }
  const SampledFunction usum(dom, grid, std::move(sum_values));

  SumEstimateResult res;
  res.lhs = min_functional(usum, fam, threads);

  const int n = grid.dim();
  const auto& sum_v = usum.values();
  // rhs integrand and the per-pair check share one traversal.
  std::vector<std::size_t> violations_per_row(grid.size(), 0);
  std::vector<double> excess_per_row(grid.size(), 0.0);
  const auto w = domain_quadrature_weights(dom, grid);
  std::vector<Point> nodes(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nodes[i] = grid.node(i);
  res.rhs = parallel_block_sum(
      grid.size(),
      [&](std::size_t i) {
        if (w[i] == 0.0) return 0.0;
        Accumulator row;
        for (std::size_t j = 0; j < grid.size(); ++j) {
          if (j == i || w[j] == 0.0) continue;
          const double d = Domain::distance(nodes[i], nodes[j], n);
          double rhs_pair = 0.0;
          double lhs_pair = std::numeric_limits<double>::infinity();
          for (std::size_t k = 0; k < l; ++k) {
            const auto& e = fam[k];
            const double denom = std::pow(d, n + e.s * e.p);
            rhs_pair = std::max(
                rhs_pair, std::pow(static_cast<double>(l) *
                                       std::abs(u_list[k][i] - u_list[k][j]),
                                   e.p) /
                              denom);
            lhs_pair = std::min(
                lhs_pair, std::pow(std::abs(sum_v[i] - sum_v[j]), e.p) / denom);
          }
          if (lhs_pair > rhs_pair * (1.0 + kExactTol)) {
            ++violations_per_row[i];
            excess_per_row[i] = std::max(
                excess_per_row[i], lhs_pair / std::max(rhs_pair, 1e-300) - 1.0);
          }
          row.add(w[i] * w[j] * rhs_pair);
        }
        return row.total();
      },
      threads);
  res.pointwise_violations =
      std::accumulate(violations_per_row.begin(), violations_per_row.end(),
                      static_cast<std::size_t>(0));
  res.max_pointwise_excess =
      *std::max_element(excess_per_row.begin(), excess_per_row.end());
  res.holds = res.lhs <= res.rhs * (1.0 + kExactTol);
  return res;
}

DiscreteMeasure::DiscreteMeasure(std::vector<double> masses)
    : masses_(std::move(masses)) {
  require(!masses_.empty(), "DiscreteMeasure: need at least one atom");
  Accumulator acc;
  for (double m : masses_) {
    require(m > 0.0 && std::isfinite(m),
            "DiscreteMeasure: masses must be positive");
    acc.add(m);
  }
  require(std::abs(acc.total() - 1.0) <= kExactTol,
          "DiscreteMeasure: masses must sum to 1");
}

CheckResult jensen_min(std::span<const double> alphas,
                       std::span<const double> f_values,
                       const DiscreteMeasure& mu, std::span<const double> ps) {
  const std::size_t l = alphas.size();
  require(l >= 1 && ps.size() == l, "jensen_min: alphas/ps length mismatch");
  require(f_values.size() == mu.size(),
          "jensen_min: need one f value per atom");
  for (double a : alphas) require(a >= 0.0, "jensen_min: alphas must be >= 0");
  for (double f : f_values)
    require(f >= 0.0, "jensen_min: f must be nonnegative");
  for (double p : ps) require(p >= 1.0, "jensen_min: p must be >= 1");

  Accumulator mean;
  for (std::size_t i = 0; i < mu.size(); ++i)
    mean.add(mu.mass(i) * f_values[i]);
  const double avg = mean.total() / static_cast<double>(l);

  CheckResult res;
  res.lhs = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < l; ++k)
    res.lhs = std::min(res.lhs, alphas[k] * std::pow(avg, ps[k]));

  Accumulator rhs;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < l; ++k)
      best = std::min(best, alphas[k] * std::pow(f_values[i], ps[k]));
    rhs.add(mu.mass(i) * best);
  }
  res.rhs = rhs.total();
  res.holds = res.lhs <= res.rhs * (1.0 + kExactTol) + 1e-300;
  res.constant = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
  return res;
}

namespace {

// Envelope integrand value at t for the tail (exponent -gamma-1) case.
// The head case maps to it by t -> 1/t, see min_power_integral.
double tail_envelope(const MinPowerIntegrand& m, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.betas.size(); ++i)
    best = std::min(best, m.betas[i] * std::pow(t, -m.gammas[i] - 1.0));
  return best;
}

// Index attaining the envelope at t (smallest among ties).
std::size_t tail_active_index(const MinPowerIntegrand& m, double t) {
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.betas.size(); ++i) {
    const double v = m.betas[i] * std::pow(t, -m.gammas[i] - 1.0);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

}  // namespace

MinPowerResult min_power_integral(MinPowerKind kind,
                                  const MinPowerIntegrand& m, double r) {
  const std::size_t l = m.betas.size();
  require(l >= 1 && m.gammas.size() == l,
          "min_power_integral: betas/gammas length mismatch");
  require(r > 0.0 && std::isfinite(r), "min_power_integral: r must be > 0");
  for (double b : m.betas)
    require(b >= 0.0 && std::isfinite(b),
            "min_power_integral: betas must be >= 0");
  for (double g : m.gammas)
    require(g > 0.0 && std::isfinite(g),
            "min_power_integral: gammas must be > 0");

  MinPowerResult res;
  res.bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < l; ++i) {
    const double b = kind == MinPowerKind::TailAtInfinity
                         ? m.betas[i] / (m.gammas[i] * std::pow(r, m.gammas[i]))
                         : m.betas[i] * std::pow(r, m.gammas[i]) / m.gammas[i];
    res.bound = std::min(res.bound, b);
  }

  const bool any_zero =
      std::any_of(m.betas.begin(), m.betas.end(), [](double b) { return b == 0.0; });
  if (any_zero) {
    res.value = 0.0;
    res.holds = true;
    return res;
  }

  // The head integral int_0^r min_i beta_i t^{gamma_i - 1} dt transforms
  // under t -> 1/t into int_{1/r}^inf min_i beta_i t^{-gamma_i - 1} dt,
  // so one tail routine serves both.
  MinPowerIntegrand work = m;
  double lo = r;
  if (kind == MinPowerKind::HeadAtZero) lo = 1.0 / r;

  // Envelope breakpoints: pairwise crossings beta_i t^{-g_i} = beta_j t^{-g_j}.
  std::vector<double> cuts{lo};
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i + 1; j < l; ++j) {
      if (work.gammas[i] == work.gammas[j]) continue;
      const double t = std::pow(work.betas[i] / work.betas[j],
                                1.0 / (work.gammas[i] - work.gammas[j]));
      if (std::isfinite(t) && t > lo) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Accumulator acc;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const std::size_t i = tail_active_index(work, std::sqrt(a * b));
    const double g = work.gammas[i];
    acc.add(work.betas[i] / g * (std::pow(a, -g) - std::pow(b, -g)));
  }
  {
    const double a = cuts.back();
    const std::size_t i = tail_active_index(work, 2.0 * a);
    acc.add(work.betas[i] / work.gammas[i] * std::pow(a, -work.gammas[i]));
  }
  res.value = acc.total();
  res.holds = res.value <= res.bound * (1.0 + kExactTol);
  return res;
}

void PiecewiseConstant::validate() const {
  require(edges.size() >= 2 && vals.size() + 1 == edges.size(),
          "PiecewiseConstant: need edges.size() == vals.size()+1 >= 2");
  require(edges.front() >= 0.0, "PiecewiseConstant: edges must be >= 0");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    require(edges[i] < edges[i + 1],
            "PiecewiseConstant: edges must be strictly increasing");
  for (double v : vals)
    require(v >= 0.0 && std::isfinite(v),
            "PiecewiseConstant: values must be nonnegative");
}

double PiecewiseConstant::total() const {
  Accumulator acc;
  for (std::size_t i = 0; i < vals.size(); ++i)
    acc.add(vals[i] * (edges[i + 1] - edges[i]));
  return acc.total();
}

double PiecewiseConstant::integral_up_to(double t) const {
  Accumulator acc;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    if (t <= a) break;
    acc.add(vals[i] * (std::min(t, b) - a));
  }
  return acc.total();
}

double PiecewiseConstant::integral_from(double t) const {
  return total() - integral_up_to(t);
}

CheckResult hardy_check(const PiecewiseConstant& g, double p, double alpha,
                        HardyKind kind, double tol) {
  g.validate();
  require(p >= 1.0 && std::isfinite(p), "hardy_check: p must be >= 1");
  require(alpha > 0.0 && std::isfinite(alpha), "hardy_check: alpha must be > 0");

  CheckResult res;
  const double total = g.total();
  if (total == 0.0) {
    res.holds = true;
    return res;
  }
  const double a = g.edges.front(), b = g.edges.back();

  // rhs: exact piecewise power integration of g^p r^{-(1+alpha-p)} resp.
  // g^p r^{-(1-alpha-p)}.
  const double rexp =
      kind == HardyKind::AtZero ? p - 1.0 - alpha : p - 1.0 + alpha;
  Accumulator rhs;
  for (std::size_t i = 0; i < g.vals.size(); ++i) {
    if (g.vals[i] == 0.0) continue;
    const double lo = g.edges[i], hi = g.edges[i + 1];
    const double gp = std::pow(g.vals[i], p);
    double piece;
    if (std::abs(rexp + 1.0) < 1e-14) {
      piece = std::log(hi / lo);
    } else {
      piece = (std::pow(hi, rexp + 1.0) - std::pow(lo, rexp + 1.0)) /
              (rexp + 1.0);
    }
    rhs.add(gp * piece);
  }
  res.rhs = std::pow(p / alpha, p) * rhs.total();

  // lhs: quadrature on a geometric grid across the support, with analytic
  // head and tail where the inner integral is zero, a pure power, or a
  // constant.
  Accumulator lhs;
  const int quad_points = 20000;
  if (kind == HardyKind::AtZero) {
    // int_0^inf (int_0^t g)^p t^{-1-alpha} dt; the inner integral vanishes
    // below the support start, so the quadrature begins there.
    const double lo = std::max(a, b * 1e-12);
    const double ratio = std::pow(b / lo, 1.0 / quad_points);
    // head on (0, lo]: inner integral = g_0 * t on the first piece
    if (a == 0.0 && g.vals[0] > 0.0) {
      const double expn = p - alpha;
      require(expn > 0.0,
              "hardy_check: divergent head integral (p <= alpha with support "
              "touching 0)");
      lhs.add(std::pow(g.vals[0], p) * std::pow(lo, expn) / expn);
    }
    for (int k = 0; k < quad_points; ++k) {
      const double t = lo * std::pow(ratio, k + 0.5);
      const double w = lo * (std::pow(ratio, k + 1.0) - std::pow(ratio, k));
      lhs.add(std::pow(g.integral_up_to(t), p) * std::pow(t, -1.0 - alpha) * w);
    }
    // tail above the support: inner integral is the constant `total`
    lhs.add(std::pow(total, p) * std::pow(b, -alpha) / alpha);
  } else {
    // int_0^inf (int_t^inf g)^p t^{-1+alpha} dt
    // below the support the inner integral is constant:
    const double astart = a > 0.0 ? a : b * 1e-12;
    lhs.add(std::pow(total, p) * std::pow(astart, alpha) / alpha);
    const double ratio = std::pow(b / astart, 1.0 / quad_points);
    for (int k = 0; k < quad_points; ++k) {
      const double t = astart * std::pow(ratio, k + 0.5);
      const double w =
          astart * (std::pow(ratio, k + 1.0) - std::pow(ratio, k));
      lhs.add(std::pow(g.integral_from(t), p) * std::pow(t, alpha - 1.0) * w);
    }
    // above the support the inner integral vanishes
  }
  res.lhs = lhs.total();
  res.constant = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
  res.holds = res.lhs <= res.rhs * (1.0 + tol);
  return res;
}

namespace {

// Golden-section minimum of a convex function on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, int iters = 120) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace

InfConvolutionResult inf_convolution_phi(std::span<const double> alphas,
                                         std::span<const double> ps,
                                         double t) {
  const std::size_t l = alphas.size();
  require(l >= 1 && ps.size() == l,
          "inf_convolution_phi: alphas/ps length mismatch");
  require(l <= 3, "inf_convolution_phi: only l <= 3 supported");
  for (double a : alphas)
    require(a > 0.0 && std::isfinite(a),
            "inf_convolution_phi: alphas must be > 0");
  for (double p : ps) require(p >= 1.0, "inf_convolution_phi: p must be >= 1");

  InfConvolutionResult res;
  const double at = std::abs(t);
  res.lower = std::numeric_limits<double>::infinity();
  res.upper = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < l; ++i) {
    const double term = alphas[i] * std::pow(at, ps[i]);
    res.lower = std::min(res.lower,
                         term / std::pow(static_cast<double>(l), ps[i]));
    res.upper = std::min(res.upper, term);
  }
  if (t == 0.0) {
    res.value = res.lower = res.upper = 0.0;
    return res;
  }

  auto objective = [&](double t1, double t2, double t3) {
    double v = alphas[0] * std::pow(std::abs(t1), ps[0]);
    if (l >= 2) v += alphas[1] * std::pow(std::abs(t2), ps[1]);
    if (l >= 3) v += alphas[2] * std::pow(std::abs(t3), ps[2]);
    return v;
  };

  double best;
  if (l == 1) {
    best = objective(t, 0, 0);
  } else if (l == 2) {
    auto f = [&](double t2) { return objective(t - t2, t2, 0); };
    const double lo = std::min(0.0, t), hi = std::max(0.0, t);
    best = f(golden_min(f, lo, hi));
  } else {
    auto inner = [&](double t2) {
      auto f3 = [&](double t3) { return objective(t - t2 - t3, t2, t3); };
      const double lo = std::min(0.0, t), hi = std::max(0.0, t);
      return f3(golden_min(f3, lo, hi));
    };
    const double lo = std::min(0.0, t), hi = std::max(0.0, t);
    best = inner(golden_min(inner, lo, hi));
  }
  // The one-block splittings are feasible; keeping them caps value by upper.
  res.value = std::min(best, res.upper);
  return res;
}

IntegrabilityResult integrability_bound(const SampledFunction& u,
                                        const ExponentFamily& fam,
                                        int threads) {
  require(u.domain().bounded(),
          "integrability_bound: domain must be bounded");
  const int n = u.grid().dim();
  const auto& v = u.values();

  IntegrabilityResult res;
  res.lhs = pair_sum(
      u.domain(), u.grid(),
      [&](std::size_t i, std::size_t j, double) {
        return std::abs(v[i] - v[j]);
      },
      threads);
  const double emin = min_functional(u, fam, threads);

  // c_pair: max over pairs of |du| / (1 + min integrand).
  const auto w = domain_quadrature_weights(u.domain(), u.grid());
  const Grid& grid = u.grid();
  std::vector<Point> nodes(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nodes[i] = grid.node(i);
  std::vector<double> row_max(grid.size(), 0.0);
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        if (w[i] == 0.0) return;
        double m = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
          if (j == i || w[j] == 0.0) continue;
          const double d = Domain::distance(nodes[i], nodes[j], n);
          const double du = std::abs(v[i] - v[j]);
          double mini = std::numeric_limits<double>::infinity();
          for (const auto& e : fam.pairs())
            mini = std::min(mini,
                            std::pow(du, e.p) / std::pow(d, n + e.s * e.p));
          m = std::max(m, du / (1.0 + mini));
        }
        row_max[i] = m;
      },
      threads);
  res.c_pair = *std::max_element(row_max.begin(), row_max.end());
  const double vol = u.domain().volume();
  res.c_dom = res.c_pair * std::max(1.0, vol * vol);
  res.rhs = res.c_dom * (1.0 + emin);
  res.holds = res.lhs <= res.rhs * (1.0 + kExactTol) + 1e-300;
  return res;
}

}  // namespace fracdecomp
