#pragma once

#include <span>
#include <vector>

#include "fracdecomp/grid.hpp"

namespace fracdecomp {

/// Shared result shape for two-sided inequality checks.
struct CheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  // lhs/rhs when rhs > 0
  bool holds = false;
};

/// |u|^p_{W^{s,p}}: quadrature of the double integral of
/// |u(x)-u(y)|^p / d(x,y)^{n+sp} over distinct grid-cell pairs. Returns the
/// p-th power (the energy), not the p-th root.
double gagliardo_seminorm(const SampledFunction& u, double s, double p,
                          int threads = 0);

/// Same double integral with integrand min_i |u(x)-u(y)|^{p_i}/d^{n+s_i p_i}.
double min_functional(const SampledFunction& u, const ExponentFamily& fam,
                      int threads = 0);

/// Intersection-side integrand max_i |u_i(x)-u_i(y)|^{p_i}/d^{n+s_i p_i};
/// u_list must have one entry per family member, all on one grid.
double max_functional(std::span<const SampledFunction> u_list,
                      const ExponentFamily& fam, int threads = 0);

struct SumEstimateResult {
  double lhs = 0.0;           // min functional of the sum
  double rhs = 0.0;           // max_i l^{p_i} |du_i|^{p_i}/d^{n+s_i p_i}
  bool holds = false;         // lhs <= rhs (1 + 1e-12)
  std::size_t pointwise_violations = 0;  // grid pairs violating the
                                         // per-pair inequality
  double max_pointwise_excess = 0.0;     // worst relative excess seen
};

/// Sum estimate: min functional of u_1+...+u_l against the l^{p_i}-weighted
/// max functional, with the per-pair form checked on every grid pair.
SumEstimateResult sum_estimate_check(std::span<const SampledFunction> u_list,
                                     const ExponentFamily& fam,
                                     int threads = 0);

/// Probability measure with finitely many atoms.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<double> masses);
  std::size_t size() const { return masses_.size(); }
  double mass(std::size_t i) const { return masses_[i]; }

 private:
  std::vector<double> masses_;
};

/// Jensen-type inequality for minima:
/// min_i a_i ((1/l) int f dmu)^{p_i} <= int min_i a_i f^{p_i} dmu.
CheckResult jensen_min(std::span<const double> alphas,
                       std::span<const double> f_values,
                       const DiscreteMeasure& mu, std::span<const double> ps);

/// Lower envelope integrand min_i beta_i t^{-gamma_i-1} (tail) or
/// min_i beta_i t^{gamma_i-1} (head).
struct MinPowerIntegrand {
  std::vector<double> betas;   // >= 0
  std::vector<double> gammas;  // > 0
};

enum class MinPowerKind { TailAtInfinity, HeadAtZero };

struct MinPowerResult {
  double value = 0.0;  // exact envelope integral
  double bound = 0.0;  // min_i beta_i/(gamma_i r^{gamma_i}) resp.
                       // min_i beta_i r^{gamma_i}/gamma_i
  bool holds = false;  // value <= bound (1 + 1e-12)
};

/// Exact integral of the lower envelope of power functions over (r, inf)
/// or (0, r), by breakpoint decomposition of the envelope.
MinPowerResult min_power_integral(MinPowerKind kind,
                                  const MinPowerIntegrand& m, double r);

/// Nonnegative piecewise-constant function on (0, inf):
/// value vals[i] on [edges[i], edges[i+1]), zero outside [edges.front(),
/// edges.back()).
struct PiecewiseConstant {
  std::vector<double> edges;  // strictly increasing, size = vals.size()+1
  std::vector<double> vals;   // >= 0
  void validate() const;
  double total() const;               // int g
  double integral_up_to(double t) const;    // int_0^t g
  double integral_from(double t) const;     // int_t^inf g
};

enum class HardyKind { AtZero, AtInfinity };

/// Hardy inequality with factor (p/alpha)^p; lhs by quadrature on a
/// geometric grid plus analytic tails, rhs by exact piecewise-power
/// integration.
CheckResult hardy_check(const PiecewiseConstant& g, double p, double alpha,
                        HardyKind kind, double tol = 1e-3);

struct InfConvolutionResult {
  double value = 0.0;
  double lower = 0.0;  // min_i a_i |t|^{p_i} / l^{p_i}
  double upper = 0.0;  // min_i a_i |t|^{p_i}
};

/// Phi(t) = inf { sum_i a_i |t_i|^{p_i} : sum t_i = t }, by nested
/// golden-section minimization; supports l <= 3.
InfConvolutionResult inf_convolution_phi(std::span<const double> alphas,
                                         std::span<const double> ps, double t);

struct IntegrabilityResult {
  double lhs = 0.0;        // double integral of |u(x)-u(y)|
  double rhs = 0.0;        // c_dom (1 + min functional)
  double c_pair = 0.0;     // max over pairs of |du| / (1 + min integrand)
  double c_dom = 0.0;      // c_pair scaled by max(1, |Omega|^2)
  bool holds = false;
};

/// Bounded-domain integrability bound: holds by construction with the
/// reported per-grid constant.
IntegrabilityResult integrability_bound(const SampledFunction& u,
                                        const ExponentFamily& fam,
                                        int threads = 0);

}  // namespace fracdecomp
