#pragma once

#include <functional>

#include "fracdecomp/extension.hpp"
#include "fracdecomp/grid.hpp"

namespace fracdecomp {

/// Compactly supported kernel pair psi = (psi_x, psi_t) with its analytic
/// spatial derivatives, subject to
///   div(psi_x)(h) + h . grad psi_t(h) + n psi_t(h) = 0,  int psi_t = 1.
class ReconstructionKernel {
 public:
  struct Eval {
    std::array<double, 2> psi_x{0, 0};
    double psi_t = 0.0;
    double div_psi_x = 0.0;
    std::array<double, 2> grad_psi_t{0, 0};
  };
  using EvalFn = std::function<Eval(const Point&)>;

  ReconstructionKernel(int dim, EvalFn fn) : dim_(dim), fn_(std::move(fn)) {}

  int dim() const { return dim_; }
  Eval eval(const Point& h) const { return fn_(h); }

 private:
  int dim_;
  EvalFn fn_;
};

/// psi(h) = phi(h) (-h, 1); satisfies the kernel identity exactly.
ReconstructionKernel canonical_kernel(const Mollifier& phi);

struct KernelValidation {
  double max_residual = 0.0;     // identity residual over sample points
  double psi_t_mass_error = 0.0; // |int psi_t - 1|
};

/// Evaluates the identity at quasi-random (Halton) points in B(0,1) and the
/// psi_t mass by quadrature.
KernelValidation validate_kernel(const ReconstructionKernel& k,
                                 int sample_count = 10000);

struct ScaleIdentityResult {
  double lhs = 0.0;  // mollified trace at scale tau
  double rhs = 0.0;  // same at scale T minus the cone integral over [tau,T]
  double gap = 0.0;
};

/// Discrete form of the scale identity relating mollified traces at two
/// scales through the cone integral of grad U. `gradient` must be the
/// gradient field of `extension` on the same grids. tau and T snap to the
/// nearest t-grid nodes.
ScaleIdentityResult scale_identity_check(const ReconstructionKernel& k,
                                         const HalfSpaceField& extension,
                                         const HalfSpaceField& gradient,
                                         const Point& x, double tau, double T);

/// v(x) = -sum_t sum_y psi((x-y)/t) . F(y,t) / t^n  (cell and t weights),
/// evaluated at the nodes of `target`. Throws if the assembled sums are
/// not finite (violated integrability precondition).
SampledFunction reconstruct(const ReconstructionKernel& k,
                            const HalfSpaceField& field, const Domain& target,
                            const Grid& target_grid, int threads = 0);

/// Same, targeting the field's base sample box.
SampledFunction reconstruct(const ReconstructionKernel& k,
                            const HalfSpaceField& field, int threads = 0);

struct TraceEstimateResult {
  double lhs = 0.0;       // Gagliardo energy of the reconstructed function
  double rhs = 0.0;       // weighted energy of the input field
  double constant = 0.0;  // lhs / rhs
};

/// Trace estimate: reconstruct v from Theta and compare its Gagliardo
/// energy with the weighted field energy.
TraceEstimateResult trace_estimate_check(const ReconstructionKernel& k,
                                         const HalfSpaceField& theta, double s,
                                         double p, int threads = 0);

struct TruncationEstimate {
  double head = 0.0;  // |U(.,t_min) - u| at the base nodes, sup norm
  double tail = 0.0;  // sup over base nodes of the mollified trace at t_max
};

/// Error estimates for the two truncated ends of the scale integral.
TruncationEstimate truncation_estimate(const ReconstructionKernel& k,
                                       const SampledFunction& u,
                                       const HalfSpaceField& extension);

}  // namespace fracdecomp
