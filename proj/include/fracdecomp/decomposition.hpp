#pragma once

#include <cstdint>
#include <vector>

#include "fracdecomp/extension.hpp"
#include "fracdecomp/grid.hpp"
#include "fracdecomp/reconstruction.hpp"

namespace fracdecomp {

/// Node-wise component assignment over an (x,t) grid; every node carries
/// exactly one index in [0, l).
struct PartitionMask {
  Grid xgrid;
  TGrid tgrid;
  std::vector<std::uint8_t> index;  // level-major, matching HalfSpaceField

  std::uint8_t at(int level, std::size_t flat, std::size_t nx) const {
    return index[static_cast<std::size_t>(level) * nx + flat];
  }
};

struct Partition {
  PartitionMask mask;
  std::vector<HalfSpaceField> thetas;  // Theta_i = G on A_i, 0 elsewhere
};

/// Assigns each node the smallest index minimizing
/// |G(x,t)|^{p_i} / t^{1-(1-s_i)p_i}; guarantees sum Theta_i = G node-wise.
Partition partition_argmin(const HalfSpaceField& gradient,
                           const ExponentFamily& fam);

/// Per-component weighted energies plus their sum; the sum equals
/// weighted_min_energy(G) up to roundoff by construction.
std::vector<double> partition_energies(const Partition& part,
                                       const ExponentFamily& fam,
                                       int threads = 0);

struct DecompositionDiagnostics {
  double residual_inf = 0.0;   // |u - sum u_i| at base nodes, sup norm
  double residual_rel = 0.0;   // residual_inf / |u| sup norm
  double e_min = 0.0;          // min functional of u
  double e_max = 0.0;          // max functional of the components
  double constant = 0.0;       // e_max / e_min
  std::vector<double> component_means;
  double tail_estimate = 0.0;  // dropped scale-integral boundary term
  double head_estimate = 0.0;  // |U(.,t_min) - u| sup norm
};

struct Decomposition {
  std::vector<SampledFunction> components;
  ExponentFamily fam;
  DecompositionDiagnostics diagnostics;
};

/// Discretization knobs for the decomposition pipelines. Zero fields are
/// derived from the grid: t_min = h/4, t_max scaled so the truncated scale
/// integral refines together with (N, M, K), M = max(48, N/4).
struct PipelineParams {
  int quad_points = 256;  // K
  int levels = 0;         // M
  double t_min = 0.0;
  double t_max = 0.0;
  int threads = 0;
  bool with_energies = true;  // compute e_min/e_max diagnostics

  PipelineParams resolved(const Grid& grid, double support_radius) const;
};

/// Whole-space pipeline: gradient field -> argmin partition ->
/// per-component reconstruction.
Decomposition decompose_whole_space(const SampledFunction& u,
                                    const ExponentFamily& fam,
                                    const Mollifier& phi,
                                    const ReconstructionKernel& psi,
                                    const PipelineParams& params = {});

/// Smooth radial cutoff profile: 1 on [0,1/2], 0 on [1,inf), C^1 in between.
struct CutoffProfile {
  double operator()(double r) const;
  double derivative(double r) const;
  double lipschitz() const;
};

struct CutoffResult {
  SampledFunction product;  // eta*u extended by zero to a whole-space box
  double lhs = 0.0;         // min functional of eta*u over the box
  double rhs = 0.0;         // ball-restricted min functional with the
                            // R |eta|_{C^0,1} |u(x)-u(y)| numerator
  double constant = 0.0;    // lhs / rhs
};

/// Cutoff estimate for mean-zero u on a ball against a Lipschitz eta
/// supported inside the ball. `eta` carries its Lipschitz constant; pass 0
/// to estimate it from grid differences.
CutoffResult cutoff(const SampledFunction& u, const SampledFunction& eta,
                    double eta_lipschitz, const ExponentFamily& fam,
                    int threads = 0);

/// u^R(x) = eta(x/R) (u(x) - mean_{B(0,R)} u) on the grid of u.
SampledFunction truncate_uR(const SampledFunction& u, double R,
                            const CutoffProfile& profile = {});

struct BallExtensionResult {
  SampledFunction extended;  // on B(0,2R), inversion values on the annulus
  double lhs = 0.0;          // min functional over B(0,2R)
  double rhs = 0.0;          // min functional over B(0,R)
  double constant = 0.0;
};

/// Inversion extension u(R^2 x / |x|^2) from B(0,R) to B(0,2R). When
/// `with_energies` is set the lemma's min-functional inequality sides are
/// evaluated with `fam`.
BallExtensionResult ball_extension(const SampledFunction& u,
                                   const ExponentFamily& fam,
                                   bool with_energies = true, int threads = 0);

/// Ball pipeline: inversion extension, mean subtraction, cutoff, whole-space
/// decomposition, mean redistribution, restriction to B(0,R).
Decomposition decompose_ball(const SampledFunction& u,
                             const ExponentFamily& fam, const Mollifier& phi,
                             const ReconstructionKernel& psi,
                             const PipelineParams& params = {});

}  // namespace fracdecomp
