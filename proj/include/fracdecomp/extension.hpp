#pragma once

#include <cmath>
#include <vector>

#include "fracdecomp/grid.hpp"

namespace fracdecomp {

/// C^1 bump mollifier phi(h) = c_n exp(-1/(1-|h|^2)) on B(0,1), unit mass,
/// with analytic gradient.
class Mollifier {
 public:
  explicit Mollifier(int dim);

  int dim() const { return dim_; }
  double normalization() const { return c_norm_; }
  double operator()(const Point& h) const { return value(h); }
  double value(const Point& h) const;
  Point gradient(const Point& h) const;

 private:
  int dim_ = 1;
  double c_norm_ = 1.0;
};

Mollifier make_bump_mollifier(int dim);

/// xi(h) = (grad phi(h), -(n phi(h) + h . grad phi(h))); satisfies
/// int xi = 0 componentwise, which makes the difference form of the
/// gradient field vanish identically on constants.
struct XiKernel {
  const Mollifier* phi = nullptr;

  explicit XiKernel(const Mollifier& m) : phi(&m) {}
  int dim() const { return phi->dim(); }
  /// Components 0..n-1: spatial part; component n: scale part.
  std::array<double, 3> eval(const Point& h) const;
};

/// Componentwise quadrature of int xi over B(0,1); near zero by
/// construction, returned for validation.
std::array<double, 3> xi_moment(const XiKernel& xi, int points_per_dim = 512);

/// Midpoint quadrature points in B(0,1) (tensor rule with rejection),
/// with weights renormalized once so that sum w_k phi(h_k) = 1 exactly.
struct BallQuadrature {
  std::vector<Point> points;
  std::vector<double> weights;
};

BallQuadrature make_ball_quadrature(const Mollifier& phi, int total_points);

struct ExtensionParams {
  int quad_points = 256;  // K: target number of convolution points in B(0,1)
};

/// U(x,t) = sum_k u(x - t h_k) phi(h_k) w_k over an x-slab wide enough to
/// cover supp(u) + t_max. The scalar result keeps a descriptor of the
/// original sample box.
HalfSpaceField extend_half_space(const SampledFunction& u, const Mollifier& phi,
                                 const TGrid& tgrid,
                                 const ExtensionParams& params = {},
                                 int threads = 0);

/// grad U(x,t) = (1/t) sum_k w_k (u(x - t h_k) - u(x)) xi(h_k); n+1
/// components, exactly zero for constant u.
HalfSpaceField gradient_field(const SampledFunction& u, const Mollifier& phi,
                              const TGrid& tgrid,
                              const ExtensionParams& params = {},
                              int threads = 0);

/// Integrand building block a^p / t^{1-(1-s)p}; shared by the energies and
/// the argmin partition so that selected values match bit for bit.
inline double scale_weighted_power(double amplitude, double t,
                                   const ExponentPair& e) {
  return std::pow(amplitude, e.p) * std::pow(t, (1.0 - e.s) * e.p - 1.0);
}

/// Quadrature of the double integral of
/// min_i |F(x,t)|^{p_i} / t^{1-(1-s_i)p_i} over the (x,t) grid.
double weighted_min_energy(const HalfSpaceField& field,
                           const ExponentFamily& fam, int threads = 0);

/// Same with a single exponent pair.
double weighted_energy(const HalfSpaceField& field, double s, double p,
                       int threads = 0);

}  // namespace fracdecomp
