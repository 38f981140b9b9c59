#pragma once
#include <span>
#include <vector>

#include "nilheat/grid.hpp"

namespace nilheat {

// Quadrature in the central frequency for the group heat kernel
//   k_t(x,u,xi) = (1/2pi) int e^{-i lambda xi} e^{-t lambda^2} p_t^lambda(x,u) dlambda.
// Midpoint nodes on [-Lambda, Lambda]; w holds the full positive weight
//   (h/2pi) (4 pi t)^{-n} e^{-t lambda_i^2} (lt/sinh lt)^n
// and a the Gaussian rate (lambda coth(lambda t))/(4t), so that
//   k_t = sum_i w_i e^{-a_i S} cos(lambda_i xi),  S = |x|^2 + |u|^2.
// The sum is exactly real and even in xi.
struct HeatKernelQuad {
  int n = 1;
  double t = 0;
  double Lambda = 0, h = 0;
  std::vector<double> lam, w, a;
  // certified imaginary ranges for complex evaluation (0 for the real default)
  double s_im_cert = 0, xi_im_cert = 0;
};

// Lambda <= 0 picks sqrt(ln(1e14)/t) + 4, enough for 1e-14 tails at real
// arguments.
HeatKernelQuad heat_quad(int n, double t, int nodes = 2048, double Lambda = 0);

// Quadrature certified for complex arguments with sum of squared imaginary
// parts of (z,w) up to s_im and |Im zeta| up to xi_im.
HeatKernelQuad heat_quad_complex(int n, double t, double s_im, double xi_im,
                                 int nodes = 0);

double heat_kernel(const HeatKernelQuad& q, std::span<const double> x,
                   std::span<const double> u, double xi);

// Same value as a function of S = |x|^2 + |u|^2 only.
double heat_kernel_s(const HeatKernelQuad& q, double S, double xi);

// Holomorphic extension; throws domain_error outside the certified ranges.
cplx heat_kernel_c(const HeatKernelQuad& q, std::span<const cplx> z,
                   std::span<const cplx> w, cplx zeta);

// Bicubic table of log k_t over (S, |xi|); a cache in front of heat_kernel.
// Entries deeper than 1e-12 of the same-S ridge k_t(S, 0) hold a sentinel and
// eval falls back to the direct sum, as do points outside the covered
// rectangle or next to it (the stencil needs a full 4x4 neighbourhood).
struct HeatKernelTable {
  HeatKernelQuad quad;
  double smax = 0, ximax = 0;
  int ns = 0, nxi = 0;
  double ds = 0, dxi = 0;
  std::vector<double> logv;  // row-major [ns][nxi]

  double eval_s(double S, double xi) const;
  double eval(std::span<const double> x, std::span<const double> u,
              double xi) const;
};

HeatKernelTable heat_table(int n, double t, double smax = 40.0,
                           double ximax = 6.0, int ns = 2048, int nxi = 768);

// Decay certificates for k_t.
//   |k_t(x,u,xi)| <= c0 e^{-S/(4t)}                       (lambda coth >= 1/t)
//   |k_t(x,u,xi)| <= jmu e^{-rho S/(4t)} e^{-mu |xi|}     (contour shift)
// The second line shifts the lambda contour by i mu, mu t < pi/2; rho is a
// certified lower bound for Re[w coth w] at w = (lambda + i mu) t over real
// lambda, positive in that strip (so rho < 1: the shift trades part of the
// Gaussian decay in S for the e^{-mu |xi|} factor).
struct HeatKernelBound {
  int n = 1;
  double t = 0;
  double c0 = 0;
  double mu = 0, rho = 0, jmu = 0;
};

// mu <= 0 picks 0.75 pi/(2t).
HeatKernelBound heat_bound(int n, double t, double mu = 0);

// Pointwise bound, min over the two branches.
double heat_bound_eval(const HeatKernelBound& b, double S, double xi);

}  // namespace nilheat
