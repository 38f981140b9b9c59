#pragma once
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "nilheat/functions.hpp"
#include "nilheat/grid.hpp"
#include "nilheat/heat_kernel.hpp"
#include "nilheat/heisenberg.hpp"
#include "nilheat/lattice.hpp"

namespace nilheat {

// Lattice Z^n x Z^n x (1/2)Z inside R^n x R^n x R; the quotient has
// fundamental cell [0,1)^{2n} x [0,1/2).  Central characters trivial on
// (1/2)Z are e^{i lambda xi} with lambda = 4 pi k, one sector per integer k.
struct LatticeParams {
  int n = 1;
  int k = 1;
  double lambda() const { return 4.0 * std::numbers::pi * k; }
};

// [0,1)^{2n} cell for the (x,u) variables, all axes periodic convention.
Grid unit_cell(int n, int npts_per_axis);
// [0,1)^{2n} x [0,1/2) cell for the full quotient.
Grid manifold_cell(int n, int npts_xu, int npts_xi);

// A sector function is determined by G on the unit cell together with the
// quasiperiodic law G(x+m, u+n) = e^{2 pi i k (m.u - n.x)} G(x,u).
struct SectorFunction {
  LatticeParams par;
  SampledField cell;
};

// G(x,u) = sum_{m,n in Z^n} e^{i(lambda/2)(n.x - m.u)} f(x+m, u+n), the
// lattice average of e^{i lambda xi} f against the sector-k character.
// Truncation certified through f.bound.  npts divisible by 2|k| keeps the
// 1/(2k)-rational shifts used elsewhere on-grid.
SectorFunction twisted_average(const DecayingFunction& f, LatticeParams par,
                               int npts_per_axis, double tol = 1e-12);

// Phase of the quasiperiodic law for the integer shift (m, n).
cplx qp_phase(const LatticeParams& par, std::span<const int> m,
              std::span<const int> nn, std::span<const double> x,
              std::span<const double> u);

// Evaluate at an arbitrary point: reduce to the cell by the law, then
// interpolate.  On each line the product with e^{-+2 pi i k x_j u_j} is
// 1-periodic, so axis-by-axis trigonometric interpolation applies.
cplx sector_eval(const SectorFunction& G, std::span<const double> x,
                 std::span<const double> u);

// L^2 norm over the cell; |G| is honestly periodic.
double sector_norm(const SectorFunction& G);

// e^{i lambda xi} G(x,u) on the full quotient cell.
SampledField sector_embed(const SectorFunction& G, int npts_xi);

// Coefficient of e^{4 pi i k xi} along the central axis (period 1/2);
// returns the field over the remaining axes.
SampledField sector_project(const SampledField& manifold_field, int k);

// Pairing of the period-lattice distribution with index j in {0..2k-1}^n
// against f, and the same value through the transform side:
//   nu_pair       = (2k)^{-n} sum_m e^{-pi i m.j/k} f(m/(2k))
//   nu_pair_dual  = sum_m fhat(2k m + j)
// Equality is Poisson summation; f needs a transform for the dual side.
cplx nu_pair(const LatticeParams& par, std::span<const int> j,
             const DecayingFunction& f, double tol = 1e-12);
cplx nu_pair_dual(const LatticeParams& par, std::span<const int> j,
                  const DecayingFunction& f, double tol = 1e-12);

// Matrix coefficient (nu_j, rho_k(g) f) of the sector representation:
//   (2k)^{-n} e^{i lambda xi} e^{2 pi i k x.u}
//     sum_m e^{-pi i m.j/k} e^{2 pi i x.m} f(m/(2k) + u).
cplx matrix_coefficient(const LatticeParams& par, std::span<const int> j,
                        const DecayingFunction& f, const GroupPoint& g,
                        double tol = 1e-12);

// Weil-Brezin transform
//   V_k f (x,u,xi) = e^{i lambda xi} e^{i(lambda/2) x.u} sum_m e^{i lambda m.x} f(u+m)
// and its j-twist V_{k,j} = e^{2 pi i j.x} V_k.
cplx weil_brezin(const LatticeParams& par, const DecayingFunction& f,
                 const GroupPoint& g, double tol = 1e-12);
cplx weil_brezin_j(const LatticeParams& par, std::span<const int> j,
                   const DecayingFunction& f, const GroupPoint& g,
                   double tol = 1e-12);

// Holomorphic extension of V_k for an entire f.  fstrip(r, yim) must dominate
// sup |f| over ||Re w||_inf >= r, ||Im w||_inf <= yim.
cplx weil_brezin_c(const LatticeParams& par,
                   const std::function<cplx(std::span<const cplx>)>& fc,
                   const std::function<double(double, double)>& fstrip,
                   const CGroupPoint& g, double tol = 1e-12);

// Decay certificate for a function on the group:
//   |F(x,u,xi)| <= C e^{-(rho/4) max(0, |(x,u)| - d0)^2}
//                    e^{-mu max(0, |xi| - e0 - exi |(x,u)|)}.
// The exi term admits the bilinear central slack picked up by group
// translations; plain Gaussian-type certificates leave it at zero.
struct GroupDecayBound {
  double C = 0, rho = 0, d0 = 0, mu = 0, e0 = 0, exi = 0;
  // s is a lower bound for |(x,u)|; when exi > 0 the caller must also pass an
  // upper bound s_up so the slack term stays conservative.
  double eval(double s, double xi, double s_up = -1.0) const;
};

// Certificates for the two standard shapes.
GroupDecayBound heat_group_bound(const HeatKernelBound& b);
// A e^{-alpha |(x,u)-c|^2} e^{-sigma (xi - xi0)^2}; e1 > 0 converts the
// central Gaussian to the linear form with mu = 2 sigma e1.
GroupDecayBound gaussian_group_bound(double A, double alpha, double center_norm,
                                     double sigma, double xi0, double e1);

// Per-shell bound for gamma -> F(gamma g), gamma = (a, b, c/2) indexed by
// Z^{2n+1} with sup norm;  usable as the radial_bound of lattice_sum.
std::function<double(double)> group_tail_bound(const GroupDecayBound& b,
                                               const GroupPoint& g, int n);

// sum_{gamma in Lattice} F(gamma g) with certified truncation.
LatticeSum group_average(
    const std::function<cplx(const GroupPoint&)>& F, const GroupDecayBound& b,
    const GroupPoint& g, int n, double tol = 1e-10);

}  // namespace nilheat
