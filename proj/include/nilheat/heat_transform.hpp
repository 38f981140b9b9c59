#pragma once
#include <span>

#include "nilheat/bergman.hpp"
#include "nilheat/functions.hpp"
#include "nilheat/grid.hpp"
#include "nilheat/heat_kernel.hpp"
#include "nilheat/heisenberg.hpp"
#include "nilheat/lattice.hpp"
#include "nilheat/multiindex.hpp"
#include "nilheat/nilmanifold.hpp"

namespace nilheat {

struct FullTransformOptions {
  int npts = 32;         // quadrature points per axis over the input box
  double radius = 0.0;   // <= 0 picks sample_radius(f, 1e-12)
  int lambda_nodes = 0;  // central-frequency nodes; 0 keeps the quad default
};

// T_t f(p) = int_H f(h) k_t(h^{-1} p) dh by midpoint quadrature over the box
// carrying f.  p may be complex; the central-frequency quadrature is sized
// for the imaginary parts reached as h runs over the box.
cplx heat_transform_full(const DecayingFunction& f, double t,
                         const CGroupPoint& p,
                         const FullTransformOptions& opt = {});

// K_t^Gamma(g, p) = sum_{gamma in Gamma} k_t(g^{-1} gamma p), summed with a
// certified tail through the kernel's contour-shift certificate; the offsets
// of g and p (and the central slack their bilinear terms create) are folded
// into the shifted decay bound.  min_radius forces extra shells and serves
// the radius-doubling oracle.
LatticeSum manifold_kernel(int n, double t, const GroupPoint& g,
                           const CGroupPoint& p, double tol = 1e-10,
                           int lambda_nodes = 0, int min_radius = 0);
// Real-argument bulk path against a prebuilt table.
LatticeSum manifold_kernel(const HeatKernelTable& tab, const GroupPoint& g,
                           const GroupPoint& p, double tol = 1e-10,
                           int min_radius = 0);

// T_t^Gamma F(p) = int_cell F(h) K_t^Gamma(h, p) dh for F sampled on
// manifold_cell(n, ., .).  Evaluated in unfolded form: the Gamma-periodic
// extension of F is integrated against k_t over a box around p, so every
// kernel value is used once and the cell samples are reused by periodic
// lookup.  Nodes whose certified kernel bound cannot reach tol are skipped.
cplx heat_transform_manifold(const SampledField& F, int n, double t,
                             const CGroupPoint& p, double tol = 1e-8,
                             int lambda_nodes = 0);
cplx heat_transform_manifold(const SampledField& F, int n,
                             const HeatKernelTable& tab, const GroupPoint& p,
                             double tol = 1e-8);

// e^{t Delta} on sector k acts as G -> e^{-t lambda^2} (G *_lambda p_t^lambda)
// with lambda = 4 pi k; the convolution value, the central damping and the
// central character are exposed separately.  k = 0 degenerates to the
// ordinary euclidean convolution on the torus.
struct SectorHeatValue {
  cplx conv{};
  double damp = 1.0;
  double lambda = 0.0;
  cplx character(cplx xi) const;        // e^{i lambda xi}
  cplx value(cplx xi = cplx(0)) const;  // damp * character(xi) * conv
};

// The twisted convolution unfolds the quasiperiodic extension of S against
// the Gaussian kernel over cell shells until the certified shell bound drops
// below tol.  (z, w) may be complex.
SectorHeatValue sector_heat_transform(const SectorFunction& S, double t,
                                      std::span<const cplx> z,
                                      std::span<const cplx> w,
                                      double tol = 1e-10);

// Cell samples of the evolved sector function e^{-s lambda^2} (G *_lambda
// p_s^lambda) on the grid of S (the central character stays implicit, as in
// SectorFunction itself).
SectorFunction sector_evolve(const SectorFunction& S, double s,
                             double tol = 1e-10);

// Series route for the transform of V_{k,j} f:
//   T_t(V_{k,j} f)(x,u,xi) = c e^{-t lambda^2} e^{i lambda xi}
//     e^{i lambda (a.x + x.u/2)} sum_m e^{i lambda x.m} psi(u + m + a),
// with a = j/(2k) and psi = e^{-t H(lambda)} (f(. - a)).  The constant c is
// calibrated against the convolution route and frozen; with the conventions
// above it is exactly 1 (regression-tested).
inline constexpr double kSectorHermiteConstant = 1.0;

cplx sector_transform_via_hermite(const LatticeParams& par, const MultiIndex& j,
                                  const SampledField& f, double t,
                                  const CGroupPoint& g, double tol = 1e-10);

// Same series assembled on the standard Bergman cell-times-box grid at
// xi = 0 (n = 1 only): psi is tabulated once on the distinct arguments the
// grid needs, so the whole field costs little more than one column.
BergmanSample sector_hermite_sample(const LatticeParams& par,
                                    const MultiIndex& j, const SampledField& f,
                                    double t, int npts_xu, int npts_im,
                                    double radius = -1.0, double tol = 1e-10);

}  // namespace nilheat
