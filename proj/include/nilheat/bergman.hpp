#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilheat/functions.hpp"
#include "nilheat/grid.hpp"
#include "nilheat/multiindex.hpp"
#include "nilheat/nilmanifold.hpp"

namespace nilheat {

// Sampled holomorphic data for one sector.  The grid has 4n axes in the
// order x_1..x_n, u_1..u_n (real parts, periodic on [0,1)) followed by
// y_1..y_n, v_1..v_n (imaginary parts, midpoint nodes on a centered box).
// Writing z = x + iy, w = u + iv, a sector-k sample obeys
//   G(z + m, w + nn) = e^{2 pi i k (m.w - nn.z)} G(z, w),
// entire continuation of the quasiperiodic law on the real cell; k = 0 is
// the honestly periodic torus case.
struct BergmanSample {
  LatticeParams par;
  double t = 0.1;
  SampledField field;
};

using BergmanFn =
    std::function<cplx(std::span<const cplx>, std::span<const cplx>)>;

// Box radius at which the Gaussian factor of the sector weight has decayed
// to 1e-14 of its peak.  This sizes the box by the weight alone; when the
// integrand still grows near the boundary the norm routines raise a
// truncation warning and the caller should enlarge the box.
double bergman_imag_radius(int n, double lambda, double t);

// Sample G(z, w) on the standard cell-times-box grid.  Odd npts_im keeps the
// zero-imaginary-part slice on the grid (the inversion needs it).  A
// negative radius selects bergman_imag_radius.
BergmanSample bergman_sample(LatticeParams par, double t, const BergmanFn& G,
                             int npts_xu, int npts_im, double radius = -1.0);

// Seam defect of the quasiperiodic law, measured spectrally: along a real
// axis the products G e^{-2 pi i k x_j w_j} and G e^{+2 pi i k u_j z_j} are
// honestly 1-periodic, so the high trigonometric tail of a sampled line
// detects both seams and under-resolution.  Returns the worst relative tail
// over a spread of lines.
double qp_residual(const BergmanSample& G);

// Count of norm evaluations whose integrand had not decayed at the
// imaginary-part box boundary (boundary shell above 1e-9 of the total).
long bergman_truncation_warnings();
void reset_bergman_truncation_warnings();

// sqrt of int |F|^2 (2 pi t)^{-n} e^{-(|y|^2+|v|^2)/(2t)} over cell x box.
// Requires k = 0; the prefactor gives the constant function norm 1.
double torus_bergman_norm(const BergmanSample& F);

// sqrt of int |G|^2 W over cell x box for k != 0, with the weight taken in
// the direction opposite the sector character, W = W_t^{-lambda}; the
// weight-direction test pins the sign numerically.  Throws when the
// quasiperiodicity residual exceeds qp_tol.
double twisted_bergman_norm(const BergmanSample& G, double qp_tol = 1e-4);

// Finite shift group (Z/2kZ)^n acting on sector-k samples:
//   (act(s) G)(z, w) = e^{-i pi s.w} G(z + s/(2k), w).
// Entries of s are reduced mod 2k; npts_xu must be divisible by 2|k| so the
// shift stays on the grid.
BergmanSample finite_group_act(std::span<const int> s, const BergmanSample& G);

// Largest deviation from the eigenvalue law of the j-isotypic subspace,
//   G(z + e_i/(2k), w) = e^{i pi (w_i + j_i / k)} G(z, w),
// measured across all axes and grid nodes, relative to max |G|.
double sector_membership_residual(const BergmanSample& G, const MultiIndex& j);

// Character average (2k)^{-n} sum_s e^{-(pi i / k) s.j} act(s) G projecting
// onto the j-isotypic subspace.
BergmanSample project_sector_j(const BergmanSample& G, const MultiIndex& j);

// Fourier data of the unwrapped sample: for F in the j-isotypic space with
// a = j/(2k), H = e^{-i lambda a.z} e^{-i (lambda/2) z.w} F is 1/(2k)-
// periodic in x, and its x-coefficients C_m(w) at modes 2k m satisfy
// C_m(w - m) = C_0(w).  Returns C_0 on the zero-y slice, stitched from the
// C_m over Re w in [-mrad, mrad+1)^n with the v axes unchanged.  Requires
// odd npts_im; mrad is clamped to the modes the x grid resolves.
SampledField extract_C0(const BergmanSample& F, const MultiIndex& j,
                        int mrad = 3);

// Single coefficient C_m(w) on the base cell's zero-y slice (test hook for
// the stitching relation).
SampledField extract_Cm(const BergmanSample& F, const MultiIndex& j,
                        const MultiIndex& m);

class ill_posed_error : public std::runtime_error {
 public:
  explicit ill_posed_error(const std::string& what, MultiIndex alpha)
      : std::runtime_error(what), alpha(std::move(alpha)) {}
  MultiIndex alpha;
};

struct SectorInversion {
  std::vector<MultiIndex> alphas;  // graded order, degree <= degree_cap
  // Hermite coefficients of the translate f(. - a) in Phi_alpha^lambda; for
  // j = 0 these are the coefficients of f itself.
  std::vector<cplx> coeff;
  int degree_cap = 0;
  SampledField f;                  // recovered f on a centered box
};

// Inverse of the sector heat transform on Bergman data: extracts C_0,
// projects its central imaginary slice onto the orthonormal scaled Hermite
// functions, and undoes the semigroup by multiplying the degree-d
// coefficient with e^{(2d+n)|lambda| t}.  The degree cap N is the largest
// with amplification e^{(2N+n)|lambda| t} below cond_limit; spectral
// content detected beyond the cap raises ill_posed_error naming the
// offending index.
SectorInversion invert_sector_transform(const BergmanSample& F,
                                        const MultiIndex& j,
                                        double cond_limit = 1e8,
                                        int box_npts = 161);

// ---- closed-form Gaussian calculus -----------------------------------
// Oracle machinery for the isometry chain: twisted convolution with the
// heat kernel maps A exp(-1/2 V^T Q V + b.V) to a term of the same shape,
// so sector images of Gaussians are computable anywhere in C^{2n} through
// a certified lattice series of exact evaluations.

struct GaussianExpTerm {
  int d = 0;        // number of variables (2n on the phase plane)
  cplx A{};
  std::vector<cplx> Q;  // row-major symmetric d x d
  std::vector<cplx> b;  // linear exponent coefficients
  cplx eval(std::span<const cplx> V) const;
};

// gaussian_fn(d, amp, rate, center, freq) rewritten as a term.
GaussianExpTerm gaussian_term(int d, cplx amp, double rate,
                              std::span<const double> center,
                              std::span<const double> freq);

// Closed form of f *_lambda p_t^lambda for a term f on R^{2n}:
//   Q' = 2aI - R^T M^{-1} R,  b' = R^T M^{-1} b,
//   A' = A P (2 pi)^n det(M)^{-1/2} e^{(1/2) b^T M^{-1} b},
// with M = Q + 2aI, R = 2aI + (i lambda/2) J, a = w_coth(lambda t)/(4t)
// and P the kernel prefactor.  Re M must be positive definite.
GaussianExpTerm twisted_heat_image(const GaussianExpTerm& f, int n,
                                   double lambda, double t);

// Certified sum_{(m,nn)} e^{i(lambda/2)(nn.z - m.w)} T(z+m, w+nn); the
// twisted lattice average of a term, evaluated at complex arguments.  The
// shell bound comes from the eigenvalue floor of Re Q, which must be
// positive.
cplx sector_series(const GaussianExpTerm& T, const LatticeParams& par,
                   std::span<const cplx> z, std::span<const cplx> w,
                   double tol = 1e-12);

}  // namespace nilheat
