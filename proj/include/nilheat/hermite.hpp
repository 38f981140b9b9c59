#pragma once
#include <functional>
#include <span>

#include "nilheat/grid.hpp"
#include "nilheat/multiindex.hpp"

namespace nilheat {

// Normalized Hermite functions:
//   phi_0(s) = pi^{-1/4} exp(-s^2/2),
//   phi_{m+1}(s) = sqrt(2/(m+1)) s phi_m(s) - sqrt(m/(m+1)) phi_{m-1}(s).
double hermite_phi(int m, double s);
cplx hermite_phi_c(int m, cplx z);
void hermite_phi_table(int mmax, double s, double* out);     // phi_0..phi_mmax
void hermite_phi_table_c(int mmax, cplx z, cplx* out);

// Phi_alpha(x) = prod_j phi_{alpha_j}(x_j)
double hermite_product(const MultiIndex& alpha, std::span<const double> x);
cplx hermite_product_c(const MultiIndex& alpha, std::span<const cplx> z);
// Phi^lambda_alpha(x) = |lambda|^{n/4} Phi_alpha(sqrt(|lambda|) x)
double hermite_scaled(const MultiIndex& alpha, double lambda, std::span<const double> x);
cplx hermite_scaled_c(const MultiIndex& alpha, double lambda, std::span<const cplx> z);

// Recurrence evaluations outside |Im z| <= 20 or m <= 200 are counted here;
// accuracy there is outside the validated envelope.
long hermite_range_warnings();
void reset_hermite_range_warnings();

// |phi_m| <= peak everywhere and |phi_m(s)| <= quarter_coef * exp(-s^2/4).
struct HermiteEnvelope {
  double peak;
  double quarter_coef;
};
HermiteEnvelope hermite_envelope(int m);

// Stable w/sinh(w) and w*coth(w) (series branch near w = 0).
double w_over_sinh(double w);
double w_coth(double w);
cplx w_over_sinh_c(cplx w);
cplx w_coth_c(cplx w);

// Kernel of exp(-t H(lambda)), H(lambda) = -Laplacian + lambda^2 |x|^2, in n
// variables; depends on lambda through |lambda|:
//   K = (|l|/(4 pi sinh(|l|t) cosh(|l|t)))^{n/2}
//       exp(-(|l|/4)[tanh(|l|t)|x+u|^2 + coth(|l|t)|x-u|^2]).
double mehler_kernel(int n, double lambda, double t,
                     std::span<const double> x, std::span<const double> u);
cplx mehler_kernel_c(int n, double lambda, double t,
                     std::span<const cplx> z, std::span<const cplx> w);

// Truncated expansion sum_{|alpha| <= max_degree}
//   exp(-(2|alpha|+n)|lambda| t) Phi^lambda_alpha(z) Phi^lambda_alpha(w).
cplx mehler_series(int n, double lambda, double t, std::span<const cplx> z,
                   std::span<const cplx> w, int max_degree);

// (exp(-t H(lambda)) f)(z) by Mehler quadrature against samples of f.
cplx hermite_semigroup_apply(double lambda, double t, const SampledField& f,
                             std::span<const cplx> z);

// Weight (2|lambda|/pi)^{n/2} (sinh 4 lambda t)^{-n/2}
//   exp(lambda tanh(2 lambda t)|x|^2) exp(-lambda coth(2 lambda t)|y|^2).
// Negative-argument sinh makes this meaningless for lambda <= 0; that case
// throws std::domain_error unless use_abs_lambda substitutes |lambda|.
double hermite_bergman_weight(int n, double lambda, double t,
                              std::span<const double> x, std::span<const double> y,
                              bool use_abs_lambda = false);

struct HermiteBergmanGrid {
  double box;  // quadrature square [-box, box]^2 in (x, y)
  int npts;    // midpoint nodes per axis
};
// Box sized for entire continuations of Hermite data of degree <= max_degree.
HermiteBergmanGrid hb_default_grid(double lambda, double t, int max_degree);

// n = 1 weighted square norm: integral over C of |F(x+iy)|^2 U_t(x,y) dx dy.
// With reduced = true the callable is interpreted as G(z) = F(z) exp(l z^2/2)
// and the growth is folded into the weight, which avoids overflow for
// Hermite-type inputs.
double hermite_bergman_norm(const std::function<cplx(cplx)>& F, double lambda,
                            double t, const HermiteBergmanGrid& g,
                            bool reduced = false);

// exp(z^2/2) phi_m(z) (polynomial part of the Hermite function).
cplx hermite_phi_poly_c(int m, cplx z);
// Phi^lambda_alpha(z) exp(lambda z.z/2), stable at large |z|.
cplx hermite_reduced_scaled_c(const MultiIndex& alpha, double lambda,
                              std::span<const cplx> z);

}  // namespace nilheat
