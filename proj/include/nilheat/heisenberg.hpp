#pragma once
#include <functional>
#include <span>
#include <vector>

#include "nilheat/grid.hpp"

namespace nilheat {

// Group law on R^n x R^n x R:
//   (x, u, xi)(x', u', xi') = (x + x', u + u', xi + xi' + (u.x' - x.u')/2).
struct GroupPoint {
  std::vector<double> x, u;
  double xi = 0;
  int n() const { return static_cast<int>(x.size()); }
};
struct CGroupPoint {
  std::vector<cplx> x, u;
  cplx xi{};
  int n() const { return static_cast<int>(x.size()); }
};

GroupPoint group_mul(const GroupPoint& a, const GroupPoint& b);
GroupPoint group_inverse(const GroupPoint& a);
// holomorphic extension of the same polynomial law
CGroupPoint group_mul_c(const CGroupPoint& a, const CGroupPoint& b);
CGroupPoint group_inverse_c(const CGroupPoint& a);
CGroupPoint to_complex(const GroupPoint& a);
GroupPoint real_part(const CGroupPoint& a);

// Schroedinger representation on L^2(R^n):
//   (pi_lambda(x,u,xi) phi)(v) = e^{i lambda xi} e^{i lambda (x.v + x.u/2)} phi(v + u).
// phi is sampled on a box grid treated as one period for the shift; if phi has
// visible mass at the box boundary a warning is counted.
SampledField schrodinger_apply(double lambda, const GroupPoint& g, const SampledField& phi);
long schrodinger_boundary_warnings();
void reset_schrodinger_boundary_warnings();

// Twisted heat kernel (partial Fourier transform of the group heat kernel in
// the central variable, without the central e^{-t lambda^2} factor):
//   p_t^lambda(x,u) = (4 pi t)^{-n} (lt/sinh lt)^n
//                     exp(-(1/4t) (lt coth lt) (|x|^2 + |u|^2)),  l = lambda.
// Even in lambda; lambda = 0 gives the euclidean kernel on R^{2n}.
double p_kernel(int n, double lambda, double t,
                std::span<const double> x, std::span<const double> u);
cplx p_kernel_c(int n, double lambda, double t,
                std::span<const cplx> z, std::span<const cplx> w);

// Twisted convolution
//   (f *_l g)(x1,x2) = int f(y1,y2) g(x1-y1, x2-y2) e^{i(l/2)(y1.x2 - y2.x1)} dy,
// the image of group convolution under the central character e^{i l xi}.
// f is a sampled field on R^{2n}; g is a closed-form kernel on C^{2n}
// (arguments: z-part then w-part); evaluation points are complex.
std::vector<cplx> twisted_convolution(
    double lambda, const SampledField& f,
    const std::function<cplx(std::span<const cplx>)>& g,
    std::span<const std::vector<cplx>> evals);

// Both factors sampled with the same step; evaluated at the grid nodes of f
// (g extended by zero outside its box). Node differences of f must land on
// nodes of g, e.g. centered midpoint grids with an odd point count.
SampledField twisted_convolution_grid(double lambda, const SampledField& f,
                                      const SampledField& g);

// Weight of the lambda-twisted Bergman space over C^{2n}:
//   W_t^lambda(z,w) = e^{lambda (u.y - v.x)} p_{2t}^lambda(2y, 2v),
// z = x + iy, w = u + iv.
double twisted_bergman_weight(int n, double lambda, double t,
                              std::span<const cplx> z, std::span<const cplx> w);

}  // namespace nilheat
