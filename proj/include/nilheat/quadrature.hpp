#pragma once
#include <functional>
#include <span>
#include <vector>

#include "nilheat/grid.hpp"

namespace nilheat {

// Uniform-weight quadrature: cell_volume * sum of node values.
cplx integrate(const SampledField& f);
cplx integrate_serial(const SampledField& f);  // serial reference path
cplx integrate(const Grid& g, const std::function<cplx(std::span<const double>)>& fn);

// <f, g> = integral of f * conj(g); fields must share the grid.
cplx inner_product(const SampledField& f, const SampledField& g);
double norm_l2(const SampledField& f);

// Mean-normalized Fourier coefficient on a fully periodic grid:
//   c_m = (1/vol) * integral of f(x) exp(-2 pi i m.(x-lo)/L).
// Throws std::invalid_argument when 2|m_i| >= npts_i (unresolvable mode).
cplx fourier_coefficient(const SampledField& f, std::span<const int> m);

// Same coefficient along a single periodic axis; returns the field over the
// remaining axes.
SampledField fourier_coefficient_axis(const SampledField& f, int axis, int m);

// Trigonometric interpolant of values on a periodic axis.
struct TrigInterp {
  double lo = 0, period = 1;
  std::vector<cplx> coeff;  // modes -n/2..n/2 (endpoints halved for even n)
  std::vector<int> mode;
  cplx eval(double x) const;
};
TrigInterp trig_interp(std::span<const cplx> vals, double lo, double period);

// f(x + delta e_axis) for a periodic axis, via the trig interpolant.
SampledField shift_axis_periodic(const SampledField& f, int axis, double delta);

}  // namespace nilheat
