#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nilheat {

using cplx = std::complex<double>;

// Uniform tensor-product grid.  A periodic axis covers [lo, hi) with nodes at
// lo + j*h; a bounded axis uses midpoints lo + (j+1/2)*h.  In both cases the
// h-weighted node sum is spectrally accurate for smooth integrands that are
// periodic, respectively negligible at the box boundary.
struct Grid {
  std::vector<double> lo, hi;
  std::vector<int> npts;
  std::vector<char> periodic;

  int dim() const { return static_cast<int>(npts.size()); }
  std::int64_t size() const;
  double step(int axis) const { return (hi[axis] - lo[axis]) / npts[axis]; }
  double node(int axis, int j) const {
    const double h = step(axis);
    return lo[axis] + (periodic[axis] ? j * h : (j + 0.5) * h);
  }
  double cell_volume() const;  // product of steps
  // Row-major flattening, last axis fastest.
  void unflatten(std::int64_t flat, int* idx) const;
  void point(std::int64_t flat, double* xs) const;
  void validate() const;  // throws std::invalid_argument on malformed input
};

Grid uniform_grid(std::vector<double> lo, std::vector<double> hi,
                  std::vector<int> npts, std::vector<char> periodic);
// [0, extent)^dim, all axes periodic
Grid periodic_cell(int dim, double extent, int npts_per_axis);
// [-radius, radius]^dim, all axes bounded (midpoint nodes)
Grid centered_box(int dim, double radius, int npts_per_axis);

struct SampledField {
  Grid grid;
  std::vector<cplx> values;
};

SampledField make_field(const Grid& g,
                        const std::function<cplx(std::span<const double>)>& f);

}  // namespace nilheat
