#include "nilheat/grid.hpp"

#include <stdexcept>

#include "nilheat/parallel.hpp"

namespace nilheat {

std::int64_t Grid::size() const {
  std::int64_t s = 1;
  for (int n : npts) s *= n;
  return s;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= step(a);
  return v;
}

void Grid::unflatten(std::int64_t flat, int* idx) const {
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % npts[a]);
    flat /= npts[a];
  }
}

void Grid::point(std::int64_t flat, double* xs) const {
  for (int a = dim() - 1; a >= 0; --a) {
    const int j = static_cast<int>(flat % npts[a]);
    flat /= npts[a];
    xs[a] = node(a, j);
  }
}

void Grid::validate() const {
  const std::size_t d = npts.size();
  if (d == 0 || d > 8 || lo.size() != d || hi.size() != d || periodic.size() != d)
    throw std::invalid_argument("grid: inconsistent axis counts");
  for (std::size_t a = 0; a < d; ++a) {
    if (npts[a] < 1) throw std::invalid_argument("grid: npts must be >= 1");
    if (!(hi[a] > lo[a])) throw std::invalid_argument("grid: need hi > lo");
  }
}

Grid uniform_grid(std::vector<double> lo, std::vector<double> hi,
                  std::vector<int> npts, std::vector<char> periodic) {
  Grid g{std::move(lo), std::move(hi), std::move(npts), std::move(periodic)};
  g.validate();
  return g;
}

Grid periodic_cell(int dim, double extent, int npts_per_axis) {
  return uniform_grid(std::vector<double>(dim, 0.0),
                      std::vector<double>(dim, extent),
                      std::vector<int>(dim, npts_per_axis),
                      std::vector<char>(dim, 1));
}

Grid centered_box(int dim, double radius, int npts_per_axis) {
  return uniform_grid(std::vector<double>(dim, -radius),
                      std::vector<double>(dim, radius),
                      std::vector<int>(dim, npts_per_axis),
                      std::vector<char>(dim, 0));
}

SampledField make_field(const Grid& g,
                        const std::function<cplx(std::span<const double>)>& f) {
  SampledField out;
  out.grid = g;
  out.grid.validate();
  out.values.resize(static_cast<std::size_t>(g.size()));
  const int d = g.dim();
  parallel_for(g.size(), [&](std::int64_t i) {
    double xs[8];
    g.point(i, xs);
    out.values[static_cast<std::size_t>(i)] = f(std::span<const double>(xs, d));
  });
  return out;
}

}  // namespace nilheat
