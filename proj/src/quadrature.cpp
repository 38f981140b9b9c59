#include "nilheat/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nilheat/parallel.hpp"

namespace nilheat {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t axis_stride(const Grid& g, int axis) {
  std::int64_t s = 1;
  for (int a = axis + 1; a < g.dim(); ++a) s *= g.npts[a];
  return s;
}
}  // namespace

cplx integrate(const SampledField& f) {
  const cplx s = chunked_reduce<cplx>(
      static_cast<std::int64_t>(f.values.size()),
      [&](std::int64_t i) { return f.values[static_cast<std::size_t>(i)]; });
  return f.grid.cell_volume() * s;
}

cplx integrate_serial(const SampledField& f) {
  const cplx s = serial_reduce<cplx>(
      static_cast<std::int64_t>(f.values.size()),
      [&](std::int64_t i) { return f.values[static_cast<std::size_t>(i)]; });
  return f.grid.cell_volume() * s;
}

cplx integrate(const Grid& g, const std::function<cplx(std::span<const double>)>& fn) {
  const int d = g.dim();
  const cplx s = chunked_reduce<cplx>(g.size(), [&](std::int64_t i) {
    double xs[8];
    g.point(i, xs);
    return fn(std::span<const double>(xs, d));
  });
  return g.cell_volume() * s;
}

cplx inner_product(const SampledField& f, const SampledField& g) {
  if (f.values.size() != g.values.size())
    throw std::invalid_argument("inner_product: size mismatch");
  const cplx s = chunked_reduce<cplx>(
      static_cast<std::int64_t>(f.values.size()), [&](std::int64_t i) {
        const auto k = static_cast<std::size_t>(i);
        return f.values[k] * std::conj(g.values[k]);
      });
  return f.grid.cell_volume() * s;
}

double norm_l2(const SampledField& f) {
  const double s = chunked_reduce<double>(
      static_cast<std::int64_t>(f.values.size()), [&](std::int64_t i) {
        return std::norm(f.values[static_cast<std::size_t>(i)]);
      });
  return std::sqrt(f.grid.cell_volume() * s);
}

cplx fourier_coefficient(const SampledField& f, std::span<const int> m) {
  const Grid& g = f.grid;
  const int d = g.dim();
  if (static_cast<int>(m.size()) != d)
    throw std::invalid_argument("fourier_coefficient: mode dimension mismatch");
  for (int a = 0; a < d; ++a) {
    if (!g.periodic[a])
      throw std::invalid_argument("fourier_coefficient: axis not periodic");
    if (2 * std::abs(m[a]) >= g.npts[a])
      throw std::invalid_argument("fourier_coefficient: mode beyond Nyquist");
  }
  const cplx s = chunked_reduce<cplx>(g.size(), [&](std::int64_t i) {
    int idx[8];
    g.unflatten(i, idx);
    double phase = 0;
    for (int a = 0; a < d; ++a)
      phase -= kTwoPi * m[a] * static_cast<double>(idx[a]) / g.npts[a];
    return f.values[static_cast<std::size_t>(i)] * std::polar(1.0, phase);
  });
  return s / static_cast<double>(g.size());
}

SampledField fourier_coefficient_axis(const SampledField& f, int axis, int m) {
  const Grid& g = f.grid;
  const int d = g.dim();
  if (axis < 0 || axis >= d)
    throw std::invalid_argument("fourier_coefficient_axis: bad axis");
  if (!g.periodic[axis])
    throw std::invalid_argument("fourier_coefficient_axis: axis not periodic");
  const int n = g.npts[axis];
  if (2 * std::abs(m) >= n)
    throw std::invalid_argument("fourier_coefficient_axis: mode beyond Nyquist");
  if (d == 1)
    throw std::invalid_argument("fourier_coefficient_axis: need dim >= 2");

  SampledField out;
  Grid og;
  for (int a = 0; a < d; ++a) {
    if (a == axis) continue;
    og.lo.push_back(g.lo[a]);
    og.hi.push_back(g.hi[a]);
    og.npts.push_back(g.npts[a]);
    og.periodic.push_back(g.periodic[a]);
  }
  out.grid = og;
  out.values.resize(static_cast<std::size_t>(og.size()));

  std::vector<cplx> ph(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    ph[static_cast<std::size_t>(j)] =
        std::polar(1.0 / n, -kTwoPi * m * static_cast<double>(j) / n);

  const std::int64_t stride = axis_stride(g, axis);
  parallel_for(og.size(), [&](std::int64_t l) {
    const std::int64_t outer = l / stride, inner = l % stride;
    const std::int64_t base = outer * (stride * n) + inner;
    cplx acc{};
    for (int j = 0; j < n; ++j)
      acc += f.values[static_cast<std::size_t>(base + j * stride)] *
             ph[static_cast<std::size_t>(j)];
    out.values[static_cast<std::size_t>(l)] = acc;
  });
  return out;
}

cplx TrigInterp::eval(double x) const {
  const double s = (x - lo) / period;
  cplx acc{};
  for (std::size_t i = 0; i < coeff.size(); ++i)
    acc += coeff[i] * std::polar(1.0, kTwoPi * mode[i] * s);
  return acc;
}

TrigInterp trig_interp(std::span<const cplx> vals, double lo, double period) {
  const int n = static_cast<int>(vals.size());
  if (n < 2) throw std::invalid_argument("trig_interp: need >= 2 values");
  TrigInterp t;
  t.lo = lo;
  t.period = period;
  for (int k = 0; k <= n / 2; ++k) {
    for (int sgn : {+1, -1}) {
      const int kk = sgn * k;
      if (kk == 0 && sgn < 0) continue;
      if (2 * k == n && sgn < 0) continue;  // Nyquist mode handled once below
      cplx a{};
      for (int j = 0; j < n; ++j)
        a += vals[static_cast<std::size_t>(j)] *
             std::polar(1.0, -kTwoPi * kk * static_cast<double>(j) / n);
      a /= static_cast<double>(n);
      if (2 * k == n) {
        // split the Nyquist coefficient symmetrically
        t.coeff.push_back(0.5 * a);
        t.mode.push_back(k);
        t.coeff.push_back(0.5 * a);
        t.mode.push_back(-k);
      } else {
        t.coeff.push_back(a);
        t.mode.push_back(kk);
      }
    }
  }
  return t;
}

SampledField shift_axis_periodic(const SampledField& f, int axis, double delta) {
  const Grid& g = f.grid;
  const int d = g.dim();
  if (axis < 0 || axis >= d)
    throw std::invalid_argument("shift_axis_periodic: bad axis");
  if (!g.periodic[axis])
    throw std::invalid_argument("shift_axis_periodic: axis not periodic");
  const int n = g.npts[axis];
  const double period = g.hi[axis] - g.lo[axis];
  const std::int64_t stride = axis_stride(g, axis);
  const std::int64_t nlines = g.size() / n;

  SampledField out;
  out.grid = g;
  out.values.resize(f.values.size());
  parallel_for(nlines, [&](std::int64_t l) {
    const std::int64_t outer = l / stride, inner = l % stride;
    const std::int64_t base = outer * (stride * n) + inner;
    std::vector<cplx> line(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      line[static_cast<std::size_t>(j)] =
          f.values[static_cast<std::size_t>(base + j * stride)];
    const TrigInterp t = trig_interp(line, g.lo[axis], period);
    for (int j = 0; j < n; ++j)
      out.values[static_cast<std::size_t>(base + j * stride)] =
          t.eval(g.node(axis, j) + delta);
  });
  return out;
}

}  // namespace nilheat
