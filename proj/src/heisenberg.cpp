#include "nilheat/heisenberg.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nilheat/hermite.hpp"
#include "nilheat/parallel.hpp"
#include "nilheat/quadrature.hpp"

namespace nilheat {

namespace {
std::atomic<long> g_boundary_warnings{0};

void check_pair(std::size_t nx, std::size_t nu, const char* who) {
  if (nx == 0 || nx != nu) throw std::invalid_argument(std::string(who) + ": bad dimensions");
}
}  // namespace

GroupPoint group_mul(const GroupPoint& a, const GroupPoint& b) {
  check_pair(a.x.size(), a.u.size(), "group_mul");
  if (a.x.size() != b.x.size()) throw std::invalid_argument("group_mul: dimension mismatch");
  GroupPoint r = a;
  double c = 0;
  for (int j = 0; j < a.n(); ++j) {
    c += a.u[static_cast<std::size_t>(j)] * b.x[static_cast<std::size_t>(j)] -
         a.x[static_cast<std::size_t>(j)] * b.u[static_cast<std::size_t>(j)];
    r.x[static_cast<std::size_t>(j)] += b.x[static_cast<std::size_t>(j)];
    r.u[static_cast<std::size_t>(j)] += b.u[static_cast<std::size_t>(j)];
  }
  r.xi = a.xi + b.xi + 0.5 * c;
  return r;
}

GroupPoint group_inverse(const GroupPoint& a) {
  GroupPoint r = a;
  for (auto& v : r.x) v = -v;
  for (auto& v : r.u) v = -v;
  r.xi = -a.xi;
  return r;
}

CGroupPoint group_mul_c(const CGroupPoint& a, const CGroupPoint& b) {
  check_pair(a.x.size(), a.u.size(), "group_mul_c");
  if (a.x.size() != b.x.size()) throw std::invalid_argument("group_mul_c: dimension mismatch");
  CGroupPoint r = a;
  cplx c = 0;
  for (int j = 0; j < a.n(); ++j) {
    c += a.u[static_cast<std::size_t>(j)] * b.x[static_cast<std::size_t>(j)] -
         a.x[static_cast<std::size_t>(j)] * b.u[static_cast<std::size_t>(j)];
    r.x[static_cast<std::size_t>(j)] += b.x[static_cast<std::size_t>(j)];
    r.u[static_cast<std::size_t>(j)] += b.u[static_cast<std::size_t>(j)];
  }
  r.xi = a.xi + b.xi + 0.5 * c;
  return r;
}

CGroupPoint group_inverse_c(const CGroupPoint& a) {
  CGroupPoint r = a;
  for (auto& v : r.x) v = -v;
  for (auto& v : r.u) v = -v;
  r.xi = -a.xi;
  return r;
}

CGroupPoint to_complex(const GroupPoint& a) {
  CGroupPoint r;
  r.x.assign(a.x.begin(), a.x.end());
  r.u.assign(a.u.begin(), a.u.end());
  r.xi = a.xi;
  return r;
}

GroupPoint real_part(const CGroupPoint& a) {
  GroupPoint r;
  for (const cplx& v : a.x) r.x.push_back(v.real());
  for (const cplx& v : a.u) r.u.push_back(v.real());
  r.xi = a.xi.real();
  return r;
}

long schrodinger_boundary_warnings() { return g_boundary_warnings.load(); }
void reset_schrodinger_boundary_warnings() { g_boundary_warnings.store(0); }

SampledField schrodinger_apply(double lambda, const GroupPoint& g, const SampledField& phi) {
  const int n = phi.grid.dim();
  if (g.n() != n) throw std::invalid_argument("schrodinger_apply: dimension mismatch");

  // boundary mass check: the box is treated as one period for the shift
  double peak = 0, edge = 0;
  const std::int64_t sz = phi.grid.size();
  int idx[8];
  for (std::int64_t i = 0; i < sz; ++i) {
    const double a = std::abs(phi.values[static_cast<std::size_t>(i)]);
    peak = std::max(peak, a);
    phi.grid.unflatten(i, idx);
    for (int ax = 0; ax < n; ++ax)
      if (idx[ax] == 0 || idx[ax] == phi.grid.npts[ax] - 1) {
        edge = std::max(edge, a);
        break;
      }
  }
  if (edge > 1e-8 * peak) g_boundary_warnings.fetch_add(1);

  SampledField out = phi;
  // make the shift axes periodic for the trig interpolation
  for (auto& p : out.grid.periodic) p = 1;
  for (int ax = 0; ax < n; ++ax)
    if (g.u[static_cast<std::size_t>(ax)] != 0.0)
      out = shift_axis_periodic(out, ax, g.u[static_cast<std::size_t>(ax)]);
  out.grid.periodic = phi.grid.periodic;

  double xu = 0;
  for (int j = 0; j < n; ++j) xu += g.x[static_cast<std::size_t>(j)] * g.u[static_cast<std::size_t>(j)];
  const cplx c0 = std::polar(1.0, lambda * (g.xi + 0.5 * xu));
  parallel_for(sz, [&](std::int64_t i) {
    double v[8];
    out.grid.point(i, v);
    double xv = 0;
    for (int j = 0; j < n; ++j) xv += g.x[static_cast<std::size_t>(j)] * v[j];
    out.values[static_cast<std::size_t>(i)] *= c0 * std::polar(1.0, lambda * xv);
  });
  return out;
}

double p_kernel(int n, double lambda, double t,
                std::span<const double> x, std::span<const double> u) {
  if (!(t > 0)) throw std::invalid_argument("p_kernel: need t > 0");
  if (x.size() != static_cast<std::size_t>(n) || u.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("p_kernel: dimension mismatch");
  const double w = lambda * t;
  if (std::abs(w) > 350.0) throw std::overflow_error("p_kernel: |lambda| t too large");
  double s = 0;
  for (int j = 0; j < n; ++j) s += x[j] * x[j] + u[j] * u[j];
  const double pref = std::pow(w_over_sinh(w) / (4.0 * std::numbers::pi * t), n);
  return pref * std::exp(-(0.25 / t) * w_coth(w) * s);
}

cplx p_kernel_c(int n, double lambda, double t,
                std::span<const cplx> z, std::span<const cplx> w_) {
  if (!(t > 0)) throw std::invalid_argument("p_kernel_c: need t > 0");
  if (z.size() != static_cast<std::size_t>(n) || w_.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("p_kernel_c: dimension mismatch");
  const double w = lambda * t;
  if (std::abs(w) > 350.0) throw std::overflow_error("p_kernel_c: |lambda| t too large");
  cplx s = 0;
  for (int j = 0; j < n; ++j) s += z[j] * z[j] + w_[j] * w_[j];
  const double pref = std::pow(w_over_sinh(w) / (4.0 * std::numbers::pi * t), n);
  return pref * std::exp(-(0.25 / t) * w_coth(w) * s);
}

std::vector<cplx> twisted_convolution(
    double lambda, const SampledField& f,
    const std::function<cplx(std::span<const cplx>)>& g,
    std::span<const std::vector<cplx>> evals) {
  const int d = f.grid.dim();
  if (d % 2 != 0) throw std::invalid_argument("twisted_convolution: need even dimension");
  const int n = d / 2;
  const double vol = f.grid.cell_volume();
  std::vector<cplx> out(evals.size());
  for (std::size_t e = 0; e < evals.size(); ++e) {
    const std::vector<cplx>& X = evals[e];
    if (static_cast<int>(X.size()) != d)
      throw std::invalid_argument("twisted_convolution: bad evaluation point");
    out[e] = vol * chunked_reduce<cplx>(f.grid.size(), [&](std::int64_t i) {
      const cplx fv = f.values[static_cast<std::size_t>(i)];
      if (fv == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
      double y[8];
      f.grid.point(i, y);
      cplx arg[8];
      cplx ph = 0;
      for (int j = 0; j < n; ++j) {
        arg[j] = X[static_cast<std::size_t>(j)] - y[j];
        arg[n + j] = X[static_cast<std::size_t>(n + j)] - y[n + j];
        ph += y[j] * X[static_cast<std::size_t>(n + j)] - y[n + j] * X[static_cast<std::size_t>(j)];
      }
      return fv * g(std::span<const cplx>(arg, static_cast<std::size_t>(d))) *
             std::exp(cplx(0.0, 0.5 * lambda) * ph);
    });
  }
  return out;
}

SampledField twisted_convolution_grid(double lambda, const SampledField& f,
                                      const SampledField& g) {
  if (f.grid.dim() != g.grid.dim())
    throw std::invalid_argument("twisted_convolution_grid: dimension mismatch");
  const int d = f.grid.dim();
  if (d % 2 != 0) throw std::invalid_argument("twisted_convolution_grid: need even dimension");
  const int n = d / 2;
  for (int a = 0; a < d; ++a)
    if (std::abs(f.grid.step(a) - g.grid.step(a)) > 1e-14 * f.grid.step(a))
      throw std::invalid_argument("twisted_convolution_grid: step mismatch");

  SampledField out;
  out.grid = f.grid;
  out.values.assign(f.values.size(), cplx{});
  const double vol = f.grid.cell_volume();
  parallel_for(f.grid.size(), [&](std::int64_t io) {
    double X[8];
    f.grid.point(io, X);
    cplx acc = 0;
    double y[8];
    int gidx[8];
    for (std::int64_t i = 0; i < f.grid.size(); ++i) {
      const cplx fv = f.values[static_cast<std::size_t>(i)];
      if (fv == cplx(0.0, 0.0)) continue;
      f.grid.point(i, y);
      // locate X - y on g's grid; skip when outside the box
      bool inside = true;
      for (int a = 0; a < d && inside; ++a) {
        const double c = X[a] - y[a];
        const double off = g.grid.periodic[a] ? 0.0 : 0.5;
        const double pos = (c - g.grid.lo[a]) / g.grid.step(a) - off;
        const int j = static_cast<int>(std::lround(pos));
        if (j < 0 || j >= g.grid.npts[a] || std::abs(pos - j) > 1e-8)
          inside = false;
        else
          gidx[a] = j;
      }
      if (!inside) continue;
      std::int64_t gi = 0;
      for (int a = 0; a < d; ++a) gi = gi * g.grid.npts[a] + gidx[a];
      double ph = 0;
      for (int j = 0; j < n; ++j) ph += y[j] * X[n + j] - y[n + j] * X[j];
      acc += fv * g.values[static_cast<std::size_t>(gi)] * std::polar(1.0, 0.5 * lambda * ph);
    }
    out.values[static_cast<std::size_t>(io)] = acc * vol;
  });
  return out;
}

double twisted_bergman_weight(int n, double lambda, double t,
                              std::span<const cplx> z, std::span<const cplx> w) {
  if (z.size() != static_cast<std::size_t>(n) || w.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("twisted_bergman_weight: dimension mismatch");
  double ph = 0;
  std::vector<double> yy(static_cast<std::size_t>(n)), vv(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double x = z[j].real(), y = z[j].imag();
    const double u = w[j].real(), v = w[j].imag();
    ph += u * y - v * x;
    yy[static_cast<std::size_t>(j)] = 2.0 * y;
    vv[static_cast<std::size_t>(j)] = 2.0 * v;
  }
  return std::exp(lambda * ph) * p_kernel(n, lambda, 2.0 * t, yy, vv);
}

}  // namespace nilheat
