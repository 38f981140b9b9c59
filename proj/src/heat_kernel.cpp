#include "nilheat/heat_kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nilheat/hermite.hpp"
#include "nilheat/parallel.hpp"

namespace nilheat {

namespace {
constexpr double kSentinel = -1e300;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void fill_quad(HeatKernelQuad& q, int nodes) {
  q.h = 2.0 * q.Lambda / nodes;
  q.lam.resize(static_cast<std::size_t>(nodes));
  q.w.resize(static_cast<std::size_t>(nodes));
  q.a.resize(static_cast<std::size_t>(nodes));
  const double pref = std::pow(4.0 * std::numbers::pi * q.t, -q.n) * q.h / kTwoPi;
  for (int i = 0; i < nodes; ++i) {
    const double lam = -q.Lambda + (i + 0.5) * q.h;
    q.lam[static_cast<std::size_t>(i)] = lam;
    q.w[static_cast<std::size_t>(i)] =
        pref * std::exp(-q.t * lam * lam) * std::pow(w_over_sinh(lam * q.t), q.n);
    q.a[static_cast<std::size_t>(i)] = w_coth(lam * q.t) / (4.0 * q.t);
  }
}
}  // namespace

HeatKernelQuad heat_quad(int n, double t, int nodes, double Lambda) {
  if (!(t > 0) || n < 1 || nodes < 16)
    throw std::invalid_argument("heat_quad: bad parameters");
  HeatKernelQuad q;
  q.n = n;
  q.t = t;
  q.Lambda = Lambda > 0 ? Lambda : std::sqrt(std::log(1e14) / t) + 4.0;
  fill_quad(q, nodes);
  return q;
}

HeatKernelQuad heat_quad_complex(int n, double t, double s_im, double xi_im,
                                 int nodes) {
  if (!(t > 0) || n < 1 || s_im < 0 || xi_im < 0)
    throw std::invalid_argument("heat_quad_complex: bad parameters");
  // term modulus <= w_geom e^{-t lam^2 + |lam| beta + c} with
  // beta = s_im/(4t) + xi_im, c = s_im/(4t^2), from lam coth(lam t) <= lam + 1/t
  const double beta = s_im / (4.0 * t) + xi_im;
  const double c = s_im / (4.0 * t * t);
  const double target = std::log(1e16);
  const double Lambda =
      (beta + std::sqrt(beta * beta + 4.0 * t * (c + target))) / (2.0 * t) + 2.0;
  if (nodes <= 0) nodes = std::max(2048, static_cast<int>(std::ceil(2.0 * Lambda / 0.02)));
  HeatKernelQuad q;
  q.n = n;
  q.t = t;
  q.Lambda = Lambda;
  q.s_im_cert = s_im;
  q.xi_im_cert = xi_im;
  fill_quad(q, nodes);
  return q;
}

double heat_kernel_s(const HeatKernelQuad& q, double S, double xi) {
  double acc = 0;
  const std::size_t N = q.lam.size();
  for (std::size_t i = 0; i < N; ++i) {
    const double e = q.a[i] * S;
    if (e > 745.0) continue;
    acc += q.w[i] * std::exp(-e) * std::cos(q.lam[i] * xi);
  }
  return acc;
}

double heat_kernel(const HeatKernelQuad& q, std::span<const double> x,
                   std::span<const double> u, double xi) {
  if (x.size() != static_cast<std::size_t>(q.n) ||
      u.size() != static_cast<std::size_t>(q.n))
    throw std::invalid_argument("heat_kernel: dimension mismatch");
  double S = 0;
  for (int j = 0; j < q.n; ++j) S += x[j] * x[j] + u[j] * u[j];
  return heat_kernel_s(q, S, xi);
}

cplx heat_kernel_c(const HeatKernelQuad& q, std::span<const cplx> z,
                   std::span<const cplx> w, cplx zeta) {
  if (z.size() != static_cast<std::size_t>(q.n) ||
      w.size() != static_cast<std::size_t>(q.n))
    throw std::invalid_argument("heat_kernel_c: dimension mismatch");
  cplx S = 0;
  double s_im = 0;
  for (int j = 0; j < q.n; ++j) {
    S += z[j] * z[j] + w[j] * w[j];
    s_im += z[j].imag() * z[j].imag() + w[j].imag() * w[j].imag();
  }
  if (s_im > q.s_im_cert + 1e-12 || std::abs(zeta.imag()) > q.xi_im_cert + 1e-12)
    throw std::domain_error("heat_kernel_c: outside certified imaginary range");
  cplx acc = 0;
  const std::size_t N = q.lam.size();
  for (std::size_t i = 0; i < N; ++i)
    acc += q.w[i] * std::exp(-q.a[i] * S) * std::cos(q.lam[i] * zeta);
  return acc;
}

HeatKernelTable heat_table(int n, double t, double smax, double ximax, int ns,
                           int nxi) {
  if (ns < 8 || nxi < 8 || !(smax > 0) || !(ximax > 0))
    throw std::invalid_argument("heat_table: bad parameters");
  HeatKernelTable tb;
  tb.quad = heat_quad(n, t);
  tb.smax = smax;
  tb.ximax = ximax;
  tb.ns = ns;
  tb.nxi = nxi;
  tb.ds = smax / (ns - 1);
  tb.dxi = ximax / (nxi - 1);

  const HeatKernelQuad& q = tb.quad;
  const int N = static_cast<int>(q.lam.size());
  const int half = N / 2;  // nodes pair up as +/- lambda with equal w, a

  // ridge values k_t(S_j, 0) set the per-row scales
  std::vector<double> ridge(static_cast<std::size_t>(ns));
  parallel_for(ns, [&](std::int64_t j) {
    ridge[static_cast<std::size_t>(j)] = heat_kernel_s(q, j * tb.ds, 0.0);
  });

  std::vector<double> tab(static_cast<std::size_t>(ns) * nxi, 0.0);
  std::vector<double> cosrow(static_cast<std::size_t>(nxi));
  for (int i = half; i < N; ++i) {
    const double wi = 2.0 * q.w[static_cast<std::size_t>(i)];
    const double ai = q.a[static_cast<std::size_t>(i)];
    const double li = q.lam[static_cast<std::size_t>(i)];
    for (int k = 0; k < nxi; ++k)
      cosrow[static_cast<std::size_t>(k)] = std::cos(li * k * tb.dxi);
    const double f = std::exp(-ai * tb.ds);
    double r = wi;
    for (int j = 0; j < ns; ++j) {
      if (r < 1e-18 * ridge[static_cast<std::size_t>(j)]) break;
      double* row = tab.data() + static_cast<std::size_t>(j) * nxi;
      for (int k = 0; k < nxi; ++k) row[k] += r * cosrow[static_cast<std::size_t>(k)];
      r *= f;
    }
  }

  tb.logv.resize(tab.size());
  for (int j = 0; j < ns; ++j)
    for (int k = 0; k < nxi; ++k) {
      const double v = tab[static_cast<std::size_t>(j) * nxi + k];
      tb.logv[static_cast<std::size_t>(j) * nxi + k] =
          v > 1e-12 * ridge[static_cast<std::size_t>(j)] ? std::log(v) : kSentinel;
    }
  return tb;
}

namespace {
// Catmull-Rom weights for the 4-point stencil around fractional position s
inline void cr_weights(double s, double w[4]) {
  const double s2 = s * s, s3 = s2 * s;
  w[0] = 0.5 * (-s3 + 2.0 * s2 - s);
  w[1] = 0.5 * (3.0 * s3 - 5.0 * s2 + 2.0);
  w[2] = 0.5 * (-3.0 * s3 + 4.0 * s2 + s);
  w[3] = 0.5 * (s3 - s2);
}
}  // namespace

double HeatKernelTable::eval_s(double S, double xi) const {
  xi = std::abs(xi);
  const double js = S / ds, kx = xi / dxi;
  const int j0 = static_cast<int>(std::floor(js));
  const int k0 = static_cast<int>(std::floor(kx));
  if (j0 < 1 || j0 + 2 > ns - 1 || k0 + 2 > nxi - 1)
    return heat_kernel_s(quad, S, xi);
  double L[16];
  for (int dj = -1; dj <= 2; ++dj)
    for (int dk = -1; dk <= 2; ++dk) {
      const int kk = std::abs(k0 + dk);  // even reflection at xi = 0
      const double v = logv[static_cast<std::size_t>(j0 + dj) * nxi + kk];
      if (v == kSentinel) return heat_kernel_s(quad, S, xi);
      L[(dj + 1) * 4 + (dk + 1)] = v;
    }
  double wj[4], wk[4];
  cr_weights(js - j0, wj);
  cr_weights(kx - k0, wk);
  double acc = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc += wj[a] * wk[b] * L[a * 4 + b];
  return std::exp(acc);
}

double HeatKernelTable::eval(std::span<const double> x, std::span<const double> u,
                             double xi) const {
  double S = 0;
  for (std::size_t j = 0; j < x.size(); ++j) S += x[j] * x[j] + u[j] * u[j];
  return eval_s(S, xi);
}

HeatKernelBound heat_bound(int n, double t, double mu) {
  if (!(t > 0) || n < 1) throw std::invalid_argument("heat_bound: bad parameters");
  HeatKernelBound b;
  b.n = n;
  b.t = t;
  b.c0 = 0.5 / std::numbers::pi * std::pow(4.0 * std::numbers::pi * t, -n) *
         std::sqrt(std::numbers::pi / t);
  b.mu = mu > 0 ? mu : 0.75 * 0.5 * std::numbers::pi / t;
  if (!(b.mu * t < 0.5 * std::numbers::pi - 1e-9))
    throw std::invalid_argument("heat_bound: need mu t < pi/2");

  // rho = min over real lambda of Re[w coth w] at w = (lambda + i mu) t,
  //     = [x sinh 2x + y sin 2y] / (2 (sinh^2 x + sin^2 y)),  x = lambda t, y = mu t
  const double y = b.mu * t;
  const double sy = std::sin(y), s2y = std::sin(2.0 * y);
  const auto g = [&](double lam) {
    const double x = lam * t;
    return (x * std::sinh(2.0 * x) + y * s2y) /
           (2.0 * (std::sinh(x) * std::sinh(x) + sy * sy));
  };
  const double lam_hi = 20.0 / t;
  double gmin = g(0.0);
  const int m = 40000;
  for (int i = 1; i <= m; ++i) gmin = std::min(gmin, g(lam_hi * i / m));
  b.rho = gmin * (1.0 - 1e-4);

  // jmu bounds (1/2pi)(4pi t)^{-n} e^{t mu^2} int e^{-t lam^2} |phi((lam+i mu)t)|^n
  double Lambda = std::sqrt(std::log(1e16) / t) + 4.0;
  while ((Lambda * t + y) / std::sinh(Lambda * t) > 1.0) Lambda += 0.5 / t;
  const int N = 4096;
  const double h = 2.0 * Lambda / N;
  double J = 0;
  for (int i = 0; i < N; ++i) {
    const double lam = -Lambda + (i + 0.5) * h;
    const cplx w(lam * t, y);
    const double phi = std::abs(w) < 1e-12 ? 1.0 : std::abs(w / std::sinh(w));
    J += std::exp(-t * lam * lam) * std::pow(phi, n);
  }
  const double tail = std::exp(-t * Lambda * Lambda) / (t * Lambda);
  b.jmu = std::exp(t * b.mu * b.mu) * 0.5 / std::numbers::pi *
          std::pow(4.0 * std::numbers::pi * t, -n) * (J * h * 1.01 + tail);
  return b;
}

double heat_bound_eval(const HeatKernelBound& b, double S, double xi) {
  const double b1 = b.c0 * std::exp(-S / (4.0 * b.t));
  const double e2 = b.rho * S / (4.0 * b.t) + b.mu * std::abs(xi);
  const double b2 = e2 > 745.0 ? 0.0 : b.jmu * std::exp(-e2);
  return std::min(b1, b2);
}

}  // namespace nilheat
