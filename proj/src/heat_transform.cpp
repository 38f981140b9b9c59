#include "nilheat/heat_transform.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nilheat/hermite.hpp"
#include "nilheat/parallel.hpp"

namespace nilheat {

namespace {

double l2(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Norm data of a complex group point, split the way the decay certificates
// need it.
struct PointGeom {
  double re_xy = 0;            // |Re (x,u)|_2
  double im_xy2 = 0;           // sum of Im^2 over (x,u)
  double re_x = 0, re_u = 0;   // |Re x|_2, |Re u|_2
  double im_x = 0, im_u = 0;
  double re_xi = 0, im_xi = 0;
};

PointGeom point_geom(const CGroupPoint& p) {
  PointGeom g;
  double rx2 = 0, ru2 = 0, ix2 = 0, iu2 = 0;
  for (int j = 0; j < p.n(); ++j) {
    rx2 += p.x[static_cast<std::size_t>(j)].real() * p.x[static_cast<std::size_t>(j)].real();
    ru2 += p.u[static_cast<std::size_t>(j)].real() * p.u[static_cast<std::size_t>(j)].real();
    ix2 += p.x[static_cast<std::size_t>(j)].imag() * p.x[static_cast<std::size_t>(j)].imag();
    iu2 += p.u[static_cast<std::size_t>(j)].imag() * p.u[static_cast<std::size_t>(j)].imag();
  }
  g.re_x = std::sqrt(rx2);
  g.re_u = std::sqrt(ru2);
  g.im_x = std::sqrt(ix2);
  g.im_u = std::sqrt(iu2);
  g.re_xy = std::sqrt(rx2 + ru2);
  g.im_xy2 = ix2 + iu2;
  g.re_xi = std::abs(p.xi.real());
  g.im_xi = std::abs(p.xi.imag());
  return g;
}

// |k_t(q h p)| as a function of the (s, xi) norms of the real point h.  The
// contour-shift certificate of the kernel is shifted by the offsets of q and
// p; their bilinear terms enter as central slack (e0, exi), and the
// imaginary parts of p cost a constant factor plus a linear tilt that is
// absorbed into d0 by completing the square.
GroupDecayBound conjugated_heat_bound(const HeatKernelQuad& q,
                                      const HeatKernelBound& hb,
                                      const GroupPoint& qg,
                                      const CGroupPoint& p) {
  const PointGeom pg = point_geom(p);
  const double qx = l2(qg.x), qu = l2(qg.u);
  const double cq = std::sqrt(qx * qx + qu * qu);
  GroupDecayBound b = heat_group_bound(hb);
  b.d0 = cq + pg.re_xy;
  b.exi = 0.5 * (qx + qu) + 0.5 * (pg.re_x + pg.re_u);
  b.e0 = std::abs(qg.xi) + pg.re_xi + 0.5 * (pg.re_x + pg.re_u) * cq;
  const double amax =
      q.a.empty() ? 0.0 : *std::max_element(q.a.begin(), q.a.end());
  const double ci0 = pg.im_xi + 0.5 * (pg.im_x + pg.im_u) * cq;
  const double ci1 = 0.5 * (pg.im_x + pg.im_u);
  double lC = std::log(b.C) + amax * pg.im_xy2 + q.Lambda * ci0;
  const double beta = q.Lambda * ci1;
  if (beta > 0) {
    lC += beta * b.d0 + beta * beta / b.rho;
    b.d0 += 2.0 * beta / b.rho;
  }
  b.C = std::exp(std::min(lC, 700.0));
  return b;
}

GroupPoint identity_point(int n) {
  GroupPoint e;
  e.x.assign(static_cast<std::size_t>(n), 0.0);
  e.u.assign(static_cast<std::size_t>(n), 0.0);
  return e;
}

GroupPoint gamma_point(int n, std::span<const int> idx) {
  GroupPoint g;
  g.x.assign(idx.begin(), idx.begin() + n);
  g.u.assign(idx.begin() + n, idx.begin() + 2 * n);
  g.xi = 0.5 * idx[2 * n];
  return g;
}

}  // namespace

cplx heat_transform_full(const DecayingFunction& f, double t,
                         const CGroupPoint& p, const FullTransformOptions& opt) {
  if (f.dim < 3 || f.dim % 2 == 0)
    throw std::invalid_argument("heat_transform_full: f must live on R^{2n+1}");
  const int n = (f.dim - 1) / 2;
  if (p.n() != n)
    throw std::invalid_argument("heat_transform_full: dimension mismatch");
  const double R = opt.radius > 0 ? opt.radius : sample_radius(f, 1e-12);
  const Grid box = centered_box(f.dim, R, opt.npts);
  const PointGeom pg = point_geom(p);
  const double xi_im =
      pg.im_xi + 0.5 * (pg.im_x + pg.im_u) * std::sqrt(2.0 * n) * R + 1e-12;
  const HeatKernelQuad q =
      heat_quad_complex(n, t, pg.im_xy2 + 1e-15, xi_im, opt.lambda_nodes);
  const cplx acc = chunked_reduce<cplx>(box.size(), [&](std::int64_t i) {
    double xs[9];
    box.point(i, xs);
    const cplx fv = f(std::span<const double>(xs, static_cast<std::size_t>(f.dim)));
    if (fv == cplx(0)) return cplx(0);
    GroupPoint h;
    h.x.assign(xs, xs + n);
    h.u.assign(xs + n, xs + 2 * n);
    h.xi = xs[2 * n];
    const CGroupPoint arg = group_mul_c(to_complex(group_inverse(h)), p);
    return fv * heat_kernel_c(q, arg.x, arg.u, arg.xi);
  });
  return acc * box.cell_volume();
}

LatticeSum manifold_kernel(int n, double t, const GroupPoint& g,
                           const CGroupPoint& p, double tol, int lambda_nodes,
                           int min_radius) {
  if (g.n() != n || p.n() != n)
    throw std::invalid_argument("manifold_kernel: dimension mismatch");
  const GroupPoint qg = group_inverse(g);
  const HeatKernelBound hb = heat_bound(n, t);
  const PointGeom pg = point_geom(p);
  // ranges certified before summing: estimate the needed shell radius from
  // the real-bound Gaussian, then size the imaginary-part certificate for
  // it; heat_kernel_c still checks every argument.
  const double ci1 = 0.5 * (pg.im_x + pg.im_u);
  double radius_est = 16.0;
  HeatKernelQuad q = heat_quad_complex(
      n, t, pg.im_xy2 + 1e-15,
      pg.im_xi + ci1 * (l2(qg.x) + l2(qg.u) + std::sqrt(2.0 * n) * radius_est) +
          1e-12,
      lambda_nodes);
  for (int pass = 0; pass < 2; ++pass) {
    const GroupDecayBound b = conjugated_heat_bound(q, hb, qg, p);
    const double need =
        b.d0 + std::sqrt(std::max(0.0, 4.0 * (std::log(std::max(b.C, 1e-30)) -
                                              std::log(tol * 1e-3)) / b.rho)) + 3.0;
    if (need <= radius_est) break;
    radius_est = need;
    q = heat_quad_complex(
        n, t, pg.im_xy2 + 1e-15,
        pg.im_xi + ci1 * (l2(qg.x) + l2(qg.u) + std::sqrt(2.0 * n) * radius_est) +
            1e-12,
        lambda_nodes);
  }
  const GroupDecayBound b = conjugated_heat_bound(q, hb, qg, p);
  const double amax =
      q.a.empty() ? 0.0 : *std::max_element(q.a.begin(), q.a.end());
  const auto term = [&](std::span<const int> idx) -> cplx {
    const GroupPoint h = gamma_point(n, idx);
    const CGroupPoint arg = group_mul_c(to_complex(group_mul(qg, h)), p);
    double sre = 0, sim = 0;
    for (int j = 0; j < n; ++j) {
      const cplx zj = arg.x[static_cast<std::size_t>(j)],
                 wj = arg.u[static_cast<std::size_t>(j)];
      sre += zj.real() * zj.real() + wj.real() * wj.real();
      sim += zj.imag() * zj.imag() + wj.imag() * wj.imag();
    }
    const double mult = std::exp(
        std::min(700.0, amax * sim + q.Lambda * std::abs(arg.xi.imag())));
    if (mult * heat_bound_eval(hb, sre, arg.xi.real()) < tol * 1e-6)
      return cplx(0);
    return heat_kernel_c(q, arg.x, arg.u, arg.xi);
  };
  return lattice_sum(2 * n + 1, term, group_tail_bound(b, identity_point(n), n),
                     tol, min_radius);
}

LatticeSum manifold_kernel(const HeatKernelTable& tab, const GroupPoint& g,
                           const GroupPoint& p, double tol, int min_radius) {
  const int n = tab.quad.n;
  if (g.n() != n || p.n() != n)
    throw std::invalid_argument("manifold_kernel: dimension mismatch");
  const GroupPoint qg = group_inverse(g);
  const HeatKernelBound hb = heat_bound(n, tab.quad.t);
  const GroupDecayBound b =
      conjugated_heat_bound(tab.quad, hb, qg, to_complex(p));
  const auto term = [&](std::span<const int> idx) -> cplx {
    const GroupPoint h = group_mul(group_mul(qg, gamma_point(n, idx)), p);
    double s = 0;
    for (int j = 0; j < n; ++j)
      s += h.x[static_cast<std::size_t>(j)] * h.x[static_cast<std::size_t>(j)] +
           h.u[static_cast<std::size_t>(j)] * h.u[static_cast<std::size_t>(j)];
    if (heat_bound_eval(hb, s, h.xi) < tol * 1e-6) return cplx(0);
    return cplx(tab.eval(h.x, h.u, h.xi), 0.0);
  };
  return lattice_sum(2 * n + 1, term, group_tail_bound(b, identity_point(n), n),
                     tol, min_radius);
}

namespace {

// Shared box walk for the unfolded manifold transform.  kernel(h) must
// return k_t(h^{-1} p); prune(h) a certified upper bound for |kernel(h)|.
// Quadrature of F against a kernel over the periodized cell.  The lattice
// acts by group multiplication, so the coordinate extension of F is not
// plain periodic: across an (a, b) shift of the x, u axes each central
// Fourier component e^{4 pi i k' xi} picks up e^{2 pi i k'(a.u - b.x)}.
// The xi axis is resolved into that basis once (exact for the sampled
// data) and the extension is evaluated with the phases in place.
cplx periodized_transform(const SampledField& F, int n,
                          std::span<const double> center, double rxy,
                          double rxi,
                          const std::function<double(const GroupPoint&)>& prune,
                          const std::function<cplx(const GroupPoint&)>& kernel,
                          double skip_below) {
  const Grid& g = F.grid;
  const int d = 2 * n + 1;
  const int nxi = g.npts[static_cast<std::size_t>(2 * n)];
  const std::int64_t nxu = g.size() / nxi;
  // hat[kf][xu]: coefficient of e^{4 pi i kf xi}, kf = jf or jf - nxi
  std::vector<std::vector<cplx>> hat(static_cast<std::size_t>(nxi));
  std::vector<int> freq(static_cast<std::size_t>(nxi));
  for (int jf = 0; jf < nxi; ++jf) {
    freq[static_cast<std::size_t>(jf)] = jf <= nxi / 2 ? jf : jf - nxi;
    std::vector<cplx>& row = hat[static_cast<std::size_t>(jf)];
    row.assign(static_cast<std::size_t>(nxu), cplx(0));
    for (std::int64_t xu = 0; xu < nxu; ++xu) {
      cplx s = 0;
      for (int jx = 0; jx < nxi; ++jx)
        s += F.values[static_cast<std::size_t>(xu * nxi + jx)] *
             std::exp(cplx(0.0, -2.0 * M_PI * jf * jx / nxi));
      row[static_cast<std::size_t>(xu)] = s / static_cast<double>(nxi);
    }
  }
  // twiddle[jf][jx] = e^{4 pi i freq(jf) xi_node(jx)}
  std::vector<std::vector<cplx>> twiddle(static_cast<std::size_t>(nxi));
  for (int jf = 0; jf < nxi; ++jf) {
    twiddle[static_cast<std::size_t>(jf)].resize(static_cast<std::size_t>(nxi));
    for (int jx = 0; jx < nxi; ++jx)
      twiddle[static_cast<std::size_t>(jf)][static_cast<std::size_t>(jx)] =
          std::exp(cplx(0.0, 4.0 * M_PI * freq[static_cast<std::size_t>(jf)] *
                                 g.node(2 * n, jx)));
  }
  std::vector<int> odim(static_cast<std::size_t>(d));
  std::vector<int> olo(static_cast<std::size_t>(d));
  std::vector<std::int64_t> stride(static_cast<std::size_t>(d));
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) {
    const double period = a < 2 * n ? 1.0 : 0.5;
    const double r = a < 2 * n ? rxy : rxi;
    olo[static_cast<std::size_t>(a)] =
        static_cast<int>(std::floor((center[static_cast<std::size_t>(a)] - r) / period));
    const int ohi =
        static_cast<int>(std::floor((center[static_cast<std::size_t>(a)] + r) / period));
    odim[static_cast<std::size_t>(a)] =
        (ohi - olo[static_cast<std::size_t>(a)] + 1) * g.npts[static_cast<std::size_t>(a)];
  }
  for (int a = d - 1; a >= 0; --a) {
    stride[static_cast<std::size_t>(a)] = total;
    total *= odim[static_cast<std::size_t>(a)];
  }
  const cplx acc = chunked_reduce<cplx>(total, [&](std::int64_t flat) {
    GroupPoint h;
    h.x.resize(static_cast<std::size_t>(n));
    h.u.resize(static_cast<std::size_t>(n));
    std::int64_t rem = flat, xuidx = 0;
    int xinode = 0;
    double law = 0;  // a.u - b.x at the cell representative
    for (int a = 0; a < d; ++a) {
      const int ca = static_cast<int>(rem / stride[static_cast<std::size_t>(a)]);
      rem -= static_cast<std::int64_t>(ca) * stride[static_cast<std::size_t>(a)];
      const int node = ca % g.npts[static_cast<std::size_t>(a)];
      const int off =
          olo[static_cast<std::size_t>(a)] + ca / g.npts[static_cast<std::size_t>(a)];
      const double period = a < 2 * n ? 1.0 : 0.5;
      const double coord = g.node(a, node) + period * off;
      if (a < n) {
        h.x[static_cast<std::size_t>(a)] = coord;
        xuidx = xuidx * g.npts[static_cast<std::size_t>(a)] + node;
      } else if (a < 2 * n) {
        h.u[static_cast<std::size_t>(a - n)] = coord;
        xuidx = xuidx * g.npts[static_cast<std::size_t>(a)] + node;
      } else {
        h.xi = coord;
        xinode = node;
      }
    }
    for (int j = 0; j < n; ++j) {
      const double xc = h.x[static_cast<std::size_t>(j)],
                   uc = h.u[static_cast<std::size_t>(j)];
      law += std::floor(xc) * (uc - std::floor(uc)) -
             std::floor(uc) * (xc - std::floor(xc));
    }
    if (prune(h) < skip_below) return cplx(0);
    const cplx wlaw = std::exp(cplx(0.0, 2.0 * M_PI * law));
    cplx Fv = 0;
    cplx wpow = 1;  // wlaw^freq for freq >= 0, walked in both directions
    for (int jf = 0; jf <= nxi / 2; ++jf) {
      Fv += hat[static_cast<std::size_t>(jf)][static_cast<std::size_t>(xuidx)] *
            twiddle[static_cast<std::size_t>(jf)][static_cast<std::size_t>(xinode)] *
            wpow;
      wpow *= wlaw;
    }
    wpow = cplx(1) / wlaw;
    for (int jf = nxi - 1; jf > nxi / 2; --jf) {
      Fv += hat[static_cast<std::size_t>(jf)][static_cast<std::size_t>(xuidx)] *
            twiddle[static_cast<std::size_t>(jf)][static_cast<std::size_t>(xinode)] *
            wpow;
      wpow /= wlaw;
    }
    if (Fv == cplx(0)) return cplx(0);
    return Fv * kernel(h);
  });
  return acc * g.cell_volume();
}

}  // namespace

cplx heat_transform_manifold(const SampledField& F, int n, double t,
                             const CGroupPoint& p, double tol,
                             int lambda_nodes) {
  const Grid& g = F.grid;
  if (g.dim() != 2 * n + 1)
    throw std::invalid_argument("heat_transform_manifold: bad cell field");
  if (p.n() != n)
    throw std::invalid_argument("heat_transform_manifold: dimension mismatch");
  double maxF = 0;
  for (const cplx& v : F.values) maxF = std::max(maxF, std::abs(v));
  if (maxF == 0) return 0;
  const HeatKernelBound hb = heat_bound(n, t);
  const PointGeom pg = point_geom(p);
  const GroupDecayBound bnd =
      conjugated_heat_bound(heat_quad(n, t, 16), hb, identity_point(n), p);
  const double lmarg = std::log(std::max(bnd.C, 1e-30) * maxF) - std::log(tol * 1e-2);
  const double rxy =
      bnd.d0 + std::sqrt(std::max(1.0, 4.0 * lmarg / bnd.rho)) + 0.5;
  const double rxi =
      bnd.e0 + bnd.exi * (pg.re_xy + std::sqrt(2.0 * n) * rxy) +
      std::max(1.0, lmarg) / bnd.mu + 0.25;
  const double sim_max = pg.im_xy2 + 1e-15;
  const double xi_im =
      pg.im_xi +
      0.5 * (pg.im_x + pg.im_u) * (pg.re_xy + std::sqrt(2.0 * n) * rxy + 1.0) +
      1e-12;
  const HeatKernelQuad q = heat_quad_complex(n, t, sim_max, xi_im, lambda_nodes);
  const double amax =
      q.a.empty() ? 0.0 : *std::max_element(q.a.begin(), q.a.end());
  std::vector<double> center(static_cast<std::size_t>(2 * n + 1));
  for (int j = 0; j < n; ++j) {
    center[static_cast<std::size_t>(j)] = p.x[static_cast<std::size_t>(j)].real();
    center[static_cast<std::size_t>(n + j)] = p.u[static_cast<std::size_t>(j)].real();
  }
  center[static_cast<std::size_t>(2 * n)] = p.xi.real();
  const double skip = tol * 1e-2 / (maxF * g.cell_volume() *
                                    std::max<double>(1.0, static_cast<double>(g.size())));
  const auto prune = [&](const GroupPoint& h) {
    const CGroupPoint arg = group_mul_c(to_complex(group_inverse(h)), p);
    double sre = 0, sim = 0;
    for (int j = 0; j < n; ++j) {
      const cplx zj = arg.x[static_cast<std::size_t>(j)],
                 wj = arg.u[static_cast<std::size_t>(j)];
      sre += zj.real() * zj.real() + wj.real() * wj.real();
      sim += zj.imag() * zj.imag() + wj.imag() * wj.imag();
    }
    const double mult = std::exp(
        std::min(700.0, amax * sim + q.Lambda * std::abs(arg.xi.imag())));
    return mult * heat_bound_eval(hb, sre, arg.xi.real());
  };
  const auto kernel = [&](const GroupPoint& h) {
    const CGroupPoint arg = group_mul_c(to_complex(group_inverse(h)), p);
    return heat_kernel_c(q, arg.x, arg.u, arg.xi);
  };
  return periodized_transform(F, n, center, rxy, rxi, prune, kernel, skip);
}

cplx heat_transform_manifold(const SampledField& F, int n,
                             const HeatKernelTable& tab, const GroupPoint& p,
                             double tol) {
  const Grid& g = F.grid;
  if (g.dim() != 2 * n + 1)
    throw std::invalid_argument("heat_transform_manifold: bad cell field");
  if (p.n() != n || tab.quad.n != n)
    throw std::invalid_argument("heat_transform_manifold: dimension mismatch");
  double maxF = 0;
  for (const cplx& v : F.values) maxF = std::max(maxF, std::abs(v));
  if (maxF == 0) return 0;
  const double t = tab.quad.t;
  const HeatKernelBound hb = heat_bound(n, t);
  const GroupDecayBound bnd =
      conjugated_heat_bound(tab.quad, hb, identity_point(n), to_complex(p));
  const double lmarg = std::log(std::max(bnd.C, 1e-30) * maxF) - std::log(tol * 1e-2);
  const double rxy =
      bnd.d0 + std::sqrt(std::max(1.0, 4.0 * lmarg / bnd.rho)) + 0.5;
  const double rxi =
      bnd.e0 + bnd.exi * (bnd.d0 + std::sqrt(2.0 * n) * rxy) +
      std::max(1.0, lmarg) / bnd.mu + 0.25;
  std::vector<double> center(static_cast<std::size_t>(2 * n + 1));
  for (int j = 0; j < n; ++j) {
    center[static_cast<std::size_t>(j)] = p.x[static_cast<std::size_t>(j)];
    center[static_cast<std::size_t>(n + j)] = p.u[static_cast<std::size_t>(j)];
  }
  center[static_cast<std::size_t>(2 * n)] = p.xi;
  const double skip = tol * 1e-2 / (maxF * g.cell_volume() *
                                    std::max<double>(1.0, static_cast<double>(g.size())));
  const auto prune = [&](const GroupPoint& h) {
    const GroupPoint arg = group_mul(group_inverse(h), p);
    double s = 0;
    for (int j = 0; j < n; ++j)
      s += arg.x[static_cast<std::size_t>(j)] * arg.x[static_cast<std::size_t>(j)] +
           arg.u[static_cast<std::size_t>(j)] * arg.u[static_cast<std::size_t>(j)];
    return heat_bound_eval(hb, s, arg.xi);
  };
  const auto kernel = [&](const GroupPoint& h) {
    const GroupPoint arg = group_mul(group_inverse(h), p);
    return cplx(tab.eval(arg.x, arg.u, arg.xi), 0.0);
  };
  return periodized_transform(F, n, center, rxy, rxi, prune, kernel, skip);
}

cplx SectorHeatValue::character(cplx xi) const {
  return std::exp(cplx(0.0, 1.0) * lambda * xi);
}

cplx SectorHeatValue::value(cplx xi) const {
  return damp * character(xi) * conv;
}

SectorHeatValue sector_heat_transform(const SectorFunction& S, double t,
                                      std::span<const cplx> z,
                                      std::span<const cplx> w, double tol) {
  const int n = S.par.n;
  if (static_cast<int>(z.size()) != n || static_cast<int>(w.size()) != n)
    throw std::invalid_argument("sector_heat_transform: dimension mismatch");
  const Grid& cg = S.cell.grid;
  if (cg.dim() != 2 * n)
    throw std::invalid_argument("sector_heat_transform: bad cell field");
  const double lam = S.par.lambda();
  const double rate = lam == 0 ? 1.0 / (4.0 * t) : w_coth(lam * t) / (4.0 * t);
  std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  const double pref = p_kernel(n, lam, t, zero, zero);
  double maxG = 0;
  for (const cplx& v : S.cell.values) maxG = std::max(maxG, std::abs(v));
  double s_im = 0, imz = 0, imw = 0;
  for (int j = 0; j < n; ++j) {
    s_im += z[j].imag() * z[j].imag() + w[j].imag() * w[j].imag();
    imz += z[j].imag() * z[j].imag();
    imw += w[j].imag() * w[j].imag();
  }
  imz = std::sqrt(imz);
  imw = std::sqrt(imw);
  std::vector<int> ctr(static_cast<std::size_t>(2 * n));
  for (int j = 0; j < n; ++j) {
    ctr[static_cast<std::size_t>(j)] =
        static_cast<int>(std::floor(z[j].real()));
    ctr[static_cast<std::size_t>(n + j)] =
        static_cast<int>(std::floor(w[j].real()));
  }
  std::vector<double> xs(static_cast<std::size_t>(2 * n));
  std::vector<cplx> dz(static_cast<std::size_t>(n)), dw(static_cast<std::size_t>(n));
  std::vector<int> mm(static_cast<std::size_t>(n)), nn(static_cast<std::size_t>(n));
  cplx acc = 0;
  int quiet = 0;
  bool done = false;
  for (int r = 0; r <= 48 && !done; ++r) {
    double shell_bound = 0;
    for_each_shell_point(2 * n, r, [&](std::span<const int> sh) {
      // offset of the translated cell and its distance to Re (z, w)
      double d2 = 0;
      double onorm = 0;
      for (int a = 0; a < 2 * n; ++a) {
        const int o = ctr[static_cast<std::size_t>(a)] + sh[a];
        const double c = a < n ? z[a].real() : w[a - n].real();
        double da = 0;
        if (c < o)
          da = o - c;
        else if (c > o + 1.0)
          da = c - (o + 1.0);
        d2 += da * da;
        const double far = std::max(std::abs(static_cast<double>(o)),
                                    std::abs(o + 1.0));
        onorm += far * far;
      }
      const double twist_grow =
          0.5 * std::abs(lam) * std::sqrt(onorm) * (imz + imw);
      const double ob =
          maxG * pref *
          std::exp(std::min(700.0, rate * s_im - rate * d2 + twist_grow));
      shell_bound += ob;
      if (ob < tol * 1e-3 * std::max(1.0, std::abs(acc))) return;
      for (int a = 0; a < n; ++a) {
        mm[static_cast<std::size_t>(a)] = ctr[static_cast<std::size_t>(a)] + sh[a];
        nn[static_cast<std::size_t>(a)] =
            ctr[static_cast<std::size_t>(n + a)] + sh[n + a];
      }
      cplx cellacc = 0;
      for (std::int64_t i = 0; i < cg.size(); ++i) {
        cg.point(i, xs.data());
        cplx tw = 0;
        for (int a = 0; a < n; ++a) {
          const double y1 = xs[static_cast<std::size_t>(a)] +
                            mm[static_cast<std::size_t>(a)];
          const double y2 = xs[static_cast<std::size_t>(n + a)] +
                            nn[static_cast<std::size_t>(a)];
          dz[static_cast<std::size_t>(a)] = z[a] - y1;
          dw[static_cast<std::size_t>(a)] = w[a] - y2;
          tw += cplx(0.0, 0.5 * lam) * (y1 * w[a] - y2 * z[a]);
        }
        const cplx ph = qp_phase(S.par, mm, nn,
                                 std::span<const double>(xs.data(), static_cast<std::size_t>(n)),
                                 std::span<const double>(xs.data() + n, static_cast<std::size_t>(n)));
        cellacc += S.cell.values[static_cast<std::size_t>(i)] * ph *
                   std::exp(tw) * p_kernel_c(n, lam, t, dz, dw);
      }
      acc += cellacc;
    });
    if (shell_bound < tol * std::max(1.0, std::abs(acc))) {
      if (++quiet >= 2) done = true;
    } else {
      quiet = 0;
    }
  }
  if (!done)
    throw nonconvergence_error("sector_heat_transform: cell shells did not converge");
  SectorHeatValue out;
  out.conv = acc * cg.cell_volume();
  out.lambda = lam;
  out.damp = std::exp(-t * lam * lam);
  return out;
}

SectorFunction sector_evolve(const SectorFunction& S, double s, double tol) {
  const int n = S.par.n;
  const Grid& cg = S.cell.grid;
  SectorFunction out{S.par, SampledField{cg, {}}};
  out.cell.values.resize(static_cast<std::size_t>(cg.size()));
  const double damp = std::exp(-s * S.par.lambda() * S.par.lambda());
  parallel_for(cg.size(), [&](std::int64_t i) {
    double xs[8];
    cg.point(i, xs);
    std::vector<cplx> z(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      z[static_cast<std::size_t>(j)] = xs[j];
      w[static_cast<std::size_t>(j)] = xs[n + j];
    }
    out.cell.values[static_cast<std::size_t>(i)] =
        damp * sector_heat_transform(S, s, z, w, tol).conv;
  });
  return out;
}

namespace {

// tau_{-a} f = f(. - a): the same samples live on the grid shifted by +a.
SampledField shift_grid(const SampledField& f, std::span<const double> a) {
  SampledField out = f;
  for (int j = 0; j < f.grid.dim(); ++j) {
    out.grid.lo[static_cast<std::size_t>(j)] += a[j];
    out.grid.hi[static_cast<std::size_t>(j)] += a[j];
  }
  return out;
}

}  // namespace

cplx sector_transform_via_hermite(const LatticeParams& par, const MultiIndex& j,
                                  const SampledField& f, double t,
                                  const CGroupPoint& g, double tol) {
  const int n = par.n;
  if (par.k == 0)
    throw std::invalid_argument("sector_transform_via_hermite: needs k != 0");
  if (static_cast<int>(j.size()) != n || f.grid.dim() != n || g.n() != n)
    throw std::invalid_argument("sector_transform_via_hermite: dimension mismatch");
  const double lam = par.lambda();
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    a[static_cast<std::size_t>(i)] =
        static_cast<double>(j[static_cast<std::size_t>(i)]) / (2.0 * par.k);
  const SampledField fa = shift_grid(f, a);
  std::vector<int> ctr(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    ctr[static_cast<std::size_t>(i)] = static_cast<int>(
        std::lround(-g.u[static_cast<std::size_t>(i)].real() - a[static_cast<std::size_t>(i)]));
  std::vector<cplx> arg(static_cast<std::size_t>(n));
  cplx ser = 0;
  double mx = 0;
  int quiet = 0;
  bool done = false;
  for (int r = 0; r <= 30 && !done; ++r) {
    double shell_max = 0;
    for_each_shell_point(n, r, [&](std::span<const int> sh) {
      cplx mod = 0;
      for (int i = 0; i < n; ++i) {
        const double m = ctr[static_cast<std::size_t>(i)] + sh[i];
        arg[static_cast<std::size_t>(i)] =
            g.u[static_cast<std::size_t>(i)] + m + a[static_cast<std::size_t>(i)];
        mod += cplx(0.0, lam * m) * g.x[static_cast<std::size_t>(i)];
      }
      const cplx term = std::exp(mod) * hermite_semigroup_apply(lam, t, fa, arg);
      ser += term;
      shell_max = std::max(shell_max, std::abs(term));
    });
    mx = std::max(mx, shell_max);
    if (shell_max < tol * std::max(mx, 1e-300)) {
      if (++quiet >= 2) done = true;
    } else {
      quiet = 0;
    }
  }
  if (!done)
    throw nonconvergence_error("sector_transform_via_hermite: series did not converge");
  cplx ex = cplx(0.0, lam) * g.xi;
  for (int i = 0; i < n; ++i)
    ex += cplx(0.0, lam) *
          (a[static_cast<std::size_t>(i)] * g.x[static_cast<std::size_t>(i)] +
           0.5 * g.x[static_cast<std::size_t>(i)] * g.u[static_cast<std::size_t>(i)]);
  return kSectorHermiteConstant * std::exp(-t * lam * lam) * std::exp(ex) * ser;
}

BergmanSample sector_hermite_sample(const LatticeParams& par,
                                    const MultiIndex& j, const SampledField& f,
                                    double t, int npts_xu, int npts_im,
                                    double radius, double tol) {
  if (par.n != 1)
    throw std::invalid_argument("sector_hermite_sample: n = 1 only");
  if (par.k == 0)
    throw std::invalid_argument("sector_hermite_sample: needs k != 0");
  if (static_cast<int>(j.size()) != 1 || f.grid.dim() != 1)
    throw std::invalid_argument("sector_hermite_sample: dimension mismatch");
  const double lam = par.lambda();
  const double a = static_cast<double>(j[0]) / (2.0 * par.k);
  if (radius <= 0) radius = bergman_imag_radius(1, lam, t);
  Grid g;
  g.lo = {0.0, 0.0, -radius, -radius};
  g.hi = {1.0, 1.0, radius, radius};
  g.npts = {npts_xu, npts_xu, npts_im, npts_im};
  g.periodic = {1, 1, 0, 0};
  g.validate();
  const SampledField fa = shift_grid(f, std::span<const double>(&a, 1));
  // psi on the distinct arguments (u node + m + a) + i (v node), one column
  // per lattice mode; modes stop once their column, weighted by the largest
  // modulation the box allows, falls below tol of the running maximum.
  const std::int64_t col = static_cast<std::int64_t>(npts_xu) * npts_im;
  std::vector<std::vector<cplx>> cols;
  std::vector<int> modes;
  double colpeak = 0;
  const auto add_mode = [&](int m) {
    std::vector<cplx> c(static_cast<std::size_t>(col));
    parallel_for(col, [&](std::int64_t i) {
      const int iu = static_cast<int>(i / npts_im);
      const int iv = static_cast<int>(i % npts_im);
      const cplx arg(g.node(1, iu) + m + a, g.node(3, iv));
      c[static_cast<std::size_t>(i)] =
          hermite_semigroup_apply(lam, t, fa, std::span<const cplx>(&arg, 1));
    });
    double mx = 0;
    for (const cplx& v : c) mx = std::max(mx, std::abs(v));
    const double weighted =
        mx * std::exp(std::abs(lam) * std::abs(m) * radius);
    cols.push_back(std::move(c));
    modes.push_back(m);
    colpeak = std::max(colpeak, weighted);
    return weighted;
  };
  add_mode(0);
  for (int sgn : {-1, 1}) {
    int quiet = 0;
    for (int m = 1; m <= 24 && quiet < 2; ++m) {
      const double wgt = add_mode(sgn * m);
      quiet = wgt < tol * colpeak ? quiet + 1 : 0;
    }
  }
  BergmanSample out{par, t, SampledField{g, {}}};
  out.field.values.resize(static_cast<std::size_t>(g.size()));
  const double damp = std::exp(-t * lam * lam);
  parallel_for(g.size(), [&](std::int64_t i) {
    int idx[4];
    g.unflatten(i, idx);
    const cplx z(g.node(0, idx[0]), g.node(2, idx[2]));
    const cplx w(g.node(1, idx[1]), g.node(3, idx[3]));
    const std::int64_t ci =
        static_cast<std::int64_t>(idx[1]) * npts_im + idx[3];
    cplx ser = 0;
    for (std::size_t mi = 0; mi < cols.size(); ++mi)
      ser += std::exp(cplx(0.0, lam * modes[mi]) * z) *
             cols[mi][static_cast<std::size_t>(ci)];
    out.field.values[static_cast<std::size_t>(i)] =
        damp * std::exp(cplx(0.0, lam) * (a * z) + cplx(0.0, 0.5 * lam) * z * w) *
        ser;
  });
  return out;
}

}  // namespace nilheat
