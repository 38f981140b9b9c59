#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "nilheat/bergman.hpp"
#include "nilheat/functions.hpp"
#include "nilheat/heat_kernel.hpp"
#include "nilheat/heat_transform.hpp"
#include "nilheat/heisenberg.hpp"
#include "nilheat/hermite.hpp"
#include "nilheat/nilmanifold.hpp"

using namespace nilheat;

namespace {

constexpr double kPi = std::numbers::pi;

// cell samples of the sector function underlying V_{k,j} f
SectorFunction vkj_cell(const LatticeParams& par, const MultiIndex& j,
                        const DecayingFunction& f, int npts) {
  SectorFunction S;
  S.par = par;
  S.cell.grid = unit_cell(par.n, npts);
  S.cell.values.resize(static_cast<std::size_t>(S.cell.grid.size()));
  std::vector<double> xs(static_cast<std::size_t>(2 * par.n));
  for (std::int64_t i = 0; i < S.cell.grid.size(); ++i) {
    S.cell.grid.point(i, xs.data());
    GroupPoint g;
    g.x.assign(xs.begin(), xs.begin() + par.n);
    g.u.assign(xs.begin() + par.n, xs.end());
    g.xi = 0.0;
    S.cell.values[static_cast<std::size_t>(i)] = weil_brezin_j(par, j, f, g);
  }
  return S;
}

double rel(cplx a, cplx b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_SUITE_BEGIN("heat_transform");

TEST_CASE("full transform concentrates to the kernel") {
  // a mass-one Gaussian far narrower than the kernel scale sqrt(2t)
  const double sig = 0.02, t = 0.25;
  const double amp = std::pow(2.0 * kPi * sig * sig, -1.5);
  DecayingFunction f = gaussian_fn(3, amp, 1.0 / (2.0 * sig * sig));
  CGroupPoint p;
  p.x = {cplx(0.3)};
  p.u = {cplx(-0.2)};
  p.xi = cplx(0.15);
  FullTransformOptions opt;
  opt.npts = 33;
  opt.radius = 6.5 * sig;
  opt.lambda_nodes = 512;
  const cplx got = heat_transform_full(f, t, p, opt);
  const HeatKernelQuad q = heat_quad(1, t);
  const std::vector<double> px{0.3}, pu{-0.2};
  const double want = heat_kernel(q, px, pu, 0.15);
  CHECK(std::abs(got.real() - want) / want < 3e-3);
  // real input, real point: the quadrature pairs +/- lambda exactly
  CHECK(std::abs(got.imag()) <= 1e-14 * got.real());
  // the reduced node count is already converged
  opt.lambda_nodes = 1024;
  const cplx again = heat_transform_full(f, t, p, opt);
  CHECK(rel(got, again) < 1e-10);
}

TEST_CASE("full transform is left equivariant") {
  const double t = 0.25;
  DecayingFunction f = gaussian_fn(3, cplx(0.9, 0.3), 2.3, {0.1, -0.2, 0.05},
                                   {0.3, -0.1, 0.2});
  GroupPoint g0;
  g0.x = {0.2};
  g0.u = {-0.3};
  g0.xi = 0.15;
  const GroupPoint gi = group_inverse(g0);
  DecayingFunction fl;  // f(g0^{-1} h)
  fl.dim = 3;
  fl.f = [fb = f.f, gi](std::span<const double> xs) {
    GroupPoint h;
    h.x = {xs[0]};
    h.u = {xs[1]};
    h.xi = xs[2];
    const GroupPoint a = group_mul(gi, h);
    const double v[3] = {a.x[0], a.u[0], a.xi};
    return fb(std::span<const double>(v, 3));
  };
  fl.bound = [b0 = f.bound](double r) { return b0(std::max(0.0, r - 1.0)); };
  FullTransformOptions opt;
  opt.npts = 35;
  opt.radius = sample_radius(f, 1e-12) + 0.8;
  opt.lambda_nodes = 384;
  CGroupPoint pts[2];
  pts[0].x = {cplx(0.26)};
  pts[0].u = {cplx(-0.33)};
  pts[0].xi = cplx(0.21);
  pts[1].x = {cplx(0.26, 0.15)};
  pts[1].u = {cplx(-0.33, -0.1)};
  pts[1].xi = cplx(0.21, 0.04);
  for (const CGroupPoint& p : pts) {
    const cplx lhs = heat_transform_full(fl, t, p, opt);
    const cplx rhs =
        heat_transform_full(f, t, group_mul_c(to_complex(gi), p), opt);
    CHECK(rel(lhs, rhs) < 1e-6);
  }
}

TEST_CASE("manifold kernel: lattice invariance and frozen value") {
  const double t = 0.25;
  const HeatKernelTable tab = heat_table(1, t);
  GroupPoint e;
  e.x = {0.0};
  e.u = {0.0};
  e.xi = 0.0;
  const LatticeSum Ke = manifold_kernel(tab, e, e, 1e-10);
  CHECK(Ke.value.real() == doctest::Approx(2.00041380689).epsilon(1e-9));
  CHECK(Ke.value.imag() == 0.0);
  CHECK(Ke.tail_bound < 1e-9);
  // widening the certified radius does not move the value
  const LatticeSum Ke2 = manifold_kernel(tab, e, e, 1e-10, Ke.radius + 3);
  CHECK(std::abs(Ke2.value - Ke.value) < 1e-11);

  GroupPoint g1, p1, gam;
  g1.x = {0.31};
  g1.u = {0.62};
  g1.xi = 0.21;
  p1.x = {0.15};
  p1.u = {0.4};
  p1.xi = -0.05;
  gam.x = {1.0};
  gam.u = {-1.0};
  gam.xi = 0.5;
  const LatticeSum K = manifold_kernel(tab, g1, p1, 1e-9);
  const LatticeSum Kg = manifold_kernel(tab, group_mul(gam, g1), p1, 1e-9);
  const LatticeSum Kp = manifold_kernel(tab, g1, group_mul(gam, p1), 1e-9);
  CHECK(std::abs(Kg.value - K.value) < 1e-12);
  CHECK(std::abs(Kp.value - K.value) < 1e-12);
  // the direct quadrature route agrees with the tabulated one
  const LatticeSum Kc = manifold_kernel(1, t, g1, to_complex(p1), 1e-9, 192);
  CHECK(rel(Kc.value, K.value) < 1e-9);
  CHECK(std::abs(Kc.value.imag()) < 1e-12);
  // near-equilibrium positivity: the flat mode dominates at this t
  for (double s : {0.1, 0.45, 0.8}) {
    GroupPoint h;
    h.x = {s};
    h.u = {1.0 - s};
    h.xi = 0.3 * s;
    CHECK(manifold_kernel(tab, h, p1, 1e-8).value.real() > 1.9);
  }
}

TEST_CASE("manifold kernel: column norm via the semigroup") {
  // int_cell K_t(h,p) K_t(h,p) dh = K_{2t}(p,p): quadrature vs one kernel
  const double t = 0.25;
  const HeatKernelTable tab = heat_table(1, t);
  GroupPoint p1;
  p1.x = {0.15};
  p1.u = {0.4};
  p1.xi = -0.05;
  const Grid cell = manifold_cell(1, 5, 4);
  std::vector<double> xs(3);
  double k2 = 0;
  for (std::int64_t i = 0; i < cell.size(); ++i) {
    cell.point(i, xs.data());
    GroupPoint h;
    h.x = {xs[0]};
    h.u = {xs[1]};
    h.xi = xs[2];
    const double kv = manifold_kernel(tab, h, p1, 1e-8).value.real();
    k2 += kv * kv;
  }
  k2 *= cell.cell_volume();
  const cplx K2t = manifold_kernel(1, 2.0 * t, p1, to_complex(p1), 1e-9, 192).value;
  CHECK(k2 == doctest::Approx(K2t.real()).epsilon(1e-4));
}

TEST_CASE("manifold transform: mass, mixed sectors, boundedness") {
  const double t = 0.25;
  LatticeParams par;
  par.n = 1;
  par.k = 1;
  DecayingFunction f =
      gaussian_fn(2, cplx(0.8, -0.6), 2.3, {0.15, -0.2}, {0.3, 0.1});
  SectorFunction S = twisted_average(f, par, 8);
  SampledField F = sector_embed(S, 4);

  // the constant is fixed up to the kernel's total mass, which is one
  SampledField ones;
  ones.grid = F.grid;
  ones.values.assign(static_cast<std::size_t>(F.grid.size()), cplx(1.0));
  CGroupPoint pa, pb;
  pa.x = {cplx(0.37)};
  pa.u = {cplx(0.11)};
  pa.xi = cplx(-0.08);
  pb.x = {cplx(0.82)};
  pb.u = {cplx(0.55)};
  pb.xi = cplx(0.19);
  const cplx ma = heat_transform_manifold(ones, 1, t, pa, 1e-7, 192);
  const cplx mb = heat_transform_manifold(ones, 1, t, pb, 1e-7, 192);
  CHECK(std::abs(ma - cplx(1.0)) < 1e-6);
  CHECK(std::abs(mb - cplx(1.0)) < 1e-6);

  // table route vs direct quadrature route on a two-sector field
  SampledField mixed = F;
  for (cplx& v : mixed.values) v += 1.0;
  const HeatKernelTable tab = heat_table(1, t);
  GroupPoint pr;
  pr.x = {0.37};
  pr.u = {0.11};
  pr.xi = -0.08;
  const cplx vt = heat_transform_manifold(mixed, 1, tab, pr, 1e-9);
  const cplx vc = heat_transform_manifold(mixed, 1, t, to_complex(pr), 1e-9, 192);
  CHECK(rel(vt, vc) < 1e-8);

  // |T_t F(p)| <= ||K_t(.,p)|| ||F||, with the column norm from the semigroup
  double f2 = 0;
  for (const cplx& v : mixed.values) f2 += std::norm(v);
  f2 *= mixed.grid.cell_volume();
  for (double s : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    GroupPoint p;
    p.x = {s};
    p.u = {0.9 - s};
    p.xi = 0.25 * s - 0.1;
    const cplx tv = heat_transform_manifold(mixed, 1, tab, p, 1e-7);
    const double col2 =
        manifold_kernel(1, 2.0 * t, p, to_complex(p), 1e-8, 192).value.real();
    CHECK(std::abs(tv) <= std::sqrt(col2 * f2) * (1.0 + 1e-6));
  }
}

TEST_CASE("three transform routes agree on a sector") {
  const double t = 0.1;
  LatticeParams par;
  par.n = 1;
  par.k = 1;
  const double lam = par.lambda();
  const MultiIndex j{1};
  DecayingFunction phi = sum_fn({hermite_fn_scaled({0}, lam),
                                 translate_fn(hermite_fn_scaled({1}, lam), {0.2})});
  const SampledField phis = sample(phi, sample_radius(phi, 1e-15), 257);
  const SectorFunction S = vkj_cell(par, j, phi, 64);
  const SampledField F = sector_embed(vkj_cell(par, j, phi, 8), 4);

  std::vector<CGroupPoint> pts;
  for (int i = 0; i < 10; ++i) {
    CGroupPoint p;
    p.x = {cplx(-0.4 + 0.19 * i)};
    p.u = {cplx(1.3 - 0.23 * i)};
    p.xi = cplx(0.21 * i - 0.9);
    pts.push_back(p);
  }
  for (int i = 0; i < 5; ++i) {
    CGroupPoint p;
    p.x = {cplx(0.1 + 0.17 * i, 0.16 - 0.05 * i)};
    p.u = {cplx(0.8 - 0.21 * i, -0.12 + 0.04 * i)};
    p.xi = cplx(0.1 * i - 0.2, 0.01 * i);
    pts.push_back(p);
  }
  double w_ms = 0, w_mh = 0, w_sh = 0;
  for (const CGroupPoint& p : pts) {
    std::vector<cplx> z{p.x[0]}, w{p.u[0]};
    const cplx vs = sector_heat_transform(S, t, z, w, 1e-12).value(p.xi);
    const cplx vh = sector_transform_via_hermite(par, j, phis, t, p, 1e-12);
    const cplx vm = heat_transform_manifold(F, 1, t, p, 2e-12, 256);
    w_ms = std::max(w_ms, rel(vm, vs));
    w_mh = std::max(w_mh, rel(vm, vh));
    w_sh = std::max(w_sh, rel(vs, vh));
  }
  CHECK(w_sh < 1e-10);
  CHECK(w_ms < 1e-5);
  CHECK(w_mh < 1e-5);
}

TEST_CASE("sector transform reduces to Euclidean convolution at k = 0") {
  const double t = 0.1;
  LatticeParams par;
  par.n = 1;
  par.k = 0;
  DecayingFunction f =
      gaussian_fn(2, cplx(1.1, 0.4), 1.6, {-0.3, 0.25}, {-0.2, 0.45});
  SectorFunction G = twisted_average(f, par, 32);
  std::vector<cplx> z{cplx(0.3)}, w{cplx(-0.1)};
  const SectorHeatValue v = sector_heat_transform(G, t, z, w, 1e-11);
  CHECK(v.damp == 1.0);
  CHECK(v.lambda == 0.0);
  // heat flow commutes with periodization, so the cell value unfolds to the
  // lattice sum of the plain Euclidean convolution; the sum factorizes into
  // one theta factor per axis
  const double R = sample_radius(f, 1e-15);
  const int nq = 221;
  const double h = 2.0 * R / nq;
  cplx direct = 0;
  for (int i = 0; i < nq; ++i)
    for (int l = 0; l < nq; ++l) {
      const double y1 = -R + (i + 0.5) * h, y2 = -R + (l + 0.5) * h;
      double s1 = 0, s2 = 0;
      for (int m = -8; m <= 8; ++m) {
        const double d1 = 0.3 + m - y1, d2 = -0.1 + m - y2;
        s1 += std::exp(-d1 * d1 / (4.0 * t));
        s2 += std::exp(-d2 * d2 / (4.0 * t));
      }
      const double ys[2] = {y1, y2};
      direct += f.f(std::span<const double>(ys, 2)) * s1 * s2;
    }
  direct *= h * h / (4.0 * kPi * t);
  CHECK(rel(v.conv, direct) < 1e-8);

  // constants are fixed by the flow
  SectorFunction C;
  C.par = par;
  C.cell.grid = unit_cell(1, 8);
  C.cell.values.assign(static_cast<std::size_t>(C.cell.grid.size()), cplx(1.0));
  CHECK(std::abs(sector_heat_transform(C, t, z, w, 1e-11).conv - cplx(1.0)) <
        1e-10);
}

TEST_CASE("sector transform: output law, resolution, central character") {
  const double t = 0.1;
  LatticeParams par;
  par.n = 1;
  par.k = 1;
  DecayingFunction f =
      gaussian_fn(2, cplx(0.8, -0.6), 2.3, {0.15, -0.2}, {0.3, 0.1});
  SectorFunction S = twisted_average(f, par, 64);
  std::vector<cplx> z{cplx(0.27)}, w{cplx(0.41)};
  const SectorHeatValue v = sector_heat_transform(S, t, z, w, 1e-11);

  // the image obeys the same quasi-periodic law as the input
  {
    std::vector<cplx> z1{cplx(1.27)};
    const cplx got = sector_heat_transform(S, t, z1, w, 1e-11).conv;
    const cplx ph = std::exp(cplx(0.0, 2.0 * kPi * par.k * 0.41));
    CHECK(rel(got, ph * v.conv) < 1e-12);
    std::vector<cplx> w1{cplx(1.41)};
    const cplx got2 = sector_heat_transform(S, t, z, w1, 1e-11).conv;
    const cplx ph2 = std::exp(cplx(0.0, -2.0 * kPi * par.k * 0.27));
    CHECK(rel(got2, ph2 * v.conv) < 1e-12);
  }
  // doubling the cell resolution does not move the value
  {
    SectorFunction S2 = twisted_average(f, par, 128);
    const cplx v2 = sector_heat_transform(S2, t, z, w, 1e-11).conv;
    CHECK(std::abs(v2 - v.conv) < 1e-9);
  }
  // the central dependence is the explicit character
  {
    const cplx xi(0.21, 0.03);
    CHECK(rel(v.value(xi), v.damp * v.conv * std::exp(cplx(0.0, 1.0) *
                                                      v.lambda * xi)) < 1e-14);
  }
}

TEST_CASE("hermite route matches the convolution route") {
  const double t = 0.1;
  LatticeParams par;
  par.n = 1;
  par.k = 1;
  const double lam = par.lambda();
  DecayingFunction f = hermite_fn_scaled({0}, lam);
  const SampledField fs = sample(f, sample_radius(f, 1e-15), 257);
  const SectorFunction S0 = vkj_cell(par, {0}, f, 24);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dx(-0.5, 1.5), dxi(-0.25, 0.25);
  cplx ratio_sum = 0;
  double worst = 0;
  for (int rep = 0; rep < 20; ++rep) {
    CGroupPoint g;
    g.x = {cplx(dx(rng))};
    g.u = {cplx(dx(rng))};
    g.xi = cplx(dxi(rng));
    std::vector<cplx> z{g.x[0]}, w{g.u[0]};
    const cplx vs = sector_heat_transform(S0, t, z, w, 1e-12).value(g.xi);
    const cplx vh = sector_transform_via_hermite(par, {0}, fs, t, g, 1e-12);
    worst = std::max(worst, rel(vh, vs));
    ratio_sum += vh / vs;
  }
  CHECK(worst < 1e-5);
  // the matching constant, calibrated once against the convolution route
  CHECK(kSectorHermiteConstant == 1.0);
  CHECK(std::abs(ratio_sum / 20.0 - cplx(1.0)) < 1e-10);

  // the nontrivial twist index goes through the same way
  const SectorFunction S1 = vkj_cell(par, {1}, f, 24);
  for (int i = 0; i < 5; ++i) {
    CGroupPoint g;
    g.x = {cplx(0.1 + 0.17 * i)};
    g.u = {cplx(-0.3 + 0.23 * i)};
    g.xi = cplx(0.05 * i - 0.1);
    std::vector<cplx> z{g.x[0]}, w{g.u[0]};
    const cplx vs = sector_heat_transform(S1, t, z, w, 1e-12).value(g.xi);
    const cplx vh = sector_transform_via_hermite(par, {1}, fs, t, g, 1e-12);
    CHECK(rel(vh, vs) < 1e-5);
  }
  LatticeParams flat;
  flat.k = 0;
  const MultiIndex j0{0};
  const CGroupPoint ge;
  CHECK_THROWS_AS(sector_transform_via_hermite(flat, j0, fs, t, ge, 1e-10),
                  std::invalid_argument);
}

TEST_CASE("holomorphic diagram closes at complex points") {
  // evolving the line data then extending equals transforming the extension
  const double t = 0.1;
  LatticeParams par;
  par.n = 1;
  par.k = 1;
  const double lam = par.lambda();
  DecayingFunction f = hermite_fn_scaled({0}, lam);
  const SampledField fs = sample(f, sample_radius(f, 1e-15), 257);
  const double mu = std::exp(-std::abs(lam) * t);
  const auto fc = [&](std::span<const cplx> zz) {
    return mu * hermite_scaled_c({0}, lam, zz);
  };
  const double c0 = std::pow(std::abs(lam) / kPi, 0.25);
  const auto fstrip = [&](double r, double yim) {
    return mu * c0 * std::exp(0.5 * std::abs(lam) * (yim * yim - r * r));
  };
  const cplx damp = std::exp(cplx(-t * lam * lam));
  for (int i = 0; i < 10; ++i) {
    CGroupPoint g;
    g.x = {cplx(-0.3 + 0.15 * i, 0.12 - 0.025 * i)};
    g.u = {cplx(0.9 - 0.17 * i, -0.08 + 0.02 * i)};
    g.xi = cplx(0.05 * i - 0.2, 0.015 * i - 0.06);
    const cplx lhs = damp * weil_brezin_c(par, fc, fstrip, g, 1e-12);
    const cplx rhs = sector_transform_via_hermite(par, {0}, fs, t, g, 1e-12);
    CHECK(rel(lhs, rhs) < 1e-5);
  }
}

TEST_CASE("evolved sector function reproduces the semigroup") {
  LatticeParams par;
  par.n = 1;
  par.k = 1;
  DecayingFunction f =
      gaussian_fn(2, cplx(1.1, 0.4), 1.6, {-0.3, 0.25}, {-0.2, 0.45});
  SectorFunction S = twisted_average(f, par, 16);
  SectorFunction Smid = sector_evolve(S, 0.04, 1e-11);
  CGroupPoint pts[3];
  pts[0].x = {cplx(0.27)};
  pts[0].u = {cplx(0.41)};
  pts[0].xi = cplx(0.13);
  pts[1].x = {cplx(-0.6)};
  pts[1].u = {cplx(1.9)};
  pts[1].xi = cplx(-0.31);
  pts[2].x = {cplx(0.27, 0.1)};
  pts[2].u = {cplx(0.41, -0.08)};
  pts[2].xi = cplx(0.13, 0.02);
  for (const CGroupPoint& p : pts) {
    std::vector<cplx> z{p.x[0]}, w{p.u[0]};
    const cplx via = sector_heat_transform(Smid, 0.06, z, w, 1e-11).value(p.xi);
    const cplx direct = sector_heat_transform(S, 0.10, z, w, 1e-11).value(p.xi);
    CHECK(rel(via, direct) < 1e-5);
  }
}

TEST_CASE("weighted norm of the image and eigenfunction scaling") {
  LatticeParams par;
  par.n = 1;
  par.k = 1;
  const double lam = par.lambda();
  const double t = 0.02;
  const double rad = 1.6 * bergman_imag_radius(1, lam, t);
  const double damp = std::exp(-t * lam * lam);

  // ||B image||_W = e^{-t lambda^2} ||f|| / 2 for every f; in particular the
  // ratio is blind to the Hermite index and the twist
  std::vector<double> ratios;
  for (int b : {0, 1, 2}) {
    DecayingFunction f = hermite_fn_scaled({b}, lam);
    const SampledField fs = sample(f, sample_radius(f, 1e-15), 257);
    for (int jj : {0, 1}) {
      BergmanSample B = sector_hermite_sample(par, {jj}, fs, t, 20, 27, rad);
      ratios.push_back(2.0 * twisted_bergman_norm(B) / damp);
    }
  }
  {
    DecayingFunction mix =
        sum_fn({hermite_fn_scaled({0}, lam), hermite_fn_scaled({2}, lam)});
    const SampledField fs = sample(mix, sample_radius(mix, 1e-15), 257);
    BergmanSample B = sector_hermite_sample(par, {0}, fs, t, 20, 27, rad);
    ratios.push_back(2.0 * twisted_bergman_norm(B) /
                     (damp * std::numbers::sqrt2));
  }
  double rmin = ratios[0], rmax = ratios[0];
  for (double r : ratios) {
    CHECK(r == doctest::Approx(1.0).epsilon(2e-6));
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  CHECK(rmax - rmin < 1e-9);

  // between two times the image of Phi_b scales by the predicted eigenvalue
  const double t2 = 0.03;
  CGroupPoint gp;
  gp.x = {cplx(0.31, 0.12)};
  gp.u = {cplx(0.77, -0.2)};
  gp.xi = cplx(0.0);
  for (int b : {0, 1, 2}) {
    DecayingFunction f = hermite_fn_scaled({b}, lam);
    const SampledField fs = sample(f, sample_radius(f, 1e-15), 257);
    const cplx v1 = sector_transform_via_hermite(par, {0}, fs, t, gp, 1e-12);
    const cplx v2 = sector_transform_via_hermite(par, {0}, fs, t2, gp, 1e-12);
    const double pred =
        std::exp(-(t2 - t) * (lam * lam + (2 * b + 1) * std::abs(lam)));
    CHECK(std::abs(v2 / v1 - cplx(pred)) < 1e-10);
  }
}

TEST_CASE("quadrature node choices are converged") {
  const double t = 0.1;
  LatticeParams par;
  par.n = 1;
  par.k = 1;
  DecayingFunction f =
      gaussian_fn(2, cplx(0.8, -0.6), 2.3, {0.15, -0.2}, {0.3, 0.1});
  const SampledField F = sector_embed(twisted_average(f, par, 8), 4);
  CGroupPoint p;
  p.x = {cplx(0.27)};
  p.u = {cplx(0.41)};
  p.xi = cplx(0.13);
  const cplx v256 = heat_transform_manifold(F, 1, t, p, 3e-10, 256);
  const cplx v512 = heat_transform_manifold(F, 1, t, p, 3e-10, 512);
  CHECK(rel(v256, v512) < 2e-5);

  GroupPoint g1, p1;
  g1.x = {0.31};
  g1.u = {0.62};
  g1.xi = 0.21;
  p1.x = {0.15};
  p1.u = {0.4};
  p1.xi = -0.05;
  const cplx k192 = manifold_kernel(1, 0.25, g1, to_complex(p1), 1e-9, 192).value;
  const cplx k384 = manifold_kernel(1, 0.25, g1, to_complex(p1), 1e-9, 384).value;
  CHECK(rel(k192, k384) < 1e-9);
}

TEST_SUITE_END();
