#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "nilheat/bergman.hpp"
#include "nilheat/functions.hpp"
#include "nilheat/heisenberg.hpp"
#include "nilheat/hermite.hpp"
#include "nilheat/nilmanifold.hpp"
#include "nilheat/quadrature.hpp"

using namespace nilheat;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// p_t^lambda as a closed-form term
GaussianExpTerm p_term(double lambda, double t) {
  GaussianExpTerm o;
  o.d = 2;
  const double a = w_coth(lambda * t) / (4.0 * t);
  o.Q = {2.0 * a, 0.0, 0.0, 2.0 * a};
  o.b = {0.0, 0.0};
  o.A = w_over_sinh(lambda * t) / (4.0 * kPi * t);
  return o;
}

// closure for the Bergman image (A_lambda f) * p_t of a Gaussian term
BergmanFn heat_image_fn(LatticeParams par, double t, const GaussianExpTerm& f) {
  const GaussianExpTerm img = twisted_heat_image(f, par.n, par.lambda(), t);
  return [par, img](std::span<const cplx> z, std::span<const cplx> w) {
    return sector_series(img, par, z, w, 5e-12);
  };
}

double manifold_norm(const DecayingFunction& f, LatticeParams par) {
  return sector_norm(twisted_average(f, par, 64)) / std::sqrt(2.0);
}

// weighted norm with the weight in the sector's own character direction,
// the sign rejected by the isometry
double same_direction_norm(const BergmanSample& S) {
  const Grid& g = S.field.grid;
  const int n = S.par.n;
  double sum = 0;
  for (std::int64_t i = 0; i < g.size(); ++i) {
    double co[16];
    cplx z[4], w[4];
    g.point(i, co);
    for (int j = 0; j < n; ++j) {
      z[j] = cplx(co[j], co[2 * n + j]);
      w[j] = cplx(co[n + j], co[3 * n + j]);
    }
    sum += std::norm(S.field.values[static_cast<std::size_t>(i)]) *
           twisted_bergman_weight(n, S.par.lambda(), S.t,
                                  std::span<const cplx>(z, n),
                                  std::span<const cplx>(w, n));
  }
  return std::sqrt(sum * g.cell_volume());
}

// Bergman member built from Hermite data: for g = sum_b cf[b] Phi_b^lam the
// transform of f = g(. + a) in the j-isotypic space, prop44 scaling:
//   F(z,w) = e^{i lam a z} e^{i(lam/2) z w} sum_m e^{i lam m z} phi(w + m + a)
// with phi the semigroup image of g.
BergmanFn hermite_image_fn(LatticeParams par, double t, std::vector<cplx> cf,
                           double a) {
  const double lam = par.lambda();
  return [=](std::span<const cplx> z, std::span<const cplx> w) {
    cplx s = 0;
    for (int m = -7; m <= 7; ++m) {
      const cplx arg = w[0] + static_cast<double>(m) + a;
      cplx phi = 0;
      for (int b = 0; b < static_cast<int>(cf.size()); ++b) {
        if (cf[static_cast<std::size_t>(b)] == cplx(0)) continue;
        const MultiIndex al{b};
        phi += cf[static_cast<std::size_t>(b)] *
               std::exp(-(2.0 * b + 1.0) * std::abs(lam) * t) *
               hermite_scaled_c(al, lam, std::span<const cplx>(&arg, 1));
      }
      s += std::exp(cplx(0, lam * m) * z[0]) * phi;
    }
    return std::exp(cplx(0, lam) * (a * z[0]) + cplx(0, 0.5 * lam) * z[0] * w[0]) * s;
  };
}

cplx hermite_mixture(const std::vector<cplx>& cf, double lam, double x) {
  cplx s = 0;
  for (int b = 0; b < static_cast<int>(cf.size()); ++b) {
    const MultiIndex al{b};
    s += cf[static_cast<std::size_t>(b)] *
         hermite_scaled(al, lam, std::span<const double>(&x, 1));
  }
  return s;
}

}  // namespace

TEST_SUITE("bergman") {

TEST_CASE("twisted heat image: semigroup law and quadrature cross-check") {
  const double s = 0.04, t = 0.06;
  for (double lambda : {4.0 * kPi, 0.0, -8.0 * kPi}) {
    const GaussianExpTerm img = twisted_heat_image(p_term(lambda, s), 1, lambda, t);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    for (int i = 0; i < 5; ++i) {
      const cplx x(U(rng), 0.5 * U(rng)), u(U(rng), 0.5 * U(rng));
      const cplx V[2] = {x, u};
      const cplx want = p_kernel_c(1, lambda, s + t, std::span<const cplx>(&x, 1),
                                   std::span<const cplx>(&u, 1));
      const cplx got = img.eval(std::span<const cplx>(V, 2));
      CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
    }
  }
  // generic complex-amplitude gaussian against the sampled twisted convolution
  const double lam = 4.0 * kPi, tc = 0.1;
  const std::vector<double> ctr = {0.3, -0.2}, frq = {0.4, 0.15};
  const GaussianExpTerm ft = gaussian_term(2, cplx(1.2, 0.7), 1.9, ctr, frq);
  const GaussianExpTerm img = twisted_heat_image(ft, 1, lam, tc);
  const DecayingFunction f = gaussian_fn(2, cplx(1.2, 0.7), 1.9, ctr, frq);
  const SampledField fs = sample(f, 6.0, 192);
  const auto pker = [&](std::span<const cplx> xy) {
    return p_kernel_c(1, lam, tc, std::span<const cplx>(&xy[0], 1),
                      std::span<const cplx>(&xy[1], 1));
  };
  const std::vector<std::vector<cplx>> pts = {
      {cplx(0.37), cplx(-0.21)}, {cplx(0.1, 0.2), cplx(-0.3, 0.15)}};
  const auto conv = twisted_convolution(lam, fs, pker, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const cplx direct = img.eval(std::span<const cplx>(pts[i].data(), 2));
    CHECK(std::abs(conv[i] - direct) <= 1e-8 * std::abs(direct));
  }
}

TEST_CASE("sector series matches the certified lattice average at real points") {
  const LatticeParams par{1, 2};
  const std::vector<double> ctr = {0.2, 0.55}, frq = {0.3, -0.6};
  const DecayingFunction f = gaussian_fn(2, cplx(0.9, -0.5), 2.1, ctr, frq);
  const GaussianExpTerm ft = gaussian_term(2, cplx(0.9, -0.5), 2.1, ctr, frq);
  const SectorFunction G = twisted_average(f, par, 64);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 6; ++i) {
    const double x = U(rng), u = U(rng);
    const cplx z = x, w = u;
    const cplx series = sector_series(ft, par, std::span<const cplx>(&z, 1),
                                      std::span<const cplx>(&w, 1));
    const cplx avg = sector_eval(G, std::span<const double>(&x, 1),
                                 std::span<const double>(&u, 1));
    CHECK(std::abs(series - avg) <= 1e-10 * std::abs(avg));
  }
}

TEST_CASE("qp residual separates honest sectors from mismatched data") {
  const LatticeParams par{1, 1};
  const double t = 0.1;
  const std::vector<double> ctr = {0.1, -0.25}, frq = {0.2, 0.3};
  const GaussianExpTerm ft = gaussian_term(2, cplx(1.0, -0.4), 2.2, ctr, frq);
  const BergmanSample S = bergman_sample(par, t, heat_image_fn(par, t, ft), 16, 17);
  CHECK(qp_residual(S) < 1e-7);
  const BergmanSample bad{LatticeParams{1, 2}, t, S.field};
  CHECK(qp_residual(bad) > 1e-3);
  CHECK_THROWS_AS(twisted_bergman_norm(bad), std::invalid_argument);
}

TEST_CASE("weight direction: the transform is isometric only against the opposite character") {
  // the weighted norm of the image is 1/sqrt(2) times the manifold norm for
  // every input, every t and every k; the constant comes from the volume 1/2
  // of the center circle.  the check needs small t: the weighted integrand
  // decays in the imaginary directions at rate lam (coth(2 lam t) - 1), which
  // at t = 0.1 is 0.17 and no affordable box carries the integral, while at
  // t = 0.02 it is 14.5 and the boxes below clip only e^{-30} or less.
  const double t = 0.02;
  const LatticeParams par{1, 1};
  const double rad = 1.6 * bergman_imag_radius(1, par.lambda(), t);
  const double invsqrt2 = 1.0 / std::numbers::sqrt2;
  struct In {
    cplx amp;
    double rate;
    std::vector<double> ctr, frq;
  };
  const std::vector<In> ins = {
      {cplx(1.0, 0.0), kPi, {0.0, 0.0}, {0.0, 0.0}},
      {cplx(0.8, -0.6), 2.3, {0.15, -0.2}, {0.3, 0.1}},
      {cplx(1.1, 0.4), 1.6, {-0.3, 0.25}, {-0.2, 0.45}},
  };
  std::vector<double> good, flipped;
  for (const In& in : ins) {
    const GaussianExpTerm ft = gaussian_term(2, in.amp, in.rate, in.ctr, in.frq);
    const BergmanSample S =
        bergman_sample(par, t, heat_image_fn(par, t, ft), 20, 27, rad);
    const DecayingFunction f = gaussian_fn(2, in.amp, in.rate, in.ctr, in.frq);
    const double man = manifold_norm(f, par);
    good.push_back(twisted_bergman_norm(S) / man);
    flipped.push_back(same_direction_norm(S) / man);
  }
  for (double r : good) CHECK(r == doctest::Approx(invsqrt2).epsilon(2e-6));
  const double fmax = std::max({flipped[0], flipped[1], flipped[2]});
  const double fmin = std::min({flipped[0], flipped[1], flipped[2]});
  CHECK(fmax / fmin > 1.01);

  // same constant at another t and another k
  const In& in = ins[1];
  const GaussianExpTerm ft = gaussian_term(2, in.amp, in.rate, in.ctr, in.frq);
  const DecayingFunction f = gaussian_fn(2, in.amp, in.rate, in.ctr, in.frq);
  const double t2 = 0.03;
  const BergmanSample St =
      bergman_sample(par, t2, heat_image_fn(par, t2, ft), 20, 27,
                     1.6 * bergman_imag_radius(1, par.lambda(), t2));
  const double rt = twisted_bergman_norm(St) / manifold_norm(f, par);
  CHECK(rt == doctest::Approx(invsqrt2).epsilon(2e-6));
  const LatticeParams par2{1, 2};
  const BergmanSample Sk =
      bergman_sample(par2, t, heat_image_fn(par2, t, ft), 20, 33,
                     2.0 * bergman_imag_radius(1, par2.lambda(), t));
  const double rk = twisted_bergman_norm(Sk) / manifold_norm(f, par2);
  CHECK(rk == doctest::Approx(invsqrt2).epsilon(2e-6));
}

TEST_CASE("twisted norm is invariant under shifting the real cell") {
  const double t = 0.1;
  const LatticeParams par{1, 1};
  const double rad = 1.6 * bergman_imag_radius(1, par.lambda(), t);
  const std::vector<double> ctr = {0.2, -0.15}, frq = {0.35, 0.2};
  const GaussianExpTerm ft = gaussian_term(2, cplx(0.9, 0.3), 2.0, ctr, frq);
  const auto img = heat_image_fn(par, t, ft);
  const BergmanSample S = bergman_sample(par, t, img, 20, 27, rad);
  const double base = twisted_bergman_norm(S);
  Grid g = S.field.grid;
  g.lo[0] = 0.3;
  g.hi[0] = 1.3;
  g.lo[1] = 0.7;
  g.hi[1] = 1.7;
  BergmanSample shifted{par, t, SampledField{g, {}}};
  shifted.field.values.resize(static_cast<std::size_t>(g.size()));
  for (std::int64_t i = 0; i < g.size(); ++i) {
    double co[4];
    g.point(i, co);
    const cplx z(co[0], co[2]), w(co[1], co[3]);
    shifted.field.values[static_cast<std::size_t>(i)] =
        img(std::span<const cplx>(&z, 1), std::span<const cplx>(&w, 1));
  }
  CHECK(twisted_bergman_norm(shifted) == doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("torus sector norm: unit constant, mode isometry, box warnings") {
  const LatticeParams par0{1, 0};
  const double t = 0.1;
  const auto one = [](std::span<const cplx>, std::span<const cplx>) {
    return cplx(1.0);
  };
  CHECK(torus_bergman_norm(bergman_sample(par0, t, one, 8, 21)) ==
        doctest::Approx(1.0).epsilon(1e-10));

  const auto cosim = [t](std::span<const cplx> z, std::span<const cplx>) {
    return std::exp(-4.0 * kPi * kPi * t) * std::cos(kTwoPi * z[0]);
  };
  reset_bergman_truncation_warnings();
  const BergmanSample wide = bergman_sample(par0, t, cosim, 16, 61, 4.8);
  CHECK(torus_bergman_norm(wide) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(bergman_truncation_warnings() == 0);
  // the weight-only default box is too small for this growing mode
  const BergmanSample narrow = bergman_sample(par0, t, cosim, 16, 33);
  torus_bergman_norm(narrow);
  CHECK(bergman_truncation_warnings() > 0);

  const auto prod = [t](std::span<const cplx> z, std::span<const cplx> w) {
    return std::exp(-8.0 * kPi * kPi * t) * std::cos(kTwoPi * z[0]) *
           std::cos(kTwoPi * w[0]);
  };
  CHECK(torus_bergman_norm(bergman_sample(par0, t, prod, 16, 61, 4.8)) ==
        doctest::Approx(0.5).epsilon(1e-6));

  const LatticeParams par1{1, 1};
  const std::vector<double> ctr = {0.0, 0.0}, frq = {0.0, 0.0};
  const GaussianExpTerm ft = gaussian_term(2, cplx(1.0), 2.0, ctr, frq);
  const BergmanSample tw = bergman_sample(par1, t, heat_image_fn(par1, t, ft), 8, 9);
  CHECK_THROWS_AS(torus_bergman_norm(tw), std::invalid_argument);
}

TEST_CASE("finite shift group: unitary action, composition, isotypic projections") {
  const LatticeParams par{1, 2};
  const double t = 0.1;
  const double rad = 1.6 * bergman_imag_radius(1, par.lambda(), t);
  const std::vector<double> ctr = {0.3, -0.1}, frq = {0.25, 0.4};
  const GaussianExpTerm ft = gaussian_term(2, cplx(1.0, -0.3), 2.0, ctr, frq);
  const BergmanSample S =
      bergman_sample(par, t, heat_image_fn(par, t, ft), 20, 27, rad);
  const double base = twisted_bergman_norm(S);
  double peak = 0;
  for (const cplx& v : S.field.values) peak = std::max(peak, std::abs(v));

  const int s1[1] = {1}, s3[1] = {3};
  const BergmanSample A1 = finite_group_act(s1, S);
  CHECK(twisted_bergman_norm(A1) == doctest::Approx(base).epsilon(1e-9));
  // composing to a full period returns the sample unchanged
  const BergmanSample A13 = finite_group_act(s3, A1);
  double dmax = 0;
  for (std::size_t i = 0; i < S.field.values.size(); ++i)
    dmax = std::max(dmax, std::abs(A13.field.values[i] - S.field.values[i]));
  CHECK(dmax <= 1e-10 * peak);

  std::vector<BergmanSample> P;
  for (int j = 0; j < 4; ++j) P.push_back(project_sector_j(S, MultiIndex{j}));
  double cmax = 0;
  for (std::size_t i = 0; i < S.field.values.size(); ++i) {
    cplx sum = 0;
    for (const auto& p : P) sum += p.field.values[i];
    cmax = std::max(cmax, std::abs(sum - S.field.values[i]));
  }
  CHECK(cmax <= 1e-10 * peak);
  const BergmanSample PP = project_sector_j(P[1], MultiIndex{1});
  double imax = 0;
  for (std::size_t i = 0; i < PP.field.values.size(); ++i)
    imax = std::max(imax, std::abs(PP.field.values[i] - P[1].field.values[i]));
  CHECK(imax <= 1e-10 * peak);
  for (int j = 0; j < 4; ++j)
    CHECK(sector_membership_residual(P[static_cast<std::size_t>(j)], MultiIndex{j}) < 5e-7);
  CHECK(sector_membership_residual(P[1], MultiIndex{0}) > 1e-2);
  // eigenvalue law of the action on an isotypic piece
  const BergmanSample AP = finite_group_act(s1, P[3]);
  const cplx eig = std::polar(1.0, kPi * 3.0 / 2.0);
  double emax = 0;
  for (std::size_t i = 0; i < AP.field.values.size(); ++i)
    emax = std::max(emax, std::abs(AP.field.values[i] - eig * P[3].field.values[i]));
  CHECK(emax <= 1e-9 * peak);
}

TEST_CASE("coefficient stitching: C_0 across cells equals direct quadrature") {
  const LatticeParams par{1, 1};
  const double t = 0.1;
  const MultiIndex j{1};
  const std::vector<double> ctr = {0.2, 0.3}, frq = {-0.3, 0.2};
  const GaussianExpTerm ft = gaussian_term(2, cplx(0.9, 0.2), 1.8, ctr, frq);
  const auto base = heat_image_fn(par, t, ft);
  const BergmanSample S0 = bergman_sample(par, t, base, 16, 25);
  const BergmanSample Fj = project_sector_j(S0, j);
  const SampledField c0 = extract_C0(Fj, j, 2);
  const double lam = par.lambda();
  const double a = 0.5;
  // projected closure, defined on all of C^2
  const auto proj = [&](cplx z, cplx w) {
    cplx acc = 0;
    for (int s = 0; s < 2; ++s) {
      const cplx zz = z + 0.5 * s;
      acc += 0.5 * std::polar(1.0, -kPi * s) *
             std::exp(cplx(0, -kPi * s) * w) *
             base(std::span<const cplx>(&zz, 1), std::span<const cplx>(&w, 1));
    }
    return acc;
  };
  const auto direct_c0 = [&](cplx w, double y0) {
    cplx mean = 0;
    const int nq = 64;
    for (int i = 0; i < nq; ++i) {
      const cplx z = cplx(static_cast<double>(i) / nq, y0);
      mean += std::exp(cplx(0, -lam) * (a * z + 0.5 * z * w)) * proj(z, w);
    }
    return mean / static_cast<double>(nq);
  };
  // stitched blocks m = -1, 0, 1 against the closure route
  const Grid& cg = c0.grid;
  const int N = 16;
  for (int m : {-1, 0, 1}) {
    const int iu = (m + 2) * N + 4;  // Re w = m + 0.25
    const int iv = 7;
    const cplx w(cg.node(0, iu), cg.node(1, iv));
    const cplx grid_val =
        c0.values[static_cast<std::size_t>(iu) * cg.npts[1] + iv];
    const cplx want = direct_c0(w, 0.0);
    CHECK(std::abs(grid_val - want) <= 1e-8 * std::max(1.0, std::abs(want)));
  }
  // C_0 is independent of the height of the x line it is read from
  const cplx w(cg.node(0, 2 * N + 6), cg.node(1, 9));
  const cplx at0 = direct_c0(w, 0.0);
  const cplx shifted = direct_c0(w, 0.3);
  CHECK(std::abs(at0 - shifted) <= 1e-7 * std::abs(at0));
}

TEST_CASE("sector inversion: round trip, conditioning cap, monotone ill-posedness") {
  const LatticeParams par{1, 1};
  const double t = 0.1, lam = par.lambda();
  for (int jv : {0, 1}) {
    const double a = jv / 2.0;
    const std::vector<cplx> cf = {cplx(1.0), cplx(0.0), cplx(0.5)};
    const BergmanSample S =
        bergman_sample(par, t, hermite_image_fn(par, t, cf, a), 16, 25);
    CHECK(sector_membership_residual(S, MultiIndex{jv}) < 1e-6);
    const SectorInversion inv = invert_sector_transform(S, MultiIndex{jv});
    CHECK(inv.degree_cap == 6);
    CHECK(std::abs(inv.coeff[0] - cplx(1.0)) < 1e-6);
    CHECK(std::abs(inv.coeff[2] - cplx(0.5)) < 1e-6);
    for (int b : {1, 3, 4, 5, 6}) CHECK(std::abs(inv.coeff[static_cast<std::size_t>(b)]) < 1e-6);
    double num = 0, den = 0;
    for (std::int64_t i = 0; i < inv.f.grid.size(); ++i) {
      double x;
      inv.f.grid.point(i, &x);
      const cplx truth = hermite_mixture(cf, lam, x + a);
      num += std::norm(inv.f.values[static_cast<std::size_t>(i)] - truth);
      den += std::norm(truth);
    }
    CHECK(std::sqrt(num / den) < 1e-6);
  }

  // content past a tight conditioning cap is reported, naming the degree
  const std::vector<cplx> cf4 = {cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0),
                                 cplx(1.0)};
  const BergmanSample S4 =
      bergman_sample(par, t, hermite_image_fn(par, t, cf4, 0.0), 16, 25);
  CHECK_THROWS_AS(invert_sector_transform(S4, MultiIndex{0}, 1e3),
                  ill_posed_error);
  try {
    invert_sector_transform(S4, MultiIndex{0}, 1e3);
  } catch (const ill_posed_error& e) {
    CHECK(e.alpha == MultiIndex{4});
  }

  // pushing the cap beyond the data's resolution amplifies noise
  const std::vector<cplx> cf2 = {cplx(1.0), cplx(0.0), cplx(0.5)};
  const BergmanSample S2 =
      bergman_sample(par, t, hermite_image_fn(par, t, cf2, 0.0), 16, 25);
  const auto err_at = [&](double cl) {
    const SectorInversion iv = invert_sector_transform(S2, MultiIndex{0}, cl);
    double num = 0, den = 0;
    for (std::int64_t i = 0; i < iv.f.grid.size(); ++i) {
      double x;
      iv.f.grid.point(i, &x);
      const cplx truth = hermite_mixture(cf2, lam, x);
      num += std::norm(iv.f.values[static_cast<std::size_t>(i)] - truth);
      den += std::norm(truth);
    }
    return std::sqrt(num / den);
  };
  const double e4 = err_at(1e4), e8 = err_at(1e8), e12 = err_at(1e12);
  CHECK(e4 < 1e-6);
  CHECK(e8 < 1e-6);
  CHECK(e12 + 1e-12 >= e8);
  MESSAGE("round-trip error by conditioning limit: ", e4, " ", e8, " ", e12);

  // mixed (non-isotypic) data is refused
  const std::vector<double> ctr = {0.15, -0.2}, frq = {0.3, 0.1};
  const GaussianExpTerm ft = gaussian_term(2, cplx(0.8, -0.6), 2.3, ctr, frq);
  const BergmanSample mixed =
      bergman_sample(par, t, heat_image_fn(par, t, ft), 16, 25);
  CHECK_THROWS_AS(invert_sector_transform(mixed, MultiIndex{0}),
                  std::invalid_argument);
}

TEST_CASE("dual route: weighted cell norm against the coefficient integral") {
  // the weighted cell norm of the image equals 1/4 of the Byun integral of the
  // stitched coefficient, so lhs^2/rhs is 1/4 and rhs itself recovers the
  // squared l2 norm of the Hermite coefficients.  the integral is windowed to
  // |u| <= 2 because past the stitch edge the true coefficient sits below the
  // roundoff floor of the per-line Fourier modes while the weight still grows
  // like e^{lam tanh(2 lam t) u^2}; inside the window the dropped tail is of
  // order e^{-27}.
  const LatticeParams par{1, 1};
  const double t = 0.02, lam = par.lambda();
  const double rad = 3.0 * bergman_imag_radius(1, lam, t);
  const std::vector<std::vector<cplx>> mixtures = {
      {cplx(1.0)},
      {cplx(1.0), cplx(0.0, 0.7), cplx(0.5)},
  };
  for (int jv : {0, 1}) {
    for (const auto& cf : mixtures) {
      const double a = jv / 2.0;
      double norm2 = 0;
      for (const cplx& c : cf) norm2 += std::norm(c);
      const BergmanSample S =
          bergman_sample(par, t, hermite_image_fn(par, t, cf, a), 16, 41, rad);
      const double lhs = twisted_bergman_norm(S);
      const SampledField c0 = extract_C0(S, MultiIndex{jv}, 3);
      const Grid& cg = c0.grid;
      double rhs = 0;
      for (std::int64_t i = 0; i < cg.size(); ++i) {
        double co[2];
        cg.point(i, co);
        const double re = co[0] + a, im = co[1];
        if (std::abs(re) > 2.0) continue;
        rhs += std::norm(c0.values[static_cast<std::size_t>(i)]) *
               hermite_bergman_weight(1, lam, t, std::span<const double>(&re, 1),
                                      std::span<const double>(&im, 1), true);
      }
      rhs *= cg.cell_volume();
      CHECK(rhs == doctest::Approx(norm2).epsilon(1e-9));
      CHECK(lhs * lhs / rhs == doctest::Approx(0.25).epsilon(1e-9));
    }
  }
}

}  // TEST_SUITE
