#include "nilheat/functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nilheat/hermite.hpp"
#include "nilheat/lattice.hpp"

namespace nilheat {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

// tail sup of prod_j b_j(x_j) over ||x||_inf >= r, given per-axis
// (peak, quarter_coef) envelopes against exp(-s^2/4)
double product_tail(const std::vector<HermiteEnvelope>& env, double scale, double r) {
  // at least one axis has |x_j| >= r
  double best = 0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    double v = env[i].quarter_coef * std::exp(-0.25 * scale * scale * r * r);
    for (std::size_t j = 0; j < env.size(); ++j)
      if (j != i) v *= env[j].peak;
    best = std::max(best, v);
  }
  return best;
}
}  // namespace

DecayingFunction gaussian_fn(int dim, cplx amp, double rate,
                             std::vector<double> center, std::vector<double> freq) {
  if (dim < 1) throw std::invalid_argument("gaussian_fn: need dim >= 1");
  if (!(rate > 0)) throw std::invalid_argument("gaussian_fn: need rate > 0");
  if (center.empty()) center.assign(static_cast<std::size_t>(dim), 0.0);
  if (freq.empty()) freq.assign(static_cast<std::size_t>(dim), 0.0);
  if (static_cast<int>(center.size()) != dim || static_cast<int>(freq.size()) != dim)
    throw std::invalid_argument("gaussian_fn: center/freq dimension mismatch");

  DecayingFunction g;
  g.dim = dim;
  g.f = [dim, amp, rate, center, freq](std::span<const double> x) {
    double q = 0, ph = 0;
    for (int j = 0; j < dim; ++j) {
      const double d = x[j] - center[static_cast<std::size_t>(j)];
      q += d * d;
      ph += freq[static_cast<std::size_t>(j)] * x[j];
    }
    return amp * std::exp(-rate * q) * std::polar(1.0, kTwoPi * ph);
  };
  const double c0 = inf_norm(center);
  const double a0 = std::abs(amp);
  g.bound = [a0, rate, c0](double r) {
    const double d = std::max(0.0, r - c0);
    return a0 * std::exp(-rate * d * d);
  };

  // fhat(eta) = amp (pi/rate)^{d/2} e^{-pi^2 |eta-f|^2 / rate} e^{-2 pi i (eta-f).c}
  auto ft = std::make_shared<DecayingFunction>();
  ft->dim = dim;
  const cplx fa = amp * std::pow(std::numbers::pi / rate, 0.5 * dim);
  ft->f = [dim, fa, rate, center, freq](std::span<const double> eta) {
    double q = 0, ph = 0;
    for (int j = 0; j < dim; ++j) {
      const double d = eta[j] - freq[static_cast<std::size_t>(j)];
      q += d * d;
      ph -= d * center[static_cast<std::size_t>(j)];
    }
    return fa * std::exp(-std::numbers::pi * std::numbers::pi * q / rate) *
           std::polar(1.0, kTwoPi * ph);
  };
  const double f0 = inf_norm(freq);
  const double fa0 = std::abs(fa);
  ft->bound = [fa0, rate, f0](double r) {
    const double d = std::max(0.0, r - f0);
    return fa0 * std::exp(-std::numbers::pi * std::numbers::pi * d * d / rate);
  };
  g.fourier = ft;
  return g;
}

namespace {
DecayingFunction hermite_fn_impl(MultiIndex alpha, double lambda) {
  const int dim = static_cast<int>(alpha.size());
  if (dim < 1) throw std::invalid_argument("hermite_fn: empty multi-index");
  for (int a : alpha)
    if (a < 0) throw std::invalid_argument("hermite_fn: negative index");
  const double al = std::abs(lambda);
  const double s = std::sqrt(al);

  std::vector<HermiteEnvelope> env;
  for (int a : alpha) env.push_back(hermite_envelope(a));

  DecayingFunction g;
  g.dim = dim;
  g.f = [alpha, al](std::span<const double> x) {
    return cplx(hermite_scaled(alpha, al, x), 0.0);
  };
  const double amp_scale = std::pow(al, 0.25 * dim);
  g.bound = [env, s, amp_scale](double r) { return amp_scale * product_tail(env, s, r); };

  // transform: (-i)^{|alpha|} (2 pi)^{n/2} |l|^{-n/4} Phi_alpha(2 pi eta / sqrt(l))
  auto ft = std::make_shared<DecayingFunction>();
  ft->dim = dim;
  cplx ipow = 1.0;
  for (int k = 0; k < mi_degree(alpha) % 4; ++k) ipow *= cplx(0.0, -1.0);
  const cplx fpref = ipow * std::pow(kTwoPi, 0.5 * dim) * std::pow(al, -0.25 * dim);
  ft->f = [alpha, fpref, s](std::span<const double> eta) {
    double sc[8];
    for (std::size_t j = 0; j < alpha.size(); ++j) sc[j] = kTwoPi * eta[j] / s;
    return fpref * hermite_product(alpha, std::span<const double>(sc, alpha.size()));
  };
  const double fb = std::abs(fpref);
  ft->bound = [env, s, fb](double r) { return fb * product_tail(env, kTwoPi / s, r); };
  g.fourier = ft;
  return g;
}
}  // namespace

DecayingFunction hermite_fn(MultiIndex alpha) { return hermite_fn_impl(std::move(alpha), 1.0); }

DecayingFunction hermite_fn_scaled(MultiIndex alpha, double lambda) {
  if (lambda == 0) throw std::invalid_argument("hermite_fn_scaled: lambda = 0");
  return hermite_fn_impl(std::move(alpha), lambda);
}

DecayingFunction sum_fn(std::vector<DecayingFunction> parts) {
  if (parts.empty()) throw std::invalid_argument("sum_fn: empty");
  const int dim = parts[0].dim;
  bool all_ft = true;
  for (const auto& p : parts) {
    if (p.dim != dim) throw std::invalid_argument("sum_fn: dimension mismatch");
    all_ft = all_ft && p.has_fourier();
  }
  auto shared = std::make_shared<std::vector<DecayingFunction>>(std::move(parts));
  DecayingFunction g;
  g.dim = dim;
  g.f = [shared](std::span<const double> x) {
    cplx acc = 0;
    for (const auto& p : *shared) acc += p.f(x);
    return acc;
  };
  g.bound = [shared](double r) {
    double acc = 0;
    for (const auto& p : *shared) acc += p.bound(r);
    return acc;
  };
  if (all_ft) {
    auto ft = std::make_shared<DecayingFunction>();
    ft->dim = dim;
    ft->f = [shared](std::span<const double> eta) {
      cplx acc = 0;
      for (const auto& p : *shared) acc += p.fourier->f(eta);
      return acc;
    };
    ft->bound = [shared](double r) {
      double acc = 0;
      for (const auto& p : *shared) acc += p.fourier->bound(r);
      return acc;
    };
    g.fourier = ft;
  }
  return g;
}

DecayingFunction translate_fn(DecayingFunction g, std::vector<double> shift) {
  if (static_cast<int>(shift.size()) != g.dim)
    throw std::invalid_argument("translate_fn: dimension mismatch");
  auto base = std::make_shared<DecayingFunction>(std::move(g));
  const double s0 = inf_norm(shift);
  DecayingFunction out;
  out.dim = base->dim;
  out.f = [base, shift](std::span<const double> x) {
    double y[8];
    for (std::size_t j = 0; j < shift.size(); ++j) y[j] = x[j] - shift[j];
    return base->f(std::span<const double>(y, shift.size()));
  };
  out.bound = [base, s0](double r) { return base->bound(std::max(0.0, r - s0)); };
  if (base->has_fourier()) {
    auto ft = std::make_shared<DecayingFunction>();
    ft->dim = base->dim;
    auto bft = base->fourier;
    ft->f = [bft, shift](std::span<const double> eta) {
      double ph = 0;
      for (std::size_t j = 0; j < shift.size(); ++j) ph -= eta[j] * shift[j];
      return bft->f(eta) * std::polar(1.0, kTwoPi * ph);
    };
    ft->bound = bft->bound;
    out.fourier = ft;
  }
  return out;
}

DecayingFunction modulate_fn(DecayingFunction g, std::vector<double> freq) {
  if (static_cast<int>(freq.size()) != g.dim)
    throw std::invalid_argument("modulate_fn: dimension mismatch");
  auto base = std::make_shared<DecayingFunction>(std::move(g));
  const double f0 = inf_norm(freq);
  DecayingFunction out;
  out.dim = base->dim;
  out.f = [base, freq](std::span<const double> x) {
    double ph = 0;
    for (std::size_t j = 0; j < freq.size(); ++j) ph += freq[j] * x[j];
    return base->f(x) * std::polar(1.0, kTwoPi * ph);
  };
  out.bound = base->bound;
  if (base->has_fourier()) {
    auto ft = std::make_shared<DecayingFunction>();
    ft->dim = base->dim;
    auto bft = base->fourier;
    ft->f = [bft, freq](std::span<const double> eta) {
      double y[8];
      for (std::size_t j = 0; j < freq.size(); ++j) y[j] = eta[j] - freq[j];
      return bft->f(std::span<const double>(y, freq.size()));
    };
    ft->bound = [bft, f0](double r) { return bft->bound(std::max(0.0, r - f0)); };
    out.fourier = ft;
  }
  return out;
}

double sample_radius(const DecayingFunction& f, double rel) {
  std::vector<double> zero(static_cast<std::size_t>(f.dim), 0.0);
  const double scale = std::abs(f.f(zero)) + f.bound(0.0);
  if (!(scale > 0)) return 1.0;
  for (double r = 0.5; r <= 120.0; r += 0.5)
    if (f.bound(r) <= rel * scale) return r;
  throw nonconvergence_error("sample_radius: bound does not reach target by r = 120");
}

SampledField sample(const DecayingFunction& f, double radius, int npts_per_axis) {
  return make_field(centered_box(f.dim, radius, npts_per_axis), f.f);
}

}  // namespace nilheat
