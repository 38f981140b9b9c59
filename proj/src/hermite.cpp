#include "nilheat/hermite.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nilheat {

namespace {
const double kQuarterRootPi = std::pow(std::numbers::pi, -0.25);
std::atomic<long> g_range_warnings{0};

inline void range_check(int m, double im) {
  if (m > 200 || std::abs(im) > 20.0) g_range_warnings.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace

long hermite_range_warnings() { return g_range_warnings.load(); }
void reset_hermite_range_warnings() { g_range_warnings.store(0); }

double hermite_phi(int m, double s) {
  range_check(m, 0.0);
  double pm = kQuarterRootPi * std::exp(-0.5 * s * s);
  if (m == 0) return pm;
  double pmm = pm;
  pm *= std::sqrt(2.0) * s;
  for (int j = 1; j < m; ++j) {
    const double next = std::sqrt(2.0 / (j + 1)) * s * pm - std::sqrt(double(j) / (j + 1)) * pmm;
    pmm = pm;
    pm = next;
  }
  return pm;
}

cplx hermite_phi_c(int m, cplx z) {
  range_check(m, z.imag());
  cplx pm = kQuarterRootPi * std::exp(-0.5 * z * z);
  if (m == 0) return pm;
  cplx pmm = pm;
  pm *= std::sqrt(2.0) * z;
  for (int j = 1; j < m; ++j) {
    const cplx next = std::sqrt(2.0 / (j + 1)) * z * pm - std::sqrt(double(j) / (j + 1)) * pmm;
    pmm = pm;
    pm = next;
  }
  return pm;
}

void hermite_phi_table(int mmax, double s, double* out) {
  range_check(mmax, 0.0);
  out[0] = kQuarterRootPi * std::exp(-0.5 * s * s);
  if (mmax == 0) return;
  out[1] = std::sqrt(2.0) * s * out[0];
  for (int j = 1; j < mmax; ++j)
    out[j + 1] = std::sqrt(2.0 / (j + 1)) * s * out[j] - std::sqrt(double(j) / (j + 1)) * out[j - 1];
}

void hermite_phi_table_c(int mmax, cplx z, cplx* out) {
  range_check(mmax, z.imag());
  out[0] = kQuarterRootPi * std::exp(-0.5 * z * z);
  if (mmax == 0) return;
  out[1] = std::sqrt(2.0) * z * out[0];
  for (int j = 1; j < mmax; ++j)
    out[j + 1] = std::sqrt(2.0 / (j + 1)) * z * out[j] - std::sqrt(double(j) / (j + 1)) * out[j - 1];
}

double hermite_product(const MultiIndex& alpha, std::span<const double> x) {
  double p = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) p *= hermite_phi(alpha[j], x[j]);
  return p;
}

cplx hermite_product_c(const MultiIndex& alpha, std::span<const cplx> z) {
  cplx p = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) p *= hermite_phi_c(alpha[j], z[j]);
  return p;
}

double hermite_scaled(const MultiIndex& alpha, double lambda, std::span<const double> x) {
  const double s = std::sqrt(std::abs(lambda));
  double p = std::pow(std::abs(lambda), 0.25 * static_cast<double>(alpha.size()));
  for (std::size_t j = 0; j < alpha.size(); ++j) p *= hermite_phi(alpha[j], s * x[j]);
  return p;
}

cplx hermite_scaled_c(const MultiIndex& alpha, double lambda, std::span<const cplx> z) {
  const double s = std::sqrt(std::abs(lambda));
  cplx p = std::pow(std::abs(lambda), 0.25 * static_cast<double>(alpha.size()));
  for (std::size_t j = 0; j < alpha.size(); ++j) p *= hermite_phi_c(alpha[j], s * z[j]);
  return p;
}

HermiteEnvelope hermite_envelope(int m) {
  static std::vector<HermiteEnvelope> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= m) {
    const int mm = static_cast<int>(cache.size());
    const double smax = std::sqrt(4.0 * mm + 6.0) + 6.0;
    double peak = 0, quarter = 0;
    const int nscan = 4000;
    std::vector<double> tab(static_cast<std::size_t>(mm) + 1);
    for (int i = 0; i <= nscan; ++i) {
      const double s = smax * i / nscan;
      hermite_phi_table(mm, s, tab.data());
      const double a = std::abs(tab[static_cast<std::size_t>(mm)]);
      peak = std::max(peak, a);
      quarter = std::max(quarter, a * std::exp(0.25 * s * s));
    }
    // beyond smax the quarter-weighted profile is decreasing; 5% scan margin
    cache.push_back({1.05 * peak, 1.05 * quarter});
  }
  return cache[static_cast<std::size_t>(m)];
}

double w_over_sinh(double w) {
  const double a = std::abs(w);
  if (a < 1e-4) {
    const double w2 = w * w;
    return 1.0 - w2 / 6.0 + 7.0 * w2 * w2 / 360.0;
  }
  return w / std::sinh(w);
}

double w_coth(double w) {
  const double a = std::abs(w);
  if (a < 1e-4) {
    const double w2 = w * w;
    return 1.0 + w2 / 3.0 - w2 * w2 / 45.0;
  }
  return w * std::cosh(w) / std::sinh(w);
}

cplx w_over_sinh_c(cplx w) {
  if (std::abs(w) < 1e-4) {
    const cplx w2 = w * w;
    return 1.0 - w2 / 6.0 + 7.0 * w2 * w2 / 360.0;
  }
  return w / std::sinh(w);
}

cplx w_coth_c(cplx w) {
  if (std::abs(w) < 1e-4) {
    const cplx w2 = w * w;
    return 1.0 + w2 / 3.0 - w2 * w2 / 45.0;
  }
  return w * std::cosh(w) / std::sinh(w);
}

namespace {
void mehler_guard(int n, double lambda, double t, std::size_t nx, std::size_t nu) {
  if (n < 1 || nx != static_cast<std::size_t>(n) || nu != static_cast<std::size_t>(n))
    throw std::invalid_argument("mehler_kernel: dimension mismatch");
  if (!(t > 0)) throw std::invalid_argument("mehler_kernel: need t > 0");
  if (std::abs(lambda) * t > 350.0)
    throw std::overflow_error("mehler_kernel: |lambda| t too large");
}
}  // namespace

double mehler_kernel(int n, double lambda, double t,
                     std::span<const double> x, std::span<const double> u) {
  mehler_guard(n, lambda, t, x.size(), u.size());
  const double w = std::abs(lambda) * t;
  double sp = 0, sm = 0;
  for (int j = 0; j < n; ++j) {
    sp += (x[j] + u[j]) * (x[j] + u[j]);
    sm += (x[j] - u[j]) * (x[j] - u[j]);
  }
  const double pref =
      std::pow(w_over_sinh(w) / (4.0 * std::numbers::pi * t * std::cosh(w)), 0.5 * n);
  const double expo = -(0.25 / t) * (w * std::tanh(w) * sp + w_coth(w) * sm);
  return pref * std::exp(expo);
}

cplx mehler_kernel_c(int n, double lambda, double t,
                     std::span<const cplx> z, std::span<const cplx> w_) {
  mehler_guard(n, lambda, t, z.size(), w_.size());
  const double w = std::abs(lambda) * t;
  cplx sp = 0, sm = 0;
  for (int j = 0; j < n; ++j) {
    sp += (z[j] + w_[j]) * (z[j] + w_[j]);
    sm += (z[j] - w_[j]) * (z[j] - w_[j]);
  }
  const double pref =
      std::pow(w_over_sinh(w) / (4.0 * std::numbers::pi * t * std::cosh(w)), 0.5 * n);
  const cplx expo = -(0.25 / t) * (w * std::tanh(w) * sp + w_coth(w) * sm);
  return pref * std::exp(expo);
}

cplx mehler_series(int n, double lambda, double t, std::span<const cplx> z,
                   std::span<const cplx> w_, int max_degree) {
  mehler_guard(n, lambda, t, z.size(), w_.size());
  const double al = std::abs(lambda);
  const double s = std::sqrt(al);
  const double scale1 = std::pow(al, 0.25 * n);
  // per-axis tables of phi_m at s*z_j and s*w_j
  std::vector<cplx> tz(static_cast<std::size_t>(n) * (max_degree + 1));
  std::vector<cplx> tw(static_cast<std::size_t>(n) * (max_degree + 1));
  for (int j = 0; j < n; ++j) {
    hermite_phi_table_c(max_degree, s * z[j], &tz[static_cast<std::size_t>(j) * (max_degree + 1)]);
    hermite_phi_table_c(max_degree, s * w_[j], &tw[static_cast<std::size_t>(j) * (max_degree + 1)]);
  }
  cplx acc = 0;
  for (const MultiIndex& a : multiindices_up_to(n, max_degree)) {
    cplx term = std::exp(-(2.0 * mi_degree(a) + n) * al * t);
    for (int j = 0; j < n; ++j) {
      term *= tz[static_cast<std::size_t>(j) * (max_degree + 1) + a[static_cast<std::size_t>(j)]];
      term *= tw[static_cast<std::size_t>(j) * (max_degree + 1) + a[static_cast<std::size_t>(j)]];
    }
    acc += term;
  }
  return acc * scale1 * scale1;
}

cplx hermite_semigroup_apply(double lambda, double t, const SampledField& f,
                             std::span<const cplx> z) {
  const int n = f.grid.dim();
  if (static_cast<int>(z.size()) != n)
    throw std::invalid_argument("hermite_semigroup_apply: dimension mismatch");
  const double vol = f.grid.cell_volume();
  cplx acc = 0;
  std::vector<cplx> u(static_cast<std::size_t>(n));
  double xs[8];
  for (std::int64_t i = 0; i < f.grid.size(); ++i) {
    f.grid.point(i, xs);
    for (int j = 0; j < n; ++j) u[static_cast<std::size_t>(j)] = xs[j];
    acc += mehler_kernel_c(n, lambda, t, z, u) * f.values[static_cast<std::size_t>(i)];
  }
  return acc * vol;
}

double hermite_bergman_weight(int n, double lambda, double t,
                              std::span<const double> x, std::span<const double> y,
                              bool use_abs_lambda) {
  if (n < 1 || x.size() != static_cast<std::size_t>(n) || y.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("hermite_bergman_weight: dimension mismatch");
  if (!(t > 0)) throw std::invalid_argument("hermite_bergman_weight: need t > 0");
  double l = lambda;
  if (l <= 0) {
    if (!use_abs_lambda)
      throw std::domain_error("hermite_bergman_weight: lambda <= 0 (pass use_abs_lambda to evaluate at |lambda|)");
    l = std::abs(lambda);
    if (l == 0) throw std::domain_error("hermite_bergman_weight: lambda = 0");
  }
  if (4.0 * l * t > 700.0)
    throw std::overflow_error("hermite_bergman_weight: lambda t too large");
  double x2 = 0, y2 = 0;
  for (int j = 0; j < n; ++j) {
    x2 += x[j] * x[j];
    y2 += y[j] * y[j];
  }
  const double pref = std::pow(2.0 * l / (std::numbers::pi * std::sinh(4.0 * l * t)), 0.5 * n);
  return pref * std::exp(l * std::tanh(2.0 * l * t) * x2 - (w_coth(2.0 * l * t) / (2.0 * t)) * y2);
}

HermiteBergmanGrid hb_default_grid(double lambda, double t, int max_degree) {
  const double l = std::abs(lambda);
  // weighted integrand tail rates: l(1 - tanh 2lt) in x, l(coth 2lt - 1) in y
  const double rx = l * (1.0 - std::tanh(2.0 * l * t));
  const double ry = l * (w_coth(2.0 * l * t) / (2.0 * l * t) - 1.0);
  const double rate = std::max(1e-12, std::min(rx, ry));
  const double turning = std::sqrt((2.0 * max_degree + 1.0) / l);
  const double box = std::sqrt(std::log(1e13) / rate) + turning + 1.0;
  // node spacing resolves the exp(-l s^2 / 2) factors
  const double h = 0.30 / std::sqrt(l);
  int npts = static_cast<int>(std::ceil(2.0 * box / h));
  npts = std::min(npts, 1200);
  return {box, npts};
}

double hermite_bergman_norm(const std::function<cplx(cplx)>& F, double lambda,
                            double t, const HermiteBergmanGrid& g, bool reduced) {
  if (!(lambda > 0)) throw std::domain_error("hermite_bergman_norm: need lambda > 0");
  const double l = lambda;
  const double logpref = 0.5 * std::log(2.0 * l / (std::numbers::pi * std::sinh(4.0 * l * t)));
  // reduced weight: the exp(l(x^2-y^2)) growth of |exp(l z^2/2)|^2 folded in,
  // so both quadratic rates are negative and nothing overflows
  const double rx = l * (std::tanh(2.0 * l * t) - 1.0);
  const double ry = w_coth(2.0 * l * t) / (2.0 * t) - l;
  const double h = 2.0 * g.box / g.npts;
  double acc = 0;
  for (int iy = 0; iy < g.npts; ++iy) {
    const double y = -g.box + (iy + 0.5) * h;
    double row = 0;
    for (int ix = 0; ix < g.npts; ++ix) {
      const double x = -g.box + (ix + 0.5) * h;
      const double logw_red = logpref + rx * x * x - ry * y * y;
      if (reduced) {
        // F is understood as G(z) = F(z) exp(l z^2 / 2)
        row += std::norm(F(cplx(x, y))) * std::exp(logw_red);
      } else {
        const double a = std::abs(F(cplx(x, y)));
        if (a == 0) continue;
        row += std::exp(2.0 * std::log(a) + l * (x * x - y * y) + logw_red);
      }
    }
    acc += row;
  }
  return acc * h * h;
}

cplx hermite_phi_poly_c(int m, cplx z) {
  // exp(z^2/2) phi_m(z): same recurrence, Gaussian factor removed
  range_check(m, z.imag());
  cplx pm = kQuarterRootPi;
  if (m == 0) return pm;
  cplx pmm = pm;
  pm *= std::sqrt(2.0) * z;
  for (int j = 1; j < m; ++j) {
    const cplx next = std::sqrt(2.0 / (j + 1)) * z * pm - std::sqrt(double(j) / (j + 1)) * pmm;
    pmm = pm;
    pm = next;
  }
  return pm;
}

cplx hermite_reduced_scaled_c(const MultiIndex& alpha, double lambda,
                              std::span<const cplx> z) {
  // Phi^lambda_alpha(z) exp(lambda z.z / 2), stable at large |z|
  const double s = std::sqrt(std::abs(lambda));
  cplx p = std::pow(std::abs(lambda), 0.25 * static_cast<double>(alpha.size()));
  for (std::size_t j = 0; j < alpha.size(); ++j) p *= hermite_phi_poly_c(alpha[j], s * z[j]);
  return p;
}

}  // namespace nilheat
