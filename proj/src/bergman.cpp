#include "nilheat/bergman.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

#include "nilheat/heisenberg.hpp"
#include "nilheat/hermite.hpp"
#include "nilheat/lattice.hpp"
#include "nilheat/parallel.hpp"
#include "nilheat/quadrature.hpp"

namespace nilheat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::atomic<long> g_trunc_warnings{0};

// Validates the 4n-axis layout (x,u periodic with a common count, then y,v
// bounded) and returns n.
int sample_n(const BergmanSample& S) {
  const Grid& g = S.field.grid;
  const int n = S.par.n;
  if (n < 1 || n > 4 || g.dim() != 4 * n)
    throw std::invalid_argument("bergman: sample grid must have 4n axes");
  if (S.field.values.size() != static_cast<std::size_t>(g.size()))
    throw std::invalid_argument("bergman: value count mismatch");
  for (int a = 0; a < 2 * n; ++a)
    if (!g.periodic[a] || g.npts[a] != g.npts[0])
      throw std::invalid_argument("bergman: real axes must share a periodic grid");
  for (int a = 2 * n; a < 4 * n; ++a)
    if (g.periodic[a] || g.npts[a] != g.npts[2 * n])
      throw std::invalid_argument("bergman: imaginary axes must share a bounded grid");
  return n;
}

void node_zw(const Grid& g, int n, std::int64_t flat, cplx* z, cplx* w,
             double* co) {
  g.point(flat, co);
  for (int j = 0; j < n; ++j) {
    z[j] = cplx(co[j], co[2 * n + j]);
    w[j] = cplx(co[n + j], co[3 * n + j]);
  }
}

int floordiv(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// LU with partial pivoting for small dense complex systems.
struct CLu {
  int d = 0;
  std::vector<cplx> a;
  std::vector<int> piv;
  int sign = 1;

  void factor(int dim, std::vector<cplx> m) {
    d = dim;
    a = std::move(m);
    piv.assign(d, 0);
    sign = 1;
    for (int c = 0; c < d; ++c) {
      int p = c;
      for (int r = c + 1; r < d; ++r)
        if (std::abs(a[r * d + c]) > std::abs(a[p * d + c])) p = r;
      piv[c] = p;
      if (p != c) {
        for (int j = 0; j < d; ++j) std::swap(a[c * d + j], a[p * d + j]);
        sign = -sign;
      }
      const cplx dg = a[c * d + c];
      if (std::abs(dg) == 0.0)
        throw std::invalid_argument("bergman: singular linear system");
      for (int r = c + 1; r < d; ++r) {
        const cplx f = a[r * d + c] / dg;
        a[r * d + c] = f;
        for (int j = c + 1; j < d; ++j) a[r * d + j] -= f * a[c * d + j];
      }
    }
  }

  cplx det() const {
    cplx p = static_cast<double>(sign);
    for (int c = 0; c < d; ++c) p *= a[c * d + c];
    return p;
  }

  void solve(cplx* x) const {
    for (int c = 0; c < d; ++c)
      if (piv[c] != c) std::swap(x[c], x[piv[c]]);
    for (int c = 0; c < d; ++c)
      for (int r = c + 1; r < d; ++r) x[r] -= a[r * d + c] * x[c];
    for (int c = d - 1; c >= 0; --c) {
      for (int j = c + 1; j < d; ++j) x[c] -= a[c * d + j] * x[j];
      x[c] /= a[c * d + c];
    }
  }
};

// Smallest eigenvalue of a real symmetric matrix by cyclic Jacobi rotations.
double sym_eig_min(int d, std::vector<double> m) {
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += m[p * d + q] * m[p * d + q];
    if (off < 1e-28) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        const double apq = m[p * d + q];
        if (std::abs(apq) < 1e-300) continue;
        const double th = 0.5 * (m[q * d + q] - m[p * d + p]) / apq;
        const double tt =
            (th >= 0 ? 1.0 : -1.0) / (std::abs(th) + std::sqrt(th * th + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0), s = tt * c;
        for (int j = 0; j < d; ++j) {
          const double mp = m[p * d + j], mq = m[q * d + j];
          m[p * d + j] = c * mp - s * mq;
          m[q * d + j] = s * mp + c * mq;
        }
        for (int j = 0; j < d; ++j) {
          const double mp = m[j * d + p], mq = m[j * d + q];
          m[j * d + p] = c * mp - s * mq;
          m[j * d + q] = s * mp + c * mq;
        }
      }
  }
  double mn = m[0];
  for (int i = 1; i < d; ++i) mn = std::min(mn, m[i * d + i]);
  return mn;
}

struct NormAcc {
  double sum = 0, peak = 0;
  NormAcc& operator+=(const NormAcc& o) {
    sum += o.sum;
    peak = std::max(peak, o.peak);
    return *this;
  }
};

struct MaxAcc {
  double m = 0;
  MaxAcc& operator+=(const MaxAcc& o) {
    m = std::max(m, o.m);
    return *this;
  }
};

double weighted_norm(const BergmanSample& S, bool torus) {
  const int n = sample_n(S);
  const Grid& g = S.field.grid;
  const double t = S.t;
  const double lam = S.par.lambda();
  const double pref = std::pow(kTwoPi * t, -n);
  const auto acc = chunked_reduce<NormAcc>(g.size(), [&](std::int64_t i) {
    double co[16];
    cplx z[4], w[4];
    node_zw(g, n, i, z, w, co);
    double wgt;
    if (torus) {
      double s2 = 0;
      for (int a = 2 * n; a < 4 * n; ++a) s2 += co[a] * co[a];
      wgt = pref * std::exp(-s2 / (2.0 * t));
    } else {
      wgt = twisted_bergman_weight(n, -lam, t, std::span<const cplx>(z, n),
                                   std::span<const cplx>(w, n));
    }
    NormAcc a{std::norm(S.field.values[static_cast<std::size_t>(i)]) * wgt, 0.0};
    int idx[16];
    g.unflatten(i, idx);
    for (int ax = 2 * n; ax < 4 * n; ++ax)
      if (idx[ax] == 0 || idx[ax] == g.npts[ax] - 1) {
        a.peak = a.sum;
        break;
      }
    return a;
  });
  const double vol = g.cell_volume();
  const double total = acc.sum * vol;
  // one extra layer's worth of the worst boundary integrand
  std::int64_t interior = 1;
  for (int ax = 0; ax < 2 * n; ++ax) interior *= g.npts[ax];
  for (int ax = 2 * n; ax < 4 * n; ++ax)
    interior *= std::max(0, g.npts[ax] - 2);
  const double layer = static_cast<double>(g.size() - interior);
  if (acc.peak * layer * vol > 1e-9 * std::max(total, 1e-300))
    ++g_trunc_warnings;
  return std::sqrt(std::max(0.0, total));
}

}  // namespace

double bergman_imag_radius(int n, double lambda, double t) {
  (void)n;
  const double drop = 14.0 * std::log(10.0);
  return std::sqrt(2.0 * t * drop / w_coth(2.0 * lambda * t));
}

BergmanSample bergman_sample(LatticeParams par, double t, const BergmanFn& G,
                             int npts_xu, int npts_im, double radius) {
  const int n = par.n;
  if (n < 1 || n > 4)
    throw std::invalid_argument("bergman_sample: n out of range");
  if (npts_xu < 4 || npts_im < 3)
    throw std::invalid_argument("bergman_sample: grid too small");
  if (!(t > 0)) throw std::invalid_argument("bergman_sample: t must be positive");
  if (radius <= 0) radius = bergman_imag_radius(n, par.lambda(), t);
  Grid g;
  g.lo.assign(static_cast<std::size_t>(4 * n), 0.0);
  g.hi.assign(static_cast<std::size_t>(4 * n), 1.0);
  g.npts.assign(static_cast<std::size_t>(4 * n), npts_xu);
  g.periodic.assign(static_cast<std::size_t>(4 * n), 1);
  for (int a = 2 * n; a < 4 * n; ++a) {
    g.lo[static_cast<std::size_t>(a)] = -radius;
    g.hi[static_cast<std::size_t>(a)] = radius;
    g.npts[static_cast<std::size_t>(a)] = npts_im;
    g.periodic[static_cast<std::size_t>(a)] = 0;
  }
  g.validate();
  BergmanSample out{par, t, SampledField{g, {}}};
  out.field.values.resize(static_cast<std::size_t>(g.size()));
  parallel_for(g.size(), [&](std::int64_t i) {
    double co[16];
    cplx z[4], w[4];
    node_zw(g, n, i, z, w, co);
    out.field.values[static_cast<std::size_t>(i)] =
        G(std::span<const cplx>(z, n), std::span<const cplx>(w, n));
  });
  return out;
}

double qp_residual(const BergmanSample& G) {
  const int n = sample_n(G);
  const Grid& g = G.field.grid;
  const int k = G.par.k;
  double tail = 0, tot = 0;
  std::vector<cplx> line;
  std::vector<int> idx(static_cast<std::size_t>(4 * n));
  for (int ax = 0; ax < 2 * n; ++ax) {
    const int N = g.npts[ax];
    line.resize(static_cast<std::size_t>(N));
    std::int64_t inner = 1;
    for (int a = ax + 1; a < 4 * n; ++a) inner *= g.npts[a];
    const std::int64_t nlines = g.size() / N;
    const std::int64_t stride = std::max<std::int64_t>(1, nlines / 512);
    for (std::int64_t l = 0; l < nlines; l += stride) {
      const std::int64_t base = (l / inner) * (N * inner) + l % inner;
      g.unflatten(base, idx.data());
      // the paired complex coordinate that twists this line to a periodic one
      cplx pair;
      if (ax < n)
        pair = cplx(g.node(n + ax, idx[static_cast<std::size_t>(n + ax)]),
                    g.node(3 * n + ax, idx[static_cast<std::size_t>(3 * n + ax)]));
      else
        pair = cplx(g.node(ax - n, idx[static_cast<std::size_t>(ax - n)]),
                    g.node(n + ax, idx[static_cast<std::size_t>(n + ax)]));
      for (int i = 0; i < N; ++i) {
        const double c = g.node(ax, i);
        const cplx twist = (ax < n)
                               ? std::exp(cplx(0, -kTwoPi * k * c) * pair)
                               : std::exp(cplx(0, kTwoPi * k * c) * pair);
        line[static_cast<std::size_t>(i)] =
            twist * G.field.values[static_cast<std::size_t>(base + i * inner)];
      }
      std::vector<double> en(static_cast<std::size_t>(N));
      int peak = 0;
      for (int m = 0; m < N; ++m) {
        cplx cm = 0;
        for (int i = 0; i < N; ++i)
          cm += line[static_cast<std::size_t>(i)] *
                std::polar(1.0, -kTwoPi * m * i / static_cast<double>(N));
        en[static_cast<std::size_t>(m)] = std::norm(cm) / (static_cast<double>(N) * N);
        if (en[static_cast<std::size_t>(m)] > en[static_cast<std::size_t>(peak)])
          peak = m;
      }
      // the spectral center drifts with the imaginary coordinates, so the
      // tail is taken at cyclic distance from the per-line peak; a mismatched
      // character spreads energy across all modes and still trips this
      for (int m = 0; m < N; ++m) {
        const int dd = std::abs(m - peak);
        const int dist = std::min(dd, N - dd);
        tot += en[static_cast<std::size_t>(m)];
        if (dist > N / 3) tail += en[static_cast<std::size_t>(m)];
      }
    }
  }
  return tot > 0 ? std::sqrt(tail / tot) : 0.0;
}

long bergman_truncation_warnings() { return g_trunc_warnings.load(); }
void reset_bergman_truncation_warnings() { g_trunc_warnings.store(0); }

double torus_bergman_norm(const BergmanSample& F) {
  if (F.par.k != 0)
    throw std::invalid_argument("torus_bergman_norm: requires the k = 0 sector");
  if (qp_residual(F) > 1e-4)
    throw std::invalid_argument("torus_bergman_norm: sample is not periodic");
  return weighted_norm(F, true);
}

double twisted_bergman_norm(const BergmanSample& G, double qp_tol) {
  if (G.par.k == 0)
    throw std::invalid_argument("twisted_bergman_norm: use the torus norm at k = 0");
  if (qp_residual(G) > qp_tol)
    throw std::invalid_argument(
        "twisted_bergman_norm: quasiperiodicity residual above tolerance");
  return weighted_norm(G, false);
}

BergmanSample finite_group_act(std::span<const int> s, const BergmanSample& G) {
  const int n = sample_n(G);
  if (static_cast<int>(s.size()) != n)
    throw std::invalid_argument("finite_group_act: shift has wrong dimension");
  const int k = G.par.k;
  if (k == 0) {
    for (int v : s)
      if (v != 0)
        throw std::invalid_argument("finite_group_act: k = 0 admits only s = 0");
    return G;
  }
  const int q = 2 * std::abs(k);
  int sr[4];
  for (int j = 0; j < n; ++j) {
    sr[j] = s[j] % q;
    if (sr[j] < 0) sr[j] += q;
  }
  const Grid& g = G.field.grid;
  const int N = g.npts[0];
  if (N % q != 0)
    throw std::invalid_argument("finite_group_act: npts_xu not divisible by 2|k|");
  BergmanSample out{G.par, G.t, SampledField{g, {}}};
  out.field.values.resize(G.field.values.size());
  parallel_for(g.size(), [&](std::int64_t i) {
    int idx[16];
    g.unflatten(i, idx);
    cplx arg = 0;
    std::int64_t src = i;
    for (int j = 0; j < n; ++j) {
      const int d = sr[j] * N / (2 * k);
      const int xi = idx[j] + d;
      const int wrap = floordiv(xi, N);
      // hop through the quasiperiodic law for each wrapped x axis
      const cplx wj = cplx(g.node(n + j, idx[n + j]), g.node(3 * n + j, idx[3 * n + j]));
      arg += cplx(0, kTwoPi * k * wrap - kPi * sr[j]) * wj;
      std::int64_t inner = 1;
      for (int a = j + 1; a < 4 * n; ++a) inner *= g.npts[a];
      src += static_cast<std::int64_t>(xi - wrap * N - idx[j]) * inner;
    }
    out.field.values[static_cast<std::size_t>(i)] =
        std::exp(arg) * G.field.values[static_cast<std::size_t>(src)];
  });
  return out;
}

double sector_membership_residual(const BergmanSample& G, const MultiIndex& j) {
  const int n = sample_n(G);
  const int k = G.par.k;
  if (k == 0)
    throw std::invalid_argument("sector_membership_residual: needs k != 0");
  if (static_cast<int>(j.size()) != n)
    throw std::invalid_argument("sector_membership_residual: bad index");
  const Grid& g = G.field.grid;
  const int N = g.npts[0];
  const int q = 2 * std::abs(k);
  if (N % q != 0)
    throw std::invalid_argument(
        "sector_membership_residual: npts_xu not divisible by 2|k|");
  const int d = N / (2 * k);
  double peak = 0;
  for (const cplx& v : G.field.values) peak = std::max(peak, std::abs(v));
  if (peak == 0) return 0.0;
  const auto acc = chunked_reduce<MaxAcc>(g.size(), [&](std::int64_t i) {
    int idx[16];
    g.unflatten(i, idx);
    MaxAcc m{};
    for (int ax = 0; ax < n; ++ax) {
      const int xi = idx[ax] + d;
      const int wrap = floordiv(xi, N);
      std::int64_t inner = 1;
      for (int a = ax + 1; a < 4 * n; ++a) inner *= g.npts[a];
      const std::int64_t src = i + static_cast<std::int64_t>(xi - wrap * N - idx[ax]) * inner;
      const cplx wj =
          cplx(g.node(n + ax, idx[n + ax]), g.node(3 * n + ax, idx[3 * n + ax]));
      const cplx lhs = std::exp(cplx(0, kTwoPi * k * wrap) * wj) *
                       G.field.values[static_cast<std::size_t>(src)];
      const cplx rhs = std::exp(cplx(0, kPi) * (wj + static_cast<double>(j[ax]) /
                                                         static_cast<double>(k))) *
                       G.field.values[static_cast<std::size_t>(i)];
      m.m = std::max(m.m, std::abs(lhs - rhs));
    }
    return m;
  });
  return acc.m / peak;
}

BergmanSample project_sector_j(const BergmanSample& G, const MultiIndex& j) {
  const int n = sample_n(G);
  const int k = G.par.k;
  if (k == 0) throw std::invalid_argument("project_sector_j: needs k != 0");
  if (static_cast<int>(j.size()) != n)
    throw std::invalid_argument("project_sector_j: bad index");
  const int q = 2 * std::abs(k);
  const double scale = std::pow(static_cast<double>(q), -n);
  BergmanSample out{G.par, G.t, SampledField{G.field.grid, {}}};
  out.field.values.assign(G.field.values.size(), cplx(0));
  std::vector<int> s(static_cast<std::size_t>(n), 0);
  while (true) {
    double sj = 0;
    for (int a = 0; a < n; ++a) sj += static_cast<double>(s[a]) * j[a];
    const cplx ch = std::polar(scale, -kPi * sj / k);
    const BergmanSample acted = finite_group_act(s, G);
    for (std::size_t i = 0; i < out.field.values.size(); ++i)
      out.field.values[i] += ch * acted.field.values[i];
    int ax = n - 1;
    while (ax >= 0) {
      if (++s[static_cast<std::size_t>(ax)] < q) break;
      s[static_cast<std::size_t>(ax)] = 0;
      --ax;
    }
    if (ax < 0) break;
  }
  return out;
}

namespace {

// e^{-i lam a.z - i (lam/2) z.w} F on the zero-y slice, axes (x, u, v).
SampledField unwrap_slice(const BergmanSample& F, const MultiIndex& jj) {
  const int n = sample_n(F);
  const int k = F.par.k;
  if (k == 0) throw std::invalid_argument("extract_C0: needs k != 0");
  if (static_cast<int>(jj.size()) != n)
    throw std::invalid_argument("extract_C0: bad isotypic index");
  const Grid& g = F.field.grid;
  for (int a = 0; a < 2 * n; ++a)
    if (g.lo[static_cast<std::size_t>(a)] != 0.0)
      throw std::invalid_argument("extract_C0: real axes must start at 0");
  if (g.npts[2 * n] % 2 == 0)
    throw std::invalid_argument("extract_C0: npts_im must be odd");
  const double lam = F.par.lambda();
  const int ymid = (g.npts[2 * n] - 1) / 2;
  Grid sg;
  for (int a = 0; a < 4 * n; ++a) {
    if (a >= 2 * n && a < 3 * n) continue;
    sg.lo.push_back(g.lo[static_cast<std::size_t>(a)]);
    sg.hi.push_back(g.hi[static_cast<std::size_t>(a)]);
    sg.npts.push_back(g.npts[static_cast<std::size_t>(a)]);
    sg.periodic.push_back(g.periodic[static_cast<std::size_t>(a)]);
  }
  sg.validate();
  SampledField out{sg, {}};
  out.values.resize(static_cast<std::size_t>(sg.size()));
  parallel_for(sg.size(), [&](std::int64_t i) {
    int sidx[12];
    sg.unflatten(i, sidx);
    int idx[16];
    for (int a = 0; a < 2 * n; ++a) idx[a] = sidx[a];
    for (int a = 2 * n; a < 3 * n; ++a) idx[a] = ymid;
    for (int a = 3 * n; a < 4 * n; ++a) idx[a] = sidx[a - n];
    std::int64_t flat = 0;
    for (int a = 0; a < 4 * n; ++a) flat = flat * g.npts[a] + idx[a];
    cplx e = 0;
    for (int j = 0; j < n; ++j) {
      const double x = g.node(j, idx[j]);
      const cplx wj = cplx(g.node(n + j, idx[n + j]), g.node(3 * n + j, idx[3 * n + j]));
      const double aj = static_cast<double>(jj[j]) / (2.0 * k);
      e += cplx(0, -lam) * (aj * x + 0.5 * x * wj);
    }
    out.values[static_cast<std::size_t>(i)] =
        std::exp(e) * F.field.values[static_cast<std::size_t>(flat)];
  });
  return out;
}

SampledField cm_from_slice(const SampledField& H, int n, int k,
                           const MultiIndex& m) {
  SampledField cur = H;
  for (int j = n - 1; j >= 0; --j)
    cur = fourier_coefficient_axis(cur, j, 2 * k * m[static_cast<std::size_t>(j)]);
  return cur;
}

}  // namespace

SampledField extract_Cm(const BergmanSample& F, const MultiIndex& jj,
                        const MultiIndex& m) {
  const int n = sample_n(F);
  if (static_cast<int>(m.size()) != n)
    throw std::invalid_argument("extract_Cm: bad mode index");
  return cm_from_slice(unwrap_slice(F, jj), n, F.par.k, m);
}

SampledField extract_C0(const BergmanSample& F, const MultiIndex& jj, int mrad) {
  const int n = sample_n(F);
  const int k = F.par.k;
  const SampledField H = unwrap_slice(F, jj);
  const Grid& g = F.field.grid;
  const int N = g.npts[0];
  const int q = 2 * std::abs(k);
  mrad = std::max(0, std::min(mrad, (N / 2 - 1) / q));
  const int B = 2 * mrad + 1;
  std::int64_t nblocks = 1;
  for (int j = 0; j < n; ++j) nblocks *= B;
  std::vector<SampledField> cm;
  cm.reserve(static_cast<std::size_t>(nblocks));
  MultiIndex m(static_cast<std::size_t>(n), -mrad);
  for (std::int64_t b = 0; b < nblocks; ++b) {
    cm.push_back(cm_from_slice(H, n, k, m));
    int ax = n - 1;
    while (ax >= 0) {
      if (++m[static_cast<std::size_t>(ax)] <= mrad) break;
      m[static_cast<std::size_t>(ax)] = -mrad;
      --ax;
    }
  }
  Grid og;
  for (int j = 0; j < n; ++j) {
    og.lo.push_back(-static_cast<double>(mrad));
    og.hi.push_back(static_cast<double>(mrad) + 1.0);
    og.npts.push_back(B * N);
    og.periodic.push_back(1);
  }
  for (int j = 0; j < n; ++j) {
    og.lo.push_back(g.lo[static_cast<std::size_t>(3 * n + j)]);
    og.hi.push_back(g.hi[static_cast<std::size_t>(3 * n + j)]);
    og.npts.push_back(g.npts[static_cast<std::size_t>(3 * n + j)]);
    og.periodic.push_back(0);
  }
  og.validate();
  SampledField out{og, {}};
  out.values.resize(static_cast<std::size_t>(og.size()));
  const int nim = g.npts[3 * n];
  parallel_for(og.size(), [&](std::int64_t i) {
    int idx[8];
    og.unflatten(i, idx);
    std::int64_t block = 0, inner = 0;
    for (int j = 0; j < n; ++j) {
      block = block * B + idx[j] / N;
      inner = inner * N + idx[j] % N;
    }
    for (int j = 0; j < n; ++j) inner = inner * nim + idx[n + j];
    out.values[static_cast<std::size_t>(i)] =
        cm[static_cast<std::size_t>(block)].values[static_cast<std::size_t>(inner)];
  });
  return out;
}

SectorInversion invert_sector_transform(const BergmanSample& F,
                                        const MultiIndex& jj, double cond_limit,
                                        int box_npts) {
  const int n = sample_n(F);
  const int k = F.par.k;
  if (k == 0) throw std::invalid_argument("invert_sector_transform: needs k != 0");
  if (static_cast<int>(jj.size()) != n)
    throw std::invalid_argument("invert_sector_transform: bad isotypic index");
  if (!(cond_limit > 1.0))
    throw std::invalid_argument("invert_sector_transform: bad conditioning limit");
  const double lam = F.par.lambda();
  const double alam = std::abs(lam);
  const double t = F.t;
  const double res = sector_membership_residual(F, jj);
  if (res > 1e-4)
    throw std::invalid_argument(
        "invert_sector_transform: sector residual above tolerance");
  const int cap =
      static_cast<int>(std::floor((std::log(cond_limit) / (alam * t) - n) / 2.0));
  if (cap < 0)
    throw ill_posed_error(
        "invert_sector_transform: conditioning limit forbids even degree 0",
        MultiIndex(static_cast<std::size_t>(n), 0));
  const SampledField c0 = extract_C0(F, jj, 3);
  const Grid& cg = c0.grid;
  double aoff[4];
  for (int j = 0; j < n; ++j)
    aoff[j] = static_cast<double>(jj[static_cast<std::size_t>(j)]) / (2.0 * k);
  const auto alphas = multiindices_up_to(n, cap);
  const int nb = static_cast<int>(alphas.size());
  // central imaginary slice of C_0; on the real line the scaled Hermite
  // functions are orthonormal, so every recovery step stays diagonal and the
  // only amplification is the explicit inverse semigroup factor
  std::int64_t M1 = 1, vblock = 1, voff = 0;
  double vol1 = 1.0;
  for (int j = 0; j < n; ++j) {
    M1 *= cg.npts[static_cast<std::size_t>(j)];
    vol1 *= cg.step(j);
  }
  for (int a = 2 * n - 1; a >= n; --a) {
    voff += vblock * ((cg.npts[static_cast<std::size_t>(a)] - 1) / 2);
    vblock *= cg.npts[static_cast<std::size_t>(a)];
  }
  std::vector<cplx> slice(static_cast<std::size_t>(M1));
  std::vector<double> unodes(static_cast<std::size_t>(M1) * n);
  for (std::int64_t i = 0; i < M1; ++i) {
    slice[static_cast<std::size_t>(i)] =
        c0.values[static_cast<std::size_t>(i * vblock + voff)];
    std::int64_t r = i;
    for (int j = n - 1; j >= 0; --j) {
      const int nj = cg.npts[static_cast<std::size_t>(j)];
      unodes[static_cast<std::size_t>(i * n + j)] =
          cg.node(j, static_cast<int>(r % nj)) + aoff[j];
      r /= nj;
    }
  }
  std::vector<cplx> coef(static_cast<std::size_t>(nb));
  std::vector<double> basis(static_cast<std::size_t>(nb) * M1);
  parallel_for(M1, [&](std::int64_t i) {
    for (int b = 0; b < nb; ++b)
      basis[static_cast<std::size_t>(b) * M1 + i] = hermite_scaled(
          alphas[static_cast<std::size_t>(b)], lam,
          std::span<const double>(unodes.data() + i * n, static_cast<std::size_t>(n)));
  });
  for (int b = 0; b < nb; ++b) {
    cplx s = 0;
    for (std::int64_t i = 0; i < M1; ++i)
      s += slice[static_cast<std::size_t>(i)] *
           basis[static_cast<std::size_t>(b) * M1 + i];
    coef[static_cast<std::size_t>(b)] =
        vol1 * s *
        std::exp((2.0 * mi_degree(alphas[static_cast<std::size_t>(b)]) + n) *
                 alam * t);
  }
  double cnorm = 0, phinorm = 0;
  for (const cplx& c : coef) cnorm += std::norm(c);
  cnorm = std::sqrt(cnorm);
  for (const cplx& v : slice) phinorm += std::norm(v);
  phinorm = std::sqrt(vol1 * phinorm);
  // residual against the fitted span, probed just past the degree cap
  std::vector<cplx> resv(slice);
  for (int b = 0; b < nb; ++b) {
    const double damp =
        std::exp(-(2.0 * mi_degree(alphas[static_cast<std::size_t>(b)]) + n) *
                 alam * t);
    for (std::int64_t i = 0; i < M1; ++i)
      resv[static_cast<std::size_t>(i)] -= coef[static_cast<std::size_t>(b)] *
                                           damp *
                                           basis[static_cast<std::size_t>(b) * M1 + i];
  }
  for (int deg = cap + 1; deg <= cap + 2; ++deg) {
    for (const auto& al : multiindices_up_to(n, deg)) {
      if (mi_degree(al) != deg) continue;
      cplx num = 0;
      for (std::int64_t i = 0; i < M1; ++i)
        num += resv[static_cast<std::size_t>(i)] *
               hermite_scaled(al, lam,
                              std::span<const double>(unodes.data() + i * n,
                                                      static_cast<std::size_t>(n)));
      const double raw = std::abs(vol1 * num);
      const double amplified = raw * std::exp((2.0 * deg + n) * alam * t);
      if (amplified > 0.05 * std::max(cnorm, 1e-12) &&
          raw > 1e-8 * std::max(phinorm, 1e-300))
        throw ill_posed_error(
            "invert_sector_transform: amplified coefficient beyond the "
            "conditioning limit",
            al);
    }
  }
  // f(x) = g(x + a) with g the recovered Hermite sum
  double rad = (std::sqrt(2.0 * cap + n + 1.0) + 3.0) / std::sqrt(alam);
  for (int j = 0; j < n; ++j) rad += std::abs(aoff[j]) / n;
  Grid fg = centered_box(n, rad, box_npts);
  SampledField f{fg, {}};
  f.values.resize(static_cast<std::size_t>(fg.size()));
  parallel_for(fg.size(), [&](std::int64_t i) {
    double x[4];
    fg.point(i, x);
    for (int j = 0; j < n; ++j) x[j] += aoff[j];
    cplx s = 0;
    for (int b = 0; b < nb; ++b)
      s += coef[static_cast<std::size_t>(b)] *
           hermite_scaled(alphas[static_cast<std::size_t>(b)], lam,
                          std::span<const double>(x, n));
    f.values[static_cast<std::size_t>(i)] = s;
  });
  return SectorInversion{alphas, coef, cap, std::move(f)};
}

cplx GaussianExpTerm::eval(std::span<const cplx> V) const {
  cplx e = 0;
  for (int i = 0; i < d; ++i) {
    e += b[static_cast<std::size_t>(i)] * V[static_cast<std::size_t>(i)];
    for (int j = 0; j < d; ++j)
      e -= 0.5 * Q[static_cast<std::size_t>(i * d + j)] *
           V[static_cast<std::size_t>(i)] * V[static_cast<std::size_t>(j)];
  }
  return A * std::exp(e);
}

GaussianExpTerm gaussian_term(int d, cplx amp, double rate,
                              std::span<const double> center,
                              std::span<const double> freq) {
  if (!(rate > 0) || static_cast<int>(center.size()) != d ||
      static_cast<int>(freq.size()) != d)
    throw std::invalid_argument("gaussian_term: bad parameters");
  GaussianExpTerm o;
  o.d = d;
  o.Q.assign(static_cast<std::size_t>(d) * d, cplx(0));
  o.b.assign(static_cast<std::size_t>(d), cplx(0));
  double c2 = 0;
  for (int i = 0; i < d; ++i) {
    o.Q[static_cast<std::size_t>(i * d + i)] = 2.0 * rate;
    o.b[static_cast<std::size_t>(i)] =
        cplx(2.0 * rate * center[static_cast<std::size_t>(i)],
             kTwoPi * freq[static_cast<std::size_t>(i)]);
    c2 += center[static_cast<std::size_t>(i)] * center[static_cast<std::size_t>(i)];
  }
  o.A = amp * std::exp(-rate * c2);
  return o;
}

GaussianExpTerm twisted_heat_image(const GaussianExpTerm& f, int n,
                                   double lambda, double t) {
  const int d = 2 * n;
  if (f.d != d || static_cast<int>(f.Q.size()) != d * d ||
      static_cast<int>(f.b.size()) != d)
    throw std::invalid_argument("twisted_heat_image: dimension mismatch");
  if (!(t > 0)) throw std::invalid_argument("twisted_heat_image: t must be positive");
  const double a = w_coth(lambda * t) / (4.0 * t);
  std::vector<cplx> m = f.Q;
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i * d + i)] += 2.0 * a;
  std::vector<double> rem(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d * d; ++i) rem[static_cast<std::size_t>(i)] =
      m[static_cast<std::size_t>(i)].real();
  if (sym_eig_min(d, rem) <= 0)
    throw std::invalid_argument("twisted_heat_image: Re(Q + 2aI) not positive");
  CLu lu;
  lu.factor(d, m);
  std::vector<cplx> R(static_cast<std::size_t>(d) * d, cplx(0));
  for (int i = 0; i < d; ++i) R[static_cast<std::size_t>(i * d + i)] = 2.0 * a;
  const cplx il2 = cplx(0, 0.5 * lambda);
  for (int j = 0; j < n; ++j) {
    R[static_cast<std::size_t>(j * d + n + j)] += il2;
    R[static_cast<std::size_t>((n + j) * d + j)] -= il2;
  }
  // S = M^{-1} R, column by column
  std::vector<cplx> S(static_cast<std::size_t>(d) * d);
  std::vector<cplx> col(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) col[static_cast<std::size_t>(r)] =
        R[static_cast<std::size_t>(r * d + c)];
    lu.solve(col.data());
    for (int r = 0; r < d; ++r) S[static_cast<std::size_t>(r * d + c)] =
        col[static_cast<std::size_t>(r)];
  }
  std::vector<cplx> mb = f.b;
  lu.solve(mb.data());
  GaussianExpTerm o;
  o.d = d;
  o.Q.assign(static_cast<std::size_t>(d) * d, cplx(0));
  o.b.assign(static_cast<std::size_t>(d), cplx(0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cplx acc = 0;
      for (int l = 0; l < d; ++l)
        acc += R[static_cast<std::size_t>(l * d + i)] * S[static_cast<std::size_t>(l * d + j)];
      o.Q[static_cast<std::size_t>(i * d + j)] = (i == j ? cplx(2.0 * a) : cplx(0)) - acc;
    }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) {
      const cplx sym = 0.5 * (o.Q[static_cast<std::size_t>(i * d + j)] +
                              o.Q[static_cast<std::size_t>(j * d + i)]);
      o.Q[static_cast<std::size_t>(i * d + j)] = sym;
      o.Q[static_cast<std::size_t>(j * d + i)] = sym;
    }
  for (int i = 0; i < d; ++i) {
    cplx acc = 0;
    for (int l = 0; l < d; ++l)
      acc += R[static_cast<std::size_t>(l * d + i)] * mb[static_cast<std::size_t>(l)];
    o.b[static_cast<std::size_t>(i)] = acc;
  }
  const double P = std::pow(4.0 * kPi * t, -n) * std::pow(w_over_sinh(lambda * t), n);
  cplx bb = 0;
  for (int i = 0; i < d; ++i) bb += f.b[static_cast<std::size_t>(i)] * mb[static_cast<std::size_t>(i)];
  o.A = f.A * P * std::pow(kTwoPi, n) * std::exp(-0.5 * std::log(lu.det())) *
        std::exp(0.5 * bb);
  return o;
}

cplx sector_series(const GaussianExpTerm& T, const LatticeParams& par,
                   std::span<const cplx> z, std::span<const cplx> w, double tol) {
  const int n = par.n;
  const int d = 2 * n;
  if (T.d != d || static_cast<int>(z.size()) != n || static_cast<int>(w.size()) != n)
    throw std::invalid_argument("sector_series: dimension mismatch");
  const double lam = par.lambda();
  cplx V0[8];
  for (int j = 0; j < n; ++j) {
    V0[j] = z[j];
    V0[n + j] = w[j];
  }
  std::vector<double> req(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d * d; ++i) req[static_cast<std::size_t>(i)] =
      T.Q[static_cast<std::size_t>(i)].real();
  const double mu = sym_eig_min(d, req);
  if (mu <= 0)
    throw std::invalid_argument("sector_series: Re Q not positive definite");
  cplx qv[8], g0 = 0;
  double lv[8], L2 = 0;
  for (int i = 0; i < d; ++i) {
    qv[i] = 0;
    for (int j = 0; j < d; ++j) qv[i] += T.Q[static_cast<std::size_t>(i * d + j)] * V0[j];
  }
  for (int i = 0; i < d; ++i) {
    g0 += (-0.5 * qv[i] + T.b[static_cast<std::size_t>(i)]) * V0[i];
    lv[i] = (T.b[static_cast<std::size_t>(i)] - qv[i]).real();
    L2 += lv[i] * lv[i];
  }
  const double L = std::sqrt(L2);
  double cph = 0;
  for (int j = 0; j < n; ++j)
    cph += std::abs(z[j].imag()) + std::abs(w[j].imag());
  cph *= 0.5 * std::abs(lam);
  const double g0r = g0.real();
  const double absA = std::abs(T.A);
  const double rstar = L / mu;
  const auto bound = [=](double r) {
    const double hr = (r < rstar) ? 0.5 * L * rstar : (-0.5 * mu * r * r + L * r);
    const double e = g0r + hr + cph * r;
    return e > 700.0 ? std::numeric_limits<double>::infinity()
                     : absA * std::exp(e);
  };
  const auto term = [&](std::span<const int> idx) {
    cplx V[8], ph = 0;
    for (int j = 0; j < n; ++j) {
      V[j] = V0[j] + static_cast<double>(idx[j]);
      V[n + j] = V0[n + j] + static_cast<double>(idx[n + j]);
      ph += cplx(0, 0.5 * lam) *
            (static_cast<double>(idx[n + j]) * z[j] - static_cast<double>(idx[j]) * w[j]);
    }
    return std::exp(ph) * T.eval(std::span<const cplx>(V, static_cast<std::size_t>(d)));
  };
  return lattice_sum(d, term, bound, tol).value;
}

}  // namespace nilheat
