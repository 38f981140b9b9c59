#include "nilheat/nilmanifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nilheat/parallel.hpp"
#include "nilheat/quadrature.hpp"

namespace nilheat {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

Grid unit_cell(int n, int npts_per_axis) {
  return periodic_cell(2 * n, 1.0, npts_per_axis);
}

Grid manifold_cell(int n, int npts_xu, int npts_xi) {
  Grid g;
  const int d = 2 * n + 1;
  g.lo.assign(static_cast<std::size_t>(d), 0.0);
  g.hi.assign(static_cast<std::size_t>(d), 1.0);
  g.hi.back() = 0.5;
  g.npts.assign(static_cast<std::size_t>(d), npts_xu);
  g.npts.back() = npts_xi;
  g.periodic.assign(static_cast<std::size_t>(d), 1);
  g.validate();
  return g;
}

SectorFunction twisted_average(const DecayingFunction& f, LatticeParams par,
                               int npts_per_axis, double tol) {
  if (f.dim != 2 * par.n) throw std::invalid_argument("twisted_average: bad dimension");
  SectorFunction G;
  G.par = par;
  G.cell.grid = unit_cell(par.n, npts_per_axis);
  G.cell.values.resize(static_cast<std::size_t>(G.cell.grid.size()));
  const int n = par.n;
  const double half_lam = 0.5 * par.lambda();
  const auto rbound = [&](double r) { return f.bound(std::max(0.0, r - 1.0)); };
  parallel_for(G.cell.grid.size(), [&](std::int64_t i) {
    double xu[8];
    G.cell.grid.point(i, xu);
    const auto term = [&](std::span<const int> mn) {
      double arg[8], ph = 0;
      for (int j = 0; j < n; ++j) {
        arg[j] = xu[j] + mn[j];
        arg[n + j] = xu[n + j] + mn[n + j];
        ph += mn[n + j] * xu[j] - mn[j] * xu[n + j];
      }
      return std::polar(1.0, half_lam * ph) *
             f.f(std::span<const double>(arg, static_cast<std::size_t>(2 * n)));
    };
    G.cell.values[static_cast<std::size_t>(i)] =
        lattice_sum(2 * n, term, rbound, tol).value;
  });
  return G;
}

cplx qp_phase(const LatticeParams& par, std::span<const int> m,
              std::span<const int> nn, std::span<const double> x,
              std::span<const double> u) {
  double ph = 0;
  for (int j = 0; j < par.n; ++j) ph += m[j] * u[j] - nn[j] * x[j];
  return std::polar(1.0, kTwoPi * par.k * ph);
}

cplx sector_eval(const SectorFunction& G, std::span<const double> x,
                 std::span<const double> u) {
  const int n = G.par.n;
  const Grid& g = G.cell.grid;
  std::vector<int> mi(static_cast<std::size_t>(n)), ni(static_cast<std::size_t>(n));
  std::vector<double> x0(static_cast<std::size_t>(n)), u0(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    mi[static_cast<std::size_t>(j)] = static_cast<int>(std::floor(x[j]));
    ni[static_cast<std::size_t>(j)] = static_cast<int>(std::floor(u[j]));
    x0[static_cast<std::size_t>(j)] = x[j] - mi[static_cast<std::size_t>(j)];
    u0[static_cast<std::size_t>(j)] = u[j] - ni[static_cast<std::size_t>(j)];
  }
  const cplx ph = qp_phase(G.par, mi, ni, x0, u0);
  const double tpk = kTwoPi * G.par.k;

  // collapse one axis at a time; x_j lines are periodic after removing the
  // e^{2 pi i k x_j u_j} twist (u_j still gridded), u_j lines after adding it
  // back (x_j already collapsed to x0_j)
  std::vector<int> axes(static_cast<std::size_t>(2 * n));
  std::iota(axes.begin(), axes.end(), 0);
  std::vector<int> dims;
  for (int a = 0; a < 2 * n; ++a) dims.push_back(g.npts[a]);
  std::vector<cplx> data = G.cell.values;

  for (int j = 0; j < 2 * n; ++j) {
    const int p = static_cast<int>(std::find(axes.begin(), axes.end(), j) - axes.begin());
    const bool isx = j < n;
    const int pair = isx ? n + j : j - n;
    const int ppos =
        isx ? static_cast<int>(std::find(axes.begin(), axes.end(), pair) - axes.begin())
            : -1;
    const double target = isx ? x0[static_cast<std::size_t>(j)]
                              : u0[static_cast<std::size_t>(j - n)];
    const double xval = isx ? 0.0 : x0[static_cast<std::size_t>(j - n)];

    const int nd = static_cast<int>(dims.size());
    std::vector<std::int64_t> stride(static_cast<std::size_t>(nd), 1);
    for (int a = nd - 2; a >= 0; --a)
      stride[static_cast<std::size_t>(a)] =
          stride[static_cast<std::size_t>(a + 1)] * dims[static_cast<std::size_t>(a + 1)];
    std::int64_t lines = 1;
    for (int a = 0; a < nd; ++a)
      if (a != p) lines *= dims[static_cast<std::size_t>(a)];

    std::vector<cplx> next(static_cast<std::size_t>(lines));
    std::vector<cplx> line(static_cast<std::size_t>(dims[static_cast<std::size_t>(p)]));
    std::vector<int> idx(static_cast<std::size_t>(nd), 0);
    for (std::int64_t l = 0; l < lines; ++l) {
      std::int64_t rem = l, base = 0;
      for (int a = nd - 1; a >= 0; --a) {
        if (a == p) continue;
        idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % dims[static_cast<std::size_t>(a)]);
        rem /= dims[static_cast<std::size_t>(a)];
        base += idx[static_cast<std::size_t>(a)] * stride[static_cast<std::size_t>(a)];
      }
      const double upair = isx ? g.node(pair, idx[static_cast<std::size_t>(ppos)]) : 0.0;
      for (int i = 0; i < dims[static_cast<std::size_t>(p)]; ++i) {
        const double nodev = g.node(j, i);
        const double s = isx ? -tpk * nodev * upair : tpk * xval * nodev;
        line[static_cast<std::size_t>(i)] =
            data[static_cast<std::size_t>(base + i * stride[static_cast<std::size_t>(p)])] *
            std::polar(1.0, s);
      }
      const TrigInterp t = trig_interp(line, g.lo[j], 1.0);
      const double back = isx ? tpk * target * upair : -tpk * xval * target;
      next[static_cast<std::size_t>(l)] = t.eval(target) * std::polar(1.0, back);
    }
    data.swap(next);
    axes.erase(axes.begin() + p);
    dims.erase(dims.begin() + p);
  }
  return ph * data[0];
}

double sector_norm(const SectorFunction& G) { return norm_l2(G.cell); }

SampledField sector_embed(const SectorFunction& G, int npts_xi) {
  const int n = G.par.n;
  const int nxu = G.cell.grid.npts[0];
  SampledField out;
  out.grid = manifold_cell(n, nxu, npts_xi);
  out.values.resize(static_cast<std::size_t>(out.grid.size()));
  const double lam = G.par.lambda();
  const double hxi = out.grid.step(2 * n);
  parallel_for(out.grid.size(), [&](std::int64_t i) {
    const std::int64_t ixu = i / npts_xi;
    const double xi = (i % npts_xi) * hxi;
    out.values[static_cast<std::size_t>(i)] =
        G.cell.values[static_cast<std::size_t>(ixu)] * std::polar(1.0, lam * xi);
  });
  return out;
}

SampledField sector_project(const SampledField& manifold_field, int k) {
  return fourier_coefficient_axis(manifold_field, manifold_field.grid.dim() - 1, k);
}

cplx nu_pair(const LatticeParams& par, std::span<const int> j,
             const DecayingFunction& f, double tol) {
  const int n = par.n;
  if (f.dim != n || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("nu_pair: bad dimension");
  const double tk = 2.0 * par.k;
  const auto term = [&](std::span<const int> m) {
    double arg[8], ph = 0;
    for (int a = 0; a < n; ++a) {
      arg[a] = m[a] / tk;
      ph += static_cast<double>(m[a]) * j[a];
    }
    return std::polar(1.0, -std::numbers::pi * ph / par.k) *
           f.f(std::span<const double>(arg, static_cast<std::size_t>(n)));
  };
  const auto rb = [&](double r) { return f.bound(r / std::abs(tk)); };
  return std::pow(std::abs(tk), -n) * lattice_sum(n, term, rb, tol).value;
}

cplx nu_pair_dual(const LatticeParams& par, std::span<const int> j,
                  const DecayingFunction& f, double tol) {
  const int n = par.n;
  if (f.dim != n || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("nu_pair_dual: bad dimension");
  if (!f.has_fourier())
    throw std::invalid_argument("nu_pair_dual: f has no transform");
  const DecayingFunction& fh = *f.fourier;
  double jmax = 0;
  for (int a = 0; a < n; ++a) jmax = std::max(jmax, std::abs(static_cast<double>(j[a])));
  const double tk = 2.0 * par.k;
  const auto term = [&](std::span<const int> m) {
    double arg[8];
    for (int a = 0; a < n; ++a) arg[a] = tk * m[a] + j[a];
    return fh.f(std::span<const double>(arg, static_cast<std::size_t>(n)));
  };
  const auto rb = [&](double r) {
    return fh.bound(std::max(0.0, std::abs(tk) * r - jmax));
  };
  return lattice_sum(n, term, rb, tol).value;
}

cplx matrix_coefficient(const LatticeParams& par, std::span<const int> j,
                        const DecayingFunction& f, const GroupPoint& g,
                        double tol) {
  const int n = par.n;
  if (f.dim != n || g.n() != n || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("matrix_coefficient: bad dimension");
  const double tk = 2.0 * par.k;
  double umax = 0, xu = 0;
  for (int a = 0; a < n; ++a) {
    umax = std::max(umax, std::abs(g.u[static_cast<std::size_t>(a)]));
    xu += g.x[static_cast<std::size_t>(a)] * g.u[static_cast<std::size_t>(a)];
  }
  const auto term = [&](std::span<const int> m) {
    double arg[8], phj = 0, phx = 0;
    for (int a = 0; a < n; ++a) {
      arg[a] = m[a] / tk + g.u[static_cast<std::size_t>(a)];
      phj += static_cast<double>(m[a]) * j[a];
      phx += g.x[static_cast<std::size_t>(a)] * m[a];
    }
    return std::polar(1.0, -std::numbers::pi * phj / par.k + kTwoPi * phx) *
           f.f(std::span<const double>(arg, static_cast<std::size_t>(n)));
  };
  const auto rb = [&](double r) {
    return f.bound(std::max(0.0, r / std::abs(tk) - umax));
  };
  const cplx pref = std::pow(std::abs(tk), -n) *
                    std::polar(1.0, par.lambda() * g.xi + kTwoPi * par.k * xu);
  return pref * lattice_sum(n, term, rb, tol).value;
}

cplx weil_brezin(const LatticeParams& par, const DecayingFunction& f,
                 const GroupPoint& g, double tol) {
  const int n = par.n;
  if (f.dim != n || g.n() != n)
    throw std::invalid_argument("weil_brezin: bad dimension");
  const double lam = par.lambda();
  double umax = 0, xu = 0;
  for (int a = 0; a < n; ++a) {
    umax = std::max(umax, std::abs(g.u[static_cast<std::size_t>(a)]));
    xu += g.x[static_cast<std::size_t>(a)] * g.u[static_cast<std::size_t>(a)];
  }
  const auto term = [&](std::span<const int> m) {
    double arg[8], ph = 0;
    for (int a = 0; a < n; ++a) {
      arg[a] = g.u[static_cast<std::size_t>(a)] + m[a];
      ph += m[a] * g.x[static_cast<std::size_t>(a)];
    }
    return std::polar(1.0, lam * ph) *
           f.f(std::span<const double>(arg, static_cast<std::size_t>(n)));
  };
  const auto rb = [&](double r) { return f.bound(std::max(0.0, r - umax)); };
  return std::polar(1.0, lam * (g.xi + 0.5 * xu)) *
         lattice_sum(n, term, rb, tol).value;
}

cplx weil_brezin_j(const LatticeParams& par, std::span<const int> j,
                   const DecayingFunction& f, const GroupPoint& g, double tol) {
  double jx = 0;
  for (int a = 0; a < par.n; ++a) jx += j[a] * g.x[static_cast<std::size_t>(a)];
  return std::polar(1.0, kTwoPi * jx) * weil_brezin(par, f, g, tol);
}

cplx weil_brezin_c(const LatticeParams& par,
                   const std::function<cplx(std::span<const cplx>)>& fc,
                   const std::function<double(double, double)>& fstrip,
                   const CGroupPoint& g, double tol) {
  const int n = par.n;
  if (g.n() != n) throw std::invalid_argument("weil_brezin_c: bad dimension");
  const double lam = par.lambda();
  double yz = 0, rw = 0, yw = 0;
  cplx xu = 0;
  for (int a = 0; a < n; ++a) {
    yz = std::max(yz, std::abs(g.x[static_cast<std::size_t>(a)].imag()));
    rw = std::max(rw, std::abs(g.u[static_cast<std::size_t>(a)].real()));
    yw = std::max(yw, std::abs(g.u[static_cast<std::size_t>(a)].imag()));
    xu += g.x[static_cast<std::size_t>(a)] * g.u[static_cast<std::size_t>(a)];
  }
  const auto term = [&](std::span<const int> m) {
    cplx arg[8], ph = 0;
    for (int a = 0; a < n; ++a) {
      arg[a] = g.u[static_cast<std::size_t>(a)] + static_cast<double>(m[a]);
      ph += static_cast<double>(m[a]) * g.x[static_cast<std::size_t>(a)];
    }
    return std::exp(cplx(0.0, lam) * ph) *
           fc(std::span<const cplx>(arg, static_cast<std::size_t>(n)));
  };
  const auto rb = [&](double r) {
    return std::exp(std::abs(lam) * n * r * yz) *
           fstrip(std::max(0.0, r - rw), yw);
  };
  return std::exp(cplx(0.0, lam) * (g.xi + 0.5 * xu)) *
         lattice_sum(n, term, rb, tol).value;
}

double GroupDecayBound::eval(double s, double xi, double s_up) const {
  const double ds = std::max(0.0, s - d0);
  const double dxi = std::max(0.0, std::abs(xi) - e0 - exi * (s_up < 0 ? s : s_up));
  const double e = 0.25 * rho * ds * ds + mu * dxi;
  return e > 745.0 ? 0.0 : C * std::exp(-e);
}

GroupDecayBound heat_group_bound(const HeatKernelBound& b) {
  return GroupDecayBound{b.jmu, b.rho / b.t, 0.0, b.mu, 0.0};
}

GroupDecayBound gaussian_group_bound(double A, double alpha, double center_norm,
                                     double sigma, double xi0, double e1) {
  if (!(alpha > 0) || !(sigma > 0) || !(e1 > 0))
    throw std::invalid_argument("gaussian_group_bound: bad parameters");
  return GroupDecayBound{A, 4.0 * alpha, center_norm, 2.0 * sigma * e1,
                         std::abs(xi0) + e1};
}

std::function<double(double)> group_tail_bound(const GroupDecayBound& b,
                                               const GroupPoint& g, int n) {
  if (g.n() != n) throw std::invalid_argument("group_tail_bound: bad dimension");
  double co2 = 0, nx = 0, nu = 0;
  for (int a = 0; a < n; ++a) {
    co2 += g.x[static_cast<std::size_t>(a)] * g.x[static_cast<std::size_t>(a)] +
           g.u[static_cast<std::size_t>(a)] * g.u[static_cast<std::size_t>(a)];
    nx += g.x[static_cast<std::size_t>(a)] * g.x[static_cast<std::size_t>(a)];
    nu += g.u[static_cast<std::size_t>(a)] * g.u[static_cast<std::size_t>(a)];
  }
  const double co = std::sqrt(co2);
  const double xio = std::abs(g.xi);
  const double cc = 0.5 * std::sqrt(static_cast<double>(n)) *
                    (std::sqrt(nx) + std::sqrt(nu));
  const double root2n = std::sqrt(2.0 * n);
  return [=](double r) {
    // either the (a,b) block attains the sup-norm radius, or the central index
    double best = b.eval(std::max(0.0, r - co), 0.0);
    for (int q = 0; q <= static_cast<int>(r); ++q) {
      const double xi = std::max(0.0, 0.5 * r - xio - cc * q);
      best = std::max(best, b.eval(std::max(0.0, static_cast<double>(q) - co), xi,
                                   root2n * q + co));
    }
    return best;
  };
}

LatticeSum group_average(const std::function<cplx(const GroupPoint&)>& F,
                         const GroupDecayBound& b, const GroupPoint& g, int n,
                         double tol) {
  const auto term = [&](std::span<const int> idx) {
    GroupPoint gamma;
    gamma.x.assign(idx.begin(), idx.begin() + n);
    gamma.u.assign(idx.begin() + n, idx.begin() + 2 * n);
    gamma.xi = 0.5 * idx[2 * n];
    return F(group_mul(gamma, g));
  };
  return lattice_sum(2 * n + 1, term, group_tail_bound(b, g, n), tol);
}

}  // namespace nilheat
