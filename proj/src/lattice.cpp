#include "nilheat/lattice.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace nilheat {

std::int64_t shell_count(int r, int dim) {
  if (r == 0) return 1;
  auto boxpts = [dim](std::int64_t w) {
    std::int64_t p = 1;
    for (int a = 0; a < dim; ++a) p *= w;
    return p;
  };
  return boxpts(2 * static_cast<std::int64_t>(r) + 1) -
         boxpts(2 * static_cast<std::int64_t>(r) - 1);
}

void for_each_shell_point(int dim, int r,
                          const std::function<void(std::span<const int>)>& visit) {
  std::vector<int> p(static_cast<std::size_t>(dim), -r);
  if (r == 0) {
    std::vector<int> zero(static_cast<std::size_t>(dim), 0);
    visit(zero);
    return;
  }
  // walk the full box, emit boundary points only
  while (true) {
    int maxabs = 0;
    for (int a = 0; a < dim; ++a) maxabs = std::max(maxabs, std::abs(p[static_cast<std::size_t>(a)]));
    if (maxabs == r) visit(p);
    int a = dim - 1;
    while (a >= 0) {
      if (++p[static_cast<std::size_t>(a)] <= r) break;
      p[static_cast<std::size_t>(a)] = -r;
      --a;
    }
    if (a < 0) return;
  }
}

double lattice_tail_bound(const std::function<double(double)>& radial_bound,
                          int dim, int r) {
  // Scan shells outward.  Once the per-shell bound decays geometrically
  // (ratio <= qmax for several consecutive shells) the remainder is closed
  // with a geometric series; Gaussian-type bounds only decay faster.
  constexpr double qmax = 0.7;
  constexpr int need = 4;
  double tail = 0;
  double prev = -1;
  int streak = 0;
  for (int rho = r; rho <= r + 600; ++rho) {
    const double b =
        static_cast<double>(shell_count(rho, dim)) * radial_bound(static_cast<double>(rho));
    if (!(b >= 0) || !std::isfinite(b))
      return std::numeric_limits<double>::infinity();
    tail += b;
    if (b < 1e-300) return tail;
    if (prev > 0 && b <= qmax * prev)
      ++streak;
    else
      streak = 0;
    if (streak >= need) return tail + b * qmax / (1.0 - qmax);
    prev = b;
  }
  return std::numeric_limits<double>::infinity();
}

LatticeSum lattice_sum(int dim,
                       const std::function<cplx(std::span<const int>)>& term,
                       const std::function<double(double)>& radial_bound,
                       double tol, int min_radius, int max_radius) {
  LatticeSum out;
  for (int r = 0; r <= max_radius; ++r) {
    for_each_shell_point(dim, r, [&](std::span<const int> p) {
      out.value += term(p);
      ++out.terms;
    });
    out.radius = r;
    if (r < min_radius) continue;
    out.tail_bound = lattice_tail_bound(radial_bound, dim, r + 1);
    if (out.tail_bound < tol) return out;
  }
  throw nonconvergence_error("lattice_sum: certified tail " +
                             std::to_string(out.tail_bound) +
                             " above tolerance " + std::to_string(tol) +
                             " at radius " + std::to_string(max_radius));
}

}  // namespace nilheat
