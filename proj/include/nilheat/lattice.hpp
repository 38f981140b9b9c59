#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>

#include "nilheat/grid.hpp"

namespace nilheat {

// Thrown when a certified truncation cannot reach the requested tolerance.
class nonconvergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LatticeSum {
  cplx value{};
  double tail_bound = 0;  // certified bound on the dropped terms
  int radius = 0;         // sup-norm radius actually summed
  std::int64_t terms = 0;
};

// Sums term(gamma) over gamma in Z^dim by sup-norm shells.  radial_bound(r)
// must dominate |term| on every lattice point of sup-norm radius r.  Shells
// are added until the certified tail (shell count times radial_bound, summed
// with a geometric-decay certificate) drops below tol.  Throws
// nonconvergence_error if that does not happen by max_radius.
LatticeSum lattice_sum(int dim,
                       const std::function<cplx(std::span<const int>)>& term,
                       const std::function<double(double)>& radial_bound,
                       double tol, int min_radius = 0, int max_radius = 60);

// Certified bound on sum of radial_bound over all shells of radius > r.
// Returns +inf when no geometric-decay regime is detected within the scan.
double lattice_tail_bound(const std::function<double(double)>& radial_bound,
                          int dim, int r);

// Number of points with sup-norm exactly r in Z^dim.
std::int64_t shell_count(int r, int dim);

// Calls visit on every point of sup-norm radius r.
void for_each_shell_point(int dim, int r,
                          const std::function<void(std::span<const int>)>& visit);

}  // namespace nilheat
