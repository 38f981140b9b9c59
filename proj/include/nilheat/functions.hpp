#pragma once
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nilheat/grid.hpp"
#include "nilheat/multiindex.hpp"

namespace nilheat {

// A function on R^dim together with a certified tail bound and, when known,
// its Fourier transform  fhat(eta) = integral f(x) exp(-2 pi i x.eta) dx.
// bound(r) must dominate sup |f| over the region ||x||_inf >= r and be
// nonincreasing; lattice sums rely on it.
struct DecayingFunction {
  int dim = 0;
  std::function<cplx(std::span<const double>)> f;
  std::function<double(double)> bound;
  std::shared_ptr<const DecayingFunction> fourier;

  cplx operator()(std::span<const double> x) const { return f(x); }
  bool has_fourier() const { return fourier != nullptr; }
};

// amp * exp(-rate |x - center|^2) * exp(2 pi i freq.x), with exact transform.
DecayingFunction gaussian_fn(int dim, cplx amp, double rate,
                             std::vector<double> center = {},
                             std::vector<double> freq = {});

// Hermite function Phi_alpha (product of normalized 1d Hermite functions);
// transform is (-i)^|alpha| (2 pi)^{n/2} Phi_alpha(2 pi eta).
DecayingFunction hermite_fn(MultiIndex alpha);

// |lambda|^{n/4} Phi_alpha(sqrt(|lambda|) x) and its transform.
DecayingFunction hermite_fn_scaled(MultiIndex alpha, double lambda);

DecayingFunction sum_fn(std::vector<DecayingFunction> parts);
DecayingFunction translate_fn(DecayingFunction g, std::vector<double> shift);  // g(x - shift)
DecayingFunction modulate_fn(DecayingFunction g, std::vector<double> freq);    // e^{2 pi i freq.x} g

// Smallest radius with bound(r) <= rel * (|f(0)| + bound(0)).
double sample_radius(const DecayingFunction& f, double rel = 1e-14);

// Midpoint samples on [-radius, radius]^dim.
SampledField sample(const DecayingFunction& f, double radius, int npts_per_axis);

}  // namespace nilheat
