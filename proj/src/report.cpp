#include "nilheat/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "nilheat/heat_transform.hpp"

namespace nilheat {

namespace {

const double kPi = std::acos(-1.0);

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ConstantEntry> constants_manifest(int n) {
  std::vector<ConstantEntry> c;
  c.push_back({"twisted_kernel_prefactor", std::pow(4.0 * kPi, -n),
               "p_t^lambda = (4 pi t)^-n (lt/sinh lt)^n exp(-(l coth lt)/4t S);"
               " value excludes t^-n"});
  c.push_back({"group_kernel_prefactor",
               std::pow(4.0 * kPi, -n) / (2.0 * kPi),
               "1/2pi from the central Fourier inversion times the"
               " twisted prefactor"});
  c.push_back({"mehler_prefactor", std::pow(4.0 * kPi, -0.5 * n),
               "mehler kernel (|l|/(4 pi sinh cosh))^{n/2}; value at"
               " |l| = sinh = cosh = 1"});
  c.push_back({"sector_hermite_constant", kSectorHermiteConstant,
               "calibration between the convolution and Hermite routes"});
  c.push_back({"torus_weight_prefactor", std::pow(2.0 * kPi, -n),
               "k = 0 weight (2 pi t)^-n; constants have image norm 1;"
               " value excludes t^-n"});
  c.push_back({"chain_constant_thm410", 1.0 / std::sqrt(2.0),
               "weighted image norm over the manifold norm"});
  c.push_back({"chain_constant_prop44", 0.5,
               "weighted image norm over the raw sector norm"});
  c.push_back({"matrix_coefficient_ratio",
               1.0 / std::sqrt(2.0 * std::pow(2.0, n)),
               "cell norm of V_{k,j} f over the line norm of f at k = 1;"
               " general (2 (2k)^n)^{-1/2}"});
  c.push_back({"poisson_reference", 1.0000069747,
               "sum over m of exp(-4 pi m^2), duality normalization probe"});
  return c;
}

bool VerificationReport::all_pass() const {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

void write_report(std::ostream& os, const VerificationReport& rep) {
  const RunConfig& c = rep.config;
  os << "nilheat verification report\n";
  os << "format 1\n";
  // only keys that shape the results; out and workers do not
  os << "config n " << c.n << "\n";
  os << "config k " << c.k << "\n";
  os << "config t " << fmt(c.t) << "\n";
  os << "config grid " << c.grid << "\n";
  os << "config radius " << fmt(c.radius) << "\n";
  os << "config tol " << fmt(c.tol) << "\n";
  os << "config seed " << c.seed << "\n";
  os << "config convention " << c.convention << "\n";
  os << "config checks " << (c.checks.empty() ? "-" : c.checks) << "\n";
  os << "config xi " << fmt(c.xi) << "\n";
  for (const auto& e : constants_manifest(c.n))
    os << "constant " << e.name << " " << fmt(e.value) << " " << e.context
       << "\n";
  int npass = 0, nfail = 0;
  for (const auto& r : rep.results) {
    (r.pass ? npass : nfail)++;
    os << "check " << r.check_id << "\n";
    os << "  reference " << r.reference << "\n";
    if (r.constancy) {
      os << "  mode constancy\n";
      os << "  constant " << fmt(r.computed.real()) << "\n";
      os << "  spread " << fmt(r.computed.imag()) << "\n";
    } else {
      os << "  computed " << fmt(r.computed.real()) << " "
         << fmt(r.computed.imag()) << "\n";
      os << "  expected " << fmt(r.expected.real()) << " "
         << fmt(r.expected.imag()) << "\n";
    }
    os << "  tolerance " << fmt(r.tolerance) << "\n";
    if (r.tail_bound >= 0) os << "  tail " << fmt(r.tail_bound) << "\n";
    os << "  status " << (r.pass ? "pass" : "FAIL") << "\n";
    if (!r.note.empty()) os << "  note " << r.note << "\n";
    os << "end\n";
  }
  os << "summary pass " << npass << " fail " << nfail << "\n";
}

void write_summary(std::ostream& os, const VerificationReport& rep) {
  char buf[256];
  os << "convention " << rep.config.convention << ", seed " << rep.config.seed
     << ", grid " << rep.config.grid << "\n";
  int npass = 0, nfail = 0;
  for (const auto& r : rep.results) {
    (r.pass ? npass : nfail)++;
    std::snprintf(buf, sizeof buf, "%-28s %-4s %8ld ms  %s\n",
                  r.check_id.c_str(), r.pass ? "pass" : "FAIL", r.runtime_ms,
                  r.note.c_str());
    os << buf;
  }
  os << "passed " << npass << " of " << (npass + nfail) << " checks\n";
}

}  // namespace nilheat
