#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "nilheat/checks.hpp"
#include "nilheat/config.hpp"

namespace nilheat {

// One frozen normalization constant; the manifest is printed into every
// report so convention choices stay auditable in one place.
struct ConstantEntry {
  std::string name;
  double value;
  std::string context;
};
std::vector<ConstantEntry> constants_manifest(int n);

struct VerificationReport {
  RunConfig config;
  std::vector<CheckResult> results;
  bool all_pass() const;
};

// Structured record stream: config echo, constants manifest, one record per
// check.  Runtimes stay out of the stream so a fixed seed and config give
// identical bytes.
void write_report(std::ostream& os, const VerificationReport& rep);

// Human-readable table with runtimes, for standard output.
void write_summary(std::ostream& os, const VerificationReport& rep);

}  // namespace nilheat
