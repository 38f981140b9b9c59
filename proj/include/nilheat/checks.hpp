#pragma once
#include <functional>
#include <string>
#include <vector>

#include "nilheat/config.hpp"
#include "nilheat/grid.hpp"

namespace nilheat {

struct CheckResult {
  std::string check_id;
  std::string reference;    // classical statement the check exercises
  cplx computed{};
  cplx expected{};
  bool constancy = false;   // spread-style check: expected column is moot
  double tolerance = 0;
  bool pass = false;
  long runtime_ms = 0;
  double tail_bound = -1;   // certified truncation tail; < 0 when n/a
  std::string note;
};

struct CheckSpec {
  std::string check_id;
  std::string reference;
  // coarsest cfg.grid with the sampling certificates inside their validated
  // envelope; below it the runner reports a truncation failure instead of an
  // uncertifiable pass
  int min_grid = 0;
  std::function<CheckResult(const RunConfig&)> run;
};

// All registered invariants, ordered by check_id.  Each invariant of the
// hermite, heisenberg, nilmanifold, bergman and transform layers appears
// exactly once.
const std::vector<CheckSpec>& check_registry();

// Runs the checks selected by cfg.checks (comma list of id substrings,
// empty = all) on up to cfg.workers threads and merges the results back in
// registry order.  Results are independent of the worker count.
std::vector<CheckResult> run_checks(const RunConfig& cfg);

}  // namespace nilheat
