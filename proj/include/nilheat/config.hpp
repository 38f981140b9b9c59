#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace nilheat {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key/value run configuration.  Every key can come from a config file
// ("key value" lines, '#' comments) or from a command-line flag of the same
// name; flags win.
struct RunConfig {
  int n = 1;          // phase-plane dimension
  int k = 1;          // central sector (negative allowed for kernel tables)
  double t = 0.1;     // heat time
  int grid = 32;      // cell samples per axis; floors checks whose
                      // certificates need finer sampling
  double radius = 0;  // box radius override for kernel tables; 0 = default
  double tol = 1e-10; // tolerance handed to certified truncations
  unsigned long long seed = 42;
  std::string out;    // report or table path; empty writes standard output
  std::string convention = "thm410";  // isometry bookkeeping: thm410 | prop44
  int workers = 1;
  std::string checks;  // comma list of id substrings to run; empty = all
  double xi = 0;       // central slice for kernel tables
};

RunConfig load_config(const std::string& path);

// Applies --key value pairs to cfg and returns the positional arguments.
// Recognized keys are exactly the RunConfig fields plus --config <file>,
// which is loaded first.  Unknown or malformed flags raise config_error
// naming the flag.
std::vector<std::string> apply_flags(RunConfig& cfg, int argc,
                                     const char* const* argv);

// Field-named config_error on out-of-range values.  need_positive_k is set
// by callers that attach a sector representation to the run (verify,
// decompose); kernel tables accept any nonzero k where relevant.
void validate_config(const RunConfig& cfg, bool need_positive_k);

}  // namespace nilheat
