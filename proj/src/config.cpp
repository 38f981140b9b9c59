#include "nilheat/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nilheat {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& val) {
  throw config_error("config key '" + key + "': bad value '" + val + "'");
}

long long parse_int(const std::string& key, const std::string& val) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
  if (ec != std::errc() || p != val.data() + val.size()) bad_value(key, val);
  return v;
}

double parse_real(const std::string& key, const std::string& val) {
  char* end = nullptr;
  const double v = std::strtod(val.c_str(), &end);
  if (end != val.c_str() + val.size() || val.empty()) bad_value(key, val);
  return v;
}

// applies one key; returns false for unknown keys
bool set_key(RunConfig& cfg, const std::string& key, const std::string& val) {
  if (key == "n")
    cfg.n = static_cast<int>(parse_int(key, val));
  else if (key == "k")
    cfg.k = static_cast<int>(parse_int(key, val));
  else if (key == "t")
    cfg.t = parse_real(key, val);
  else if (key == "grid")
    cfg.grid = static_cast<int>(parse_int(key, val));
  else if (key == "radius")
    cfg.radius = parse_real(key, val);
  else if (key == "tol")
    cfg.tol = parse_real(key, val);
  else if (key == "seed")
    cfg.seed = static_cast<unsigned long long>(parse_int(key, val));
  else if (key == "out")
    cfg.out = val;
  else if (key == "convention")
    cfg.convention = val;
  else if (key == "workers")
    cfg.workers = static_cast<int>(parse_int(key, val));
  else if (key == "checks")
    cfg.checks = val;
  else if (key == "xi")
    cfg.xi = parse_real(key, val);
  else
    return false;
  return true;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config file '" + path + "': cannot open");
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key, val, extra;
    if (!(ls >> key)) continue;
    if (!(ls >> val) || (ls >> extra))
      throw config_error("config file '" + path + "' line " +
                         std::to_string(lineno) + ": expected 'key value'");
    if (!set_key(cfg, key, val))
      throw config_error("config file '" + path + "' line " +
                         std::to_string(lineno) + ": unknown key '" + key +
                         "'");
  }
  return cfg;
}

std::vector<std::string> apply_flags(RunConfig& cfg, int argc,
                                     const char* const* argv) {
  // a --config flag is loaded before the others so they override the file
  for (int i = 0; i < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      if (i + 1 >= argc) throw config_error("flag --config: missing value");
      cfg = load_config(argv[i + 1]);
      break;
    }
  }
  std::vector<std::string> positional;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0) {
      positional.push_back(arg);
      continue;
    }
    const std::string key = arg.substr(2);
    if (i + 1 >= argc) throw config_error("flag " + arg + ": missing value");
    const std::string val = argv[++i];
    if (key == "config") continue;  // handled above
    if (!set_key(cfg, key, val))
      throw config_error("unknown flag " + arg);
  }
  return positional;
}

void validate_config(const RunConfig& cfg, bool need_positive_k) {
  if (cfg.n < 1 || cfg.n > 4)
    throw config_error("config field n: need 1 <= n <= 4");
  if (need_positive_k && cfg.k < 1)
    throw config_error("config field k: need k >= 1 for sector runs");
  if (!(cfg.t > 0) || cfg.t > 10)
    throw config_error("config field t: need 0 < t <= 10");
  if (cfg.grid < 2 || cfg.grid > 4096)
    throw config_error("config field grid: need 2 <= grid <= 4096");
  if (cfg.radius < 0)
    throw config_error("config field radius: need radius >= 0");
  if (!(cfg.tol > 0) || cfg.tol > 1e-2)
    throw config_error("config field tol: need 0 < tol <= 1e-2");
  if (cfg.convention != "thm410" && cfg.convention != "prop44")
    throw config_error("config field convention: need thm410 or prop44");
  if (cfg.workers < 1 || cfg.workers > 256)
    throw config_error("config field workers: need 1 <= workers <= 256");
}

}  // namespace nilheat
