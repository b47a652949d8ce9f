#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace padloc {

/// Everything a padloc run needs. Character fields hold specs in the
/// p=..,n=..,k=..,theta=..,sigma=.. grammar; U, V, Q are powers of p.
struct RunConfig {
  std::string command;
  std::optional<std::string> chi;
  std::optional<std::string> omega;
  bool omega_trivial = false;
  unsigned long long p = 0;
  int max_cond_exp = 3;
  unsigned long long U = 1;
  unsigned long long V = 1;
  unsigned long long Q = 0;
  std::string mode = "auto";
  std::string format;  ///< json | tsv; empty = command default
  unsigned jobs = 1;
  std::optional<std::string> out;
  // gauss
  std::optional<int> xi_val;
  unsigned long long xi_unit = 1;
  // tate-check
  int cases = 200;
  unsigned long long seed = 1;
  // dfstar: complex numbers as "re" or "re,im"
  std::string s1 = "0";
  std::string s2 = "0";
  std::string s3 = "0";
  std::string nu1 = "-0.5";
  std::string nu2 = "0.5";
  bool weightnorm = false;
  double alpha = 0.05;
  int grid = 2;
  // bench
  int reps = 20;
  double min_speedup = 0.0;
  /// abs, rel, tate, zero (per-term), fe (Fourier involution).
  std::map<std::string, double> tol;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Tolerance defaults, then PADLOC_TOL_<NAME> from the environment, then config.
double tolerance(const RunConfig& cfg, const std::string& name);

std::string config_to_json(const RunConfig& cfg);
/// Throws Error(InvalidArgument) on malformed input.
RunConfig config_from_json(const std::string& text);

/// Rejects unknown commands, bad character specs and inconsistent ranges
/// before any computation. Throws Error(InvalidArgument).
void validate(const RunConfig& cfg);

/// Exit status: 0 ok, 1 verification failure (JSON lines on err), 2 config error.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// argv front end; returns the exit status.
int cli_main(int argc, char** argv);

}  // namespace padloc
