#pragma once

// Empirical constants for the bound checks. Regenerate with
// `padloc_calibrate` and bump the version when any value changes.

namespace padloc {

struct Thresholds {
  const char* version = "v1";
  /// |rho_{U,V}| Q / sqrt(UV) for pairs that are not atypical.
  double generic_ratio = 0.0;
  /// |h~(omega)| Q for generic pairs.
  double generic_value = 0.0;
  /// |h~(omega)| for unramified omega.
  double unramified_value = 0.0;
  /// Constant in front of N_alpha q^{1/2} (odd exponent) or N_alpha (even).
  double atypical_constant = 0.0;
  /// |c0|, |c1|, |c2|.
  double c_constant = 0.0;
  /// sup |D_f*| <= dfstar_constant * Q^{dfstar_exponent * alpha}.
  double dfstar_constant = 0.0;
  double dfstar_exponent = 0.0;
};

/// Frozen calibration.
Thresholds default_thresholds();

/// default_thresholds() with PADLOC_THRESH_* environment overrides applied.
Thresholds thresholds_from_env();

}  // namespace padloc
