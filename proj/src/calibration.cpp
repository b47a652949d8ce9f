#include "padloc/calibration.hpp"

#include <cstdlib>
#include <string>

#include "padloc/errors.hpp"

namespace padloc {

Thresholds default_thresholds() {
  Thresholds t;
  t.version = "v1";
  // padloc_calibrate over p in {3,5,7,13}, n <= 4, times 1.5
  t.generic_ratio = 3.0;
  t.generic_value = 3.0;
  t.unramified_value = 1.0;
  t.atypical_constant = 1.5;
  t.c_constant = 3.0;
  t.dfstar_constant = 1.5;
  t.dfstar_exponent = 3.5;
  return t;
}

namespace {
void override_from(const char* name, double& slot) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return;
  char* end = nullptr;
  const double d = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(d > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be a positive number");
  }
  slot = d;
}
}  // namespace

Thresholds thresholds_from_env() {
  Thresholds t = default_thresholds();
  override_from("PADLOC_THRESH_GENERIC_RATIO", t.generic_ratio);
  override_from("PADLOC_THRESH_GENERIC_VALUE", t.generic_value);
  override_from("PADLOC_THRESH_UNRAMIFIED", t.unramified_value);
  override_from("PADLOC_THRESH_ATYPICAL", t.atypical_constant);
  override_from("PADLOC_THRESH_C", t.c_constant);
  override_from("PADLOC_THRESH_DFSTAR_CONST", t.dfstar_constant);
  override_from("PADLOC_THRESH_DFSTAR_EXP", t.dfstar_exponent);
  return t;
}

}  // namespace padloc
