#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "padloc/calibration.hpp"
#include "padloc/characters.hpp"

namespace padloc {

/// Exponents i, j below stand for U = q^i, V = q^j.

/// Value of D_{U,V} (the omega = 1 integral) for conductor exponent n >= 1.
cplx exhaustive_table_value(const MultChar& chi, int i, int j);

/// Smallest residue level resolving the rho integrand.
int rho_required_level(const MultChar& chi, const MultChar& omega);

/// Exhaustive double residue sum for
/// rho_{U,V} = int omega(uv - 1) chi((1 - 1/u)/(1 - 1/v)) du dv/|uv|
/// over |u| = |1-u| = U, |v| = |1-v| = V, |uv - 1| = UV.
cplx rho_uv_brute(const MultChar& chi, const MultChar& omega, int i, int j, int level = 0,
                  unsigned degree = 1);

/// Number of (u0, v0) residue pairs summed by rho_uv_brute.
double rho_term_count(const MultChar& chi, const MultChar& omega, int i, int j, int level = 0);

/// True when rho_uv_fast needs the coset-averaging reduction for (i, j).
bool in_stationary_regime(const MultChar& chi, const MultChar& omega, int i, int j);

/// Closed forms and vanishing laws, with coset averaging over the roots of
/// xi^2 t^2 - t - 1 in the stationary regime. Throws RegimeMismatch where none
/// applies (U = V = Q/q with C(omega) = q, or p = 3 in the stationary regime).
cplx rho_uv_fast(const MultChar& chi, const MultChar& omega, int i, int j);

enum class RhoMode { Brute, Fast, Auto };
std::string to_string(RhoMode m);
RhoMode parse_rho_mode(const std::string& s);

/// Fast where it applies, brute force otherwise (Auto); or forced.
cplx rho_uv(const MultChar& chi, const MultChar& omega, int i, int j, RhoMode mode,
            unsigned degree = 1);

struct RhoPiece {
  int i = 0;
  int j = 0;
  bool inverse = false;  ///< piece of rho(omega^{-1})
  cplx value{0.0, 0.0};
};

enum class BoundClass { UnramifiedO1, Zero, GenericO1Q, Atypical };
std::string to_string(BoundClass c);

struct DualWeightOptions {
  RhoMode mode = RhoMode::Auto;
  int extra_exponents = 0;  ///< debug: extend the dyadic range and check vanishing
  unsigned degree = 1;
};

struct DualWeightReport {
  DualWeightReport(const MultChar& c, const MultChar& w) : chi(c), omega(w) {}

  MultChar chi;
  MultChar omega;
  cplx value{0.0, 0.0};
  std::vector<RhoPiece> pieces;
  std::optional<XiClass> atypical;
  BoundClass bound_class = BoundClass::GenericO1Q;
  double max_ratio = 0.0;
  double term_count = 0.0;
  int max_exponent = 0;
  bool extension_vanishes = true;
  RhoMode mode = RhoMode::Auto;
};

/// h~(omega) = sum_{U,V} (UV)^{-1/2} [rho_{U,V}(omega) + chi(-1) rho_{U,V}(omega^{-1})]
///             - rho_{1,1}(omega),
/// with geometric tails for unramified omega.
DualWeightReport dual_weight(const MultChar& chi, const MultChar& omega,
                             const DualWeightOptions& opts = {});

/// Independent evaluation as int h#(t) omega((1-t)/t) dt/|t(1-t)|^{1/2} over t in o,
/// truncated at depth |t|, |1-t| >= q^{-depth}. Needs ramified omega.
cplx dual_weight_direct(const MultChar& chi, const MultChar& omega, int depth, int level = 0,
                        unsigned degree = 1);

struct Classification {
  bool pass = true;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

Classification classify_bounds(const DualWeightReport& report, const Thresholds& th);

/// JSON text of the report (schema padloc.dual_weight.v1).
std::string report_json(const DualWeightReport& report);

}  // namespace padloc
