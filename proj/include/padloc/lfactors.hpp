#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "padloc/characters.hpp"
#include "padloc/integrate.hpp"

namespace padloc {

/// zeta_F(s) = (1 - q^{-s})^{-1}; throws Pole when q^{-s} = 1.
cplx zeta_F(u64 p, cplx s);

/// prod_j (1 - u_j q^{-s})^{-1}.
class LocalLFactor {
 public:
  LocalLFactor(u64 p, std::vector<cplx> roots) : p_(p), roots_(std::move(roots)) {}

  /// L(chi, s): one root chi(p) if unramified, none otherwise.
  static LocalLFactor of_character(const MultChar& chi);
  /// L(I(mu1, mu2) x chi, s) = L(mu1 chi, s) L(mu2 chi, s).
  static LocalLFactor principal_series(const MultChar& mu1, const MultChar& mu2,
                                       const MultChar& chi);

  u64 p() const noexcept { return p_; }
  const std::vector<cplx>& roots() const noexcept { return roots_; }

  cplx operator()(cplx s) const;
  /// Reciprocal, which is entire.
  cplx inverse_at(cplx s) const;
  LocalLFactor operator*(const LocalLFactor& o) const;

 private:
  u64 p_;
  std::vector<cplx> roots_;
};

/// int_{|y|=1} chi(y) psi(xi y) dy with vol(o) = 1. Exactly zero unless
/// |xi| = C(chi); otherwise chi^{-1}(xi0) times a cached base value.
cplx gauss_sum(const MultChar& chi, const ValuedUnit& xi);

/// epsilon(s, chi, psi^b); psi standard when the AddChar has no shift.
cplx epsilon_factor(const AddChar& psi, const MultChar& chi, cplx s);

/// gamma = epsilon * L(chi^{-1}, 1 - s) / L(chi, s). Throws NearPole within
/// 1e-3 of a pole of either L-factor.
cplx gamma_gl1(const AddChar& psi, const MultChar& chi, cplx s);

/// Tate integral Z(phi, chi, s).
cplx tate_zeta(const SchwartzBruhat& phi, const MultChar& chi, cplx s);

/// |Z(phi,chi,s) - Z(phi^, chi^{-1}, 1-s)/gamma| / (|LHS| + |RHS| + 1e-30).
double verify_tate(const SchwartzBruhat& phi, const MultChar& chi, cplx s);

/// max |phi^^(x) - phi(-x)| over a grid of x covering the support at the
/// constancy level.
double fourier_involution_error(const SchwartzBruhat& phi);

struct TateCase {
  SchwartzBruhat phi;
  MultChar chi;
  cplx s;
  double residual = 0.0;
  double involution_error = 0.0;
};

/// Random (phi, chi, s): 1-3 terms with centres, levels and frequencies of
/// valuation in [-3, 1], chi of conductor exponent <= 2 (unramified ones with
/// random theta), Re s in [0.2, 0.8]. Cases within 1e-3 of a pole are redrawn.
std::vector<TateCase> tate_suite(const std::vector<u64>& primes, int cases, u64 seed);

}  // namespace padloc
