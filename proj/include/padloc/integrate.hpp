#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "padloc/characters.hpp"
#include "padloc/padic_core.hpp"

namespace padloc {

/// Residue ring at the default working precision for p (p^m <= 2^36).
ResidueRing working_ring(u64 p);

/// x in a + p^m o ?  (a absent means a = 0). Throws InsufficientPrecision
/// when the inputs do not determine the answer.
bool in_ball(const ValuedUnit& x, const std::optional<ValuedUnit>& center, int level);

/// coeff * 1_{center + p^level o}(x) * psi(freq * x).
struct SBTerm {
  cplx coeff{1.0, 0.0};
  std::optional<ValuedUnit> center;  ///< absent = 0
  int level = 0;
  std::optional<ValuedUnit> freq;  ///< absent = 0
};

class SchwartzBruhat {
 public:
  explicit SchwartzBruhat(u64 p) : p_(p) {}

  /// 1_{p^level o}.
  static SchwartzBruhat ball(u64 p, int level);
  static SchwartzBruhat coset(const ValuedUnit& center, int level, cplx coeff = {1.0, 0.0});

  u64 p() const noexcept { return p_; }
  const std::vector<SBTerm>& terms() const noexcept { return terms_; }

  SchwartzBruhat& add(SBTerm t);
  SchwartzBruhat operator+(const SchwartzBruhat& o) const;
  SchwartzBruhat scaled(cplx c) const;
  /// x -> phi(x - a).
  SchwartzBruhat translated(const ValuedUnit& a) const;
  /// x -> phi(b x).
  SchwartzBruhat dilated(const ValuedUnit& b) const;

  cplx operator()(const ValuedUnit& x) const;

  /// Smallest L with phi constant on cosets of p^L, and smallest R with
  /// supp phi inside p^{-R} o.
  int constancy_level() const;
  int support_radius() const;

  /// int |phi|^2 dx by exact summation over the (R, L) grid.
  double l2_norm_sq() const;

 private:
  u64 p_;
  std::vector<SBTerm> terms_;
};

/// Term-wise exact Fourier transform with respect to the standard psi and the
/// self-dual measure (vol(o) = 1).
SchwartzBruhat fourier(const SchwartzBruhat& phi);

/// Int phi(x) chi(x) |x|^s dx/|x| with the tail over small |x| summed in
/// closed form (meromorphic continuation). Throws NearPole within 1e-3 of a
/// pole of L(chi, s).
cplx mellin_with_tails(const SchwartzBruhat& phi, const MultChar& chi, cplx s);

/// Distance of s from the nearest pole of L(chi, s); +inf for ramified chi.
double pole_distance(const MultChar& chi, cplx s);

enum class AnnulusConstraint {
  None,
  DistanceToOneEqualsAbs,  ///< |x - 1| = |x|
};

/// {x : |x| = q^{-valuation}} with an optional constraint, sampled at unit
/// level `level` (relative precision of x).
struct AnnulusDomain {
  u64 p = 0;
  int valuation = 0;
  AnnulusConstraint constraint = AnnulusConstraint::None;
  int level = 1;
  int declared_conductor = 0;  ///< exponent the integrand needs resolved
};

/// q^{-m} * sum over admissible unit residues u0 mod p^m of f(p^v u0), which
/// is the integral of f against dx/|x| over the annulus.
cplx integrate_mult(const std::function<cplx(const ValuedUnit&)>& f, const AnnulusDomain& dom,
                    unsigned degree = 1);

/// Number of admissible residues summed by integrate_mult.
u64 annulus_point_count(const AnnulusDomain& dom);

}  // namespace padloc
