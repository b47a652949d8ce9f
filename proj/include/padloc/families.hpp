#pragma once

#include "padloc/characters.hpp"

namespace padloc {

enum class ReprKind { PrincipalSeries, SteinbergTwist, UnramifiedMarker };

/// A representation of PGL2(F) described by its inducing data.
struct ReprDescriptor {
  ReprKind kind = ReprKind::UnramifiedMarker;
  MultChar character;  ///< omega for I(omega), eta for St x eta, trivial otherwise

  static ReprDescriptor principal_series(const MultChar& omega);
  /// eta must be quadratic on units (eta^2 unramified).
  static ReprDescriptor steinberg_twist(const MultChar& eta);
  static ReprDescriptor unramified(u64 p);

  /// C(sigma).
  u64 conductor() const;
};

/// max(C(sigma) C(omega), C(omega)^2).
u64 twist_conductor_bound(u64 c_sigma, u64 c_omega);

/// Exact C(sigma x chi).
u64 twist_conductor(const ReprDescriptor& sigma, const MultChar& chi);

struct FamilyMembership {
  bool member = false;
  bool invariant_criterion = false;  ///< C(sigma x chi^{-1}) <= C(chi)
  u64 twisted_conductor = 0;
};

/// Membership of sigma in the family attached to a ramified chi.
FamilyMembership in_sigma_family(const ReprDescriptor& sigma, const MultChar& chi);

struct Rational {
  u64 num = 0;
  u64 den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num * b.den == b.num * a.den;
  }
};

/// vol(J) = zeta_F(1)/Q for Q = p^n, as an exact reduced rational.
Rational vol_J(u64 p, int n);

}  // namespace padloc
