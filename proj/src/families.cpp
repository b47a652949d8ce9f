#include "padloc/families.hpp"

#include <numeric>

namespace padloc {

ReprDescriptor ReprDescriptor::principal_series(const MultChar& omega) {
  return ReprDescriptor{ReprKind::PrincipalSeries, omega};
}

ReprDescriptor ReprDescriptor::steinberg_twist(const MultChar& eta) {
  if (eta.pow(2).is_ramified()) {
    throw Error(ErrorCode::InvalidArgument, "Steinberg twist needs a quadratic character");
  }
  return ReprDescriptor{ReprKind::SteinbergTwist, eta};
}

ReprDescriptor ReprDescriptor::unramified(u64 p) {
  return ReprDescriptor{ReprKind::UnramifiedMarker, MultChar::trivial(p)};
}

namespace {
u64 checked_mul(u64 a, u64 b) {
  if (b != 0 && a > kMaxModulus / b) throw Error(ErrorCode::InvalidArgument, "conductor overflow");
  return a * b;
}
}  // namespace

u64 ReprDescriptor::conductor() const {
  switch (kind) {
    case ReprKind::PrincipalSeries:
      return checked_mul(character.conductor(), character.inverse().conductor());
    case ReprKind::SteinbergTwist:
      return character.is_ramified() ? checked_mul(character.conductor(), character.conductor())
                                     : character.p();
    case ReprKind::UnramifiedMarker:
      return 1;
  }
  return 1;
}

u64 twist_conductor_bound(u64 c_sigma, u64 c_omega) {
  return std::max(checked_mul(c_sigma, c_omega), checked_mul(c_omega, c_omega));
}

u64 twist_conductor(const ReprDescriptor& sigma, const MultChar& chi) {
  switch (sigma.kind) {
    case ReprKind::PrincipalSeries:
      return checked_mul((sigma.character * chi).conductor(),
                         (sigma.character.inverse() * chi).conductor());
    case ReprKind::SteinbergTwist: {
      const MultChar t = sigma.character * chi;
      return t.is_ramified() ? checked_mul(t.conductor(), t.conductor()) : chi.p();
    }
    case ReprKind::UnramifiedMarker:
      return checked_mul(chi.conductor(), chi.conductor());
  }
  return 1;
}

FamilyMembership in_sigma_family(const ReprDescriptor& sigma, const MultChar& chi) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "family needs ramified chi");
  FamilyMembership out;
  const MultChar chi_inv = chi.inverse();
  switch (sigma.kind) {
    case ReprKind::PrincipalSeries:
      out.member = !(sigma.character * chi_inv).is_ramified() ||
                   !(sigma.character.inverse() * chi_inv).is_ramified();
      break;
    case ReprKind::SteinbergTwist:
      out.member = !(sigma.character * chi_inv).is_ramified();
      break;
    case ReprKind::UnramifiedMarker:
      out.member = false;
      break;
  }
  out.twisted_conductor = twist_conductor(sigma, chi_inv);
  out.invariant_criterion = out.twisted_conductor <= chi.conductor();
  return out;
}

Rational vol_J(u64 p, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "vol_J needs Q = q^n with n >= 1");
  // (q/(q-1)) / q^n = 1 / ((q-1) q^{n-1})
  return Rational{1, checked_mul(p - 1, checked_pow(p, n - 1))};
}

}  // namespace padloc
