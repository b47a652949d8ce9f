#pragma once

#include <climits>
#include <cstdint>
#include <memory>
#include <vector>

#include "padloc/errors.hpp"

namespace padloc {

using u64 = std::uint64_t;
using i64 = std::int64_t;

/// Hard cap on any modulus p^m handled by the library.
inline constexpr u64 kMaxModulus = u64{1} << 40;

bool is_prime(u64 n);

/// p^e, throwing InvalidArgument if the result exceeds kMaxModulus.
u64 checked_pow(u64 p, int e);

/// p-adic valuation of a nonzero integer.
int valuation_of(i64 n, u64 p);

/// Euler phi of p^n for odd prime p (phi(p^0) = 1).
u64 phi_prime_power(u64 p, int n);

/// The ring Z/p^m for an odd prime p.
class ResidueRing {
 public:
  ResidueRing(u64 p, int m);

  u64 p() const noexcept { return p_; }
  int exponent() const noexcept { return m_; }
  u64 modulus() const noexcept { return modulus_; }

  u64 reduce(i64 a) const noexcept {
    i64 r = a % static_cast<i64>(modulus_);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(modulus_) : r);
  }
  u64 add(u64 a, u64 b) const noexcept {
    u64 s = a + b;
    return s >= modulus_ ? s - modulus_ : s;
  }
  u64 sub(u64 a, u64 b) const noexcept { return a >= b ? a - b : a + modulus_ - b; }
  u64 neg(u64 a) const noexcept { return a == 0 ? 0 : modulus_ - a; }
  u64 mul(u64 a, u64 b) const noexcept {
    if (modulus_ <= (u64{1} << 32)) return (a * b) % modulus_;  // a, b < modulus
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % modulus_);
  }
  u64 pow(u64 base, u64 e) const noexcept;
  bool is_unit(u64 a) const noexcept { return a % p_ != 0; }

  ResidueRing with_exponent(int m) const { return ResidueRing(p_, m); }

  friend bool operator==(const ResidueRing& a, const ResidueRing& b) {
    return a.p_ == b.p_ && a.m_ == b.m_;
  }

 private:
  u64 p_;
  int m_;
  u64 modulus_;
};

/// Inverse of a unit modulo p^m (extended Euclid).
u64 residue_inv(u64 a, const ResidueRing& ring);

/// x = p^v * u with u a unit known modulo p^m, or an exact zero.
/// The precision m (relative) is carried by the ring.
class ValuedUnit {
 public:
  static constexpr int kZeroValuation = INT_MAX / 4;

  static ValuedUnit make(int valuation, u64 unit, const ResidueRing& ring);
  static ValuedUnit zero(const ResidueRing& ring);
  static ValuedUnit one(const ResidueRing& ring) { return make(0, 1, ring); }
  /// Splits n = p^v * u; n == 0 gives the exact zero.
  static ValuedUnit from_integer(i64 n, const ResidueRing& ring);

  bool is_zero() const noexcept { return zero_; }
  int valuation() const noexcept { return zero_ ? kZeroValuation : valuation_; }
  u64 unit() const noexcept { return unit_; }
  const ResidueRing& ring() const noexcept { return ring_; }
  u64 p() const noexcept { return ring_.p(); }
  int precision() const noexcept { return ring_.exponent(); }
  /// Valuation plus relative precision: x is known modulo p^(absolute_precision).
  int absolute_precision() const noexcept;

  /// |x| = q^{-v}.
  double abs() const;

  ValuedUnit operator*(const ValuedUnit& o) const;
  ValuedUnit operator/(const ValuedUnit& o) const;
  ValuedUnit operator-() const;
  ValuedUnit operator+(const ValuedUnit& o) const;
  ValuedUnit operator-(const ValuedUnit& o) const { return *this + (-o); }
  ValuedUnit inverse() const;
  ValuedUnit pow(i64 e) const;

  /// Lowers the relative precision; raising it is an error.
  ValuedUnit with_precision(int m) const;

  /// Integer representative of x modulo p^k; requires v >= 0 and enough
  /// absolute precision.
  u64 residue_mod(int k) const;

  /// Equality at the smaller of the two precisions.
  bool equals(const ValuedUnit& o) const;

 private:
  ValuedUnit(int v, u64 u, ResidueRing ring, bool zero)
      : valuation_(v), unit_(u), ring_(ring), zero_(zero) {}

  int valuation_;
  u64 unit_;
  ResidueRing ring_;
  bool zero_;
};

/// Truncated exponential series sum_k a^k/k! at precision m. Requires v(a) >= 1.
ValuedUnit exp_level(const ValuedUnit& a, int m);

/// Truncated -sum_k (1-u)^k/k at precision m. Requires u = 1 mod p.
ValuedUnit log_level(const ValuedUnit& u, int m);

/// Exact root set of a t^2 + b t + c = 0 mod p^alpha, sorted ascending.
std::vector<u64> quadratic_roots(i64 a, i64 b, i64 c, u64 p, int alpha);

class ResidueRing;
/// Same, into a caller-owned buffer (cleared first); ring = Z/p^alpha.
void quadratic_roots_into(const ResidueRing& ring, i64 a, i64 b, i64 c, std::vector<u64>& out);

/// Square root of a unit square modulo p^k, or -1 if none exists.
i64 sqrt_mod_prime_power(u64 a, u64 p, int k);

/// Least primitive root modulo p^n (n >= 1).
u64 least_primitive_root(u64 p, int n);

/// Discrete logarithm table for the cyclic group (Z/p^n)^x with respect to
/// least_primitive_root(p, n). Shared and read-only after construction.
class UnitGroupTable {
 public:
  static std::shared_ptr<const UnitGroupTable> get(u64 p, int n);

  u64 p() const noexcept { return p_; }
  int exponent() const noexcept { return n_; }
  u64 modulus() const noexcept { return modulus_; }
  u64 order() const noexcept { return order_; }
  u64 generator() const noexcept { return generator_; }

  /// Discrete log of a unit residue (reduced mod p^n); -1 for non-units.
  i64 dlog(u64 residue) const noexcept {
    return dlog_[static_cast<std::size_t>(residue % modulus_)];
  }
  u64 power(u64 k) const noexcept { return powers_[static_cast<std::size_t>(k % order_)]; }

  UnitGroupTable(u64 p, int n);

 private:
  u64 p_;
  int n_;
  u64 modulus_;
  u64 order_;
  u64 generator_;
  std::vector<std::int32_t> dlog_;
  std::vector<std::uint32_t> powers_;
};

/// Largest table size UnitGroupTable will allocate.
inline constexpr u64 kMaxTableModulus = u64{1} << 24;

}  // namespace padloc
