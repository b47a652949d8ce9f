#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "padloc/padic_core.hpp"

namespace padloc {

using cplx = std::complex<double>;

/// e(x) = exp(2 pi i x).
cplx e_of(double x);

/// A character of F^x = p^Z x o^x: a primitive character chi_0 of (Z/p^n)^x
/// given by chi_0(g) = e(k / phi(p^n)) on the least primitive root g, times
/// chi(p) = e(theta) q^{-sigma} on the uniformizer.
class MultChar {
 public:
  /// Validates that (n, k) is primitive; throws InvalidArgument otherwise.
  static MultChar make(u64 p, int n, i64 k, double theta = 0.0, double sigma = 0.0);
  static MultChar trivial(u64 p) { return make(p, 0, 0); }
  static MultChar unramified(u64 p, double theta, double sigma = 0.0) {
    return make(p, 0, 0, theta, sigma);
  }
  /// Character of (Z/p^level)^x with chi(g_level) = e(K / phi(p^level)),
  /// reduced to its primitive form.
  static MultChar from_rotation(u64 p, int level, i64 rotation, double theta = 0.0,
                                double sigma = 0.0);

  u64 p() const noexcept { return p_; }
  int cond_exp() const noexcept { return n_; }
  u64 rotation() const noexcept { return k_; }
  double theta() const noexcept { return theta_; }
  double sigma() const noexcept { return sigma_; }
  bool is_ramified() const noexcept { return n_ > 0; }
  bool is_unitary() const noexcept { return sigma_ == 0.0; }

  /// q^n.
  u64 conductor() const { return checked_pow(p_, n_); }
  /// Modulus of the unit-value table (p^n, or 1 when unramified).
  u64 table_modulus() const noexcept { return table_modulus_; }

  /// chi_0 on a residue (reduced internally mod p^n); 0 on non-units.
  cplx unit_value(u64 residue) const noexcept {
    if (n_ == 0) return {1.0, 0.0};
    const i64 d = dlog_->dlog(residue);
    if (d < 0) return {0.0, 0.0};
    return (*roots_)[static_cast<std::size_t>((k_ * static_cast<u64>(d)) % order_)];
  }

  /// chi(p) = e(theta) q^{-sigma}.
  cplx uniformizer_value() const;

  /// Rotation numerator of this character viewed on (Z/p^level)^x, level >= n.
  u64 rotation_at(int level) const;

  MultChar inverse() const;
  MultChar pow(i64 e) const;
  MultChar operator*(const MultChar& o) const;

  /// Value at -1 (a sign for quadratic characters, a root of unity in general).
  cplx value_at_minus_one() const { return unit_value(table_modulus_ - 1); }

  /// p=..,n=..,k=..,theta=..,sigma=..
  std::string spec() const;

  friend bool operator==(const MultChar& a, const MultChar& b) {
    return a.p_ == b.p_ && a.n_ == b.n_ && a.k_ == b.k_ && a.theta_ == b.theta_ &&
           a.sigma_ == b.sigma_;
  }

 private:
  MultChar(u64 p, int n, u64 k, double theta, double sigma);

  u64 p_;
  int n_;
  u64 k_;
  double theta_;
  double sigma_;
  u64 table_modulus_;
  u64 order_;
  // shared per (p, n): discrete logs and e(j / phi(p^n))
  std::shared_ptr<const UnitGroupTable> dlog_;
  std::shared_ptr<const std::vector<cplx>> roots_;
};

/// Parses the character grammar `p=<prime>,n=<cond_exp>,k=<rot>,theta=<f>,sigma=<f>`
/// (theta and sigma optional).
MultChar parse_char_spec(const std::string& text);

/// Evaluates chi(p^v u) = e(v theta) q^{-v sigma} chi_0(u).
cplx char_eval(const MultChar& chi, const ValuedUnit& x);

/// Conductor q^n.
u64 conductor(const MultChar& chi);

/// All finite-order characters with chi(p) = 1 and conductor exponent <= max_exp,
/// ordered by (conductor exponent, rotation).
std::vector<MultChar> enumerate_characters(u64 p, int max_exp);

/// Characters with conductor exponent exactly n (chi(p) = 1).
std::vector<MultChar> characters_of_conductor(u64 p, int n);

/// psi^b(x) = psi(b x) with psi the standard unramified character,
/// psi(p^{-k} a) = e(a / p^k).
class AddChar {
 public:
  explicit AddChar(u64 p) : p_(p), shift_(std::nullopt) {}
  AddChar(u64 p, ValuedUnit shift);

  u64 p() const noexcept { return p_; }
  bool is_standard() const noexcept { return !shift_.has_value(); }
  const std::optional<ValuedUnit>& shift() const noexcept { return shift_; }

  cplx operator()(const ValuedUnit& x) const;

  /// psi^{-b}.
  AddChar conjugate() const;

 private:
  u64 p_;
  std::optional<ValuedUnit> shift_;
};

/// The standard unramified psi at x.
cplx psi_standard(const ValuedUnit& x);

/// psi(p^v * unit) from raw data; needs unit known modulo p^{-v}.
cplx psi_raw(int v, u64 unit, u64 p);

/// The class xi in o^x / (1 + p^{alpha'}) with omega(exp a) = chi(exp(xi a)) on p^alpha.
struct XiClass {
  u64 p = 0;
  u64 xi = 0;  ///< canonical representative in [1, p^{alpha'}), coprime to p
  int alpha = 0;
  int alpha_prime = 0;
  bool atypical = false;
  int n_alpha = 0;  ///< number of roots of xi^2 t^2 - t - 1 mod p^alpha
  bool small_prime_caveat = false;  ///< p = 3: atypicality is not assessed
};

XiClass xi_class(const MultChar& chi, const MultChar& omega);

struct AtypicalResult {
  bool atypical = false;
  std::optional<XiClass> xi;
};

AtypicalResult is_atypical(const MultChar& chi, const MultChar& omega);

/// c with chi(exp(p^a)) = e(c / p^{n-a}) for a primitive chi of exponent n > a >= 1.
u64 exp_coefficient_for(const MultChar& chi, int a);

}  // namespace padloc
