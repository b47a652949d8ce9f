#include "padloc/padic_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace padloc {

bool is_prime(u64 n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (u64 d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

u64 checked_pow(u64 p, int e) {
  if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent in checked_pow");
  u64 r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > kMaxModulus / p) {
      throw Error(ErrorCode::InvalidArgument,
                  std::to_string(p) + "^" + std::to_string(e) + " exceeds 2^40");
    }
    r *= p;
  }
  return r;
}

int valuation_of(i64 n, u64 p) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "valuation of zero");
  int v = 0;
  const i64 pp = static_cast<i64>(p);
  while (n % pp == 0) {
    n /= pp;
    ++v;
  }
  return v;
}

u64 phi_prime_power(u64 p, int n) {
  if (n == 0) return 1;
  return checked_pow(p, n - 1) * (p - 1);
}

ResidueRing::ResidueRing(u64 p, int m) : p_(p), m_(m), modulus_(0) {
  if (p == 2) {
    throw Error(ErrorCode::InvalidArgument, "dyadic residue rings are not supported (p must be odd)");
  }
  if (!is_prime(p)) throw Error(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "precision exponent must be >= 1");
  modulus_ = checked_pow(p, m);
}

u64 ResidueRing::pow(u64 base, u64 e) const noexcept {
  u64 result = 1 % modulus_;
  base %= modulus_;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

u64 residue_inv(u64 a, const ResidueRing& ring) {
  a %= ring.modulus();
  if (!ring.is_unit(a)) {
    throw Error(ErrorCode::NotAUnit, std::to_string(a) + " is not a unit mod " +
                                         std::to_string(ring.modulus()));
  }
  i64 old_r = static_cast<i64>(a), r = static_cast<i64>(ring.modulus());
  i64 old_s = 1, s = 0;
  while (r != 0) {
    const i64 q = old_r / r;
    i64 t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  return ring.reduce(old_s);
}

// ---------------------------------------------------------------------------
// ValuedUnit

ValuedUnit ValuedUnit::make(int valuation, u64 unit, const ResidueRing& ring) {
  unit %= ring.modulus();
  if (!ring.is_unit(unit)) {
    throw Error(ErrorCode::NotAUnit, "unit part " + std::to_string(unit) + " divisible by p");
  }
  return ValuedUnit(valuation, unit, ring, false);
}

ValuedUnit ValuedUnit::zero(const ResidueRing& ring) { return ValuedUnit(0, 0, ring, true); }

ValuedUnit ValuedUnit::from_integer(i64 n, const ResidueRing& ring) {
  if (n == 0) return zero(ring);
  const int v = valuation_of(n, ring.p());
  i64 u = n;
  for (int i = 0; i < v; ++i) u /= static_cast<i64>(ring.p());
  return make(v, ring.reduce(u), ring);
}

int ValuedUnit::absolute_precision() const noexcept {
  return zero_ ? kZeroValuation : valuation_ + ring_.exponent();
}

double ValuedUnit::abs() const {
  if (zero_) return 0.0;
  return std::pow(static_cast<double>(ring_.p()), -valuation_);
}

ValuedUnit ValuedUnit::operator*(const ValuedUnit& o) const {
  const ResidueRing ring = ring_.exponent() <= o.ring_.exponent() ? ring_ : o.ring_;
  if (zero_ || o.zero_) return zero(ring);
  return ValuedUnit(valuation_ + o.valuation_, ring.mul(unit_ % ring.modulus(), o.unit_ % ring.modulus()),
                    ring, false);
}

ValuedUnit ValuedUnit::inverse() const {
  if (zero_) throw Error(ErrorCode::InvalidArgument, "inverse of zero");
  return ValuedUnit(-valuation_, residue_inv(unit_, ring_), ring_, false);
}

ValuedUnit ValuedUnit::operator/(const ValuedUnit& o) const { return *this * o.inverse(); }

ValuedUnit ValuedUnit::operator-() const {
  if (zero_) return *this;
  return ValuedUnit(valuation_, ring_.neg(unit_), ring_, false);
}

ValuedUnit ValuedUnit::operator+(const ValuedUnit& o) const {
  if (zero_) return o;
  if (o.zero_) return *this;
  const int c = std::min(valuation_, o.valuation_);
  const int abs_prec = std::min(absolute_precision(), o.absolute_precision());
  const int rel = abs_prec - c;
  const ResidueRing work(ring_.p(), rel);
  auto shifted = [&](int v, u64 u) -> u64 {
    const int shift = v - c;
    if (shift >= rel) return 0;
    return work.mul(checked_pow(ring_.p(), shift), u % work.modulus());
  };
  u64 s = work.add(shifted(valuation_, unit_), shifted(o.valuation_, o.unit_));
  if (s == 0) {
    throw Error(ErrorCode::InsufficientPrecision,
                "sum cancels to zero at the available precision");
  }
  int w = 0;
  while (s % ring_.p() == 0) {
    s /= ring_.p();
    ++w;
  }
  const ResidueRing out(ring_.p(), rel - w);
  return ValuedUnit(c + w, s % out.modulus(), out, false);
}

ValuedUnit ValuedUnit::pow(i64 e) const {
  if (e < 0) return inverse().pow(-e);
  if (zero_) return e == 0 ? one(ring_) : *this;
  return ValuedUnit(static_cast<int>(valuation_ * e), ring_.pow(unit_, static_cast<u64>(e)), ring_, false);
}

ValuedUnit ValuedUnit::with_precision(int m) const {
  if (m > ring_.exponent()) {
    throw Error(ErrorCode::InsufficientPrecision,
                "cannot raise precision from " + std::to_string(ring_.exponent()) + " to " +
                    std::to_string(m));
  }
  const ResidueRing ring(ring_.p(), m);
  return ValuedUnit(valuation_, zero_ ? 0 : unit_ % ring.modulus(), ring, zero_);
}

u64 ValuedUnit::residue_mod(int k) const {
  if (zero_) return 0;
  if (valuation_ < 0) throw Error(ErrorCode::InvalidArgument, "residue of a non-integral element");
  if (valuation_ >= k) return 0;
  if (absolute_precision() < k) {
    throw Error(ErrorCode::InsufficientPrecision,
                "need absolute precision " + std::to_string(k) + ", have " +
                    std::to_string(absolute_precision()));
  }
  const ResidueRing ring(ring_.p(), k);
  return ring.mul(checked_pow(ring_.p(), valuation_), unit_ % ring.modulus());
}

bool ValuedUnit::equals(const ValuedUnit& o) const {
  if (zero_ || o.zero_) return zero_ == o.zero_;
  if (ring_.p() != o.ring_.p() || valuation_ != o.valuation_) return false;
  const u64 mod = checked_pow(ring_.p(), std::min(ring_.exponent(), o.ring_.exponent()));
  return unit_ % mod == o.unit_ % mod;
}

// ---------------------------------------------------------------------------
// exp / log

ValuedUnit exp_level(const ValuedUnit& a, int m) {
  const ResidueRing ring(a.p(), m);
  if (a.is_zero()) return ValuedUnit::one(ring);
  const int v = a.valuation();
  if (v < 1) throw Error(ErrorCode::Divergent, "exp requires v(a) >= 1");
  if (a.absolute_precision() < m) {
    throw Error(ErrorCode::InsufficientPrecision, "argument of exp known below target precision");
  }
  const u64 p = a.p();
  const u64 u = a.unit() % ring.modulus();
  u64 sum = 1;
  u64 unit_fact = 1;  // k! with its p-part removed, mod p^m
  int fact_val = 0;   // v_p(k!)
  u64 u_pow = 1;
  for (i64 k = 1;; ++k) {
    // Lower bound on v(a^j/j!) for all j >= k: j v - (j-1)/(p-1).
    if (static_cast<double>(k) * v - static_cast<double>(k - 1) / static_cast<double>(p - 1) >= m) break;
    i64 kk = k;
    while (kk % static_cast<i64>(p) == 0) {
      kk /= static_cast<i64>(p);
      ++fact_val;
    }
    unit_fact = ring.mul(unit_fact, static_cast<u64>(kk) % ring.modulus());
    u_pow = ring.mul(u_pow, u);
    const i64 term_val = k * v - fact_val;
    if (term_val >= m) continue;
    const u64 term = ring.mul(ring.mul(checked_pow(p, static_cast<int>(term_val)), u_pow),
                              residue_inv(unit_fact, ring));
    sum = ring.add(sum, term);
  }
  return ValuedUnit::make(0, sum, ring);
}

ValuedUnit log_level(const ValuedUnit& u, int m) {
  if (u.is_zero() || u.valuation() != 0 || u.unit() % u.p() != 1 % u.p()) {
    throw Error(ErrorCode::Divergent, "log requires u = 1 mod p");
  }
  if (u.precision() < m) {
    throw Error(ErrorCode::InsufficientPrecision, "argument of log known below target precision");
  }
  const ResidueRing ring(u.p(), m);
  const u64 p = u.p();
  const u64 z = ring.sub(u.unit() % ring.modulus(), 1);
  if (z == 0) return ValuedUnit::zero(ring);
  int w = 0;
  u64 z0 = z;
  while (z0 % p == 0) {
    z0 /= p;
    ++w;
  }
  u64 sum = 0;
  u64 z_pow = 1;
  for (i64 k = 1;; ++k) {
    int vk = 0;
    i64 kk = k;
    while (kk % static_cast<i64>(p) == 0) {
      kk /= static_cast<i64>(p);
      ++vk;
    }
    z_pow = ring.mul(z_pow, z0);
    const i64 term_val = k * w - vk;
    // k w - log_p(k) is increasing in k, so once it passes m we are done.
    if (static_cast<double>(k) * w - std::log(static_cast<double>(k)) / std::log(static_cast<double>(p)) >= m) break;
    if (term_val >= m) continue;
    u64 term = ring.mul(ring.mul(checked_pow(p, static_cast<int>(term_val)), z_pow),
                        residue_inv(static_cast<u64>(kk) % ring.modulus(), ring));
    if (k % 2 == 0) term = ring.neg(term);
    sum = ring.add(sum, term);
  }
  if (sum == 0) return ValuedUnit::zero(ring);
  int v = 0;
  u64 s = sum;
  while (s % p == 0) {
    s /= p;
    ++v;
  }
  const ResidueRing out(p, m - v);
  return ValuedUnit::make(v, s, out);
}

// ---------------------------------------------------------------------------
// quadratic congruences

namespace {

u64 sqrt_mod_p(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  const ResidueRing ring(p, 1);
  if (p % 4 == 3) {
    const u64 r = ring.pow(a, (p + 1) / 4);
    return ring.mul(r, r) == a ? r : p;
  }
  if (ring.pow(a, (p - 1) / 2) != 1) return p;  // non-residue marker
  // Tonelli-Shanks
  u64 q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  u64 z = 2;
  while (ring.pow(z, (p - 1) / 2) != p - 1) ++z;
  u64 mm = static_cast<u64>(s);
  u64 c = ring.pow(z, q);
  u64 t = ring.pow(a, q);
  u64 r = ring.pow(a, (q + 1) / 2);
  while (t != 1) {
    u64 i = 0;
    u64 tt = t;
    while (tt != 1) {
      tt = ring.mul(tt, tt);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + 1 < mm - i; ++j) b = ring.mul(b, b);
    mm = i;
    c = ring.mul(b, b);
    t = ring.mul(t, c);
    r = ring.mul(r, b);
  }
  return r;
}

}  // namespace

i64 sqrt_mod_prime_power(u64 a, u64 p, int k) {
  const ResidueRing ring(p, k);
  a %= ring.modulus();
  if (!ring.is_unit(a)) throw Error(ErrorCode::NotAUnit, "sqrt_mod_prime_power needs a unit");
  const u64 r0 = sqrt_mod_p(a, p);
  if (r0 == p) return -1;
  u64 x = r0;
  // Newton iteration doubles the number of correct digits each step.
  for (int prec = 1; prec < k; prec *= 2) {
    const u64 f = ring.sub(ring.mul(x, x), a);
    x = ring.sub(x, ring.mul(f, residue_inv(ring.mul(2, x), ring)));
  }
  return static_cast<i64>(x);
}

void quadratic_roots_into(const ResidueRing& ring, i64 a, i64 b, i64 c, std::vector<u64>& out) {
  const u64 p = ring.p();
  const int alpha = ring.exponent();
  const u64 ra = ring.reduce(a), rb = ring.reduce(b), rc = ring.reduce(c);
  out.clear();
  const u64 disc = ring.sub(ring.mul(rb, rb), ring.mul(4, ring.mul(ra, rc)));
  if (ring.is_unit(ra) && ring.is_unit(disc)) {
    // Separable case: two simple roots lift uniquely from their residues.
    const i64 sq = sqrt_mod_prime_power(disc, p, alpha);
    if (sq < 0) return;
    const u64 inv2a = residue_inv(ring.mul(2, ra), ring);
    u64 r1 = ring.mul(ring.sub(static_cast<u64>(sq), rb), inv2a);
    u64 r2 = ring.mul(ring.sub(ring.neg(static_cast<u64>(sq)), rb), inv2a);
    if (r2 < r1) std::swap(r1, r2);
    out.push_back(r1);
    if (r2 != r1) out.push_back(r2);
    return;
  }
  // General case: lift the full root tree one digit at a time. Residues mod
  // p^k are read off from the value mod p^alpha.
  const u64 M = ring.modulus();
  const bool small = M < (u64{1} << 20);  // ra*t2 + rb*t + rc fits in 64 bits
  auto value = [&](u64 t) {
    if (small) return (ra * (t * t % M) + rb * t + rc) % M;
    return ring.add(ring.add(ring.mul(ra, ring.mul(t, t)), ring.mul(rb, t)), rc);
  };
  for (u64 t = 0; t < p; ++t) {
    if (value(t) % p == 0) out.push_back(t);
  }
  // digits are appended in place: level k lives in out[begin, end)
  std::size_t begin = 0;
  u64 step = p;
  for (int k = 2; k <= alpha && begin < out.size(); ++k) {
    const u64 mod_k = step * p;
    const std::size_t end = out.size();
    for (std::size_t idx = begin; idx < end; ++idx) {
      const u64 r = out[idx];
      for (u64 t = 0; t < p; ++t) {
        const u64 cand = r + t * step;
        if (value(cand) % mod_k == 0) out.push_back(cand);
      }
    }
    begin = end;
    step = mod_k;
  }
  out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(begin));
  std::sort(out.begin(), out.end());
}

std::vector<u64> quadratic_roots(i64 a, i64 b, i64 c, u64 p, int alpha) {
  std::vector<u64> out;
  quadratic_roots_into(ResidueRing(p, alpha), a, b, c, out);
  return out;
}

// ---------------------------------------------------------------------------
// unit groups

u64 least_primitive_root(u64 p, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "least_primitive_root needs n >= 1");
  const ResidueRing r1(p, 1);
  std::vector<u64> factors;
  u64 m = p - 1;
  for (u64 d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      factors.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) factors.push_back(m);
  const ResidueRing r2(p, 2);
  for (u64 g = 2; g < p * p; ++g) {
    if (g % p == 0) continue;
    bool primitive = true;
    for (u64 f : factors) {
      if (r1.pow(g % p, (p - 1) / f) == 1) {
        primitive = false;
        break;
      }
    }
    if (!primitive) continue;
    if (n >= 2 && r2.pow(g, p - 1) == 1) continue;
    return g;
  }
  throw Error(ErrorCode::InvalidArgument, "no primitive root found");
}

UnitGroupTable::UnitGroupTable(u64 p, int n)
    : p_(p), n_(n), modulus_(checked_pow(p, n)), order_(phi_prime_power(p, n)), generator_(0) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "unit group table needs n >= 1");
  if (modulus_ > kMaxTableModulus) {
    throw Error(ErrorCode::TableTooLarge, "p^n = " + std::to_string(modulus_) + " exceeds table cap");
  }
  generator_ = least_primitive_root(p, n) % modulus_;
  dlog_.assign(static_cast<std::size_t>(modulus_), -1);
  powers_.resize(static_cast<std::size_t>(order_));
  u64 x = 1;
  for (u64 k = 0; k < order_; ++k) {
    dlog_[static_cast<std::size_t>(x)] = static_cast<std::int32_t>(k);
    powers_[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(x);
    x = static_cast<u64>((static_cast<unsigned __int128>(x) * generator_) % modulus_);
  }
}

std::shared_ptr<const UnitGroupTable> UnitGroupTable::get(u64 p, int n) {
  static std::mutex mutex;
  static std::map<std::pair<u64, int>, std::shared_ptr<const UnitGroupTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{p, n}];
  if (!slot) slot = std::make_shared<const UnitGroupTable>(p, n);
  return slot;
}

}  // namespace padloc
