#include "padloc/integrate.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "padloc/parallel.hpp"

namespace padloc {

ResidueRing working_ring(u64 p) {
  int m = 1;
  u64 mod = p;
  while (mod <= (u64{1} << 36) / p) {
    mod *= p;
    ++m;
  }
  return ResidueRing(p, m);
}

bool in_ball(const ValuedUnit& x, const std::optional<ValuedUnit>& center, int level) {
  const bool center_zero = !center || center->is_zero() || center->valuation() >= level;
  if (center_zero) {
    if (x.is_zero()) return true;
    return x.valuation() >= level;
  }
  if (x.is_zero()) return false;
  if (x.valuation() != center->valuation()) return false;
  try {
    const ValuedUnit d = x - *center;
    return d.valuation() >= level;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientPrecision) throw;
    // x and center agree to every known digit
    if (std::min(x.absolute_precision(), center->absolute_precision()) >= level) return true;
    throw;
  }
}

SchwartzBruhat SchwartzBruhat::ball(u64 p, int level) {
  SchwartzBruhat out(p);
  out.add(SBTerm{{1.0, 0.0}, std::nullopt, level, std::nullopt});
  return out;
}

SchwartzBruhat SchwartzBruhat::coset(const ValuedUnit& center, int level, cplx coeff) {
  SchwartzBruhat out(center.p());
  out.add(SBTerm{coeff, center, level, std::nullopt});
  return out;
}

SchwartzBruhat& SchwartzBruhat::add(SBTerm t) {
  if ((t.center && t.center->p() != p_) || (t.freq && t.freq->p() != p_)) {
    throw Error(ErrorCode::InvalidArgument, "prime mismatch in Schwartz-Bruhat term");
  }
  if (t.center && t.center->is_zero()) t.center.reset();
  if (t.freq && t.freq->is_zero()) t.freq.reset();
  terms_.push_back(std::move(t));
  return *this;
}

SchwartzBruhat SchwartzBruhat::operator+(const SchwartzBruhat& o) const {
  if (o.p_ != p_) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  SchwartzBruhat out = *this;
  for (const auto& t : o.terms_) out.terms_.push_back(t);
  return out;
}

SchwartzBruhat SchwartzBruhat::scaled(cplx c) const {
  SchwartzBruhat out = *this;
  for (auto& t : out.terms_) t.coeff *= c;
  return out;
}

SchwartzBruhat SchwartzBruhat::translated(const ValuedUnit& a) const {
  SchwartzBruhat out(p_);
  for (const auto& t : terms_) {
    SBTerm n = t;
    if (t.freq) n.coeff *= psi_standard(-(*t.freq * a));
    if (!t.center) {
      n.center = a;
    } else {
      try {
        n.center = *t.center + a;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientPrecision) throw;
        n.center.reset();  // centre cancels to 0 at known precision
      }
    }
    out.add(std::move(n));
  }
  return out;
}

SchwartzBruhat SchwartzBruhat::dilated(const ValuedUnit& b) const {
  if (b.is_zero()) throw Error(ErrorCode::InvalidArgument, "dilation by zero");
  SchwartzBruhat out(p_);
  for (const auto& t : terms_) {
    SBTerm n = t;
    if (t.center) n.center = *t.center / b;
    n.level = t.level - b.valuation();
    if (t.freq) n.freq = *t.freq * b;
    out.add(std::move(n));
  }
  return out;
}

cplx SchwartzBruhat::operator()(const ValuedUnit& x) const {
  cplx out(0.0, 0.0);
  for (const auto& t : terms_) {
    if (!in_ball(x, t.center, t.level)) continue;
    cplx v = t.coeff;
    if (t.freq && !x.is_zero()) v *= psi_standard(*t.freq * x);
    out += v;
  }
  return out;
}

int SchwartzBruhat::constancy_level() const {
  int L = std::numeric_limits<int>::min();
  for (const auto& t : terms_) {
    L = std::max(L, t.level);
    if (t.freq) L = std::max(L, -t.freq->valuation());
  }
  return L;
}

int SchwartzBruhat::support_radius() const {
  int R = std::numeric_limits<int>::min();
  for (const auto& t : terms_) {
    int low = t.level;
    if (t.center) low = std::min(low, t.center->valuation());
    R = std::max(R, -low);
  }
  return R;
}

double SchwartzBruhat::l2_norm_sq() const {
  if (terms_.empty()) return 0.0;
  const int L = constancy_level();
  const int R = std::max(support_radius(), -L);
  const u64 count = checked_pow(p_, L + R);
  const ResidueRing ring = working_ring(p_);
  double total = 0.0;
  for (u64 j = 0; j < count; ++j) {
    ValuedUnit x = ValuedUnit::zero(ring);
    if (j != 0) {
      const ValuedUnit jj = ValuedUnit::from_integer(static_cast<i64>(j), ring);
      x = ValuedUnit::make(jj.valuation() - R, jj.unit(), ring);
    }
    total += std::norm((*this)(x));
  }
  return total * std::pow(static_cast<double>(p_), -L);
}

SchwartzBruhat fourier(const SchwartzBruhat& phi) {
  const double q = static_cast<double>(phi.p());
  SchwartzBruhat out(phi.p());
  for (const auto& t : phi.terms()) {
    SBTerm n;
    n.coeff = t.coeff * std::pow(q, -t.level);
    if (t.center && t.freq) n.coeff *= psi_standard(*t.center * *t.freq);
    if (t.freq) n.center = -*t.freq;
    n.level = -t.level;
    n.freq = t.center;
    out.add(std::move(n));
  }
  return out;
}

double pole_distance(const MultChar& chi, cplx s) {
  if (chi.is_ramified()) return std::numeric_limits<double>::infinity();
  const double lq = std::log(static_cast<double>(chi.p()));
  // chi(p) q^{-s} = q^{-w}; poles at w in (2 pi i / log q) Z
  const cplx w = s + chi.sigma() - cplx(0.0, 2.0 * std::numbers::pi * chi.theta() / lq);
  const double period = 2.0 * std::numbers::pi / lq;
  const double k = std::round(w.imag() / period);
  return std::abs(w - cplx(0.0, k * period));
}

namespace {

// Sum over w in u0 + p^{base} o, w mod p^L, of chi0(w) psi(p^vx * xi0 * w)
// (vx = valuation of the psi argument scale; freq absent means psi trivial).
cplx residue_sum(const MultChar& chi, u64 u0, int base, int L, bool has_freq, int vx, u64 xi0) {
  const u64 p = chi.p();
  const int n = chi.cond_exp();
  const bool osc = has_freq && vx < 0;
  // exact zeros from orthogonality, so vanishing integrals come out as 0.0
  if (!osc && n > base) return {0.0, 0.0};
  if (osc && base == 0 && (n > 0 ? vx != -n : vx < -1)) return {0.0, 0.0};
  const ResidueRing ring(p, L);
  const u64 step = checked_pow(p, base);
  const u64 count = checked_pow(p, L - base);
  cplx sum(0.0, 0.0);
  for (u64 j = 0; j < count; ++j) {
    const u64 w = (u0 % step + j * step) % ring.modulus();
    if (w % p == 0) continue;
    cplx v = chi.unit_value(w);
    if (has_freq && vx < 0) v *= psi_raw(vx, ring.mul(xi0 % ring.modulus(), w), p);
    sum += v;
  }
  // a vanishing sum of roots of unity is rounding noise of size ~1e-16 count
  if (std::abs(sum) < 1e-11 * static_cast<double>(count)) return {0.0, 0.0};
  return sum;
}

u64 unit_mod(const ValuedUnit& x, int k) {
  if (x.precision() < k) {
    throw Error(ErrorCode::InsufficientPrecision, "unit part needed to higher precision");
  }
  return x.unit() % checked_pow(x.p(), k);
}

}  // namespace

cplx mellin_with_tails(const SchwartzBruhat& phi, const MultChar& chi, cplx s) {
  if (phi.p() != chi.p()) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  const u64 p = chi.p();
  const double q = static_cast<double>(p);
  const int n = chi.cond_exp();
  const cplx chip = chi.uniformizer_value();
  auto annulus_factor = [&](int v) {
    return std::pow(chip, v) * std::exp(-s * std::log(q) * static_cast<double>(v));
  };
  cplx total(0.0, 0.0);
  for (const auto& t : phi.terms()) {
    const bool has_freq = t.freq.has_value();
    const int vxi = has_freq ? t.freq->valuation() : 0;
    const bool contains_zero = !t.center || t.center->valuation() >= t.level;
    if (!contains_zero) {
      const int v0 = t.center->valuation();
      const int base = t.level - v0;
      int L = std::max({n, base, 1});
      if (has_freq) L = std::max(L, -(vxi + v0));
      const u64 u0 = unit_mod(*t.center, base);
      const u64 xi0 = has_freq ? unit_mod(*t.freq, std::max(0, -(vxi + v0))) : 0;
      const cplx sum = residue_sum(chi, u0, base, L, has_freq, vxi + v0, xi0);
      total += t.coeff * std::pow(q, -L) * annulus_factor(v0) * sum;
      continue;
    }
    const int m = t.level;
    const int K = has_freq ? std::max(m, -vxi) : m;
    for (int v = m; v < K; ++v) {
      const int L = std::max({n, -(v + vxi), 1});
      const u64 xi0 = unit_mod(*t.freq, -(v + vxi));
      const cplx G = std::pow(q, -L) * residue_sum(chi, 0, 0, L, true, v + vxi, xi0);
      total += t.coeff * annulus_factor(v) * G;
    }
    if (n == 0) {
      if (pole_distance(chi, s) < 1e-3) {
        throw Error(ErrorCode::NearPole, "chi |.|^s within 1e-3 of a pole of L(chi, s)");
      }
      const cplx z = chip * std::exp(-s * std::log(q));
      total += t.coeff * (1.0 - 1.0 / q) * annulus_factor(K) / (1.0 - z);
    }
  }
  return total;
}

u64 annulus_point_count(const AnnulusDomain& dom) {
  const u64 units = phi_prime_power(dom.p, dom.level);
  if (dom.constraint == AnnulusConstraint::DistanceToOneEqualsAbs) {
    if (dom.valuation > 0) return 0;
    if (dom.valuation == 0) return units / (dom.p - 1) * (dom.p - 2);
  }
  return units;
}

cplx integrate_mult(const std::function<cplx(const ValuedUnit&)>& f, const AnnulusDomain& dom,
                    unsigned degree) {
  if (dom.p < 3 || !is_prime(dom.p)) throw Error(ErrorCode::InvalidArgument, "p must be an odd prime");
  if (dom.level < 1) throw Error(ErrorCode::LevelTooLow, "sampling level must be >= 1");
  if (dom.declared_conductor > dom.level) {
    throw Error(ErrorCode::LevelTooLow, "integrand conductor exponent " +
                                            std::to_string(dom.declared_conductor) +
                                            " exceeds sampling level " + std::to_string(dom.level));
  }
  const ResidueRing ring(dom.p, dom.level);
  const u64 R = ring.modulus();
  const bool constrained = dom.constraint == AnnulusConstraint::DistanceToOneEqualsAbs;
  if (constrained && dom.valuation > 0) return {0.0, 0.0};
  const cplx sum = parallel_sum(
      static_cast<std::size_t>(R),
      [&](std::size_t b, std::size_t e) {
        cplx part(0.0, 0.0);
        for (std::size_t u = b; u < e; ++u) {
          if (u % dom.p == 0) continue;
          if (constrained && dom.valuation == 0 && u % dom.p == 1) continue;
          part += f(ValuedUnit::make(dom.valuation, u, ring));
        }
        return part;
      },
      degree);
  return sum * std::pow(static_cast<double>(dom.p), -dom.level);
}

}  // namespace padloc
