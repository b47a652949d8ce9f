#include "padloc/transforms.hpp"

#include <cmath>

#include "padloc/integrate.hpp"
#include "padloc/lfactors.hpp"

namespace padloc {

namespace {

cplx q_pow(u64 p, cplx e) { return std::exp(e * std::log(static_cast<double>(p))); }

void require_same_prime(const KernelSpec& K, const ValuedUnit& a) {
  if (a.p() != K.chi().p()) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
}

}  // namespace

KernelSpec KernelSpec::canonical(const MultChar& chi) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "kernel needs ramified chi");
  KernelSpec k(chi);
  k.canonical_ = true;
  k.m_ = chi.cond_exp();
  k.z_min_ = chi.cond_exp();
  k.z_cap_ = chi.cond_exp();
  return k;
}

KernelSpec KernelSpec::tabulate_canonical(const MultChar& chi) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "kernel needs ramified chi");
  const int n = chi.cond_exp();
  std::vector<cplx> table(static_cast<std::size_t>(chi.table_modulus()));
  for (u64 y = 0; y < chi.table_modulus(); ++y) table[static_cast<std::size_t>(y)] = chi.unit_value(y);
  return tabulated(chi, 0, 0, n, n, n, std::move(table));
}

KernelSpec KernelSpec::tabulated(const MultChar& chi, int y_val_min, int y_val_max,
                                 int unit_level, int z_min, int z_cap, std::vector<cplx> table) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "kernel needs ramified chi");
  if (y_val_max < y_val_min || unit_level < 1 || z_cap < z_min) {
    throw Error(ErrorCode::InvalidArgument, "malformed kernel table shape");
  }
  KernelSpec k(chi);
  k.canonical_ = false;
  k.y_min_ = y_val_min;
  k.y_max_ = y_val_max;
  k.m_ = unit_level;
  k.z_min_ = z_min;
  k.z_cap_ = z_cap;
  const std::size_t expected = static_cast<std::size_t>(y_val_max - y_val_min + 1) *
                               static_cast<std::size_t>(z_cap - z_min + 1) *
                               static_cast<std::size_t>(checked_pow(chi.p(), unit_level));
  if (table.size() != expected) {
    throw Error(ErrorCode::InvalidArgument, "kernel table has " + std::to_string(table.size()) +
                                                " entries, expected " + std::to_string(expected));
  }
  if (expected > kMaxTableModulus) throw Error(ErrorCode::TableTooLarge, "kernel table too large");
  k.table_ = std::move(table);
  return k;
}

std::size_t KernelSpec::index(int yv, u64 y0, int zclass) const {
  const std::size_t R = static_cast<std::size_t>(checked_pow(chi_.p(), m_));
  const std::size_t Z = static_cast<std::size_t>(z_cap_ - z_min_ + 1);
  return (static_cast<std::size_t>(yv - y_min_) * Z + static_cast<std::size_t>(zclass)) * R +
         static_cast<std::size_t>(y0 % R);
}

cplx KernelSpec::value(int yv, u64 y0, int zv) const {
  if (canonical_) {
    if (yv != 0 || zv < z_min_) return {0.0, 0.0};
    return chi_.unit_value(y0);
  }
  if (yv < y_min_ || yv > y_max_ || zv < z_min_) return {0.0, 0.0};
  const int zclass = std::min(zv, z_cap_) - z_min_;
  return table_[index(yv, y0, zclass)];
}

KernelSpec KernelSpec::combined(cplx a, const KernelSpec& other, cplx b) const {
  if (canonical_ || other.canonical_) {
    return tabulate_canonical(chi_).combined(a, other.canonical_ ? tabulate_canonical(other.chi_) : other, b);
  }
  if (other.y_min_ != y_min_ || other.y_max_ != y_max_ || other.m_ != m_ ||
      other.z_min_ != z_min_ || other.z_cap_ != z_cap_ || other.chi_.p() != chi_.p()) {
    throw Error(ErrorCode::InvalidArgument, "kernel shapes differ");
  }
  std::vector<cplx> t(table_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = a * table_[i] + b * other.table_[i];
  return tabulated(chi_, y_min_, y_max_, m_, z_min_, z_cap_, std::move(t));
}

namespace {

// V^ for a tabulated kernel at xi = p^k w (w known mod p^{-k - y_min} at least),
// or xi = 0 when xi_zero.
cplx wedge_table(const KernelSpec& K, bool xi_zero, int k, u64 w, int zv, const DeformParams& s) {
  if (zv < K.z_min()) return {0.0, 0.0};
  const u64 p = K.chi().p();
  const int m = K.unit_level();
  const u64 R = checked_pow(p, m);
  const double qm = std::pow(static_cast<double>(p), -m);
  cplx total(0.0, 0.0);
  for (int yv = K.y_val_min(); yv <= K.y_val_max(); ++yv) {
    // psi(xi y) averages to zero over y0 + p^m o unless v(xi) + yv + m >= 0
    if (!xi_zero && k + yv + m < 0) continue;
    const int e = xi_zero ? 0 : k + yv;
    const ResidueRing rr(p, std::max(1, -e));
    cplx inner(0.0, 0.0);
    for (u64 y0 = 1; y0 < R; ++y0) {
      if (y0 % p == 0) continue;
      cplx v = K.value(yv, y0, zv);
      if (v == cplx(0.0, 0.0)) continue;
      if (e < 0) v *= psi_raw(e, rr.mul(w % rr.modulus(), y0 % rr.modulus()), p);
      inner += v;
    }
    total += q_pow(p, -static_cast<double>(yv) * (s.s1 - s.s2)) * qm * inner;
  }
  return total;
}

}  // namespace

cplx v_wedge(const KernelSpec& K, const ValuedUnit& xi, const ValuedUnit& z, const DeformParams& s) {
  require_same_prime(K, xi);
  require_same_prime(K, z);
  const int zv = z.valuation();
  if (K.is_canonical()) {
    if (zv < K.z_min() || xi.is_zero()) return {0.0, 0.0};
    return gauss_sum(K.chi(), xi);
  }
  if (xi.is_zero()) return wedge_table(K, true, 0, 0, zv, s);
  const int k = xi.valuation();
  const int need = std::max(0, -k - K.y_val_min());
  if (need > xi.precision()) throw Error(ErrorCode::InsufficientPrecision, "xi known too coarsely");
  return wedge_table(K, false, k, xi.unit(), zv, s);
}

cplx v_sharp(const KernelSpec& K, const ValuedUnit& x, const ValuedUnit& y, const DeformParams& s) {
  require_same_prime(K, x);
  require_same_prime(K, y);
  const u64 p = K.chi().p();
  const double q = static_cast<double>(p);
  if (K.is_canonical()) {
    if (y.is_zero() || y.valuation() != 0) return {0.0, 0.0};
    if (!x.is_zero() && x.valuation() < 0) return {0.0, 0.0};
    return q_pow(K.chi().conductor(), -2.0 * s.s2) * char_eval(K.chi(), y);
  }
  const int m = K.unit_level();
  const int k_lo = -K.y_val_max() - m;
  const bool x_zero = x.is_zero();
  const bool y_zero = y.is_zero();
  int k_hi;  // exclusive
  if (!x_zero) {
    k_hi = x.valuation() - K.z_min() + 1;
  } else {
    k_hi = std::max(k_lo, -K.y_val_min());
    if (!y_zero) k_hi = std::max(k_hi, -y.valuation());
  }
  cplx total(0.0, 0.0);
  for (int k = k_lo; k < k_hi; ++k) {
    int L = std::max(1, -k - K.y_val_min());
    int ey = 0;
    if (!y_zero) {
      ey = k + y.valuation();
      L = std::max(L, -ey);
      if (-ey > y.precision()) throw Error(ErrorCode::InsufficientPrecision, "y known too coarsely");
    }
    const ResidueRing ring(p, L);
    const int zv = x_zero ? ValuedUnit::kZeroValuation : x.valuation() - k;
    cplx part(0.0, 0.0);
    for (u64 w = 1; w < ring.modulus(); ++w) {
      if (w % p == 0) continue;
      cplx v = wedge_table(K, false, k, w, zv, s);
      if (v == cplx(0.0, 0.0)) continue;
      if (!y_zero && ey < 0) {
        const ResidueRing ry(p, -ey);
        v *= psi_raw(ey, ry.neg(ry.mul(w % ry.modulus(), y.unit() % ry.modulus())), p);
      }
      part += v;
    }
    total += std::pow(q, -k - L) * q_pow(p, 2.0 * s.s2 * static_cast<double>(k)) * part;
  }
  if (x_zero) {
    // |xi| small: V^(xi, 0) is constant and psi(-xi y) = 1
    const cplx c0 = wedge_table(K, true, 0, 0, ValuedUnit::kZeroValuation, s);
    const cplx r = q_pow(p, -1.0 + 2.0 * s.s2);
    if (std::abs(1.0 - r) < 1e-12) throw Error(ErrorCode::Divergent, "xi-integral diverges");
    total += (1.0 - 1.0 / q) * c0 * std::pow(r, k_hi) / (1.0 - r);
  }
  return total;
}

namespace {

cplx h_sharp_canonical(const KernelSpec& K, const ValuedUnit& t, const DeformParams& s, int L,
                       int d0, int d1) {
  const MultChar& chi = K.chi();
  const u64 p = chi.p();
  const int n = chi.cond_exp();
  const int M = n + std::max(d0, d1);
  const ResidueRing big(p, M);
  const u64 T = t.residue_mod(M);
  const u64 OMT = big.sub(1, T);
  const ResidueRing rn(p, n);
  const ResidueRing rl(p, L);
  const u64 RL = rl.modulus();

  auto cell_sum = [&](auto&& numerator, int j) {
    // sum over units x0 mod p^L of chi0(num / (x0 (1 - p^j x0))) for the near-0 or
    // near-1 class at depth j; numerator(x0) returns the residue mod p^n or p^n (skip)
    cplx acc(0.0, 0.0);
    const u64 pj = j >= n ? 0 : checked_pow(p, j) % rn.modulus();
    for (u64 x0 = 1; x0 < RL; ++x0) {
      if (x0 % p == 0) continue;
      const u64 num = numerator(x0);
      if (num % p == 0) continue;
      const u64 xr = x0 % rn.modulus();
      const u64 den = rn.mul(xr, rn.sub(1, rn.mul(pj, xr)));
      acc += chi.unit_value(rn.mul(num, residue_inv(den, rn)));
    }
    return acc;
  };

  cplx total(0.0, 0.0);
  // |x| = |1 - x| = 1
  {
    const u64 Tn = T % rn.modulus();
    cplx acc(0.0, 0.0);
    for (u64 x0 = 1; x0 < RL; ++x0) {
      if (x0 % p == 0 || x0 % p == 1) continue;
      const u64 xr = x0 % rn.modulus();
      const u64 num = rn.sub(xr, Tn);
      if (num % p == 0) continue;
      const u64 den = rn.mul(xr, rn.sub(1, xr));
      acc += chi.unit_value(rn.mul(num, residue_inv(den, rn)));
    }
    total += acc;
  }
  for (int j = 1; j <= d0; ++j) {
    const u64 tj = (T / checked_pow(p, j)) % rn.modulus();
    const cplx acc = cell_sum([&](u64 x0) { return rn.sub(x0 % rn.modulus(), tj); }, j);
    total += q_pow(p, -2.0 * s.s2 * static_cast<double>(j)) * acc;
  }
  for (int j = 1; j <= d1; ++j) {
    const u64 oj = (OMT / checked_pow(p, j)) % rn.modulus();
    const cplx acc = cell_sum([&](u64 x0) { return rn.sub(oj, x0 % rn.modulus()); }, j);
    total += q_pow(p, -2.0 * s.s1 * static_cast<double>(j)) * acc;
  }
  return q_pow(chi.conductor(), -2.0 * s.s2) * std::pow(static_cast<double>(p), -L) * total;
}

cplx h_sharp_generic(const KernelSpec& K, const ValuedUnit& t, const DeformParams& s, int L,
                     int d0, int d1) {
  const u64 p = K.chi().p();
  const ResidueRing ring = working_ring(p);
  const ResidueRing rl(p, L);
  const int D = std::max(d0, d1) + 1;
  const ValuedUnit one = ValuedUnit::one(ring);
  auto term = [&](const ValuedUnit& x) -> cplx {
    ValuedUnit num = ValuedUnit::zero(ring);
    try {
      num = x - t;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientPrecision) throw;
      return {0.0, 0.0};
    }
    const ValuedUnit den = x * (one - x);
    return v_sharp(K, x, num / den, s);
  };
  cplx total(0.0, 0.0);
  for (u64 x0 = 1; x0 < rl.modulus(); ++x0) {
    if (x0 % p == 0) continue;
    if (x0 % p != 1) total += term(ValuedUnit::make(0, x0, ring));
    for (int j = 1; j <= D; ++j) {
      const ValuedUnit a = ValuedUnit::make(j, x0, ring);
      total += q_pow(p, -2.0 * s.s2 * static_cast<double>(j)) * term(a);
      total += q_pow(p, -2.0 * s.s1 * static_cast<double>(j)) * term(one - a);
    }
  }
  return std::pow(static_cast<double>(p), -L) * total;
}

}  // namespace

cplx h_sharp(const KernelSpec& K, const ValuedUnit& t, const DeformParams& s, int level) {
  require_same_prime(K, t);
  if (t.is_zero()) throw Error(ErrorCode::SingularArgument, "h# at t = 0");
  const int need = std::max(K.chi().cond_exp(), K.is_canonical() ? 1 : K.unit_level());
  const int L = level == 0 ? need : level;
  if (L < need) throw Error(ErrorCode::LevelTooLow, "h# level below the kernel conductor");
  if (K.is_canonical() && t.valuation() < 0) return {0.0, 0.0};
  const ValuedUnit one = ValuedUnit::one(t.ring());
  int d1 = 0;
  try {
    d1 = std::max(0, (one - t).valuation());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientPrecision) throw;
    throw Error(ErrorCode::SingularArgument, "t = 1 at the available precision");
  }
  const int d0 = std::max(0, t.valuation());
  if (K.is_canonical()) return h_sharp_canonical(K, t, s, L, d0, d1);
  return h_sharp_generic(K, t, s, L, d0, d1);
}

}  // namespace padloc
