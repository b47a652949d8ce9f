#include "padloc/characters.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace padloc {

cplx e_of(double x) {
  const double t = 2.0 * std::numbers::pi * (x - std::floor(x));
  return {std::cos(t), std::sin(t)};
}

namespace {

// e(a/b) with exact integer reduction first.
cplx e_frac(u64 a, u64 b) {
  a %= b;
  const double t = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(b);
  return {std::cos(t), std::sin(t)};
}

std::shared_ptr<const std::vector<cplx>> roots_of_unity(u64 order) {
  static std::mutex mutex;
  static std::map<u64, std::shared_ptr<const std::vector<cplx>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) {
    std::vector<cplx> t(static_cast<std::size_t>(order));
    for (u64 j = 0; j < order; ++j) t[static_cast<std::size_t>(j)] = e_frac(j, order);
    slot = std::make_shared<const std::vector<cplx>>(std::move(t));
  }
  return slot;
}

u64 mod_signed(i64 a, u64 m) {
  i64 r = a % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

}  // namespace

MultChar::MultChar(u64 p, int n, u64 k, double theta, double sigma)
    : p_(p), n_(n), k_(k), theta_(theta), sigma_(sigma), table_modulus_(checked_pow(p, n)) {
  if (n > 0) {
    dlog_ = UnitGroupTable::get(p, n);
    order_ = dlog_->order();
    roots_ = roots_of_unity(order_);
  } else {
    order_ = 1;
  }
}

MultChar MultChar::make(u64 p, int n, i64 k, double theta, double sigma) {
  if (p < 3 || !is_prime(p)) throw Error(ErrorCode::InvalidArgument, "p must be an odd prime");
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "conductor exponent must be >= 0");
  if (!std::isfinite(theta) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "theta and sigma must be finite");
  }
  if (n == 0) {
    if (k != 0) throw Error(ErrorCode::InvalidArgument, "unramified character needs k = 0");
    return MultChar(p, 0, 0, theta, sigma);
  }
  const u64 phi = phi_prime_power(p, n);
  const u64 kk = mod_signed(k, phi);
  // primitive iff nontrivial on 1 + p^{n-1} (n >= 2) or nontrivial (n = 1)
  if (n == 1 ? kk == 0 : kk % p == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "k = " + std::to_string(k) + " is not primitive at conductor exponent " +
                    std::to_string(n));
  }
  return MultChar(p, n, kk, theta, sigma);
}

MultChar MultChar::from_rotation(u64 p, int level, i64 rotation, double theta, double sigma) {
  if (level <= 0) return make(p, 0, 0, theta, sigma);
  const u64 phi_l = phi_prime_power(p, level);
  const u64 K = mod_signed(rotation, phi_l);
  if (K == 0) return make(p, 0, 0, theta, sigma);
  int vk = 0;
  for (u64 t = K; t % p == 0 && vk < level - 1; t /= p) ++vk;
  const int n = level - vk;
  if (n == level) return make(p, n, static_cast<i64>(K), theta, sigma);
  // chi(g_n) computed through g_n viewed at the higher level
  auto big = UnitGroupTable::get(p, level);
  const u64 d = static_cast<u64>(big->dlog(least_primitive_root(p, n)));
  const u64 ratio = checked_pow(p, level - n);
  const u64 Kd = static_cast<u64>((static_cast<unsigned __int128>(K) * d) % phi_l);
  // Kd is divisible by ratio since p^{level-n} | K
  return make(p, n, static_cast<i64>(Kd / ratio), theta, sigma);
}

cplx MultChar::uniformizer_value() const {
  return e_of(theta_) * std::pow(static_cast<double>(p_), -sigma_);
}

u64 MultChar::rotation_at(int level) const {
  if (level < n_) throw Error(ErrorCode::InvalidArgument, "rotation_at below conductor");
  if (n_ == 0) return 0;
  if (level == n_) return k_;
  auto small = UnitGroupTable::get(p_, n_);
  const u64 gN = least_primitive_root(p_, level);
  const u64 d = static_cast<u64>(small->dlog(gN % small->modulus()));
  const u64 phi_n = small->order();
  const u64 ratio = checked_pow(p_, level - n_);
  const u64 kd = static_cast<u64>((static_cast<unsigned __int128>(k_) * d) % phi_n);
  return kd * ratio;
}

MultChar MultChar::inverse() const {
  return MultChar(p_, n_, n_ == 0 ? 0 : (phi_prime_power(p_, n_) - k_) % phi_prime_power(p_, n_),
                  -theta_, -sigma_);
}

MultChar MultChar::pow(i64 e) const {
  if (n_ == 0) return make(p_, 0, 0, theta_ * static_cast<double>(e), sigma_ * static_cast<double>(e));
  const u64 phi = phi_prime_power(p_, n_);
  const u64 ee = mod_signed(e, phi);
  const u64 K = static_cast<u64>((static_cast<unsigned __int128>(k_) * ee) % phi);
  return from_rotation(p_, n_, static_cast<i64>(K), theta_ * static_cast<double>(e),
                       sigma_ * static_cast<double>(e));
}

MultChar MultChar::operator*(const MultChar& o) const {
  if (o.p_ != p_) throw Error(ErrorCode::InvalidArgument, "characters over different primes");
  const int level = std::max(n_, o.n_);
  if (level == 0) return make(p_, 0, 0, theta_ + o.theta_, sigma_ + o.sigma_);
  const u64 phi = phi_prime_power(p_, level);
  const u64 K = (rotation_at(level) + o.rotation_at(level)) % phi;
  return from_rotation(p_, level, static_cast<i64>(K), theta_ + o.theta_, sigma_ + o.sigma_);
}

std::string MultChar::spec() const {
  std::ostringstream os;
  os.precision(17);
  os << "p=" << p_ << ",n=" << n_ << ",k=" << k_ << ",theta=" << theta_ << ",sigma=" << sigma_;
  return os.str();
}

MultChar parse_char_spec(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "malformed character field '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    if (key != "p" && key != "n" && key != "k" && key != "theta" && key != "sigma") {
      throw Error(ErrorCode::InvalidArgument, "unknown character field '" + key + "'");
    }
    if (!kv.emplace(key, item.substr(eq + 1)).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate character field '" + key + "'");
    }
  }
  for (const char* req : {"p", "n", "k"}) {
    if (!kv.count(req)) {
      throw Error(ErrorCode::InvalidArgument, std::string("character spec missing '") + req + "'");
    }
  }
  auto to_int = [](const std::string& key, const std::string& s) -> i64 {
    std::size_t pos = 0;
    i64 v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
      throw Error(ErrorCode::InvalidArgument, "field '" + key + "' is not an integer: " + s);
    }
    return v;
  };
  auto to_double = [](const std::string& key, const std::string& s) -> double {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
      throw Error(ErrorCode::InvalidArgument, "field '" + key + "' is not a number: " + s);
    }
    return v;
  };
  const i64 p = to_int("p", kv["p"]);
  const i64 n = to_int("n", kv["n"]);
  if (p < 3) throw Error(ErrorCode::InvalidArgument, "p must be an odd prime");
  const double theta = kv.count("theta") ? to_double("theta", kv["theta"]) : 0.0;
  const double sigma = kv.count("sigma") ? to_double("sigma", kv["sigma"]) : 0.0;
  return MultChar::make(static_cast<u64>(p), static_cast<int>(n), to_int("k", kv["k"]), theta, sigma);
}

cplx char_eval(const MultChar& chi, const ValuedUnit& x) {
  if (x.is_zero()) throw Error(ErrorCode::InvalidArgument, "character evaluated at zero");
  if (x.p() != chi.p()) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  if (x.precision() < chi.cond_exp()) {
    throw Error(ErrorCode::InsufficientPrecision, "unit known below the conductor exponent");
  }
  const int v = x.valuation();
  cplx out = chi.unit_value(x.unit());
  if (v != 0) {
    out *= e_of(static_cast<double>(v) * chi.theta()) *
           std::pow(static_cast<double>(chi.p()), -static_cast<double>(v) * chi.sigma());
  }
  return out;
}

u64 conductor(const MultChar& chi) { return chi.conductor(); }

std::vector<MultChar> characters_of_conductor(u64 p, int n) {
  std::vector<MultChar> out;
  if (n == 0) {
    out.push_back(MultChar::trivial(p));
    return out;
  }
  const u64 phi = phi_prime_power(p, n);
  for (u64 k = 1; k < phi; ++k) {
    if (n >= 2 && k % p == 0) continue;
    out.push_back(MultChar::make(p, n, static_cast<i64>(k)));
  }
  return out;
}

std::vector<MultChar> enumerate_characters(u64 p, int max_exp) {
  std::vector<MultChar> out;
  for (int n = 0; n <= max_exp; ++n) {
    auto c = characters_of_conductor(p, n);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

cplx psi_raw(int v, u64 unit, u64 p) {
  if (v >= 0) return {1.0, 0.0};
  const u64 mod = checked_pow(p, -v);
  return e_frac(unit % mod, mod);
}

cplx psi_standard(const ValuedUnit& x) {
  if (x.is_zero() || x.valuation() >= 0) return {1.0, 0.0};
  if (x.absolute_precision() < 0) {
    throw Error(ErrorCode::InsufficientPrecision, "psi needs the fractional part of its argument");
  }
  return psi_raw(x.valuation(), x.unit(), x.p());
}

AddChar::AddChar(u64 p, ValuedUnit shift) : p_(p), shift_(std::move(shift)) {
  if (shift_->is_zero()) throw Error(ErrorCode::InvalidArgument, "additive character shift is zero");
  if (shift_->p() != p) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
}

cplx AddChar::operator()(const ValuedUnit& x) const {
  if (!shift_) return psi_standard(x);
  return psi_standard(*shift_ * x);
}

AddChar AddChar::conjugate() const {
  if (!shift_) {
    // -1 is exact: carry it at the largest precision the tables use
    int m = 1;
    for (u64 mod = p_; mod <= (u64{1} << 36) / p_; mod *= p_) ++m;
    const ResidueRing r(p_, m);
    return AddChar(p_, ValuedUnit::make(0, r.modulus() - 1, r));
  }
  return AddChar(p_, -*shift_);
}

// ---------------------------------------------------------------------------

namespace {

// c with chi(exp(p^a)) = e(c / p^{n-a}); c is a unit mod p^{n-a} when chi is
// primitive of exponent n > a >= 1.
u64 exp_coefficient(const MultChar& chi, int a) {
  const int n = chi.cond_exp();
  const u64 p = chi.p();
  auto g = UnitGroupTable::get(p, n);
  const ResidueRing ring(p, n);
  const u64 e0 = exp_level(ValuedUnit::make(a, 1, ring), n).unit();
  const u64 d = static_cast<u64>(g->dlog(e0));
  const u64 ord = checked_pow(p, n - a);
  const u64 step = g->order() / ord;
  const u64 dd = d / step;  // exact: e0 lies in the subgroup of order p^{n-a}
  return static_cast<u64>((static_cast<unsigned __int128>(chi.rotation()) * dd) % ord);
}

}  // namespace

u64 exp_coefficient_for(const MultChar& chi, int a) { return exp_coefficient(chi, a); }

XiClass xi_class(const MultChar& chi, const MultChar& omega) {
  if (chi.p() != omega.p()) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  if (chi.cond_exp() != omega.cond_exp()) {
    throw Error(ErrorCode::ConductorMismatch, "xi needs C(omega) = C(chi)");
  }
  const int n = chi.cond_exp();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "xi needs conductor exponent >= 2");
  const u64 p = chi.p();
  XiClass out;
  out.p = p;
  out.alpha = n / 2;
  out.alpha_prime = n - n / 2;
  const ResidueRing r(p, out.alpha_prime);
  const u64 cc = exp_coefficient(chi, out.alpha);
  const u64 cw = exp_coefficient(omega, out.alpha);
  out.xi = r.mul(cw, residue_inv(cc, r));
  out.small_prime_caveat = (p == 3);
  const ResidueRing ra(p, out.alpha);
  const u64 xa = out.xi % ra.modulus();
  out.n_alpha = static_cast<int>(
      quadratic_roots(static_cast<i64>(ra.mul(xa, xa)), -1, -1, p, out.alpha).size());
  const ResidueRing r1(p, 1);
  const u64 x1 = out.xi % p;
  out.atypical = p >= 5 && p % 4 == 1 && n >= 3 && r1.add(1, r1.mul(4, r1.mul(x1, x1))) == 0;
  return out;
}

AtypicalResult is_atypical(const MultChar& chi, const MultChar& omega) {
  AtypicalResult res;
  if (chi.p() != omega.p() || chi.cond_exp() != omega.cond_exp() || chi.cond_exp() < 2) {
    return res;
  }
  res.xi = xi_class(chi, omega);
  res.atypical = res.xi->atypical;
  return res;
}

}  // namespace padloc
