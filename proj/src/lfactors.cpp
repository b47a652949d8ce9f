#include "padloc/lfactors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <tuple>

namespace padloc {

namespace {
cplx q_pow(u64 p, cplx s) { return std::exp(s * std::log(static_cast<double>(p))); }
}  // namespace

cplx zeta_F(u64 p, cplx s) {
  const cplx d = 1.0 - q_pow(p, -s);
  if (std::abs(d) < 1e-14) throw Error(ErrorCode::Pole, "zeta_F at a pole");
  return 1.0 / d;
}

LocalLFactor LocalLFactor::of_character(const MultChar& chi) {
  if (chi.is_ramified()) return LocalLFactor(chi.p(), {});
  return LocalLFactor(chi.p(), {chi.uniformizer_value()});
}

LocalLFactor LocalLFactor::principal_series(const MultChar& mu1, const MultChar& mu2,
                                            const MultChar& chi) {
  return of_character(mu1 * chi) * of_character(mu2 * chi);
}

cplx LocalLFactor::inverse_at(cplx s) const {
  cplx out(1.0, 0.0);
  const cplx x = q_pow(p_, -s);
  for (const auto& u : roots_) out *= 1.0 - u * x;
  return out;
}

cplx LocalLFactor::operator()(cplx s) const {
  const cplx d = inverse_at(s);
  if (std::abs(d) < 1e-14) throw Error(ErrorCode::Pole, "L-factor at a pole");
  return 1.0 / d;
}

LocalLFactor LocalLFactor::operator*(const LocalLFactor& o) const {
  if (o.p_ != p_) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  std::vector<cplx> r = roots_;
  r.insert(r.end(), o.roots_.begin(), o.roots_.end());
  return LocalLFactor(p_, std::move(r));
}

namespace {

// G(chi, p^{-n}) by direct summation, cached per character.
cplx gauss_base(const MultChar& chi) {
  static std::mutex mutex;
  static std::map<std::tuple<u64, int, u64>, cplx> cache;
  const auto key = std::make_tuple(chi.p(), chi.cond_exp(), chi.rotation());
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const int n = chi.cond_exp();
  const u64 mod = chi.table_modulus();
  cplx sum(0.0, 0.0);
  for (u64 y = 1; y < mod; ++y) {
    if (y % chi.p() == 0) continue;
    sum += chi.unit_value(y) * psi_raw(-n, y, chi.p());
  }
  sum *= std::pow(static_cast<double>(chi.p()), -n);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, sum).first->second;
}

}  // namespace

cplx gauss_sum(const MultChar& chi, const ValuedUnit& xi) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "gauss_sum needs ramified chi");
  if (xi.p() != chi.p()) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  const int n = chi.cond_exp();
  if (xi.is_zero() || xi.valuation() != -n) return {0.0, 0.0};
  if (xi.precision() < n) throw Error(ErrorCode::InsufficientPrecision, "xi unit below conductor");
  // y -> y / xi0
  return std::conj(chi.unit_value(xi.unit())) * gauss_base(chi);
}

cplx epsilon_factor(const AddChar& psi, const MultChar& chi, cplx s) {
  if (psi.p() != chi.p()) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  const double q = static_cast<double>(chi.p());
  cplx eps(1.0, 0.0);
  if (chi.is_ramified()) {
    const int n = chi.cond_exp();
    const ResidueRing ring(chi.p(), n);
    const cplx half = std::pow(q, 0.5 * n) * std::pow(chi.uniformizer_value(), n) *
                      gauss_sum(chi.inverse(), ValuedUnit::make(-n, 1, ring));
    eps = half * std::exp((0.5 - s) * std::log(q) * static_cast<double>(n));
  }
  if (psi.shift()) {
    const ValuedUnit& b = *psi.shift();
    eps *= char_eval(chi, b.with_precision(std::min(b.precision(), std::max(chi.cond_exp(), 1)))) *
           std::exp(-(s - 0.5) * std::log(q) * static_cast<double>(b.valuation()));
  }
  return eps;
}

cplx gamma_gl1(const AddChar& psi, const MultChar& chi, cplx s) {
  if (pole_distance(chi, s) < 1e-3 || pole_distance(chi.inverse(), 1.0 - s) < 1e-3) {
    throw Error(ErrorCode::NearPole, "gamma factor within 1e-3 of an L-factor pole");
  }
  const auto L = LocalLFactor::of_character(chi);
  const auto Linv = LocalLFactor::of_character(chi.inverse());
  return epsilon_factor(psi, chi, s) * L.inverse_at(s) / Linv.inverse_at(1.0 - s);
}

cplx tate_zeta(const SchwartzBruhat& phi, const MultChar& chi, cplx s) {
  return mellin_with_tails(phi, chi, s);
}

double verify_tate(const SchwartzBruhat& phi, const MultChar& chi, cplx s) {
  const cplx lhs = tate_zeta(phi, chi, s);
  const cplx rhs = tate_zeta(fourier(phi), chi.inverse(), 1.0 - s);
  const cplx g = gamma_gl1(AddChar(chi.p()), chi, s);
  return std::abs(lhs - rhs / g) / (std::abs(lhs) + std::abs(rhs) + 1e-30);
}

double fourier_involution_error(const SchwartzBruhat& phi) {
  if (phi.terms().empty()) return 0.0;
  const SchwartzBruhat back = fourier(fourier(phi));
  const u64 p = phi.p();
  const int L = std::max(phi.constancy_level(), back.constancy_level());
  const int R = std::max({phi.support_radius(), back.support_radius(), -L});
  const u64 count = checked_pow(p, L + R);
  const ResidueRing ring = working_ring(p);
  double worst = 0.0;
  for (u64 j = 0; j < count; ++j) {
    ValuedUnit x = ValuedUnit::zero(ring);
    if (j != 0) {
      const ValuedUnit jj = ValuedUnit::from_integer(static_cast<i64>(j), ring);
      x = ValuedUnit::make(jj.valuation() - R, jj.unit(), ring);
    }
    worst = std::max(worst, std::abs(back(x) - phi(-x)));
  }
  return worst;
}

std::vector<TateCase> tate_suite(const std::vector<u64>& primes, int cases, u64 seed) {
  if (primes.empty()) throw Error(ErrorCode::InvalidArgument, "no primes for the Tate suite");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<TateCase> out;
  while (static_cast<int>(out.size()) < cases) {
    const u64 p = primes[rng() % primes.size()];
    const ResidueRing ring = working_ring(p);
    const u64 span = p * p * p;
    auto unit = [&] {
      u64 u;
      do u = 1 + rng() % (span - 1); while (u % p == 0);
      return u;
    };
    SchwartzBruhat phi(p);
    const int nt = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < nt; ++t) {
      SBTerm term;
      term.coeff = cplx(unif(rng) - 0.5, unif(rng) - 0.5);
      term.level = -1 + static_cast<int>(rng() % 4);
      if (rng() % 2) {
        const int cv = -1 + static_cast<int>(rng() % 3);
        if (cv < term.level) term.center = ValuedUnit::make(cv, unit(), ring);
      }
      if (rng() % 2) term.freq = ValuedUnit::make(-3 + static_cast<int>(rng() % 4), unit(), ring);
      phi.add(term);
    }
    const int n = static_cast<int>(rng() % 3);
    MultChar chi = MultChar::unramified(p, unif(rng));
    if (n > 0) {
      chi = MultChar::from_rotation(p, n, static_cast<i64>(rng() % phi_prime_power(p, n)));
      if (chi.cond_exp() != n) continue;
    }
    const cplx s(0.2 + 0.6 * unif(rng), 3.0 * unif(rng) - 1.5);
    if (pole_distance(chi, s) < 1e-3 || pole_distance(chi.inverse(), 1.0 - s) < 1e-3) continue;
    TateCase c{phi, chi, s};
    c.residual = verify_tate(phi, chi, s);
    c.involution_error = fourier_involution_error(phi);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace padloc
