#include "padloc/dualweight.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "padloc/integrate.hpp"
#include "padloc/parallel.hpp"
#include "padloc/transforms.hpp"

namespace padloc {

cplx exhaustive_table_value(const MultChar& chi, int i, int j) {
  const int n = chi.cond_exp();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "table needs conductor exponent >= 1");
  const double q = static_cast<double>(chi.p());
  if (std::min(i, j) <= n - 2) return {0.0, 0.0};
  if (i == n - 1 && j == n - 1) {
    // n = 1: product of the one-variable values minus the uv = 1 diagonal, -chi(-1)/q^2
    if (n == 1) return (1.0 + chi.value_at_minus_one()) / (q * q);
    return 1.0 / (q * q);
  }
  if (i == n - 1 || j == n - 1) return (-1.0 / q) * (1.0 - 1.0 / q);
  return (1.0 - 1.0 / q) * (1.0 - 1.0 / q);
}

int rho_required_level(const MultChar& chi, const MultChar& omega) {
  return std::max({chi.cond_exp(), omega.cond_exp(), 1});
}

namespace {

void check_pair(const MultChar& chi, const MultChar& omega, int i, int j) {
  if (chi.p() != omega.p()) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  if (i < 0 || j < 0) throw Error(ErrorCode::InvalidArgument, "U, V must be >= 1");
}

// chi_0(1 - p^i / u0) for u0 a unit residue.
struct SideTable {
  std::vector<cplx> by_class;  // summed over u0 in each class mod p^g
};

SideTable side_sums(const MultChar& chi, int i, int m, int g, bool conj, bool exclude_one) {
  const u64 p = chi.p();
  const ResidueRing rm(p, m);
  const int n = chi.cond_exp();
  const u64 G = checked_pow(p, g);
  SideTable out;
  out.by_class.assign(static_cast<std::size_t>(G), cplx(0.0, 0.0));
  const ResidueRing rn(p, std::max(n, 1));
  const u64 pi = i >= rn.exponent() ? 0 : checked_pow(p, i);
  for (u64 u0 = 1; u0 < rm.modulus(); ++u0) {
    if (u0 % p == 0) continue;
    if (exclude_one && u0 % p == 1) continue;
    cplx a(1.0, 0.0);
    if (n > 0 && pi != 0) {
      const u64 ur = u0 % rn.modulus();
      a = chi.unit_value(rn.sub(1, rn.mul(pi, residue_inv(ur, rn))));
      if (conj) a = std::conj(a);
    }
    out.by_class[static_cast<std::size_t>(u0 % G)] += a;
  }
  return out;
}

}  // namespace

double rho_term_count(const MultChar& chi, const MultChar& omega, int i, int j, int level) {
  const int m = level == 0 ? rho_required_level(chi, omega) : level;
  const double q = static_cast<double>(chi.p());
  const double units = std::pow(q, m) * (1.0 - 1.0 / q);
  const double per = std::pow(q, m - 1);
  const double nu = i == 0 ? units - per : units;
  const double nv = j == 0 ? units - per : units;
  (void)omega;
  return nu * nv;
}

cplx rho_uv_brute(const MultChar& chi, const MultChar& omega, int i, int j, int level,
                  unsigned degree) {
  check_pair(chi, omega, i, j);
  const int need = rho_required_level(chi, omega);
  const int m = level == 0 ? need : level;
  if (m < need) {
    throw Error(ErrorCode::LevelTooLow, "rho level " + std::to_string(m) + " below required " +
                                            std::to_string(need));
  }
  const u64 p = chi.p();
  const int g = std::max(omega.cond_exp(), 1);
  const SideTable A = side_sums(chi, i, m, g, false, i == 0);
  const SideTable B = side_sums(chi, j, m, g, true, j == 0);
  const ResidueRing rg(p, g);
  const u64 c = i + j >= g ? 0 : checked_pow(p, i + j);
  const u64 G = rg.modulus();
  const cplx sum = parallel_sum(
      static_cast<std::size_t>(G),
      [&](std::size_t b, std::size_t e) {
        cplx part(0.0, 0.0);
        for (std::size_t cu = b; cu < e; ++cu) {
          const cplx a = A.by_class[cu];
          if (a == cplx(0.0, 0.0)) continue;
          cplx row(0.0, 0.0);
          for (u64 cv = 1; cv < G; ++cv) {
            const cplx bv = B.by_class[static_cast<std::size_t>(cv)];
            if (bv == cplx(0.0, 0.0)) continue;
            const u64 w = rg.sub(rg.mul(cu, cv), c);
            if (w % p == 0) continue;  // |uv - 1| < UV (only possible when i = j = 0)
            row += bv * omega.unit_value(w);
          }
          part += a * row;
        }
        return part;
      },
      degree);
  const double q = static_cast<double>(p);
  return sum * std::pow(q, -2.0 * m) * std::pow(omega.uniformizer_value(), -(i + j));
}

bool in_stationary_regime(const MultChar& chi, const MultChar& omega, int i, int j) {
  const int n = chi.cond_exp();
  const int nw = omega.cond_exp();
  if (n < 1 || nw < 1) return false;
  if (i != j || j >= n || nw != n - j) return false;
  return n - i >= 2;
}

namespace {

// f(u, v) with u = p^{-i} U0, v = p^{-i} V0, U0, V0 residues mod p^n.
struct Integrand {
  const MultChar& chi;
  const MultChar& omega;
  int i;
  ResidueRing rn;
  ResidueRing rw;
  u64 pi;
  u64 p2i_w;
  cplx phase;

  Integrand(const MultChar& c, const MultChar& w, int i_)
      : chi(c),
        omega(w),
        i(i_),
        rn(c.p(), c.cond_exp()),
        rw(c.p(), std::max(w.cond_exp(), 1)),
        pi(i_ >= c.cond_exp() ? 0 : checked_pow(c.p(), i_)),
        p2i_w(2 * i_ >= rw.exponent() ? 0 : checked_pow(c.p(), 2 * i_)),
        phase(std::pow(w.uniformizer_value(), -2 * i_)) {}

  cplx operator()(u64 U0, u64 V0) const {
    const u64 a = rn.sub(1, rn.mul(pi, residue_inv(U0 % rn.modulus(), rn)));
    const u64 b = rn.sub(1, rn.mul(pi, residue_inv(V0 % rn.modulus(), rn)));
    const u64 w = rw.sub(rw.mul(U0 % rw.modulus(), V0 % rw.modulus()), p2i_w);
    return chi.unit_value(a) * std::conj(chi.unit_value(b)) * omega.unit_value(w) * phase;
  }
};

cplx stationary_phase(const MultChar& chi, const MultChar& omega, int i) {
  const u64 p = chi.p();
  const int n = chi.cond_exp();
  const int aA = (n - i) / 2;
  const int aB = (n - i) - aA;
  // on u(1 + p^aB x), v(1 + p^aB y) the integrand picks up additive phases:
  // chi(1 + p^{i+aB} z) = e(cc z / p^aA), omega(1 + p^aB z) = e(cw z / p^aA)
  const ResidueRing rA(p, aA);
  const u64 cc = exp_coefficient_for(chi, i + aB) % rA.modulus();
  const u64 cw = exp_coefficient_for(omega, aB) % rA.modulus();
  const u64 xi = rA.mul(cw, residue_inv(cc, rA));
  const u64 piA = i >= aA ? 0 : checked_pow(p, i);
  const u64 p2iA = 2 * i >= aA ? 0 : checked_pow(p, 2 * i);
  // both fibre sums survive iff v = 2p^i - u and w = p^i - u solves xi w^2 - w - xi p^{2i} = 0
  const auto roots = quadratic_roots(static_cast<i64>(xi), -1,
                                     -static_cast<i64>(rA.mul(xi, p2iA)), p, aA);

  const Integrand f(chi, omega, i);
  const u64 PA = rA.modulus();
  const u64 lift = checked_pow(p, aB - aA);
  const double q = static_cast<double>(p);
  cplx total(0.0, 0.0);
  for (u64 w : roots) {
    if (w % p == 0) continue;
    const u64 u0 = rA.sub(piA, w);
    const u64 v0 = rA.add(piA, w);
    if (i == 0 && (u0 % p == 1 || v0 % p == 1 || (u0 * v0) % p == 1)) continue;
    // residual sum over the lifts mod p^aB (a Gauss sum mod p when B = qA)
    for (u64 a = 0; a < lift; ++a) {
      for (u64 b = 0; b < lift; ++b) total += f(u0 + a * PA, v0 + b * PA);
    }
  }
  const double count = static_cast<double>(roots.size() * lift * lift);
  if (std::abs(total) < 1e-11 * count) return {0.0, 0.0};
  return total * std::pow(q, -2.0 * aB);
}

}  // namespace

cplx rho_uv_fast(const MultChar& chi, const MultChar& omega, int i, int j) {
  check_pair(chi, omega, i, j);
  const int n = chi.cond_exp();
  if (n < 1) throw Error(ErrorCode::RegimeMismatch, "fast evaluator needs ramified chi");
  if (!omega.is_ramified()) {
    return exhaustive_table_value(chi, i, j) * std::pow(omega.uniformizer_value(), -(i + j));
  }
  if (i > j) return rho_uv_fast(chi.inverse(), omega, j, i);
  const int nw = omega.cond_exp();
  if (j >= n) return {0.0, 0.0};
  if (nw > n - j) return {0.0, 0.0};
  if (i != j || nw != n - j) return {0.0, 0.0};
  if (n - i < 2) throw Error(ErrorCode::RegimeMismatch, "U = V = Q/q with C(omega) = q");
  if (chi.p() < 5) throw Error(ErrorCode::RegimeMismatch, "coset averaging needs p >= 5");
  return stationary_phase(chi, omega, i);
}

std::string to_string(RhoMode m) {
  switch (m) {
    case RhoMode::Brute: return "brute";
    case RhoMode::Fast: return "fast";
    case RhoMode::Auto: return "auto";
  }
  return "auto";
}

RhoMode parse_rho_mode(const std::string& s) {
  if (s == "brute") return RhoMode::Brute;
  if (s == "fast") return RhoMode::Fast;
  if (s == "auto") return RhoMode::Auto;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + s + "'");
}

cplx rho_uv(const MultChar& chi, const MultChar& omega, int i, int j, RhoMode mode,
            unsigned degree) {
  switch (mode) {
    case RhoMode::Brute: return rho_uv_brute(chi, omega, i, j, 0, degree);
    case RhoMode::Fast: return rho_uv_fast(chi, omega, i, j);
    case RhoMode::Auto:
      try {
        return rho_uv_fast(chi, omega, i, j);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RegimeMismatch) throw;
        return rho_uv_brute(chi, omega, i, j, 0, degree);
      }
  }
  return {0.0, 0.0};
}

std::string to_string(BoundClass c) {
  switch (c) {
    case BoundClass::UnramifiedO1: return "unramified-O(1)";
    case BoundClass::Zero: return "zero";
    case BoundClass::GenericO1Q: return "generic-O(1/Q)";
    case BoundClass::Atypical: return "atypical";
  }
  return "generic-O(1/Q)";
}

DualWeightReport dual_weight(const MultChar& chi, const MultChar& omega,
                             const DualWeightOptions& opts) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "dual weight needs ramified chi");
  if (chi.p() != omega.p()) throw Error(ErrorCode::InvalidArgument, "prime mismatch");
  if (opts.extra_exponents < 0) throw Error(ErrorCode::InvalidArgument, "negative extension");
  const u64 p = chi.p();
  const double q = static_cast<double>(p);
  const int n = chi.cond_exp();
  const int N = n + 1;
  const int top = N + opts.extra_exponents;
  const MultChar omega_inv = omega.inverse();
  const bool unram = !omega.is_ramified();

  DualWeightReport rep(chi, omega);
  rep.mode = opts.mode;
  rep.max_exponent = N;

  struct Job {
    int i, j;
    bool inv;
  };
  std::vector<Job> jobs;
  for (int inv = 0; inv < 2; ++inv)
    for (int i = 0; i <= top; ++i)
      for (int j = 0; j <= top; ++j) jobs.push_back({i, j, inv == 1});
  std::vector<cplx> values(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t k) {
        const Job& jb = jobs[k];
        values[k] = rho_uv(chi, jb.inv ? omega_inv : omega, jb.i, jb.j, opts.mode, 1);
      },
      opts.degree);

  // weight of exponent e: q^{-e/2}, with the geometric tail folded into e = N
  auto weight = [&](int e, bool inv) -> cplx {
    const cplx base = std::pow(q, -0.5 * e);
    if (!unram || e < N) return base;
    const cplx wp = inv ? omega_inv.uniformizer_value() : omega.uniformizer_value();
    const cplx r = std::pow(q, -0.5) / wp;
    return base / (1.0 - r);
  };
  const cplx sign = chi.value_at_minus_one();
  cplx value(0.0, 0.0);
  double terms = 0.0;
  double tol_terms = 0.0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const Job& jb = jobs[k];
    const double tc = rho_term_count(chi, jb.inv ? omega_inv : omega, jb.i, jb.j);
    if (jb.i > N || jb.j > N) {
      if (!unram && std::abs(values[k]) > 1e-9 * tc) rep.extension_vanishes = false;
      tol_terms += tc;
      continue;
    }
    rep.pieces.push_back({jb.i, jb.j, jb.inv, values[k]});
    terms += tc;
    const cplx w = weight(jb.i, jb.inv) * weight(jb.j, jb.inv);
    value += (jb.inv ? sign : cplx(1.0, 0.0)) * w * values[k];
    rep.max_ratio =
        std::max(rep.max_ratio, std::abs(values[k]) * std::pow(q, n - 0.5 * (jb.i + jb.j)));
  }
  // rho' : the U = V = 1 piece of rho(omega)
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (jobs[k].i == 0 && jobs[k].j == 0 && !jobs[k].inv) value -= values[k];
  }
  rep.value = value;
  rep.term_count = terms + tol_terms;

  const auto at = is_atypical(chi, omega);
  if (at.xi) rep.atypical = at.xi;
  if (unram) {
    rep.bound_class = BoundClass::UnramifiedO1;
  } else if (omega.cond_exp() > n) {
    rep.bound_class = BoundClass::Zero;
  } else if (at.atypical) {
    rep.bound_class = BoundClass::Atypical;
  } else {
    rep.bound_class = BoundClass::GenericO1Q;
  }
  return rep;
}

cplx dual_weight_direct(const MultChar& chi, const MultChar& omega, int depth, int level,
                        unsigned degree) {
  if (!chi.is_ramified() || !omega.is_ramified()) {
    throw Error(ErrorCode::InvalidArgument, "direct evaluation needs ramified chi and omega");
  }
  const u64 p = chi.p();
  const double q = static_cast<double>(p);
  const int need = std::max(chi.cond_exp(), omega.cond_exp());
  const int L = level == 0 ? need : level;
  if (L < need) throw Error(ErrorCode::LevelTooLow, "direct level below conductors");
  const KernelSpec K = KernelSpec::canonical(chi);
  const ResidueRing ring = working_ring(p);
  const ResidueRing rl(p, L);
  const ResidueRing rw(p, omega.cond_exp());
  const cplx wp = omega.uniformizer_value();
  const ValuedUnit one = ValuedUnit::one(ring);
  const u64 R = rl.modulus();
  // index = cell * R + t0; cell 0 generic, 2k-1 near 0, 2k near 1
  const std::size_t cells = static_cast<std::size_t>(2 * depth + 1);
  const cplx sum = parallel_sum(
      cells * static_cast<std::size_t>(R),
      [&](std::size_t b, std::size_t e) {
        cplx part(0.0, 0.0);
        for (std::size_t idx = b; idx < e; ++idx) {
          const int cell = static_cast<int>(idx / R);
          const u64 t0 = idx % R;
          if (t0 % p == 0) continue;
          const u64 tw = t0 % rw.modulus();
          if (cell == 0) {
            if (t0 % p == 1) continue;
            const cplx h = h_sharp(K, ValuedUnit::make(0, t0, ring));
            const u64 arg = rw.mul(rw.sub(1, tw), residue_inv(tw, rw));
            part += h * omega.unit_value(arg);
            continue;
          }
          const int k = (cell + 1) / 2;
          const u64 pk = k >= rw.exponent() ? 0 : checked_pow(p, k);
          const u64 s = rw.sub(1, rw.mul(pk, tw));  // 1 - p^k t0
          const cplx mass = std::pow(q, -0.5 * k);
          if (cell % 2 == 1) {
            const cplx h = h_sharp(K, ValuedUnit::make(k, t0, ring));
            part += mass * h * std::pow(wp, -k) * omega.unit_value(rw.mul(s, residue_inv(tw, rw)));
          } else {
            const cplx h = h_sharp(K, one - ValuedUnit::make(k, t0, ring));
            part += mass * h * std::pow(wp, k) * omega.unit_value(rw.mul(tw, residue_inv(s, rw)));
          }
        }
        return part;
      },
      degree);
  return sum * std::pow(q, -L);
}

Classification classify_bounds(const DualWeightReport& r, const Thresholds& th) {
  Classification c;
  const double q = static_cast<double>(r.chi.p());
  const double Q = static_cast<double>(r.chi.conductor());
  const double absval = std::abs(r.value);
  switch (r.bound_class) {
    case BoundClass::Zero:
      c.measured = absval;
      c.bound = 1e-9 * r.term_count;
      c.detail = "|h~| vs 1e-9 * terms";
      break;
    case BoundClass::UnramifiedO1:
      c.measured = absval;
      c.bound = th.unramified_value;
      c.detail = "|h~| vs unramified constant";
      break;
    case BoundClass::GenericO1Q:
      c.measured = std::max(absval * Q / th.generic_value, r.max_ratio / th.generic_ratio);
      c.bound = 1.0;
      c.detail = "max(|h~| Q / generic_value, max_ratio / generic_ratio)";
      break;
    case BoundClass::Atypical: {
      const XiClass& xi = *r.atypical;
      const bool odd = r.chi.cond_exp() % 2 == 1;
      const double scale = th.atypical_constant * xi.n_alpha * (odd ? std::sqrt(q) : 1.0);
      c.measured = std::max(absval * Q, r.max_ratio);
      c.bound = scale + 1e-9 * r.term_count;
      c.detail = "max(|h~| Q, max_ratio) vs C * N_alpha * (q^{1/2} if Q = q^{2a+1})";
      break;
    }
  }
  c.pass = c.measured <= c.bound;
  return c;
}

std::string report_json(const DualWeightReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "padloc.dual_weight.v1";
  j["chi"] = r.chi.spec();
  j["omega"] = r.omega.spec();
  j["value_re"] = r.value.real();
  j["value_im"] = r.value.imag();
  j["mode"] = to_string(r.mode);
  j["max_exponent"] = r.max_exponent;
  j["term_count"] = r.term_count;
  nlohmann::ordered_json pieces = nlohmann::ordered_json::array();
  for (const auto& pc : r.pieces) {
    pieces.push_back({{"U_exp", pc.i},
                      {"V_exp", pc.j},
                      {"omega_inverse", pc.inverse},
                      {"re", pc.value.real()},
                      {"im", pc.value.imag()}});
  }
  j["pieces"] = pieces;
  if (r.atypical) {
    j["atypical"] = {{"xi", r.atypical->xi},
                     {"alpha", r.atypical->alpha},
                     {"alpha_prime", r.atypical->alpha_prime},
                     {"n_alpha", r.atypical->n_alpha},
                     {"flag", r.atypical->atypical},
                     {"small_prime_caveat", r.atypical->small_prime_caveat}};
  } else {
    j["atypical"] = nullptr;
  }
  j["bound_class"] = to_string(r.bound_class);
  j["max_ratio"] = r.max_ratio;
  return j.dump();
}

}  // namespace padloc
