#include "padloc/degenerate.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"
#include "padloc/dualweight.hpp"
#include "padloc/integrate.hpp"
#include "padloc/parallel.hpp"

namespace padloc {

namespace {
cplx q_pow(u64 p, cplx e) { return std::exp(e * std::log(static_cast<double>(p))); }
}  // namespace

std::string to_string(DegenMode m) { return m == DegenMode::Brute ? "brute" : "closed"; }

DegenMode parse_degen_mode(const std::string& s) {
  if (s == "brute") return DegenMode::Brute;
  if (s == "closed") return DegenMode::Closed;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + s + "'");
}

cplx single_var_closed(u64 p, int n, int i) {
  const double q = static_cast<double>(p);
  if (i <= n - 2) return {0.0, 0.0};
  if (i == n - 1) return -1.0 / q;
  return 1.0 - 1.0 / q;
}

cplx single_var_brute(const MultChar& chi, int i) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "single_var needs ramified chi");
  if (i < 0) throw Error(ErrorCode::InvalidArgument, "U must be >= 1");
  const int n = chi.cond_exp();
  // u = p^{-i} u0; 1 - 1/u = 1 - p^i/u0
  AnnulusDomain dom{chi.p(), -i, AnnulusConstraint::DistanceToOneEqualsAbs, n, n};
  const ResidueRing rn(chi.p(), n);
  const u64 pi = i >= n ? 0 : checked_pow(chi.p(), i);
  return integrate_mult(
      [&](const ValuedUnit& u) {
        return chi.unit_value(rn.sub(1, rn.mul(pi, residue_inv(u.unit() % rn.modulus(), rn))));
      },
      dom);
}

cplx single_var(const MultChar& chi, int i) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "single_var needs ramified chi");
  return single_var_closed(chi.p(), chi.cond_exp(), i);
}

cplx d_uv(const MultChar& chi, int i, int j, DegenMode mode, unsigned degree) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "d_uv needs ramified chi");
  if (mode == DegenMode::Brute) return rho_uv_brute(chi, MultChar::trivial(chi.p()), i, j, 0, degree);
  const int n = chi.cond_exp();
  if (i == 0 && j == 0) return exhaustive_table_value(chi, 0, 0);
  // away from U = V = 1 the |uv - 1| constraint is automatic and the integral factors
  return single_var_closed(chi.p(), n, i) * std::conj(single_var_closed(chi.p(), n, j));
}

CConstants c_constants(const MultChar& chi, DegenMode mode, unsigned degree) {
  const int n = chi.cond_exp();
  const double q = static_cast<double>(chi.p());
  CConstants c;
  c.c0 = q * q * d_uv(chi, n - 1, n - 1, mode, degree);
  c.c1 = q * d_uv(chi, n - 1, n, mode, degree);
  c.c2 = d_uv(chi, n, n, mode, degree);
  return c;
}

cplx geometric_factor(u64 p, cplx s, cplx nu) {
  return 1.0 / ((1.0 - q_pow(p, -0.5 + s - nu)) * (1.0 - q_pow(p, -0.5 - s - nu)));
}

bool in_weightnorm_region(const DeformParams& s, cplx nu1, cplx nu2, double alpha) {
  if (std::abs(s.s1) > alpha || std::abs(s.s2) > alpha) return false;
  const bool a = std::abs(nu1 + 0.5) <= alpha && std::abs(nu2 - 0.5) <= alpha;
  const bool b = std::abs(nu1 - 0.5) <= alpha && std::abs(nu2 + 0.5) <= alpha;
  return a || b;
}

namespace {
double exponent_pole_distance(u64 p, cplx e) {
  const double period = 2.0 * std::numbers::pi / std::log(static_cast<double>(p));
  const double k = std::round(e.imag() / period);
  return std::abs(e - cplx(0.0, k * period));
}
}  // namespace

double degenerate_pole_distance(u64 p, const DeformParams& s, cplx nu1, cplx nu2) {
  return std::min({exponent_pole_distance(p, -0.5 + s.s1 - nu1),
                   exponent_pole_distance(p, -0.5 - s.s1 - nu1),
                   exponent_pole_distance(p, -0.5 + s.s2 - nu2),
                   exponent_pole_distance(p, -0.5 - s.s2 - nu2)});
}

cplx d_f_star_from_constants(u64 p, int n, cplx chi_minus_one, const CConstants& c,
                             const DeformParams& s, cplx nu1, cplx nu2) {
  const double q = static_cast<double>(p);
  const cplx Qs2 = q_pow(p, -2.0 * s.s2 * static_cast<double>(n));
  // cleared D_i * (1 - X)(1 - Y) and the clearing factor (1 - X)(1 - Y)
  auto piece = [&](cplx si, cplx nui, cplx& clear) {
    const cplx a = -0.5 + si - nui;
    const cplx b = -0.5 - si - nui;
    const cplx X = q_pow(p, a);
    const cplx Y = q_pow(p, b);
    clear = (1.0 - X) * (1.0 - Y);
    const cplx bracket = c.c0 / (q * q) / (X * Y) * clear +
                         c.c1 / q * ((1.0 - X) / X + (1.0 - Y) / Y) + c.c2;
    return Qs2 * q_pow(p, (a + b) * static_cast<double>(n)) * bracket;
  };
  cplx clear1, clear2;
  const cplx d1 = chi_minus_one * piece(s.s1, nu1, clear1);
  const cplx d2 = piece(s.s2, nu2, clear2);
  const cplx d3 = n == 1 ? Qs2 * c.c0 / (q * q) : cplx(0.0, 0.0);
  return d1 * clear2 + d2 * clear1 - d3 * clear1 * clear2;
}

DegenEval d_f_star(const MultChar& chi, const DeformParams& s, cplx nu1, cplx nu2, DegenMode mode,
                   bool check_region, unsigned degree) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "d_f_star needs ramified chi");
  if (check_region && !in_weightnorm_region(s, nu1, nu2, 0.1)) {
    throw Error(ErrorCode::RegimeMismatch, "(s, nu) outside the alpha = 0.1 region");
  }
  const u64 p = chi.p();
  const int n = chi.cond_exp();
  DegenEval out;
  out.nu1 = nu1;
  out.nu2 = nu2;
  out.s = s;
  out.c = c_constants(chi, mode, degree);
  const cplx sgn = chi.value_at_minus_one();
  if (mode == DegenMode::Closed) {
    out.D_star = d_f_star_from_constants(p, n, sgn, out.c, s, nu1, nu2);
    return out;
  }
  if (degenerate_pole_distance(p, s, nu1, nu2) < 0.05) {
    throw Error(ErrorCode::NearPole, "(s, nu) within 0.05 of an L-factor pole");
  }
  // brute D_{U,V} for exponents 0..n; exponent n carries the geometric tail
  std::vector<cplx> D(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      D[static_cast<std::size_t>(i * (n + 1) + j)] = d_uv(chi, i, j, DegenMode::Brute, degree);
  const cplx Qs2 = q_pow(p, -2.0 * s.s2 * static_cast<double>(n));
  auto sum_for = [&](cplx si, cplx nui, cplx& clear) {
    const cplx a = -0.5 + si - nui;
    const cplx b = -0.5 - si - nui;
    const cplx X = q_pow(p, a);
    const cplx Y = q_pow(p, b);
    clear = (1.0 - X) * (1.0 - Y);
    auto w = [&](cplx base, cplx e, int k) {
      const cplx v = q_pow(p, e * static_cast<double>(k));
      return k < n ? v : v / (1.0 - base);
    };
    cplx total(0.0, 0.0);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        total += w(X, a, i) * w(Y, b, j) * D[static_cast<std::size_t>(i * (n + 1) + j)];
    return Qs2 * total * clear;
  };
  cplx clear1, clear2;
  const cplx d1 = sgn * sum_for(s.s1, nu1, clear1);
  const cplx d2 = sum_for(s.s2, nu2, clear2);
  const cplx d3 = Qs2 * D[0];
  out.D_star = d1 * clear2 + d2 * clear1 - d3 * clear1 * clear2;
  return out;
}

cplx d_f_star_direct(const MultChar& chi, const DeformParams& s, cplx nu1, cplx nu2, int depth,
                     unsigned degree) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "d_f_star needs ramified chi");
  const u64 p = chi.p();
  const int n = chi.cond_exp();
  const KernelSpec K = KernelSpec::canonical(chi);
  const ResidueRing ring = working_ring(p);
  const ValuedUnit one = ValuedUnit::one(ring);
  const u64 R = checked_pow(p, n);
  const cplx e0 = 0.5 - s.s2 + nu2;  // |t| exponent
  const cplx e1 = 0.5 - s.s1 + nu1;  // |1 - t| exponent
  const std::size_t cells = static_cast<std::size_t>(2 * depth + 1);
  const cplx sum = parallel_sum(
      cells * static_cast<std::size_t>(R),
      [&](std::size_t b, std::size_t e) {
        cplx part(0.0, 0.0);
        for (std::size_t idx = b; idx < e; ++idx) {
          const int cell = static_cast<int>(idx / R);
          const u64 t0 = idx % R;
          if (t0 % p == 0) continue;
          if (cell == 0) {
            if (t0 % p == 1) continue;
            part += h_sharp(K, ValuedUnit::make(0, t0, ring), s);
            continue;
          }
          const int k = (cell + 1) / 2;
          if (cell % 2 == 1) {
            part += q_pow(p, -e0 * static_cast<double>(k)) * h_sharp(K, ValuedUnit::make(k, t0, ring), s);
          } else {
            part += q_pow(p, -e1 * static_cast<double>(k)) *
                    h_sharp(K, one - ValuedUnit::make(k, t0, ring), s);
          }
        }
        return part;
      },
      degree);
  const cplx D0 = sum * std::pow(static_cast<double>(p), -n);
  auto clear = [&](cplx si, cplx nui) {
    return (1.0 - q_pow(p, -0.5 + si - nui)) * (1.0 - q_pow(p, -0.5 - si - nui));
  };
  return D0 * clear(s.s1, nu1) * clear(s.s2, nu2);
}

WeightNorm n_alpha_weightnorm(const MultChar& chi, double alpha, int grid, unsigned degree) {
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "weight norm needs ramified chi");
  if (!(alpha > 0.0) || alpha > 0.1) throw Error(ErrorCode::InvalidArgument, "alpha must be in (0, 0.1]");
  if (grid < 1) throw Error(ErrorCode::InvalidArgument, "grid must be >= 1");
  WeightNorm out;
  out.alpha = alpha;
  out.grid = grid;
  out.c = c_constants(chi, DegenMode::Closed);
  const u64 p = chi.p();
  const int n = chi.cond_exp();
  const cplx sgn = chi.value_at_minus_one();
  std::vector<cplx> circle;
  for (int k = 0; k < grid; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.5) / grid;
    circle.push_back(alpha * cplx(std::cos(th), std::sin(th)));
  }
  const std::size_t per_sign = static_cast<std::size_t>(grid) * grid * grid * grid + 1;
  out.points = 2 * per_sign;
  std::vector<double> vals(out.points);
  parallel_for(
      out.points,
      [&](std::size_t idx) {
        const double sign = idx < per_sign ? 1.0 : -1.0;
        std::size_t r = idx % per_sign;
        DeformParams s;
        cplx d1(0.0, 0.0), d2(0.0, 0.0);
        if (r + 1 != per_sign) {
          const std::size_t g = static_cast<std::size_t>(grid);
          s.s1 = circle[r % g];
          r /= g;
          s.s2 = circle[r % g];
          r /= g;
          d1 = circle[r % g];
          r /= g;
          d2 = circle[r % g];
        }
        const cplx nu1 = -0.5 * sign + d1;
        const cplx nu2 = 0.5 * sign + d2;
        vals[idx] = std::abs(d_f_star_from_constants(p, n, sgn, out.c, s, nu1, nu2));
      },
      degree);
  for (double v : vals) out.sup_estimate = std::max(out.sup_estimate, v);
  return out;
}

std::string weightnorm_json(const MultChar& chi, const WeightNorm& w) {
  nlohmann::ordered_json j;
  j["schema"] = "padloc.dfstar.v1";
  j["chi"] = chi.spec();
  j["alpha"] = w.alpha;
  j["grid"] = w.grid;
  j["points"] = w.points;
  j["sup_estimate"] = w.sup_estimate;
  auto c = [](cplx z) { return nlohmann::ordered_json{{"re", z.real()}, {"im", z.imag()}}; };
  j["c0"] = c(w.c.c0);
  j["c1"] = c(w.c.c1);
  j["c2"] = c(w.c.c2);
  return j.dump();
}

}  // namespace padloc
