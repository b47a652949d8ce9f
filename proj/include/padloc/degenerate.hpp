#pragma once

#include <complex>
#include <string>

#include "padloc/characters.hpp"
#include "padloc/transforms.hpp"

namespace padloc {

enum class DegenMode { Brute, Closed };
std::string to_string(DegenMode m);
DegenMode parse_degen_mode(const std::string& s);

/// int_{|u| = |1-u| = U} chi(1 - 1/u) du/|u| for U = q^i: closed piecewise value.
cplx single_var_closed(u64 p, int n, int i);
/// Same integral by residue summation.
cplx single_var_brute(const MultChar& chi, int i);
cplx single_var(const MultChar& chi, int i);

/// D_{U,V}: the rho integral with omega trivial.
cplx d_uv(const MultChar& chi, int i, int j, DegenMode mode, unsigned degree = 1);

struct CConstants {
  cplx c0{0.0, 0.0};
  cplx c1{0.0, 0.0};
  cplx c2{0.0, 0.0};
};

/// D_{Q/q,Q/q} = c0/q^2, D_{Q/q,V} = c1/q (V >= Q), D_{U,V} = c2 (U, V >= Q).
CConstants c_constants(const MultChar& chi, DegenMode mode, unsigned degree = 1);

/// 1/((1 - q^{-1/2+s-nu})(1 - q^{-1/2-s-nu})).
cplx geometric_factor(u64 p, cplx s, cplx nu);

struct DegenEval {
  cplx nu1{0.0, 0.0};
  cplx nu2{0.0, 0.0};
  DeformParams s;
  CConstants c;
  cplx D_star{0.0, 0.0};
};

/// Is (s, nu) in the region |s_i| <= alpha, nu within alpha of
/// (-1/2, 1/2) or (1/2, -1/2)?
bool in_weightnorm_region(const DeformParams& s, cplx nu1, cplx nu2, double alpha);

/// Distance of (s, nu) from the poles of L(I(s1), 1/2 + nu1) L(I(s2), 1/2 + nu2).
double degenerate_pole_distance(u64 p, const DeformParams& s, cplx nu1, cplx nu2);

/// D_f*(nu) = (D_1 + D_2 - D_3) / (L(I(s1), 1/2 + nu1) L(I(s2), 1/2 + nu2)).
/// Closed mode uses the c-constants in the cleared closed form (entire in s, nu);
/// brute mode sums brute-force D_{U,V} with geometric tails and raises
/// NearPole within 0.05 of a pole. check_region enforces the alpha = 0.1 region.
DegenEval d_f_star(const MultChar& chi, const DeformParams& s, cplx nu1, cplx nu2, DegenMode mode,
                   bool check_region = true, unsigned degree = 1);

/// Closed evaluation from given constants (no checks).
cplx d_f_star_from_constants(u64 p, int n, cplx chi_minus_one, const CConstants& c,
                             const DeformParams& s, cplx nu1, cplx nu2);

/// The (x, t) double integral for D_0 truncated at depth, multiplied by the
/// four clearing factors. Converges for Re(1/2 + nu_i - s_i) > 0.
cplx d_f_star_direct(const MultChar& chi, const DeformParams& s, cplx nu1, cplx nu2, int depth,
                     unsigned degree = 1);

struct WeightNorm {
  double sup_estimate = 0.0;
  double alpha = 0.0;
  int grid = 0;
  std::size_t points = 0;
  CConstants c;
};

/// Grid estimate of sup |D_f*| over the alpha-region (both sign choices):
/// s1, s2 and the two nu offsets each run over `grid` points on the circle of
/// radius alpha, plus the centre. s3 does not enter.
WeightNorm n_alpha_weightnorm(const MultChar& chi, double alpha, int grid, unsigned degree = 1);

/// {chi, alpha, grid, points, sup_estimate, c0, c1, c2}.
std::string weightnorm_json(const MultChar& chi, const WeightNorm& w);

}  // namespace padloc
