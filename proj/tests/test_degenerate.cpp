#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "padloc/calibration.hpp"
#include "padloc/degenerate.hpp"

using namespace padloc;

namespace {
bool close(cplx a, cplx b, double tol = 1e-10) { return std::abs(a - b) < tol; }
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("single-variable values") {
  for (u64 p : {3, 5, 7}) {
    const double q = static_cast<double>(p);
    for (int n = 1; n <= 3; ++n) {
      for (int i = 0; i <= n + 1; ++i) {
        const cplx want = i <= n - 2 ? 0.0 : (i == n - 1 ? -1.0 / q : 1.0 - 1.0 / q);
        CHECK(close(single_var_closed(p, n, i), want, 1e-15));
        for (const auto& chi : characters_of_conductor(p, n)) {
          if (chi.rotation() % 5 != 1) continue;
          CHECK(close(single_var_brute(chi, i), want));
        }
      }
    }
  }
}

TEST_CASE("D_{U,V} closed equals brute on the full grid") {
  for (u64 p : {3, 5, 7}) {
    for (int n = 1; n <= 3; ++n) {
      const auto chis = characters_of_conductor(p, n);
      for (std::size_t a = 0; a < chis.size(); a += chis.size() / 2 + 1) {
        for (int i = 0; i <= n + 1; ++i) {
          for (int j = 0; j <= n + 1; ++j) {
            CHECK(close(d_uv(chis[a], i, j, DegenMode::Closed), d_uv(chis[a], i, j, DegenMode::Brute)));
          }
        }
      }
    }
  }
}

TEST_CASE("D_{U,V} examples") {
  const auto chi = MultChar::make(5, 3, 1);
  const double q = 5.0;
  CHECK(close(d_uv(chi, 2, 3, DegenMode::Closed), (-1.0 / q) * (1.0 - 1.0 / q)));
  CHECK(close(d_uv(chi, 2, 2, DegenMode::Closed), 1.0 / (q * q)));
  CHECK(close(d_uv(chi, 0, 3, DegenMode::Closed), 0.0));
  CHECK(close(d_uv(MultChar::make(5, 1, 2), 0, 0, DegenMode::Brute), 2.0 / (q * q)));
}

TEST_CASE("c-constants") {
  const double bound = default_thresholds().c_constant;
  for (u64 p : {3, 5, 7}) {
    for (int n = 1; n <= 3; ++n) {
      for (const auto& chi : {MultChar::make(p, n, 1), MultChar::make(p, n, p - 2)}) {
        const auto a = c_constants(chi, DegenMode::Closed);
        const auto b = c_constants(chi, DegenMode::Brute);
        CHECK(close(a.c0, b.c0));
        CHECK(close(a.c1, b.c1));
        CHECK(close(a.c2, b.c2));
        CHECK(std::max({std::abs(a.c0), std::abs(a.c1), std::abs(a.c2)}) <= bound);
      }
    }
  }
}

TEST_CASE("D_f* closed vs brute in the region") {
  const DeformParams s{{0.01, 0.005}, {-0.01, 0.01}, {0.0, 0.0}};
  const cplx nu1(-0.44, 0.05), nu2(0.45, -0.06);
  for (auto [p, n] : {std::pair<u64, int>{3, 2}, {5, 2}, {5, 3}}) {
    const auto chi = MultChar::make(p, n, 1);
    const auto a = d_f_star(chi, s, nu1, nu2, DegenMode::Closed);
    const auto b = d_f_star(chi, s, nu1, nu2, DegenMode::Brute);
    CHECK(rel(a.D_star, b.D_star) < 1e-6);
  }
  CHECK_THROWS_AS(d_f_star(MultChar::make(5, 2, 1), s, 0.3, 0.3, DegenMode::Closed), Error);
}

TEST_CASE("D_f* against the direct double integral where it converges") {
  const DeformParams s{{0.01, 0.005}, {-0.01, 0.01}, {0.0, 0.0}};
  const cplx nu1(1.5, 0.1), nu2(1.4, -0.2);
  for (auto [p, n] : {std::pair<u64, int>{5, 2}, {3, 2}}) {
    const auto chi = MultChar::make(p, n, 1);
    const cplx closed = d_f_star(chi, s, nu1, nu2, DegenMode::Closed, false).D_star;
    const double e6 = rel(d_f_star_direct(chi, s, nu1, nu2, 6), closed);
    const double e8 = rel(d_f_star_direct(chi, s, nu1, nu2, 8), closed);
    CHECK(e8 < e6);
    CHECK(e8 < 5e-3);
  }
}

TEST_CASE("D_f* satisfies Cauchy-Riemann numerically") {
  const auto chi = MultChar::make(5, 2, 1);
  const double h = 1e-5;
  auto f = [&](cplx s1, cplx nu1) {
    return d_f_star(chi, DeformParams{s1, {0.01, 0.0}, {0.0, 0.0}}, nu1, {0.48, 0.01}, DegenMode::Closed)
        .D_star;
  };
  for (cplx s1 : {cplx(0.01, 0.0), cplx(-0.02, 0.02)}) {
    const cplx nu1(-0.47, 0.01);
    const cplx dx = (f(s1 + h, nu1) - f(s1 - h, nu1)) / (2 * h);
    const cplx dy = (f(s1 + cplx(0, h), nu1) - f(s1 - cplx(0, h), nu1)) / (2 * h);
    CHECK(std::abs(dy - cplx(0, 1) * dx) < 1e-4);
    const cplx ex = (f(s1, nu1 + h) - f(s1, nu1 - h)) / (2 * h);
    const cplx ey = (f(s1, nu1 + cplx(0, h)) - f(s1, nu1 - cplx(0, h))) / (2 * h);
    CHECK(std::abs(ey - cplx(0, 1) * ex) < 1e-4);
  }
}

TEST_CASE("weight norm report") {
  const auto chi = MultChar::make(5, 2, 1);
  const auto w = n_alpha_weightnorm(chi, 0.05, 2);
  CHECK(w.points > 0);
  const auto th = default_thresholds();
  CHECK(w.sup_estimate <= th.dfstar_constant * std::pow(25.0, th.dfstar_exponent * 0.05));
  const auto j = nlohmann::json::parse(weightnorm_json(chi, w));
  for (const char* key : {"chi", "alpha", "grid", "sup_estimate", "c0", "c1", "c2"}) CHECK(j.contains(key));
  CHECK(in_weightnorm_region(DeformParams{}, cplx(-0.5, 0.0), cplx(0.5, 0.0), 0.05));
  CHECK_FALSE(in_weightnorm_region(DeformParams{}, cplx(0.0, 0.0), cplx(0.5, 0.0), 0.05));
}
