#include <cmath>
#include <random>

#include "doctest.h"
#include "padloc/integrate.hpp"
#include "padloc/transforms.hpp"

using namespace padloc;

namespace {

bool close(cplx a, cplx b, double tol = 1e-10) { return std::abs(a - b) < tol; }

KernelSpec random_kernel(const MultChar& chi, u64 seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int m = chi.cond_exp();
  const std::size_t size = 2 * 2 * static_cast<std::size_t>(checked_pow(chi.p(), m));
  std::vector<cplx> t(size);
  for (auto& v : t) v = {U(rng), U(rng)};
  return KernelSpec::tabulated(chi, -1, 0, m, m, m + 1, std::move(t));
}

// direct y-sum for V^ at xi = p^k w, fine enough that psi is resolved
cplx wedge_oracle(const KernelSpec& K, int k, u64 w, int zv, const DeformParams& s) {
  const u64 p = K.chi().p();
  cplx total(0.0);
  for (int yv = K.y_val_min(); yv <= K.y_val_max(); ++yv) {
    const int Lf = std::max(K.unit_level(), -(k + yv)) + 1;
    const u64 M = checked_pow(p, Lf);
    cplx inner(0.0);
    for (u64 y0 = 1; y0 < M; ++y0) {
      if (y0 % p == 0) continue;
      cplx v = K.value(yv, y0 % checked_pow(p, K.unit_level()), zv);
      const int e = k + yv;
      if (e < 0) {
        const u64 D = checked_pow(p, -e);
        v *= e_of(static_cast<double>((w % D) * (y0 % D) % D) / static_cast<double>(D));
      }
      inner += v;
    }
    total += std::exp(-static_cast<double>(yv) * (s.s1 - s.s2) * std::log(double(p))) * inner /
             static_cast<double>(M);
  }
  return total;
}

}  // namespace

TEST_CASE("canonical kernel: V^ support") {
  const auto chi = MultChar::make(5, 2, 3);
  const auto K = KernelSpec::canonical(chi);
  const ResidueRing r = working_ring(5);
  const auto z_small = ValuedUnit::make(2, 1, r);
  for (int v = -4; v <= 2; ++v) {
    const cplx w = v_wedge(K, ValuedUnit::make(v, 2, r), z_small);
    if (v != -2) CHECK(w == cplx(0.0));
    else CHECK(std::abs(w) > 0.1);
  }
  CHECK(v_wedge(K, ValuedUnit::make(-2, 2, r), ValuedUnit::make(1, 1, r)) == cplx(0.0));
}

TEST_CASE("canonical kernel: V# closed form") {
  const auto chi = MultChar::make(7, 2, 5);
  const auto K = KernelSpec::canonical(chi);
  const ResidueRing r = working_ring(7);
  for (u64 u : {1, 3, 19, 48}) {
    const auto y = ValuedUnit::make(0, u, r);
    CHECK(close(v_sharp(K, ValuedUnit::make(1, 2, r), y), char_eval(chi, y)));
    CHECK(close(v_sharp(K, ValuedUnit::zero(r), y), char_eval(chi, y)));
    CHECK(v_sharp(K, ValuedUnit::make(0, 2, r), ValuedUnit::make(1, u, r)) == cplx(0.0));
    CHECK(v_sharp(K, ValuedUnit::make(0, 2, r), ValuedUnit::make(-1, u, r)) == cplx(0.0));
  }
}

TEST_CASE("canonical kernel: h# support") {
  const auto K = KernelSpec::canonical(MultChar::make(5, 2, 1));
  const ResidueRing r = working_ring(5);
  for (int v = -3; v <= -1; ++v) CHECK(h_sharp(K, ValuedUnit::make(v, 3, r)) == cplx(0.0));
  CHECK_THROWS_AS(h_sharp(K, ValuedUnit::zero(r)), Error);
}

TEST_CASE("closed forms agree with the tabulated canonical kernel") {
  for (u64 p : {3, 5}) {
    const ResidueRing r = working_ring(p);
    for (const auto& chi : {MultChar::make(p, 1, 1), MultChar::make(p, 2, 1)}) {
      const auto Kc = KernelSpec::canonical(chi);
      const auto Kt = KernelSpec::tabulate_canonical(chi);
      const int n = chi.cond_exp();
      for (int v = -n - 1; v <= 1; ++v) {
        for (u64 u : {1, 2, 4}) {
          const auto xi = ValuedUnit::make(v, u, r);
          const auto z = ValuedUnit::make(n, 1, r);
          CHECK(close(v_wedge(Kc, xi, z), v_wedge(Kt, xi, z)));
        }
      }
      const DeformParams s{{0.1, 0.0}, {0.05, 0.02}, {0.0, 0.0}};
      for (int xv : {0, 1, 2}) {
        for (int yv : {-1, 0, 1}) {
          const auto x = ValuedUnit::make(xv, 2, r);
          const auto y = ValuedUnit::make(yv, 1 + p, r);
          CHECK(close(v_sharp(Kc, x, y, s), v_sharp(Kt, x, y, s)));
        }
      }
      for (int tv = 0; tv <= 2; ++tv) {
        for (u64 u : {u64{2}, 1 + 2 * p}) {
          if (tv == 0 && u % p == 1) continue;
          const auto t = ValuedUnit::make(tv, u, r);
          CHECK(close(h_sharp(Kc, t), h_sharp(Kt, t)));
        }
      }
    }
  }
}

TEST_CASE("V^ on a random table against direct summation") {
  const auto chi = MultChar::make(5, 2, 1);
  const auto K = random_kernel(chi, 3);
  const ResidueRing r = working_ring(5);
  const DeformParams s{{0.2, 0.1}, {-0.1, 0.0}, {0.0, 0.0}};
  for (int k = -4; k <= 1; ++k) {
    for (u64 w : {1, 7, 13}) {
      for (int zv : {2, 3, 5}) {
        const cplx got = v_wedge(K, ValuedUnit::make(k, w, r), ValuedUnit::make(zv, 1, r), s);
        CHECK(close(got, wedge_oracle(K, k, w, zv, s)));
      }
    }
  }
}

TEST_CASE("V^ is independent of s on the canonical support") {
  const auto K = KernelSpec::tabulate_canonical(MultChar::make(7, 2, 3));
  const ResidueRing r = working_ring(7);
  const auto xi = ValuedUnit::make(-2, 10, r);
  const auto z = ValuedUnit::make(3, 1, r);
  const cplx base = v_wedge(K, xi, z);
  for (double a : {-0.1, -0.05, 0.03, 0.07, 0.1}) {
    CHECK(close(v_wedge(K, xi, z, DeformParams{{a, 0.1}, {-a, 0.0}, {0.0, 0.0}}), base, 1e-12));
  }
}

TEST_CASE("inverse xi-transform of V# recovers V^") {
  const auto chi = MultChar::make(5, 2, 1);
  const auto K = random_kernel(chi, 11);
  const ResidueRing r = working_ring(5);
  const u64 p = 5;
  const auto x = ValuedUnit::make(3, 2, r);
  // y over p^{-R} o at level Lv covers supp V#(x, .) and its constancy
  const int R = 3;
  const int Lv = 2;
  const u64 N = checked_pow(p, R + Lv);
  std::vector<cplx> vs(N);
  for (u64 j = 1; j < N; ++j) {
    const auto jj = ValuedUnit::from_integer(static_cast<i64>(j), r);
    vs[j] = v_sharp(K, x, ValuedUnit::make(jj.valuation() - R, jj.unit(), r));
  }
  vs[0] = v_sharp(K, x, ValuedUnit::zero(r));
  for (int k = -Lv; k <= 0; ++k) {
    for (u64 w : {1, 3}) {
      const auto xi = ValuedUnit::make(k, w, r);
      cplx acc(0.0);
      for (u64 j = 0; j < N; ++j) {
        // psi(xi y) with y = p^{-R} j
        const int e = k - R;
        const u64 D = checked_pow(p, -e);
        acc += vs[j] * e_of(static_cast<double>((w % D) * (j % D) % D) / static_cast<double>(D));
      }
      acc *= std::pow(double(p), -Lv);
      CHECK(close(acc, v_wedge(K, xi, -(x / xi)), 1e-9));
    }
  }
}

TEST_CASE("transforms are linear in the kernel") {
  const auto chi = MultChar::make(5, 1, 1);
  const auto K1 = random_kernel(chi, 1);
  const auto K2 = random_kernel(chi, 2);
  const cplx a(0.5, -1.0), b(2.0, 0.25);
  const auto K = K1.combined(a, K2, b);
  const ResidueRing r = working_ring(5);
  const auto xi = ValuedUnit::make(-2, 3, r);
  const auto z = ValuedUnit::make(2, 1, r);
  CHECK(close(v_wedge(K, xi, z), a * v_wedge(K1, xi, z) + b * v_wedge(K2, xi, z)));
  const auto x = ValuedUnit::make(2, 4, r);
  const auto y = ValuedUnit::make(-1, 2, r);
  CHECK(close(v_sharp(K, x, y), a * v_sharp(K1, x, y) + b * v_sharp(K2, x, y)));
  const auto t = ValuedUnit::make(1, 2, r);
  CHECK(close(h_sharp(K, t), a * h_sharp(K1, t) + b * h_sharp(K2, t)));
}
