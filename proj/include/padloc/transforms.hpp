#pragma once

#include <complex>
#include <vector>

#include "padloc/characters.hpp"
#include "padloc/padic_core.hpp"

namespace padloc {

struct DeformParams {
  cplx s1{0.0, 0.0};
  cplx s2{0.0, 0.0};
  cplx s3{0.0, 0.0};
};

/// V(a(y) n'(z)) for a ramified chi. Either the canonical kernel
/// 1_{|y|=1} 1_{|z|<=1/Q} chi(y), handled in closed form, or a table
/// T[v(y)][y0 mod p^m][z class] where the z class is v(z) in
/// [z_min, z_cap) or "v(z) >= z_cap", and V = 0 for v(z) < z_min.
class KernelSpec {
 public:
  static KernelSpec canonical(const MultChar& chi);
  /// Canonical kernel written out as a table (for cross-checks).
  static KernelSpec tabulate_canonical(const MultChar& chi);
  static KernelSpec tabulated(const MultChar& chi, int y_val_min, int y_val_max, int unit_level,
                              int z_min, int z_cap, std::vector<cplx> table);

  const MultChar& chi() const noexcept { return chi_; }
  bool is_canonical() const noexcept { return canonical_; }
  int y_val_min() const noexcept { return y_min_; }
  int y_val_max() const noexcept { return y_max_; }
  int unit_level() const noexcept { return m_; }
  int z_min() const noexcept { return z_min_; }
  int z_cap() const noexcept { return z_cap_; }

  /// V(a(p^yv y0) n'(z)) with zv = v(z) (ValuedUnit::kZeroValuation for z = 0).
  cplx value(int yv, u64 y0, int zv) const;

  /// Entry-wise linear combination (same shape required).
  KernelSpec combined(cplx a, const KernelSpec& other, cplx b) const;

 private:
  KernelSpec(const MultChar& chi) : chi_(chi) {}
  std::size_t index(int yv, u64 y0, int zclass) const;

  MultChar chi_;
  bool canonical_ = true;
  int y_min_ = 0, y_max_ = 0, m_ = 1, z_min_ = 0, z_cap_ = 0;
  std::vector<cplx> table_;
};

/// V^[s](xi, z) = int |y|^{s1-s2} V(a(y) n'(z)) psi(xi y) dy/|y|.
cplx v_wedge(const KernelSpec& K, const ValuedUnit& xi, const ValuedUnit& z,
             const DeformParams& s = {});

/// V#[s](x, y) = int |xi|^{-2 s2} V^[s](xi, -x/xi) psi(-xi y) dxi.
cplx v_sharp(const KernelSpec& K, const ValuedUnit& x, const ValuedUnit& y,
             const DeformParams& s = {});

/// h#[s](t) = int |1-x|^{2 s1} |x|^{2 s2} V#[s](x, (x-t)/(x(1-x))) dx/|x(1-x)|
/// over x in o, summed cell by cell at relative level `level` (0 = minimal).
cplx h_sharp(const KernelSpec& K, const ValuedUnit& t, const DeformParams& s = {},
             int level = 0);

}  // namespace padloc
