// Measures the quantities behind the frozen bound thresholds.
// Output is JSON; the thresholds in src/calibration.cpp are the maxima
// reported here times 1.5.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "padloc/degenerate.hpp"
#include "padloc/dualweight.hpp"

using namespace padloc;

namespace {

struct Maxima {
  double generic_ratio = 0.0;
  double generic_value = 0.0;
  double unramified_value = 0.0;
  double atypical_scaled = 0.0;
  double c_abs = 0.0;
  double dfstar_exponent = 0.0;  // smallest E with sup <= Q^{E alpha}
  double dfstar_sup = 0.0;
  std::size_t pairs = 0;
  std::size_t atypical_pairs = 0;
};

std::vector<MultChar> stride(const std::vector<MultChar>& all, std::size_t limit) {
  if (all.size() <= limit) return all;
  std::vector<MultChar> out;
  const std::size_t step = (all.size() + limit - 1) / limit;
  for (std::size_t k = 0; k < all.size(); k += step) out.push_back(all[k]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"padloc threshold calibration scan"};
  std::vector<u64> primes{3, 5, 7, 13};
  int max_exp = 4;
  std::size_t chi_limit = 40;
  unsigned jobs = 1;
  int grid = 3;
  app.add_option("--primes", primes, "primes to scan");
  app.add_option("--max-cond-exp", max_exp, "largest conductor exponent");
  app.add_option("--chi-limit", chi_limit, "characters chi sampled per conductor");
  app.add_option("--grid", grid, "weight-norm grid size");
  app.add_option("--jobs", jobs, "parallelism degree");
  CLI11_PARSE(app, argc, argv);

  Maxima m;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (u64 p : primes) {
    const double q = static_cast<double>(p);
    for (int n = 1; n <= max_exp; ++n) {
      Maxima local;
      const auto chis = stride(characters_of_conductor(p, n), chi_limit);
      std::vector<MultChar> omegas;
      for (int e = 1; e <= n; ++e) {
        for (auto& w : characters_of_conductor(p, e)) omegas.push_back(w);
      }
      for (int t = 0; t < 8; ++t) omegas.push_back(MultChar::unramified(p, (t + 0.5) / 8.0));
      const double Q = static_cast<double>(checked_pow(p, n));
      for (const auto& chi : chis) {
        for (const auto& w : omegas) {
          DualWeightOptions o;
          o.degree = jobs;
          const auto r = dual_weight(chi, w, o);
          ++local.pairs;
          switch (r.bound_class) {
            case BoundClass::UnramifiedO1:
              local.unramified_value = std::max(local.unramified_value, std::abs(r.value));
              break;
            case BoundClass::GenericO1Q:
              local.generic_ratio = std::max(local.generic_ratio, r.max_ratio);
              local.generic_value = std::max(local.generic_value, std::abs(r.value) * Q);
              break;
            case BoundClass::Atypical: {
              ++local.atypical_pairs;
              const double scale =
                  std::max(1, r.atypical->n_alpha) * (n % 2 == 1 ? std::sqrt(q) : 1.0);
              const double meas = std::max(std::abs(r.value) * Q, r.max_ratio);
              local.atypical_scaled = std::max(local.atypical_scaled, meas / scale);
              break;
            }
            case BoundClass::Zero:
              break;
          }
        }
        const auto c = c_constants(chi, DegenMode::Closed);
        local.c_abs = std::max({local.c_abs, std::abs(c.c0), std::abs(c.c1), std::abs(c.c2)});
      }
      // weight norm depends on chi only through n and chi(-1)
      for (const auto& chi : stride(chis, 2)) {
        const auto wn = n_alpha_weightnorm(chi, 0.05, grid, jobs);
        local.dfstar_sup = std::max(local.dfstar_sup, wn.sup_estimate);
      }
      const double e_needed = std::log(local.dfstar_sup) / (0.05 * std::log(Q));
      m.dfstar_exponent = std::max(m.dfstar_exponent, e_needed);
      rows.push_back({{"p", p},
                      {"n", n},
                      {"pairs", local.pairs},
                      {"atypical_pairs", local.atypical_pairs},
                      {"generic_ratio", local.generic_ratio},
                      {"generic_value", local.generic_value},
                      {"unramified_value", local.unramified_value},
                      {"atypical_scaled", local.atypical_scaled},
                      {"c_abs", local.c_abs},
                      {"dfstar_sup", local.dfstar_sup}});
      m.generic_ratio = std::max(m.generic_ratio, local.generic_ratio);
      m.generic_value = std::max(m.generic_value, local.generic_value);
      m.unramified_value = std::max(m.unramified_value, local.unramified_value);
      m.atypical_scaled = std::max(m.atypical_scaled, local.atypical_scaled);
      m.c_abs = std::max(m.c_abs, local.c_abs);
      m.dfstar_sup = std::max(m.dfstar_sup, local.dfstar_sup);
      m.pairs += local.pairs;
      m.atypical_pairs += local.atypical_pairs;
      std::cerr << "p=" << p << " n=" << n << " pairs=" << local.pairs << "\n";
    }
  }
  nlohmann::ordered_json out;
  out["schema"] = "padloc.calibration.v1";
  out["rows"] = rows;
  out["max"] = {{"generic_ratio", m.generic_ratio},
                {"generic_value", m.generic_value},
                {"unramified_value", m.unramified_value},
                {"atypical_constant", m.atypical_scaled},
                {"c_constant", m.c_abs},
                {"dfstar_sup", m.dfstar_sup},
                {"dfstar_exponent", m.dfstar_exponent}};
  out["suggested"] = {{"generic_ratio", 1.5 * m.generic_ratio},
                      {"generic_value", 1.5 * m.generic_value},
                      {"unramified_value", 1.5 * m.unramified_value},
                      {"atypical_constant", 1.5 * m.atypical_scaled},
                      {"c_constant", 1.5 * m.c_abs},
                      {"dfstar_constant", 1.5},
                      {"dfstar_exponent", m.dfstar_exponent}};
  std::cout << out.dump(2) << "\n";
  return 0;
}
