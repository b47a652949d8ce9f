#include "padloc/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "padloc/calibration.hpp"
#include "padloc/degenerate.hpp"
#include "padloc/dualweight.hpp"
#include "padloc/errors.hpp"
#include "padloc/lfactors.hpp"
#include "padloc/parallel.hpp"

namespace padloc {

using ojson = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCommands = {"gauss", "tate-check", "rho", "dual-weight",
                                            "atypical-scan", "dfstar", "verify-appendix", "bench"};

const std::map<std::string, double> kTolDefaults = {
    {"abs", 1e-8}, {"rel", 1e-8}, {"tate", 1e-8}, {"zero", 1e-9}, {"fe", 1e-12}, {"gauss", 1e-10}};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

cplx parse_complex(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b;
  std::getline(ss, a, ',');
  std::getline(ss, b, ',');
  try {
    std::size_t used = 0;
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    double im = 0.0;
    if (!b.empty()) {
      im = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
    }
    return {re, im};
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad complex number '" + text + "' (use re or re,im)");
  }
}

// relative error; a reference below 1e-13 counts as an exact zero
double rel_err(cplx got, cplx ref) {
  if (std::abs(ref) < 1e-13) return std::abs(got) < 1e-13 ? 0.0 : std::abs(got - ref);
  return std::abs(got - ref) / std::abs(ref);
}

// exponent e with p^e = value, or throws
int exponent_of(u64 p, u64 value, const char* what) {
  int e = 0;
  u64 v = value;
  while (v > 1 && v % p == 0) {
    v /= p;
    ++e;
  }
  if (v != 1) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " must be a power of p, got " + std::to_string(value));
  }
  return e;
}

struct Ledger {
  std::vector<ojson> lines;
  void fail(const std::string& check, ojson detail) {
    detail["check"] = check;
    lines.push_back(std::move(detail));
  }
};

ojson cjson(cplx z) { return ojson::array({z.real(), z.imag()}); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

struct Ctx {
  const RunConfig& cfg;
  std::ostream& out;
  Ledger ledger;
  Thresholds th;
  std::string format;
  ojson tol_meta;
  double tol(const std::string& name) const { return tolerance(cfg, name); }

  void tsv_header(const std::vector<std::string>& cols) {
    out << "# padloc " << cfg.command << " thresholds=" << th.version;
    for (const auto& [k, v] : tol_meta.items()) out << " tol_" << k << "=" << v.get<double>();
    out << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
    out << "\n";
  }
  void emit_single(ojson j) {
    j["tolerance"] = tol_meta;
    if (format == "tsv") {
      std::vector<std::string> keys;
      for (const auto& [k, v] : j.items()) keys.push_back(k);
      tsv_header(keys);
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        out << (first ? "" : "\t") << (v.is_string() ? v.get<std::string>() : v.dump());
        first = false;
      }
      out << "\n";
    } else {
      out << j.dump(2) << "\n";
    }
  }
};

// scan-style output: rows are objects with a fixed key order
struct Table {
  std::vector<std::string> cols;
  std::vector<ojson> rows;
  void emit(Ctx& c, const std::string& schema) {
    if (c.format == "json") {
      ojson j;
      j["schema"] = schema;
      j["tolerance"] = c.tol_meta;
      j["rows"] = rows;
      c.out << j.dump(2) << "\n";
      return;
    }
    c.tsv_header(cols);
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto& v = r.at(cols[i]);
        c.out << (i ? "\t" : "") << (v.is_string() ? v.get<std::string>() : v.is_number_float() ? fmt(v.get<double>()) : v.dump());
      }
      c.out << "\n";
    }
  }
};

MultChar chi_for(const RunConfig& cfg) {
  if (cfg.chi) return parse_char_spec(*cfg.chi);
  const u64 p = cfg.p;
  const int n = exponent_of(p, cfg.Q, "Q");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Q must be at least p");
  return MultChar::make(p, n, 1);
}

MultChar omega_for(const RunConfig& cfg, u64 p) {
  if (cfg.omega) return parse_char_spec(*cfg.omega);
  return MultChar::trivial(p);
}

// ---- commands ----

void cmd_gauss(Ctx& c) {
  const MultChar chi = parse_char_spec(*c.cfg.chi);
  const int n = chi.cond_exp();
  const int v = c.cfg.xi_val.value_or(-n);
  const ResidueRing ring(chi.p(), std::max(n, 1));
  const ValuedUnit xi = ValuedUnit::make(v, c.cfg.xi_unit % ring.modulus(), ring);
  const cplx g = gauss_sum(chi, xi);
  const bool support = v == -n;
  const double expected = support ? std::pow(static_cast<double>(chi.p()), -0.5 * n) : 0.0;
  const double err = std::abs(std::abs(g) - expected);
  ojson j;
  j["schema"] = "padloc.gauss.v1";
  j["chi"] = chi.spec();
  j["xi_valuation"] = v;
  j["xi_unit"] = xi.unit();
  j["value"] = cjson(g);
  j["abs"] = std::abs(g);
  j["on_support"] = support;
  j["expected_abs"] = expected;
  j["err"] = err;
  j["pass"] = err <= c.tol("gauss");
  if (err > c.tol("gauss")) c.ledger.fail("gauss.magnitude", {{"chi", chi.spec()}, {"err", err}});
  c.emit_single(j);
}

void cmd_tate(Ctx& c) {
  std::vector<u64> primes = {3, 5, 7};
  if (c.cfg.p != 0) primes = {c.cfg.p};
  const auto cases = tate_suite(primes, c.cfg.cases, c.cfg.seed);
  Table t{{"case", "p", "chi", "s_re", "s_im", "terms", "residual", "involution_error", "pass"}, {}};
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& tc = cases[k];
    const bool pass = tc.residual <= c.tol("tate") && tc.involution_error <= c.tol("fe");
    t.rows.push_back({{"case", k},
                      {"p", tc.chi.p()},
                      {"chi", tc.chi.spec()},
                      {"s_re", tc.s.real()},
                      {"s_im", tc.s.imag()},
                      {"terms", tc.phi.terms().size()},
                      {"residual", tc.residual},
                      {"involution_error", tc.involution_error},
                      {"pass", pass}});
    if (!pass) {
      c.ledger.fail("tate", {{"case", k},
                             {"chi", tc.chi.spec()},
                             {"residual", tc.residual},
                             {"involution_error", tc.involution_error}});
    }
  }
  t.emit(c, "padloc.tate_check.v1");
}

void cmd_rho(Ctx& c) {
  const MultChar chi = chi_for(c.cfg);
  const u64 p = chi.p();
  if (c.cfg.Q != 0 && exponent_of(p, c.cfg.Q, "Q") != chi.cond_exp()) {
    throw Error(ErrorCode::InvalidArgument, "Q disagrees with the conductor of chi");
  }
  const MultChar omega = omega_for(c.cfg, p);
  const int i = exponent_of(p, c.cfg.U, "U");
  const int j = exponent_of(p, c.cfg.V, "V");
  const RhoMode mode = parse_rho_mode(c.cfg.mode);
  const cplx val = rho_uv(chi, omega, i, j, mode, c.cfg.jobs);
  ojson o;
  o["schema"] = "padloc.rho.v1";
  o["chi"] = chi.spec();
  o["omega"] = omega.spec();
  o["U"] = c.cfg.U;
  o["V"] = c.cfg.V;
  o["Q"] = chi.conductor();
  o["mode"] = to_string(mode);
  o["level"] = rho_required_level(chi, omega);
  o["term_count"] = rho_term_count(chi, omega, i, j);
  o["value"] = cjson(val);
  if (!omega.is_ramified() && chi.is_ramified()) {
    const cplx expect = exhaustive_table_value(chi, i, j) *
                        std::pow(omega.uniformizer_value(), -(i + j));
    const double err = std::abs(val - expect);
    o["expected"] = cjson(expect);
    o["err"] = err;
    if (err > c.tol("abs")) c.ledger.fail("rho.table", {{"chi", chi.spec()}, {"U", c.cfg.U}, {"V", c.cfg.V}, {"err", err}});
  }
  c.emit_single(o);
}

ojson classification_json(const Classification& cl) {
  return {{"pass", cl.pass}, {"measured", cl.measured}, {"bound", cl.bound}, {"detail", cl.detail}};
}

void cmd_dual_weight(Ctx& c) {
  const MultChar chi = parse_char_spec(*c.cfg.chi);
  const MultChar omega = parse_char_spec(*c.cfg.omega);
  DualWeightOptions opts;
  opts.mode = parse_rho_mode(c.cfg.mode);
  opts.degree = c.cfg.jobs;
  const auto rep = dual_weight(chi, omega, opts);
  const auto cl = classify_bounds(rep, c.th);
  ojson j = ojson::parse(report_json(rep));
  j["classification"] = classification_json(cl);
  j["level"] = rho_required_level(chi, omega);
  if (!cl.pass) {
    c.ledger.fail("dual_weight.bound", {{"chi", chi.spec()},
                                        {"omega", omega.spec()},
                                        {"measured", cl.measured},
                                        {"bound", cl.bound}});
  }
  c.emit_single(j);
}

void cmd_atypical_scan(Ctx& c) {
  const MultChar chi = parse_char_spec(*c.cfg.chi);
  if (!chi.is_ramified()) throw Error(ErrorCode::InvalidArgument, "atypical-scan needs ramified chi");
  const int n = chi.cond_exp();
  std::vector<MultChar> omegas;
  for (int e = 1; e <= n + 1; ++e) {
    for (auto& w : characters_of_conductor(chi.p(), e)) omegas.push_back(w);
  }
  DualWeightOptions opts;
  opts.mode = parse_rho_mode(c.cfg.mode);
  std::vector<DualWeightReport> reps(omegas.size(), DualWeightReport(chi, chi));
  parallel_for(
      omegas.size(), [&](std::size_t k) { reps[k] = dual_weight(chi, omegas[k], opts); },
      c.cfg.jobs);
  Table t{{"omega", "U", "V", "omega_inverse", "rho_re", "rho_im", "h_re", "h_im", "class",
           "atypical", "n_alpha", "max_ratio", "pass"},
          {}};
  for (const auto& rep : reps) {
    const auto cl = classify_bounds(rep, c.th);
    const bool flag = rep.atypical && rep.atypical->atypical;
    for (const auto& pc : rep.pieces) {
      t.rows.push_back({{"omega", rep.omega.spec()},
                        {"U", checked_pow(chi.p(), pc.i)},
                        {"V", checked_pow(chi.p(), pc.j)},
                        {"omega_inverse", pc.inverse},
                        {"rho_re", pc.value.real()},
                        {"rho_im", pc.value.imag()},
                        {"h_re", rep.value.real()},
                        {"h_im", rep.value.imag()},
                        {"class", to_string(rep.bound_class)},
                        {"atypical", flag},
                        {"n_alpha", rep.atypical ? rep.atypical->n_alpha : -1},
                        {"max_ratio", rep.max_ratio},
                        {"pass", cl.pass}});
    }
    if (!cl.pass) {
      c.ledger.fail("atypical_scan.bound", {{"omega", rep.omega.spec()},
                                            {"measured", cl.measured},
                                            {"bound", cl.bound}});
    }
  }
  t.emit(c, "padloc.atypical_scan.v1");
}

void cmd_dfstar(Ctx& c) {
  const MultChar chi = parse_char_spec(*c.cfg.chi);
  const double Q = static_cast<double>(chi.conductor());
  if (c.cfg.weightnorm) {
    const auto wn = n_alpha_weightnorm(chi, c.cfg.alpha, c.cfg.grid, c.cfg.jobs);
    ojson j = ojson::parse(weightnorm_json(chi, wn));
    const double bound = c.th.dfstar_constant * std::pow(Q, c.th.dfstar_exponent * c.cfg.alpha);
    const double cmax = std::max({std::abs(wn.c.c0), std::abs(wn.c.c1), std::abs(wn.c.c2)});
    j["bound"] = bound;
    j["c_bound"] = c.th.c_constant;
    j["pass"] = wn.sup_estimate <= bound && cmax <= c.th.c_constant;
    if (wn.sup_estimate > bound) c.ledger.fail("dfstar.weightnorm", {{"sup", wn.sup_estimate}, {"bound", bound}});
    if (cmax > c.th.c_constant) c.ledger.fail("dfstar.c_constants", {{"max", cmax}, {"bound", c.th.c_constant}});
    c.emit_single(j);
    return;
  }
  DeformParams s{parse_complex(c.cfg.s1), parse_complex(c.cfg.s2), parse_complex(c.cfg.s3)};
  const cplx nu1 = parse_complex(c.cfg.nu1);
  const cplx nu2 = parse_complex(c.cfg.nu2);
  const DegenMode mode = c.cfg.mode == "auto" ? DegenMode::Closed : parse_degen_mode(c.cfg.mode);
  const auto ev = d_f_star(chi, s, nu1, nu2, mode, true, c.cfg.jobs);
  ojson j;
  j["schema"] = "padloc.dfstar_eval.v1";
  j["chi"] = chi.spec();
  j["mode"] = to_string(mode);
  j["s"] = {cjson(s.s1), cjson(s.s2), cjson(s.s3)};
  j["nu"] = {cjson(nu1), cjson(nu2)};
  j["pole_distance"] = degenerate_pole_distance(chi.p(), s, nu1, nu2);
  j["c"] = {cjson(ev.c.c0), cjson(ev.c.c1), cjson(ev.c.c2)};
  j["D_star"] = cjson(ev.D_star);
  c.emit_single(j);
}

void cmd_verify_appendix(Ctx& c) {
  const u64 p = c.cfg.p;
  const int top = c.cfg.max_cond_exp;
  Table t{{"check", "chi", "omega", "U", "V", "expected", "computed", "err", "pass"}, {}};
  auto row = [&](const std::string& check, const MultChar& chi, const MultChar& w, int i, int j,
                 double expected, double computed, double err, double tol) {
    const bool pass = err <= tol;
    t.rows.push_back({{"check", check},
                      {"chi", chi.spec()},
                      {"omega", w.spec()},
                      {"U", checked_pow(p, i)},
                      {"V", checked_pow(p, j)},
                      {"expected", expected},
                      {"computed", computed},
                      {"err", err},
                      {"pass", pass}});
    if (!pass) {
      c.ledger.fail("verify_appendix." + check,
                    {{"chi", chi.spec()}, {"omega", w.spec()}, {"U_exp", i}, {"V_exp", j}, {"err", err}});
    }
  };
  const MultChar one = MultChar::trivial(p);
  for (int n = 1; n <= top; ++n) {
    // an odd and (where one exists) an even character of conductor p^n
    std::vector<MultChar> chis;
    bool have_even = false, have_odd = false;
    for (const auto& chi : characters_of_conductor(p, n)) {
      const bool even = std::abs(chi.value_at_minus_one() - 1.0) < 1e-9;
      if ((even && !have_even) || (!even && !have_odd)) {
        chis.push_back(chi);
        (even ? have_even : have_odd) = true;
      }
      if (have_even && have_odd) break;
    }
    for (const auto& chi : chis) {
      for (int i = 0; i <= n + 1; ++i) {
        const cplx b = single_var_brute(chi, i);
        const cplx e = single_var_closed(p, n, i);
        row("single_var", chi, one, i, 0, e.real(), b.real(), std::abs(b - e), c.tol("abs"));
      }
      for (int i = 0; i <= n + 1; ++i) {
        for (int j = 0; j <= n + 1; ++j) {
          const cplx b = rho_uv_brute(chi, one, i, j, 0, c.cfg.jobs);
          const cplx e = exhaustive_table_value(chi, i, j);
          row("table", chi, one, i, j, e.real(), b.real(), std::abs(b - e), c.tol("abs"));
        }
      }
    }
    const MultChar& chi = chis.front();
    for (int nw = 1; nw <= n + 1; ++nw) {
      const auto ws = characters_of_conductor(p, nw);
      const std::size_t step = std::max<std::size_t>(1, ws.size() / 4);
      for (std::size_t k = 0; k < ws.size(); k += step) {
        const MultChar& w = ws[k];
        for (int i = 0; i <= n + 1; ++i) {
          for (int j = 0; j <= n + 1; ++j) {
            const bool live = i == j && nw == n - i;
            if (!live) {
              const cplx b = rho_uv_brute(chi, w, i, j, 0, c.cfg.jobs);
              const double tc = rho_term_count(chi, w, i, j);
              row("vanishing", chi, w, i, j, 0.0, std::abs(b), std::abs(b), c.tol("zero") * tc);
            } else if (p >= 5 && in_stationary_regime(chi, w, i, j)) {
              const cplx b = rho_uv_brute(chi, w, i, j, 0, c.cfg.jobs);
              const cplx f = rho_uv_fast(chi, w, i, j);
              row("fast_vs_brute", chi, w, i, j, std::abs(b), std::abs(f), rel_err(f, b),
                  c.tol("rel"));
            }
          }
        }
        if (nw > n) {
          DualWeightOptions o;
          o.mode = RhoMode::Brute;
          o.degree = c.cfg.jobs;
          const auto rep = dual_weight(chi, w, o);
          row("dual_weight_zero", chi, w, 0, 0, 0.0, std::abs(rep.value), std::abs(rep.value),
              c.tol("zero") * rep.term_count);
        }
      }
    }
  }
  t.emit(c, "padloc.verify_appendix.v1");
}

void cmd_bench(Ctx& c) {
  const u64 p = c.cfg.p == 0 ? 5 : c.cfg.p;
  const u64 Qv = c.cfg.Q == 0 ? checked_pow(p, 4) : c.cfg.Q;
  const int n = exponent_of(p, Qv, "Q");
  const MultChar chi = c.cfg.chi ? parse_char_spec(*c.cfg.chi) : MultChar::make(p, n, 1);
  if (chi.cond_exp() != n) throw Error(ErrorCode::InvalidArgument, "chi conductor differs from Q");
  // stationary instances at U = V = 1 (the heaviest brute-force case)
  std::vector<MultChar> ws;
  const auto all = characters_of_conductor(p, n);
  for (const auto& w : all) {
    if (ws.size() == 8) break;
    if (in_stationary_regime(chi, w, 0, 0) && std::abs(rho_uv_fast(chi, w, 0, 0)) > 0.0) ws.push_back(w);
  }
  if (ws.empty()) throw Error(ErrorCode::InvalidArgument, "bench needs p >= 5 and Q >= p^2");
  using clock = std::chrono::steady_clock;
  double t_brute = 0.0, t_fast = 0.0, worst = 0.0;
  std::vector<cplx> fast(ws.size());
  for (std::size_t k = 0; k < ws.size(); ++k) {
    if (!in_stationary_regime(chi, ws[k], 0, 0)) {
      throw Error(ErrorCode::InvalidArgument, "bench needs p >= 5 and Q >= p^2");
    }
    auto t0 = clock::now();
    const cplx b = rho_uv_brute(chi, ws[k], 0, 0, 0, c.cfg.jobs);
    auto t1 = clock::now();
    for (int r = 0; r < c.cfg.reps; ++r) fast[k] = rho_uv_fast(chi, ws[k], 0, 0);
    auto t2 = clock::now();
    t_brute += std::chrono::duration<double>(t1 - t0).count();
    t_fast += std::chrono::duration<double>(t2 - t1).count() / c.cfg.reps;
    worst = std::max(worst, rel_err(fast[k], b));
  }
  const bool agree = worst <= c.tol("rel");
  const double speedup = t_brute / std::max(t_fast, 1e-12);
  ojson j;
  j["schema"] = "padloc.bench.v1";
  j["chi"] = chi.spec();
  j["Q"] = Qv;
  j["instances"] = ws.size();
  j["reps"] = c.cfg.reps;
  j["max_rel_err"] = worst;
  j["agree"] = agree;
  j["t_brute"] = t_brute;
  j["t_fast"] = t_fast;
  j["speedup"] = speedup;
  j["min_speedup"] = c.cfg.min_speedup;
  if (!agree) c.ledger.fail("bench.agreement", {{"max_rel_err", worst}});
  if (agree && speedup < c.cfg.min_speedup) {
    c.ledger.fail("bench.speedup", {{"speedup", speedup}, {"required", c.cfg.min_speedup}});
  }
  c.emit_single(j);
}

}  // namespace

double tolerance(const RunConfig& cfg, const std::string& name) {
  auto it = cfg.tol.find(name);
  if (it != cfg.tol.end()) return it->second;
  const std::string env = "PADLOC_TOL_" + upper(name);
  if (const char* v = std::getenv(env.c_str()); v != nullptr && *v != '\0') {
    char* end = nullptr;
    const double d = std::strtod(v, &end);
    if (end == v || *end != '\0' || !(d > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, env + " must be a positive number");
    }
    return d;
  }
  auto d = kTolDefaults.find(name);
  if (d == kTolDefaults.end()) throw Error(ErrorCode::InvalidArgument, "unknown tolerance " + name);
  return d->second;
}

std::string config_to_json(const RunConfig& c) {
  ojson j;
  j["schema"] = "padloc.run_config.v1";
  j["command"] = c.command;
  j["chi"] = c.chi ? ojson(*c.chi) : ojson(nullptr);
  j["omega"] = c.omega ? ojson(*c.omega) : ojson(nullptr);
  j["omega_trivial"] = c.omega_trivial;
  j["p"] = c.p;
  j["max_cond_exp"] = c.max_cond_exp;
  j["U"] = c.U;
  j["V"] = c.V;
  j["Q"] = c.Q;
  j["mode"] = c.mode;
  j["format"] = c.format;
  j["jobs"] = c.jobs;
  j["out"] = c.out ? ojson(*c.out) : ojson(nullptr);
  j["xi_val"] = c.xi_val ? ojson(*c.xi_val) : ojson(nullptr);
  j["xi_unit"] = c.xi_unit;
  j["cases"] = c.cases;
  j["seed"] = c.seed;
  j["s1"] = c.s1;
  j["s2"] = c.s2;
  j["s3"] = c.s3;
  j["nu1"] = c.nu1;
  j["nu2"] = c.nu2;
  j["weightnorm"] = c.weightnorm;
  j["alpha"] = c.alpha;
  j["grid"] = c.grid;
  j["reps"] = c.reps;
  j["min_speedup"] = c.min_speedup;
  j["tol"] = c.tol;
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
  RunConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("schema", "") != "padloc.run_config.v1") {
      throw Error(ErrorCode::InvalidArgument, "config schema must be padloc.run_config.v1");
    }
    auto opt_str = [&](const char* k) -> std::optional<std::string> {
      if (!j.contains(k) || j[k].is_null()) return std::nullopt;
      return j[k].get<std::string>();
    };
    c.command = j.value("command", "");
    c.chi = opt_str("chi");
    c.omega = opt_str("omega");
    c.omega_trivial = j.value("omega_trivial", c.omega_trivial);
    c.p = j.value("p", c.p);
    c.max_cond_exp = j.value("max_cond_exp", c.max_cond_exp);
    c.U = j.value("U", c.U);
    c.V = j.value("V", c.V);
    c.Q = j.value("Q", c.Q);
    c.mode = j.value("mode", c.mode);
    c.format = j.value("format", c.format);
    c.jobs = j.value("jobs", c.jobs);
    c.out = opt_str("out");
    if (j.contains("xi_val") && !j["xi_val"].is_null()) c.xi_val = j["xi_val"].get<int>();
    c.xi_unit = j.value("xi_unit", c.xi_unit);
    c.cases = j.value("cases", c.cases);
    c.seed = j.value("seed", c.seed);
    c.s1 = j.value("s1", c.s1);
    c.s2 = j.value("s2", c.s2);
    c.s3 = j.value("s3", c.s3);
    c.nu1 = j.value("nu1", c.nu1);
    c.nu2 = j.value("nu2", c.nu2);
    c.weightnorm = j.value("weightnorm", c.weightnorm);
    c.alpha = j.value("alpha", c.alpha);
    c.grid = j.value("grid", c.grid);
    c.reps = j.value("reps", c.reps);
    c.min_speedup = j.value("min_speedup", c.min_speedup);
    if (j.contains("tol")) c.tol = j["tol"].get<std::map<std::string, double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config JSON: ") + e.what());
  }
  return c;
}

void validate(const RunConfig& c) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    bad("unknown command '" + c.command + "'");
  }
  if (!c.format.empty() && c.format != "json" && c.format != "tsv") bad("format must be json or tsv");
  if (c.jobs < 1 || c.jobs > 256) bad("jobs must be in [1, 256]");
  for (const auto& [k, v] : c.tol) {
    if (!kTolDefaults.count(k)) bad("unknown tolerance '" + k + "'");
    if (!(v > 0.0)) bad("tolerance " + k + " must be positive");
  }
  std::optional<MultChar> chi, omega;
  if (c.chi) chi = parse_char_spec(*c.chi);
  if (c.omega) omega = parse_char_spec(*c.omega);
  if (chi && omega && chi->p() != omega->p()) bad("chi and omega have different primes");
  if (c.p != 0) {
    (void)MultChar::trivial(c.p);  // checks p
    if (chi && chi->p() != c.p) bad("--p disagrees with chi");
  }
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) bad(c.command + " needs " + what);
  };
  const std::string& cmd = c.command;
  if (cmd == "gauss" || cmd == "dual-weight" || cmd == "atypical-scan" || cmd == "dfstar") {
    need(chi.has_value(), "--chi");
  }
  if (cmd == "gauss") need(chi->is_ramified(), "a ramified chi");
  if (cmd == "dual-weight") need(omega.has_value(), "--omega");
  if (cmd == "rho") {
    need(chi.has_value() || (c.p != 0 && c.Q != 0), "--chi or --p with --Q");
    need(omega.has_value() != c.omega_trivial, "exactly one of --omega, --omega-trivial");
    (void)parse_rho_mode(c.mode);
    const u64 p = chi ? chi->p() : c.p;
    (void)exponent_of(p, c.U, "U");
    (void)exponent_of(p, c.V, "V");
    if (c.Q != 0) (void)exponent_of(p, c.Q, "Q");
  }
  if (cmd == "dual-weight" || cmd == "atypical-scan") (void)parse_rho_mode(c.mode);
  if (cmd == "dfstar") {
    if (c.mode != "auto") (void)parse_degen_mode(c.mode);
    for (const auto* z : {&c.s1, &c.s2, &c.s3, &c.nu1, &c.nu2}) (void)parse_complex(*z);
    if (!(c.alpha > 0.0 && c.alpha <= 0.1)) bad("alpha must be in (0, 0.1]");
    if (c.grid < 1 || c.grid > 8) bad("grid must be in [1, 8]");
  }
  if (cmd == "verify-appendix") {
    need(c.p != 0, "--p");
    if (c.max_cond_exp < 1 || c.max_cond_exp > 6) bad("max-cond-exp must be in [1, 6]");
  }
  if (cmd == "tate-check" && (c.cases < 1 || c.cases > 100000)) bad("cases must be in [1, 100000]");
  if (cmd == "bench" && c.reps < 1) bad("reps must be >= 1");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const Error& e) {
    err << ojson({{"check", "config"}, {"error", e.what()}}).dump() << "\n";
    return 2;
  }
  std::ofstream file;
  std::ostream* sink = &out;
  if (cfg.out) {
    file.open(*cfg.out);
    if (!file) {
      err << ojson({{"check", "config"}, {"error", "cannot open " + *cfg.out}}).dump() << "\n";
      return 2;
    }
    sink = &file;
  }
  set_default_parallelism(cfg.jobs);
  Ctx c{cfg, *sink, {}, {}, {}, ojson::object()};
  try {
    c.th = thresholds_from_env();
    for (const auto& [k, v] : kTolDefaults) c.tol_meta[k] = tolerance(cfg, k);
  } catch (const Error& e) {
    err << ojson({{"check", "config"}, {"error", e.what()}}).dump() << "\n";
    return 2;
  }
  const bool scan = cfg.command == "tate-check" || cfg.command == "atypical-scan" ||
                    cfg.command == "verify-appendix";
  c.format = cfg.format.empty() ? (scan ? "tsv" : "json") : cfg.format;
  try {
    if (cfg.command == "gauss") cmd_gauss(c);
    else if (cfg.command == "tate-check") cmd_tate(c);
    else if (cfg.command == "rho") cmd_rho(c);
    else if (cfg.command == "dual-weight") cmd_dual_weight(c);
    else if (cfg.command == "atypical-scan") cmd_atypical_scan(c);
    else if (cfg.command == "dfstar") cmd_dfstar(c);
    else if (cfg.command == "verify-appendix") cmd_verify_appendix(c);
    else if (cfg.command == "bench") cmd_bench(c);
  } catch (const Error& e) {
    const int code = e.code() == ErrorCode::InvalidArgument ? 2 : 1;
    err << ojson({{"check", code == 2 ? "config" : "compute"},
                  {"code", std::string(error_code_name(e.code()))},
                  {"error", e.what()}})
               .dump()
        << "\n";
    return code;
  }
  sink->flush();
  for (const auto& line : c.ledger.lines) err << line.dump() << "\n";
  return c.ledger.lines.empty() ? 0 : 1;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"padloc: local p-adic weight computations"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  RunConfig cfg;
  std::string config_path;
  bool print_config = false;
  std::vector<std::string> tol_items;
  app.add_option("--config", config_path, "load a RunConfig JSON file instead of flags");
  app.add_flag("--print-config", print_config, "print the RunConfig JSON and exit");
  app.add_option("--jobs", cfg.jobs, "parallelism degree");
  app.add_option("--format", cfg.format, "json or tsv");
  app.add_option("--out", cfg.out, "write the report to a file");
  app.add_option("--tol", tol_items, "tolerance override name=value (abs, rel, tate, zero, fe, gauss)");

  auto* gauss = app.add_subcommand("gauss", "Gauss sum of chi at xi");
  gauss->add_option("--chi", cfg.chi, "character spec")->required();
  gauss->add_option("--xi-val", cfg.xi_val, "valuation of xi (default -n)");
  gauss->add_option("--xi-unit", cfg.xi_unit, "unit part of xi");

  auto* tate = app.add_subcommand("tate-check", "randomized Tate functional equation suite");
  tate->add_option("--p", cfg.p, "prime (default 3, 5, 7)");
  tate->add_option("--cases", cfg.cases, "number of cases");
  tate->add_option("--seed", cfg.seed, "random seed");

  auto* rho = app.add_subcommand("rho", "a single rho_{U,V}");
  rho->add_option("--p", cfg.p, "prime");
  rho->add_option("--U", cfg.U, "U, a power of p");
  rho->add_option("--V", cfg.V, "V, a power of p");
  rho->add_option("--Q", cfg.Q, "conductor of chi (default chi has rotation 1)");
  rho->add_option("--chi", cfg.chi, "character spec");
  rho->add_option("--omega", cfg.omega, "character spec");
  rho->add_flag("--omega-trivial", cfg.omega_trivial, "omega = 1");
  rho->add_option("--mode", cfg.mode, "brute, fast or auto");

  auto* dw = app.add_subcommand("dual-weight", "h~(omega) with bound classification");
  dw->add_option("--chi", cfg.chi, "character spec")->required();
  dw->add_option("--omega", cfg.omega, "character spec")->required();
  dw->add_option("--mode", cfg.mode, "brute, fast or auto");

  auto* scan = app.add_subcommand("atypical-scan", "all omega of conductor <= qQ for one chi");
  scan->add_option("--chi", cfg.chi, "character spec")->required();
  scan->add_option("--mode", cfg.mode, "brute, fast or auto");

  auto* df = app.add_subcommand("dfstar", "degenerate term D_f*");
  df->add_option("--chi", cfg.chi, "character spec")->required();
  df->add_option("--s1", cfg.s1, "re or re,im");
  df->add_option("--s2", cfg.s2, "re or re,im");
  df->add_option("--s3", cfg.s3, "re or re,im");
  df->add_option("--nu1", cfg.nu1, "re or re,im");
  df->add_option("--nu2", cfg.nu2, "re or re,im");
  df->add_option("--mode", cfg.mode, "closed or brute");
  df->add_flag("--weightnorm", cfg.weightnorm, "estimate the sup over the alpha-region");
  df->add_option("--alpha", cfg.alpha, "region radius");
  df->add_option("--grid", cfg.grid, "points per circle");

  auto* va = app.add_subcommand("verify-appendix", "golden suite for the dyadic integrals");
  va->add_option("--p", cfg.p, "prime")->required();
  va->add_option("--max-cond-exp", cfg.max_cond_exp, "largest conductor exponent");

  auto* bench = app.add_subcommand("bench", "brute force vs fast rho timing");
  bench->add_option("--p", cfg.p, "prime (default 5)");
  bench->add_option("--Q", cfg.Q, "conductor (default p^4)");
  bench->add_option("--chi", cfg.chi, "character spec");
  bench->add_option("--reps", cfg.reps, "fast-path repetitions");
  bench->add_option("--min-speedup", cfg.min_speedup, "fail below this speedup");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (!config_path.empty()) {
      if (!app.get_subcommands().empty()) {
        throw Error(ErrorCode::InvalidArgument, "--config cannot be combined with a subcommand");
      }
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = config_from_json(ss.str());
    } else {
      if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
      }
      cfg.command = app.get_subcommands().front()->get_name();
      for (const auto& item : tol_items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--tol wants name=value");
        char* end = nullptr;
        const std::string val = item.substr(eq + 1);
        const double d = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0') throw Error(ErrorCode::InvalidArgument, "bad --tol value " + val);
        cfg.tol[item.substr(0, eq)] = d;
      }
    }
    if (print_config) {
      validate(cfg);
      std::cout << config_to_json(cfg) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << ojson({{"check", "config"}, {"error", e.what()}}).dump() << "\n";
    return 2;
  }
  return run(cfg, std::cout, std::cerr);
}

}  // namespace padloc
