// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "kleinkit/dsl.hpp"
#include "kleinkit/fock.hpp"
#include "kleinkit/klein.hpp"

#include "random_expr.hpp"

#include <json.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

using namespace kleinkit;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int n, const std::string& title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(dt < limit_s, "took " + std::to_string(dt) + " s");
  if (!out.ok) {
    ++failures;
  }
  std::printf("%s criterion %d: %s (%.3f s)%s%s\n", out.ok ? "PASS" : "FAIL", n, title.c_str(), dt,
              out.ok ? "" : " -- ", out.detail.c_str());
  std::fflush(stdout);
}

ExchangeMatrix uniform(std::size_t n, const UnitScalar& v) {
  ExchangeMatrix q(n);
  q.fill(v);
  return q;
}

AlgebraSpec uniform_spec(std::vector<Mode> modes, const UnitScalar& q_all, QMode q) {
  AlgebraSpec spec(std::move(modes), q);
  spec.set_exchange_matrix(uniform(spec.size(), q_all));
  return spec;
}

std::vector<Mode> bosons(std::size_t n) {
  std::vector<Mode> modes;
  for (std::size_t k = 0; k < n; ++k) {
    modes.push_back({"a" + std::to_string(k + 1), Statistics::boson});
  }
  return modes;
}

std::string relation_failures(const ExchangeReport& r) {
  std::string out;
  for (const auto* group : {&r.same_mode, &r.pairs}) {
    for (const auto& c : *group) {
      if (!c.pass) {
        out += c.relation + " (" + std::to_string(c.i) + "," + std::to_string(c.j) + ") ";
      }
    }
  }
  return out;
}

struct Captured {
  int exit_code = -1;
  std::string out;
};

Captured run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + KLEINKIT_CLI + "\" " + args + " 2>&1";
  Captured c;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    return c;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    c.out.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  c.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

void criterion1(Outcome& o) {
  const QMode minus = QMode::from_value(-1);
  const auto spec = uniform_spec({{"a", Statistics::boson}, {"b", Statistics::boson}}, -1, minus);
  const auto k = standard_map("total-parity-on-b", spec);
  const auto a = OpExpr::ann(0);
  const auto bt = dressed_annihilator(k, 1);
  const auto bt_dag = adjoint(bt, spec);
  const std::vector<std::pair<std::string, OpExpr>> zeros = {
      {"[b~,b~+] - 1", bracket(bt, bt_dag, 1, spec) - OpExpr::identity()},
      {"[a,b~]", bracket(a, bt, 1, spec)},
      {"[a,b~+]", bracket(a, bt_dag, 1, spec)},
      {"[a,b~]+", adjoint(bracket(a, bt, 1, spec), spec)},
      {"[a,b~+]+", adjoint(bracket(a, bt_dag, 1, spec), spec)},
  };
  for (const auto& [name, e] : zeros) {
    o.require(is_zero(e, spec), name + " = " + render(e, spec));
  }
  for (const char* name : {"eta-b-on-both", "eta-a-on-b"}) {
    const auto r = verify_klein(standard_map(name, spec), spec, uniform(2, 1));
    o.require(r.all_pass(), std::string(name) + ": " + relation_failures(r));
  }
}

void criterion2(Outcome& o) {
  const QMode minus = QMode::from_value(-1);
  const auto spec = uniform_spec(bosons(5), -1, minus);
  const auto r = verify_klein(standard_map("cascade", spec), spec, uniform(5, 1));
  o.require(r.pairs.size() == 30, "expected 3 relations for each of 10 pairs");
  o.require(r.all_pass(), relation_failures(r));
  o.require(r.induced == uniform(5, 1), "induced exchange is not +1");
}

void criterion3(Outcome& o) {
  const auto q = UnitScalar::q();
  const auto spec = uniform_spec({{"a", Statistics::boson}, {"b", Statistics::boson}}, 1, QMode::formal());
  const auto kt = standard_map("q-total-on-b", spec);
  const auto at = dressed_annihilator(kt, 0);
  const auto bt = dressed_annihilator(kt, 1);
  const auto at_d = adjoint(at, spec);
  const auto bt_d = adjoint(bt, spec);
  const auto na = multiply(at_d, at, spec);
  const auto nb = multiply(bt_d, bt, spec);
  o.require(is_zero(bracket(at, at_d, 1, spec) - OpExpr::identity(), spec), "[a~,a~+] != 1");
  o.require(is_zero(bracket(bt, bt_d, 1, spec) - OpExpr::identity(), spec), "[b~,b~+] != 1");
  o.require(is_zero(bracket(at, bt, q, spec), spec), "[a~,b~]_q != 0");
  o.require(is_zero(bracket(at, bt_d, q.inverse(), spec), spec), "[a~,b~+]_{q^-1} != 0");
  o.require(is_zero(bracket(na, nb, 1, spec), spec), "[N~a,N~b] != 0");

  DressingMap eta_a = DressingMap::identity(2);
  eta_a.modes[1].phase = PhaseVector{1, 0};
  const auto r_total = verify_klein(kt, spec, uniform(2, q));
  const auto r_eta_a = verify_klein(eta_a, spec, uniform(2, q));
  o.require(r_total.all_pass(), "q-total-on-b: " + relation_failures(r_total));
  o.require(r_total == r_eta_a, "eta_a replacement gives a different report");

  const auto ke = standard_map("q-etab-on-both", spec);
  const auto ae = dressed_annihilator(ke, 0);
  const auto be = dressed_annihilator(ke, 1);
  o.require(is_zero(bracket(ae, be, q.inverse(), spec), spec), "q-etab: [a~,b~]_{q^-1} != 0");
  o.require(is_zero(bracket(ae, adjoint(be, spec), q, spec), spec), "q-etab: [a~,b~+]_q != 0");

  const auto spec4 = uniform_spec(bosons(4), 1, QMode::formal());
  const auto kc = standard_map("q-cascade", spec4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) {
        continue;
      }
      const auto eps = i < j ? q : q.inverse();
      const auto ti = dressed_annihilator(kc, i);
      const auto tj = dressed_annihilator(kc, j);
      const std::string pair = " for (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      o.require(is_zero(bracket(ti, tj, eps, spec4), spec4), "q-cascade [t_i,t_j]" + pair);
      o.require(is_zero(bracket(ti, adjoint(tj, spec4), eps.inverse(), spec4), spec4), "q-cascade [t_i,t_j+]" + pair);
    }
  }
}

void criterion4(Outcome& o) {
  const QMode minus = QMode::from_value(-1);
  const auto spec = uniform_spec({{"a", Statistics::fermion},
                                  {"b", Statistics::fermion},
                                  {"a'", Statistics::fermion},
                                  {"b'", Statistics::fermion}},
                                 -1, minus);
  const auto space = FockSpace::for_spec(spec, 2);
  std::vector<OpExpr> unprimed;
  for (std::size_t k : {0, 1}) {
    unprimed.push_back(OpExpr::ann(k));
    unprimed.push_back(OpExpr::cre(k));
  }
  // the mixed-field relations hold before dressing: {c, c'} = 0
  for (const auto& c : unprimed) {
    for (std::size_t k : {2, 3}) {
      o.require(is_zero(bracket(c, OpExpr::ann(k), -1, spec), spec), "{c,c'} != 0 before dressing");
    }
  }
  std::vector<std::vector<OpExpr>> dressed;
  for (const char* name : {"total-parity-on-primed", "charge-parity"}) {
    const auto map = standard_map(name, spec);
    std::vector<OpExpr> primed;
    for (std::size_t k : {2, 3}) {
      primed.push_back(dressed_annihilator(map, k));
      primed.push_back(adjoint(primed.back(), spec));
    }
    int pairs = 0;
    for (const auto& c : unprimed) {
      for (const auto& t : primed) {
        const auto x = bracket(c, t, 1, spec);
        o.require(is_zero(x, spec), std::string(name) + ": symbolic residual " + render(x, spec));
        const double full = check_zero(evaluate(c * t - t * c, spec, space, pi), space, 1e-12).full_residual;
        o.require(full <= 1e-12, std::string(name) + ": numeric residual " + std::to_string(full));
        ++pairs;
      }
    }
    o.require(pairs == 16, "expected 16 cross pairs");
    dressed.push_back(primed);
  }
  for (std::size_t k = 0; k < dressed[0].size(); ++k) {
    const auto d = evaluate(dressed[0][k] - dressed[1][k], spec, space, pi);
    o.require(d.matrix().norm() <= 1e-14, "dressed operators differ by " + std::to_string(d.matrix().norm()));
  }
}

void criterion5(Outcome& o) {
  std::mt19937_64 rng(20260101);
  const std::array<double, 3> thetas{pi, pi / 3, 2 * pi / 7};
  int checked = 0;
  for (int n = 0; n < 150; ++n) {
    const auto spec = kleinkit::testing::random_spec(rng);
    const auto space = FockSpace::for_spec(spec, 4);
    const auto e = kleinkit::testing::random_expr(rng, spec, 6, true);
    const auto diff = e - normal_order(e, spec);
    for (double th : thetas) {
      const double r = check_zero(evaluate(diff, spec, space, th), space, 1e-10).interior_residual;
      o.require(r <= 1e-10, "case " + std::to_string(n) + " residual " + std::to_string(r));
    }
    ++checked;
  }
  o.require(checked >= 100, "too few cases");
  int visible = 0;
  for (int n = 0; n < 30; ++n) {
    const auto spec = kleinkit::testing::random_spec(rng);
    const auto space = FockSpace::for_spec(spec, 4);
    const auto e = kleinkit::testing::random_expr(rng, spec, 6, true);
    const auto delta = kleinkit::testing::random_visible_monomial(rng, spec);
    const auto x = e - normal_order(e, spec) + delta;
    o.require(!is_zero(x, spec), "nonzero case normal-ordered to zero");
    double best = 0.0;
    for (double th : thetas) {
      best = std::max(best, check_zero(evaluate(x, spec, space, th), space, 1e-10).interior_residual);
    }
    o.require(best >= 1e-6, "nonzero case " + std::to_string(n) + " invisible");
    visible += best >= 1e-6;
  }
  o.require(visible >= 20, "too few nonzero cases");
}

void criterion6(Outcome& o) {
  AlgebraSpec spec({{"a", Statistics::boson}});
  const auto space = FockSpace::for_spec(spec, 4);
  const auto x = OpExpr::ann(0) * OpExpr::cre(0) - OpExpr::cre(0) * OpExpr::ann(0) - OpExpr::identity();
  const auto r = check_zero(evaluate(x, spec, space, pi), space, 1e-14);
  o.require(r.interior_residual <= 1e-14, "interior residual " + std::to_string(r.interior_residual));
  o.require(r.defects.size() == 1, "expected a single defect");
  if (!r.defects.empty()) {
    o.require(r.defects[0].occupations == std::vector<std::size_t>{3}, "defect not at |3>");
    o.require(std::abs(r.defects[0].diagonal - Complex(-4, 0)) <= 1e-12, "defect eigenvalue is not -4");
  }
}

void criterion7(Outcome& o) {
  FockSpace space({{"a", Statistics::boson, 5}, {"c", Statistics::fermion, 2}});
  double fact = 1.0;
  for (std::size_t n = 0; n <= 3; ++n) {
    fact *= n == 0 ? 1.0 : static_cast<double>(n);
    const std::vector<std::size_t> creators(n, 0);
    const auto r = state_norm2(space, creators);
    o.require(std::abs(r.norm2 - fact) <= 1e-12 * fact, "||a+^" + std::to_string(n) + "|0>||^2 = " + std::to_string(r.norm2));
  }
  const std::vector<std::size_t> cc{1, 1};
  o.require(state_norm2(space, cc).norm2 == 0.0, "c+ c+ |0> is not null");
  AlgebraSpec f({{"c", Statistics::fermion}});
  o.require(normal_order(OpExpr::cre(0) * OpExpr::cre(0), f).empty(), "c+ c+ is not zero symbolically");
}

void criterion8(Outcome& o) {
  const std::string dir = KLEINKIT_SCRIPTS_DIR;
  for (const char* s : {"klein_eq5.kq", "klein_variants.kq", "cascade5.kq", "q_total.kq", "q_etab.kq",
                        "q_cascade4.kq", "dirac_primed.kq"}) {
    const auto c = run_cli("check \"" + dir + "/" + s + "\" --json");
    o.require(c.exit_code == 0, std::string(s) + " exited " + std::to_string(c.exit_code));
    if (c.exit_code == 0) {
      const auto j = nlohmann::json::parse(c.out);
      o.require(j["summary"]["failed"] == 0 && j["summary"]["passed"].get<int>() > 0, std::string(s) + " summary");
    }
  }
  const auto c = run_cli("check \"" + dir + "/failing.kq\" --json");
  o.require(c.exit_code == 1, "failing.kq exited " + std::to_string(c.exit_code));
  const auto j = nlohmann::json::parse(c.out);
  bool named = false;
  for (const auto& a : j["assertions"]) {
    named = named || (a["line"] == 3 && a["pass"] == false);
  }
  o.require(named, "JSON report does not name the failing line");
  o.require(j["exit_code"] == 1, "JSON exit_code field");
  o.require(run_cli("check \"" + dir + "/does-not-exist.kq\"").exit_code == 2, "missing script does not exit 2");
}

} // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion(1, "parity dressing of an abnormal boson pair", 1.0, criterion1);
  criterion(2, "five-mode parity cascade", 5.0, criterion2);
  criterion(3, "q-parity dressings (formal q)", 5.0, criterion3);
  criterion(4, "commuting Dirac fields from parity and charge dressing", 5.0, criterion4);
  criterion(5, "normal ordering agrees with the Fock oracle", 30.0, criterion5);
  criterion(6, "truncated commutator defect", 1.0, criterion6);
  criterion(7, "Fock state norms", 1.0, criterion7);
  criterion(8, "command-line contract", 30.0, criterion8);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 8 criteria failed; total %.3f s\n", failures, total);
  return failures == 0 && total < 60.0 ? 0 : 1;
}
