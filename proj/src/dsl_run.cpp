#include "kleinkit/dsl.hpp"

#include "kleinkit/fock.hpp"
#include "kleinkit/klein.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <numbers>
#include <sstream>

namespace kleinkit::dsl {

namespace {

constexpr double default_tol = 1e-10;
constexpr std::size_t default_dim = 4;

// Residual matrices of one assertion at a probe angle.
using NumericResiduals = std::function<std::vector<MatrixOperator>(double theta)>;

struct Numeric {
  std::optional<std::size_t> dim;
  std::optional<std::vector<double>> theta;
  std::optional<double> tol;
};

class Runner {
public:
  Runner(const Program& program, const RunOptions& options, std::string name)
      : program_(program), options_(options) {
    report_.script = std::move(name);
  }

  RunReport run() {
    try {
      collect_numeric();
      for (const auto& s : program_.statements) {
        execute(s);
      }
      if (!spec_) {
        freeze(SourceLoc{});
      }
    } catch (const SemanticError& e) {
      report_.error = ErrorInfo{e.loc(), e.what()};
    }
    for (const auto& a : report_.assertions) {
      (a.pass ? report_.passed : report_.failed)++;
    }
    report_.exit_code = report_.error ? 2 : (report_.failed ? 1 : 0);
    return std::move(report_);
  }

private:
  // Numeric directives are script-wide, wherever they appear.
  void collect_numeric() {
    for (const auto& s : program_.statements) {
      if (const auto* d = std::get_if<NumericDim>(&s.node)) {
        if (script_numeric_.dim) {
          throw SemanticError(s.loc, "duplicate 'numeric dim'");
        }
        script_numeric_.dim = d->dim;
      } else if (const auto* t = std::get_if<NumericTheta>(&s.node)) {
        if (script_numeric_.theta) {
          throw SemanticError(s.loc, "duplicate 'numeric theta'");
        }
        script_numeric_.theta = t->values;
      } else if (const auto* tol = std::get_if<NumericTol>(&s.node)) {
        if (script_numeric_.tol) {
          throw SemanticError(s.loc, "duplicate 'numeric tol'");
        }
        if (!(tol->tol > 0.0)) {
          throw SemanticError(s.loc, "tolerance must be positive");
        }
        script_numeric_.tol = tol->tol;
      }
    }
  }

  void execute(const Statement& s) {
    std::visit([&](const auto& node) { handle(s, node); }, s.node);
  }

  // --- declarations -------------------------------------------------------

  void require_open(const Statement& s) {
    if (spec_) {
      throw SemanticError(s.loc, "declarations must precede definitions and assertions");
    }
  }

  void handle(const Statement& s, const ModeDecl& d) {
    require_open(s);
    for (const auto& m : modes_) {
      if (m.name == d.name) {
        throw SemanticError(s.loc, "duplicate declaration of mode '" + d.name + "'");
      }
    }
    modes_.push_back({d.name, d.statistics});
  }

  void handle(const Statement& s, const ExchangeDecl& d) {
    require_open(s);
    exchanges_.push_back({&s, &d});
  }

  void handle(const Statement& s, const QDecl& d) {
    require_open(s);
    if (qdecl_) {
      throw SemanticError(s.loc, "only one q setting per script");
    }
    qdecl_ = &d;
    qdecl_loc_ = s.loc;
  }

  void handle(const Statement&, const NumericDim&) {}
  void handle(const Statement&, const NumericTheta&) {}
  void handle(const Statement&, const NumericTol&) {}

  void freeze(SourceLoc loc) {
    QMode qmode = QMode::formal();
    if (qdecl_ && qdecl_->kind == QDecl::Kind::value) {
      // q must be fixed before any expression can be evaluated
      AlgebraSpec bare(modes_);
      auto v = constant(eval_with(bare, qdecl_->value), qdecl_->value.loc, "q value");
      if (!v.is_constant()) {
        throw SemanticError(qdecl_loc_, "q must be set to a number");
      }
      try {
        qmode = QMode::from_value(v.constant_term());
      } catch (const SpecError& e) {
        throw SemanticError(qdecl_loc_, e.what());
      }
    } else if (qdecl_ && qdecl_->kind == QDecl::Kind::theta) {
      q_theta_ = qdecl_->theta;
    }
    try {
      spec_.emplace(modes_, qmode);
    } catch (const SpecError& e) {
      throw SemanticError(loc, e.what());
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [stmt, d] : exchanges_) {
      const std::size_t i = mode_index(d->a, stmt->loc);
      const std::size_t j = mode_index(d->b, stmt->loc);
      if (i == j) {
        throw SemanticError(stmt->loc, "exchange needs two different modes");
      }
      if (!seen.insert({std::min(i, j), std::max(i, j)}).second) {
        throw SemanticError(stmt->loc, "duplicate exchange setting for '" + d->a + "' and '" + d->b + "'");
      }
      UnitScalar v = constant(eval(d->value), d->value.loc, "exchange factor");
      try {
        spec_->set_exchange(i, j, v);
      } catch (const SpecError& e) {
        throw SemanticError(stmt->loc, e.what());
      }
    }
  }

  const AlgebraSpec& spec(SourceLoc loc) {
    if (!spec_) {
      freeze(loc);
    }
    return *spec_;
  }

  std::size_t mode_index(const std::string& name, SourceLoc loc) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      if (modes_[i].name == name) {
        return i;
      }
    }
    throw SemanticError(loc, "undeclared mode '" + name + "'");
  }

  // --- definitions --------------------------------------------------------

  void define(const std::string& name, SourceLoc loc) {
    if (lets_.contains(name) || maps_.contains(name)) {
      throw SemanticError(loc, "duplicate declaration of '" + name + "'");
    }
  }

  void handle(const Statement& s, const LetDecl& d) {
    spec(s.loc);
    define(d.name, s.loc);
    lets_.emplace(d.name, eval(d.value));
    let_exprs_.emplace(d.name, &d.value);
  }

  void handle(const Statement& s, const MapDecl& d) {
    const AlgebraSpec& sp = spec(s.loc);
    define(d.name, s.loc);
    if (d.catalog) {
      try {
        maps_.emplace(d.name, standard_map(*d.catalog, sp));
      } catch (const MapError& e) {
        throw SemanticError(s.loc, e.what());
      }
      return;
    }
    DressingMap map = DressingMap::identity(sp.size());
    map.name = d.name;
    std::set<std::size_t> seen;
    for (const auto& entry : d.entries) {
      const std::size_t k = mode_index(entry.mode, s.loc);
      if (!seen.insert(k).second) {
        throw SemanticError(s.loc, "mode '" + entry.mode + "' dressed twice");
      }
      const OpExpr f = eval(entry.factor);
      if (f.size() != 1) {
        throw SemanticError(entry.factor.loc, "dressing factor must be a scalar times a phase");
      }
      const auto& [w, c] = *f.terms().begin();
      if (w.size() > 1 || (w.size() == 1 && !w[0].is_phase())) {
        throw SemanticError(entry.factor.loc, "dressing factor must be a scalar times a phase");
      }
      if (!c.is_unit_monomial()) {
        throw SemanticError(entry.factor.loc, "dressing scale must be a unit monomial");
      }
      map.modes[k].scale = c;
      map.modes[k].phase = w.empty() ? PhaseVector(sp.size()) : w[0].phase;
    }
    maps_.emplace(d.name, std::move(map));
  }

  // --- assertions ---------------------------------------------------------

  void handle(const Statement& s, const AssertZero& d) {
    spec(s.loc);
    finish(s, "assert_zero", eval(d.value), [&](double th) { return std::vector{num(d.value, th)}; });
  }

  void handle(const Statement& s, const AssertEqual& d) {
    spec(s.loc);
    finish(s, "assert_equal", normal_order(eval(d.lhs) - eval(d.rhs), *spec_),
           [&](double th) { return std::vector{num(d.lhs, th) - num(d.rhs, th)}; });
  }

  void handle(const Statement& s, const AssertBracket& d) {
    const AlgebraSpec& sp = spec(s.loc);
    const UnitScalar factor = constant(eval(d.s), d.s.loc, "bracket parameter");
    OpExpr residual = bracket(eval(d.x), eval(d.y), factor, sp);
    if (d.rhs) {
      residual = normal_order(residual - eval(*d.rhs), sp);
    }
    finish(s, "assert_bracket", residual, [&](double th) {
      const auto x = num(d.x, th);
      const auto y = num(d.y, th);
      auto r = x * y - scalar(factor, th) * (y * x);
      if (d.rhs) {
        r = r - num(*d.rhs, th);
      }
      return std::vector{r};
    });
  }

  void handle(const Statement& s, const VerifyMap& d) {
    const AlgebraSpec& sp = spec(s.loc);
    auto it = maps_.find(d.map);
    if (it == maps_.end()) {
      throw SemanticError(s.loc, "undefined map '" + d.map + "'");
    }
    ExchangeMatrix expected = induced_exchange(it->second, sp.exchange_matrix(), sp.qmode());
    try {
      if (d.all) {
        expected.fill(sp.normalize(constant(eval(*d.all), d.all->loc, "expected exchange factor")));
      }
      for (const auto& e : d.entries) {
        const std::size_t i = mode_index(e.a, s.loc);
        const std::size_t j = mode_index(e.b, s.loc);
        expected.set(i, j, sp.normalize(constant(eval(e.value), e.value.loc, "expected exchange factor")));
      }
    } catch (const SpecError& e) {
      throw SemanticError(s.loc, e.what());
    }

    const ExchangeReport rep = verify_klein(it->second, sp, expected);
    AssertionResult r = start(s, "verify_map");
    r.symbolic_pass = rep.all_pass();
    r.witness = "0";
    for (const auto* group : {&rep.same_mode, &rep.pairs}) {
      for (const auto& c : *group) {
        if (!c.pass && r.witness == "0") {
          r.witness = c.relation + " (" + sp.mode(c.i).name + "," + sp.mode(c.j).name +
                      "): " + kleinkit::render(c.residual, sp);
        }
      }
    }
    const DressingMap& map = it->second;
    run_numeric(r, [&](double th) { return relation_residuals(map, expected, th); });
    complete(std::move(r));
  }

  // The relations checked by verify_klein, rebuilt from dressed generator matrices.
  std::vector<MatrixOperator> relation_residuals(const DressingMap& map, const ExchangeMatrix& expected, double th) {
    const AlgebraSpec& sp = *spec_;
    const std::size_t n = sp.size();
    const auto id = MatrixOperator::identity(space_->dimension());
    std::vector<MatrixOperator> t, td, nn;
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back(evaluate(dressed_annihilator(map, i), sp, *space_, th));
      td.push_back(t.back().adjoint());
      nn.push_back(td.back() * t.back());
    }
    std::vector<MatrixOperator> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (sp.is_fermion(i)) {
        out.push_back(t[i] * td[i] + td[i] * t[i] - id);
        out.push_back(t[i] * t[i]);
      } else {
        out.push_back(t[i] * td[i] - td[i] * t[i] - id);
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        const Complex qij = scalar(expected(i, j), th);
        out.push_back(t[i] * t[j] - qij * (t[j] * t[i]));
        out.push_back(t[i] * td[j] - (1.0 / qij) * (td[j] * t[i]));
        out.push_back(nn[i] * nn[j] - nn[j] * nn[i]);
      }
    }
    return out;
  }

  AssertionResult start(const Statement& s, std::string kind) {
    AssertionResult r;
    r.line = s.loc.line;
    r.kind = std::move(kind);
    r.statement = render(s);
    return r;
  }

  void finish(const Statement& s, std::string kind, const OpExpr& residual, const NumericResiduals& numeric) {
    AssertionResult r = start(s, std::move(kind));
    r.symbolic_pass = residual.empty();
    r.witness = kleinkit::render(residual, *spec_);
    run_numeric(r, numeric);
    complete(std::move(r));
  }

  void complete(AssertionResult r) {
    r.pass = r.symbolic_pass &&
             std::all_of(r.numeric.begin(), r.numeric.end(), [](const NumericResult& n) { return n.pass; });
    report_.assertions.push_back(std::move(r));
  }

  void run_numeric(AssertionResult& r, const NumericResiduals& residuals) {
    const AlgebraSpec& sp = *spec_;
    const auto dim = options_.numeric_dim ? options_.numeric_dim : script_numeric_.dim;
    auto thetas = options_.theta ? options_.theta : script_numeric_.theta;
    if (!thetas && q_theta_) {
      thetas = std::vector<double>{*q_theta_};
    }
    const double tol = options_.tol.value_or(script_numeric_.tol.value_or(default_tol));

    std::vector<double> probe;
    if (sp.qmode().is_formal()) {
      if (!thetas) {
        return;
      }
      probe = *thetas;
    } else {
      if (!dim && !thetas) {
        return;
      }
      probe = {sp.qmode().theta()};
    }

    if (!space_) {
      try {
        space_.emplace(FockSpace::for_spec(sp, dim.value_or(default_dim)));
      } catch (const SpecError& e) {
        throw SemanticError(SourceLoc{r.line, 1}, e.what());
      }
    }
    for (double theta : probe) {
      NumericResult n;
      n.theta = theta;
      n.pass = true;
      std::vector<MatrixOperator> mats;
      try {
        mats = residuals(theta);
      } catch (const SpecError& e) {
        throw SemanticError(SourceLoc{r.line, 1}, e.what());
      }
      for (const auto& m : mats) {
        const CheckReport c = check_zero(m, *space_, tol);
        n.interior_residual = std::max(n.interior_residual, c.interior_residual);
        n.full_residual = std::max(n.full_residual, c.full_residual);
        n.pass = n.pass && c.pass;
      }
      r.numeric.push_back(n);
    }
  }

  // --- numeric evaluation -------------------------------------------------
  //
  // Products, adjoints and brackets are formed from matrices, so the numeric
  // check does not rely on the rewriting engine. Generators, phases and map
  // images are taken from their symbolic values.

  Complex scalar(const UnitScalar& c, double theta) const {
    return kleinkit::eval(c, spec_->qmode().is_formal() ? theta : spec_->qmode().theta());
  }

  MatrixOperator num(const Expr& e, double theta) {
    using K = Expr::Kind;
    const AlgebraSpec& sp = *spec_;
    auto arg = [&](std::size_t i) { return num(e.args[i], theta); };
    auto bracket_of = [&](const Complex& s) {
      const auto x = arg(0);
      const auto y = arg(1);
      return x * y - s * (y * x);
    };
    switch (e.kind) {
    case K::ref: {
      auto it = let_exprs_.find(e.name);
      if (it != let_exprs_.end()) {
        return num(*it->second, theta);
      }
      break;
    }
    case K::adj: return arg(0).adjoint();
    case K::comm: return bracket_of(1.0);
    case K::acomm: return bracket_of(-1.0);
    case K::qcomm: return bracket_of(scalar(constant(eval(e.args[2]), e.args[2].loc, "bracket parameter"), theta));
    case K::neg: return Complex(-1.0) * arg(0);
    case K::add: return arg(0) + arg(1);
    case K::sub: return arg(0) - arg(1);
    case K::mul: return arg(0) * arg(1);
    case K::div: return (1.0 / scalar(constant(eval(e.args[1]), e.args[1].loc, "divisor"), theta)) * arg(0);
    case K::pow:
      if (e.exponent >= 0) {
        const auto base = arg(0);
        auto acc = MatrixOperator::identity(space_->dimension());
        for (std::int64_t k = 0; k < e.exponent; ++k) {
          acc = acc * base;
        }
        return acc;
      }
      break;
    default: break;
    }
    return evaluate(eval(e), sp, *space_, theta);
  }

  // --- expressions --------------------------------------------------------

  UnitScalar constant(const OpExpr& e, SourceLoc loc, const std::string& what) const {
    auto s = e.as_scalar();
    if (!s) {
      throw SemanticError(loc, what + " must be a scalar");
    }
    return *s;
  }

  OpExpr eval(const Expr& e) { return eval_with(*spec_, e); }

  OpExpr eval_with(const AlgebraSpec& sp, const Expr& e) {
    using K = Expr::Kind;
    auto arg = [&](std::size_t i) { return eval_with(sp, e.args[i]); };
    try {
      switch (e.kind) {
      case K::number:
      case K::complex: return OpExpr(UnitScalar(e.value));
      case K::q: return OpExpr(sp.normalize(UnitScalar::q()));
      case K::ref: {
        auto it = lets_.find(e.name);
        if (it == lets_.end()) {
          throw SemanticError(e.loc, "undefined name '" + e.name + "'");
        }
        return it->second;
      }
      case K::ann: return OpExpr::ann(mode_index(e.name, e.loc));
      case K::cre: return OpExpr::cre(mode_index(e.name, e.loc));
      case K::phase: {
        PhaseVector m(sp.size());
        std::set<std::size_t> seen;
        for (const auto& [name, exponent] : e.phase) {
          const std::size_t k = mode_index(name, e.loc);
          if (!seen.insert(k).second) {
            throw SemanticError(e.loc, "mode '" + name + "' listed twice in phase");
          }
          m[k] = exponent;
        }
        return normal_order(OpExpr::phase(std::move(m)), sp);
      }
      case K::adj: return adjoint(arg(0), sp);
      case K::comm: return bracket(arg(0), arg(1), UnitScalar(1), sp);
      case K::acomm: return bracket(arg(0), arg(1), UnitScalar(-1), sp);
      case K::qcomm: return bracket(arg(0), arg(1), constant(arg(2), e.args[2].loc, "bracket parameter"), sp);
      case K::apply_map: {
        auto it = maps_.find(e.name);
        if (it == maps_.end()) {
          throw SemanticError(e.loc, "undefined map '" + e.name + "'");
        }
        return apply_dressing(it->second, arg(0), sp);
      }
      case K::neg: return -arg(0);
      case K::add: return normal_order(arg(0) + arg(1), sp);
      case K::sub: return normal_order(arg(0) - arg(1), sp);
      case K::mul: return multiply(arg(0), arg(1), sp);
      case K::div: {
        const UnitScalar d = constant(arg(1), e.args[1].loc, "divisor");
        if (!d.is_monomial()) {
          throw SemanticError(e.args[1].loc, "divisor must be a monomial c*q^k");
        }
        return normal_order(arg(0) * d.inverse(), sp);
      }
      case K::pow: return power(sp, arg(0), e.exponent, e.loc);
      }
    } catch (const SpecError& ex) {
      throw SemanticError(e.loc, ex.what());
    } catch (const std::domain_error& ex) {
      throw SemanticError(e.loc, ex.what());
    } catch (const std::overflow_error& ex) {
      throw SemanticError(e.loc, ex.what());
    }
    return {};
  }

  OpExpr power(const AlgebraSpec& sp, const OpExpr& base, std::int64_t n, SourceLoc loc) {
    if (n < 0) {
      // invertible only as c * Phi(m)
      if (base.size() != 1) {
        throw SemanticError(loc, "negative powers need a scalar monomial or a phase");
      }
      const auto& [w, c] = *base.terms().begin();
      if (!c.is_monomial() || w.size() > 1 || (w.size() == 1 && !w[0].is_phase())) {
        throw SemanticError(loc, "negative powers need a scalar monomial or a phase");
      }
      Word inv;
      if (!w.empty()) {
        inv.push_back(Letter::phase_of(-w[0].phase));
      }
      return power(sp, normal_order(OpExpr::word(inv, c.inverse()), sp), -n, loc);
    }
    OpExpr acc = OpExpr::identity();
    for (std::int64_t k = 0; k < n; ++k) {
      acc = multiply(acc, base, sp);
    }
    return acc;
  }

  const Program& program_;
  const RunOptions& options_;
  RunReport report_;
  Numeric script_numeric_;

  std::vector<Mode> modes_;
  std::vector<std::pair<const Statement*, const ExchangeDecl*>> exchanges_;
  const QDecl* qdecl_ = nullptr;
  SourceLoc qdecl_loc_;
  std::optional<double> q_theta_;
  std::optional<AlgebraSpec> spec_;
  std::optional<FockSpace> space_;
  std::map<std::string, OpExpr> lets_;
  std::map<std::string, const Expr*> let_exprs_;
  std::map<std::string, DressingMap> maps_;
};

} // namespace

RunReport run(const Program& program, const RunOptions& options, std::string script_name) {
  return Runner(program, options, std::move(script_name)).run();
}

RunReport check(std::string_view text, const RunOptions& options, std::string script_name) {
  try {
    return run(parse(text), options, script_name);
  } catch (const ParseError& e) {
    RunReport r;
    r.script = std::move(script_name);
    r.exit_code = 2;
    r.error = ErrorInfo{e.loc(), e.what()};
    return r;
  }
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json assertions = nlohmann::json::array();
  for (const auto& a : report.assertions) {
    nlohmann::json numeric = nlohmann::json::array();
    for (const auto& n : a.numeric) {
      numeric.push_back({{"theta", n.theta},
                         {"interior_residual", n.interior_residual},
                         {"full_residual", n.full_residual}});
    }
    assertions.push_back({{"line", a.line},
                          {"kind", a.kind},
                          {"statement", a.statement},
                          {"symbolic_pass", a.symbolic_pass},
                          {"witness", a.witness},
                          {"numeric", numeric},
                          {"pass", a.pass}});
  }
  nlohmann::json out = {{"script", report.script},
                        {"assertions", assertions},
                        {"summary", {{"passed", report.passed}, {"failed", report.failed}}},
                        {"exit_code", report.exit_code}};
  if (report.error) {
    out["error"] = {{"line", report.error->loc.line},
                    {"column", report.error->loc.column},
                    {"message", report.error->message}};
  }
  return out;
}

std::string to_text(const RunReport& report) {
  std::ostringstream os;
  for (const auto& a : report.assertions) {
    os << report.script << ":" << a.line << ": " << (a.pass ? "PASS" : "FAIL") << "  " << a.statement << "\n";
    if (!a.symbolic_pass) {
      os << "    witness: " << a.witness << "\n";
    }
    for (const auto& n : a.numeric) {
      os << "    theta=" << n.theta << " interior=" << n.interior_residual << " full=" << n.full_residual
         << (n.pass ? "" : "  (numeric FAIL)") << "\n";
    }
  }
  if (report.error) {
    os << report.script << ":" << report.error->message << "\n";
  }
  os << report.passed << " passed, " << report.failed << " failed\n";
  return os.str();
}

} // namespace kleinkit::dsl
