#pragma once

#include "kleinkit/algebra.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

/// Assertion scripts (.kq): declare modes and exchange statistics, build
/// dressed operators, and assert identities between them.
namespace kleinkit::dsl {

struct SourceLoc {
  std::size_t line = 1;
  std::size_t column = 1;
};

class ParseError : public Error {
public:
  ParseError(SourceLoc loc, const std::string& message, std::vector<std::string> expected = {});

  SourceLoc loc() const { return loc_; }
  const std::vector<std::string>& expected() const { return expected_; }

private:
  SourceLoc loc_;
  std::vector<std::string> expected_;
};

class SemanticError : public Error {
public:
  SemanticError(SourceLoc loc, const std::string& message);
  SourceLoc loc() const { return loc_; }

private:
  SourceLoc loc_;
};

using PhaseEntries = std::vector<std::pair<std::string, std::int64_t>>;

struct Expr {
  enum class Kind {
    number,  // exact rational literal
    complex, // (re,im)
    q,
    ref,
    ann,
    cre,
    phase,
    adj,
    comm,
    acomm,
    qcomm,
    apply_map,
    neg,
    add,
    sub,
    mul,
    div,
    pow,
  };

  Kind kind = Kind::number;
  GaussRational value;
  std::string name;
  PhaseEntries phase;
  std::int64_t exponent = 0;
  std::vector<Expr> args;
  SourceLoc loc;

  /// Structural equality; source locations are ignored.
  friend bool operator==(const Expr& a, const Expr& b);
};

struct ModeDecl {
  std::string name;
  Statistics statistics = Statistics::boson;
  friend bool operator==(const ModeDecl&, const ModeDecl&) = default;
};

struct ExchangeDecl {
  std::string a;
  std::string b;
  Expr value;
  friend bool operator==(const ExchangeDecl&, const ExchangeDecl&) = default;
};

struct QDecl {
  enum class Kind { formal, value, theta };
  Kind kind = Kind::formal;
  Expr value;
  double theta = 0.0;
  friend bool operator==(const QDecl&, const QDecl&) = default;
};

struct LetDecl {
  std::string name;
  Expr value;
  friend bool operator==(const LetDecl&, const LetDecl&) = default;
};

/// `b -> phase[a:1,b:1]`: mode b is dressed by the given scalar times phase.
struct MapEntry {
  std::string mode;
  Expr factor;
  friend bool operator==(const MapEntry&, const MapEntry&) = default;
};

struct MapDecl {
  std::string name;
  std::optional<std::string> catalog;
  std::vector<MapEntry> entries;
  friend bool operator==(const MapDecl&, const MapDecl&) = default;
};

struct AssertZero {
  Expr value;
  friend bool operator==(const AssertZero&, const AssertZero&) = default;
};

struct AssertEqual {
  Expr lhs;
  Expr rhs;
  friend bool operator==(const AssertEqual&, const AssertEqual&) = default;
};

/// [x, y]_s = rhs (rhs defaults to 0)
struct AssertBracket {
  Expr x;
  Expr y;
  Expr s;
  std::optional<Expr> rhs;
  friend bool operator==(const AssertBracket&, const AssertBracket&) = default;
};

struct ExpectEntry {
  std::string a;
  std::string b;
  Expr value;
  friend bool operator==(const ExpectEntry&, const ExpectEntry&) = default;
};

/// Without expectations the map is checked against its induced exchange matrix.
struct VerifyMap {
  std::string map;
  std::optional<Expr> all;
  std::vector<ExpectEntry> entries;
  friend bool operator==(const VerifyMap&, const VerifyMap&) = default;
};

struct NumericDim {
  std::size_t dim = 4;
  friend bool operator==(const NumericDim&, const NumericDim&) = default;
};

struct NumericTheta {
  std::vector<double> values;
  friend bool operator==(const NumericTheta&, const NumericTheta&) = default;
};

struct NumericTol {
  double tol = 1e-10;
  friend bool operator==(const NumericTol&, const NumericTol&) = default;
};

using StatementNode = std::variant<ModeDecl, ExchangeDecl, QDecl, LetDecl, MapDecl, AssertZero, AssertEqual,
                                   AssertBracket, VerifyMap, NumericDim, NumericTheta, NumericTol>;

struct Statement {
  SourceLoc loc;
  StatementNode node;

  friend bool operator==(const Statement& a, const Statement& b) { return a.node == b.node; }
};

struct Program {
  std::vector<Statement> statements;
  friend bool operator==(const Program&, const Program&) = default;
};

/// Parses a whole script or throws ParseError at the first problem.
Program parse(std::string_view text);

/// Canonical source text; parse(render(p)) == p.
std::string render(const Program& program);
std::string render(const Statement& statement);
std::string render(const Expr& expr);

struct RunOptions {
  std::optional<std::size_t> numeric_dim;
  std::optional<std::vector<double>> theta;
  std::optional<double> tol;
  std::uint64_t seed = 0;
};

struct NumericResult {
  double theta = 0.0;
  double interior_residual = 0.0;
  double full_residual = 0.0;
  bool pass = false;
};

struct AssertionResult {
  std::size_t line = 0;
  std::string kind;
  std::string statement;
  bool symbolic_pass = false;
  /// Normal form of the residual ("0" when it vanishes).
  std::string witness;
  std::vector<NumericResult> numeric;
  bool pass = false;
};

struct ErrorInfo {
  SourceLoc loc;
  std::string message;
};

struct RunReport {
  std::string script;
  std::vector<AssertionResult> assertions;
  std::size_t passed = 0;
  std::size_t failed = 0;
  /// 0: all assertions pass, 1: an assertion failed, 2: parse or semantic error.
  int exit_code = 0;
  std::optional<ErrorInfo> error;
};

/// Executes statements in source order. Semantic errors end the run with
/// exit code 2 and are recorded in the report.
RunReport run(const Program& program, const RunOptions& options, std::string script_name = {});

/// parse + run; parse errors are reported, not thrown.
RunReport check(std::string_view text, const RunOptions& options, std::string script_name = {});

nlohmann::json to_json(const RunReport& report);
std::string to_text(const RunReport& report);

/// "pi/3", "2*pi/7", "-1.5", "1e-12"
double parse_real(std::string_view text);

} // namespace kleinkit::dsl
