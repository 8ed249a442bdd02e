#include "kleinkit/dsl.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace kleinkit::dsl;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> bundled_scripts() {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(KLEINKIT_SCRIPTS_DIR)) {
    if (entry.path().extension() == ".kq") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST(Parse, Statements) {
  const auto p = parse(R"(
    mode a boson;  # comment
    mode b' fermion;
    exchange a b' = (0,1)*q^2;
    q formal;
    let x = 3/2 * cre(a) * phase[a:1, b':-1] - adj(ann(b'));
    map K = { b' -> q*phase[a:1] };
    map L = "cascade";
    assert_zero comm(x, x);
    assert_equal acomm(ann(b'), cre(b')), 1;
    assert_bracket ann(a), map(K, ann(b')), q^-1 = 0;
    verify_map K expect a b' = (0,1)*q;
    verify_map L;
    numeric dim 3;
    numeric theta pi, 2*pi/7, -0.25;
    numeric tol 1e-12;
  )");
  ASSERT_EQ(p.statements.size(), 15u);
  EXPECT_EQ(std::get<ModeDecl>(p.statements[1].node).name, "b'");
  EXPECT_EQ(std::get<ModeDecl>(p.statements[1].node).statistics, kleinkit::Statistics::fermion);
  EXPECT_EQ(p.statements[1].loc.line, 3u);
  const auto& th = std::get<NumericTheta>(p.statements[13].node).values;
  ASSERT_EQ(th.size(), 3u);
  EXPECT_DOUBLE_EQ(th[1], 2 * std::numbers::pi / 7);
  EXPECT_DOUBLE_EQ(th[2], -0.25);
  EXPECT_EQ(std::get<MapDecl>(p.statements[6].node).catalog, "cascade");
  EXPECT_TRUE(std::get<AssertBracket>(p.statements[9].node).rhs.has_value());
}

TEST(Parse, SyntaxErrorLocation) {
  try {
    parse("mode c boson;\nlet x = ann(c");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.loc().line, 2u);
    EXPECT_EQ(e.loc().column, 14u);
    EXPECT_FALSE(e.expected().empty());
    EXPECT_NE(std::string(e.what()).find("2:14:"), std::string::npos);
  }
  try {
    parse("let x = ann(c");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.loc().line, 1u);
    EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), "')'"), e.expected().end());
  }
  EXPECT_THROW(parse("mode a boson"), ParseError);
  EXPECT_THROW(parse("mode a quark;"), ParseError);
  EXPECT_THROW(parse("let x = 1/0;"), ParseError);
  EXPECT_THROW(parse("let x = ann(a) @ 2;"), ParseError);
}

TEST(Parse, RenderRoundTrip) {
  for (const auto& path : bundled_scripts()) {
    const auto p = parse(slurp(path));
    const auto text = render(p);
    EXPECT_EQ(parse(text), p) << path;
    EXPECT_EQ(render(parse(text)), text) << path;
  }
}

TEST(Parse, RealNumbers) {
  EXPECT_DOUBLE_EQ(parse_real("pi/3"), std::numbers::pi / 3);
  EXPECT_DOUBLE_EQ(parse_real("-2*pi/7"), -2 * std::numbers::pi / 7);
  EXPECT_DOUBLE_EQ(parse_real("1e-12"), 1e-12);
  EXPECT_THROW(parse_real("pi pi"), kleinkit::Error);
}

TEST(Run, BundledScriptsPass) {
  for (const auto& path : bundled_scripts()) {
    const auto report = check(slurp(path), {}, path.filename().string());
    if (path.filename() == "failing.kq") {
      EXPECT_EQ(report.exit_code, 1);
      ASSERT_EQ(report.assertions.size(), 1u);
      EXPECT_EQ(report.assertions[0].line, 3u);
      EXPECT_EQ(report.assertions[0].witness, "1");
    } else {
      EXPECT_EQ(report.exit_code, 0) << path << "\n" << to_text(report);
      EXPECT_EQ(report.failed, 0u);
      EXPECT_GT(report.passed, 0u);
    }
  }
}

TEST(Run, InlineParityDressing) {
  const auto r = check(
      "mode a boson; mode b boson; exchange a b = -1; q = -1;\n"
      "let eta = phase[a:1,b:1]; let bt = eta*ann(b); assert_zero comm(ann(a), bt);\n"
      "assert_zero acomm(ann(a), ann(b)); assert_zero comm(ann(a), adj(bt));\n",
      {});
  EXPECT_EQ(r.exit_code, 0) << to_text(r);
  EXPECT_EQ(r.passed, 3u);
}

TEST(Run, NumericChecksFollowOptions) {
  const std::string src = "mode a boson;\nq formal;\nlet x = comm(ann(a), cre(a));\nassert_equal x, 1;\n";
  EXPECT_TRUE(check(src, {}).assertions[0].numeric.empty());
  RunOptions opts;
  opts.theta = std::vector<double>{std::numbers::pi, 1.0};
  opts.numeric_dim = 5;
  const auto r = check(src, opts);
  ASSERT_EQ(r.assertions[0].numeric.size(), 2u);
  EXPECT_LE(r.assertions[0].numeric[0].interior_residual, 1e-14);
  EXPECT_NEAR(r.assertions[0].numeric[0].full_residual, 5.0, 1e-12);
  EXPECT_TRUE(r.assertions[0].pass);
}

TEST(Run, SemanticErrorsExitTwo) {
  for (const char* src : {
           "mode a boson;\nassert_zero ann(b);",
           "mode a boson;\nmode a fermion;",
           "mode a boson;\nlet x = ann(a);\nmode b boson;",
           "numeric dim 3;\nnumeric dim 4;",
           "mode a boson;\nmap K = \"total-parity-on-b\";",
           "mode a boson;\nq = (1,1);",
           "mode a boson;\nlet x = ann(a)^-1;",
           "mode a boson;\nverify_map K;",
       }) {
    const auto r = check(src, {});
    EXPECT_EQ(r.exit_code, 2) << src;
    ASSERT_TRUE(r.error.has_value()) << src;
    EXPECT_GT(r.error->loc.line, 0u) << src;
  }
  const auto parse_fail = check("mode c boson;\nlet x = ann(c", {}, "p.kq");
  EXPECT_EQ(parse_fail.exit_code, 2);
  EXPECT_EQ(parse_fail.script, "p.kq");
  EXPECT_EQ(parse_fail.error->loc.line, 2u);
}

TEST(Run, AssertionsAfterAFailureStillRun) {
  const auto r = check("mode a boson;\nassert_zero ann(a);\nassert_zero comm(ann(a), ann(a));\n", {});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.passed, 1u);
  EXPECT_EQ(r.failed, 1u);
  EXPECT_EQ(r.assertions[0].witness, "a[a]");
}

TEST(Json, ReportFields) {
  RunOptions opts;
  opts.numeric_dim = 3;
  const auto r = check("mode a boson;\nexchange a a = 1;\n", opts, "x.kq");
  EXPECT_EQ(r.exit_code, 2);
  const auto j = to_json(check("mode a boson;\nq = -1;\nassert_zero comm(ann(a), cre(a));\n", opts, "f.kq"));
  EXPECT_EQ(j["script"], "f.kq");
  EXPECT_EQ(j["exit_code"], 1);
  EXPECT_EQ(j["summary"]["passed"], 0);
  EXPECT_EQ(j["summary"]["failed"], 1);
  const auto& a = j["assertions"][0];
  EXPECT_EQ(a["line"], 3);
  EXPECT_EQ(a["kind"], "assert_zero");
  EXPECT_EQ(a["symbolic_pass"], false);
  EXPECT_EQ(a["pass"], false);
  ASSERT_EQ(a["numeric"].size(), 1u);
  for (const char* key : {"theta", "interior_residual", "full_residual"}) {
    EXPECT_TRUE(a["numeric"][0].contains(key)) << key;
  }
}
