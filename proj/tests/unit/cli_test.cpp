#include "common.hpp"

#include <fstream>
#include <sstream>

#include "minischema.hpp"
#include "workspace.hpp"

using namespace fanlib;
using namespace fanlib::cli;

namespace {

std::string run(const std::string& doc) {
  Workspace w = parse_document(doc);
  std::string out;
  for (const auto& r : run_all(w)) out += render_text(r);
  return out;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

const char* kPrelude =
    "monoid N : Z = { (1) }\n"
    "fan L = spec N\n"
    "fan P1 = glue L, L along { 0.1 = 1.1 [[-1]] }\n";

}  // namespace

TEST_CASE("faces query") {
  std::string out = run("monoid P : Z^1 = { (2), (3) }\nquery faces P\n");
  CHECK(contains(out, "count: 2"));
}

TEST_CASE("classify query shows the reducedness witness") {
  std::string out = run("monoid N : Z = { (1) }\nhom h : N -> N = [[2]]\nquery classify h\n");
  CHECK(contains(out, "reduced: no (witness p=1,n=2)"));
}

TEST_CASE("cohomology query") {
  std::string out = run("query cohomology (spec Z) Z/4 1\n");
  CHECK(contains(out, "group: Z/4"));
}

TEST_CASE("proper query") {
  std::string out = run(std::string(kPrelude) + "map f = point P1\nquery proper f\n");
  CHECK(contains(out, "proper: yes"));
}

TEST_CASE("dot output") {
  auto count = [](const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (std::size_t p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
  };
  std::string a2 = emit_dot(spec_fan(t::nat(2)));
  CHECK(count(a2, "[label=") == 4);
  CHECK(count(a2, "->") == 4);
  Workspace w = parse_document(std::string(kPrelude) + "fan D = glue L, L along { 0.1 = 1.1 [[1]] }\n");
  std::string d = emit_dot(std::get<Fan>(w.values.at("D")));
  CHECK(count(d, "[label=") == 3);
  CHECK(count(d, "->") == 2);
  CHECK(d == emit_dot(std::get<Fan>(w.values.at("D"))));
}

TEST_CASE("parse errors carry position and token") {
  try {
    parse_document("monoid P : Z^2 = { (1,0), (1) }\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.col == 27);
    CHECK(e.token == "(");
  }
  try {
    parse_document("group A = Z\n\nquery faces Q\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.token == "Q");
  }
  CHECK_THROWS_AS(parse_document("query frobnicate\n"), ParseError);
  CHECK_THROWS_AS(parse_document("group A = Z\ngroup A = Z\n"), ParseError);
  CHECK_THROWS_AS(parse_document("group A = Z\nmonoid M : Z = { (1) }\nquery faces A\n"), ParseError);
  CHECK_THROWS_AS(parse_document("monoid M : Z = { (1) }\nhom h : M -> M = [[1,2]]\n"), ParseError);
  CHECK_THROWS_AS(parse_document("group T = Z/2\nmonoid M : T = { (;1) }\nmonoid N : Z/4 = { (;1) }\nhom h : M -> N = [] mixed [] tor [[1]]\n"),
                  ParseError);
}

TEST_CASE("domain errors are distinct") {
  CHECK_THROWS_AS(parse_document("monoid N : Z = { (1) }\nhom h : N -> N = [[-1]]\n"), DomainError);
}

TEST_CASE("canonical documents round trip") {
  std::string doc =
      "# sample\n"
      "group A = Z^2 x Z/6\n"
      "monoid P : Z^1 = { (2), (3) }\n"
      "\n"
      "monoid Q : A = { (1,0;0), (0,1;2) }\n"
      "hom h : P -> P = [[1]]\n"
      "query transform Q sat\n";
  Workspace w = parse_document(doc);
  CHECK(serialize(w) == doc);
  CHECK(serialize(parse_document(serialize(w))) == doc);
}

TEST_CASE("multi-line statements") {
  std::string doc = "monoid P : Z^2 = {\n  (1,0),\n  (0,1)\n}\nquery faces P\n";
  Workspace w = parse_document(doc);
  CHECK(serialize(w) == "monoid P : Z^2 = { (1,0), (0,1) }\nquery faces P\n");
}

TEST_CASE("reports satisfy the published schema") {
  std::ifstream in(FANLIB_SCHEMA_PATH);
  REQUIRE(in);
  Json schema = Json::parse(in);
  Workspace w = parse_document(std::string(kPrelude) +
                               "map f = point P1\nquery proper f\nquery strata P1\nquery cohomology P1 Z/2 1\n");
  auto reports = run_all(w);
  REQUIRE(reports.size() == 3);
  for (const auto& r : reports) CHECK(testschema::validate(schema, r));
  CHECK(reports[2].contains("error"));
  Json bad = {{"query", "x"}};
  CHECK_FALSE(testschema::validate(schema, bad));
}

TEST_CASE("parallel runs match sequential runs") {
  Workspace w = parse_document(std::string(kPrelude) +
                               "map f = point P1\nquery proper f\nquery strata P1\nquery torus P1\nquery dot L\n");
  auto a = run_all(w, 1), b = run_all(w, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].dump() == b[i].dump());
}
