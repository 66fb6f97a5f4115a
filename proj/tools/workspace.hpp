#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fanlib/fan.hpp"

namespace fanlib::cli {

using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, std::size_t col, std::string token, const std::string& msg);
  std::size_t line, col;
  std::string token;
};

// Library rejected a well-formed statement.
struct DomainError : std::runtime_error {
  DomainError(std::size_t line, const std::string& msg);
  std::size_t line;
};

struct Token {
  enum Kind { Ident, Number, Punct } kind;
  std::string text;
  std::size_t line, col;
};

using Value = std::variant<AbGroup, FineMonoid, MonoidHom, Fan, FanMap>;

struct Statement {
  enum Kind { Blank, Comment, Binding, Query } kind;
  std::string raw;            // comment text
  std::vector<Token> tokens;  // bindings and queries
};

struct Workspace {
  std::vector<Statement> statements;
  std::map<std::string, Value> values;
  std::vector<std::string> order;  // binding names in document order
  std::vector<std::size_t> queries;  // indices into statements
};

Workspace parse_document(const std::string& text);
std::string serialize(const Workspace& w);
std::string statement_text(const Statement& s);

// One report per query: {"query": ..., "result": {...}} or {"query": ..., "error": ...}.
Json run_query(const Workspace& w, const Statement& q);
std::vector<Json> run_all(const Workspace& w, unsigned jobs = 1);
std::string render_text(const Json& report);
// Reports in order, blank line between.
std::string render_reports(const std::vector<Json>& reports);

std::string emit_dot(const Fan& x);
Json export_json(const Workspace& w);

const char* kind_name(const Value& v);

}  // namespace fanlib::cli
