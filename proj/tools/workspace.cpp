#include "workspace.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cctype>
#include <functional>
#include <sstream>
#include <thread>

namespace fanlib::cli {

ParseError::ParseError(std::size_t l, std::size_t c, std::string tok, const std::string& msg)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg +
                         (tok.empty() ? std::string(" at end of statement") : " at '" + tok + "'")),
      line(l),
      col(c),
      token(std::move(tok)) {}

DomainError::DomainError(std::size_t l, const std::string& msg)
    : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l) {}

const char* kind_name(const Value& v) {
  switch (v.index()) {
    case 0: return "group";
    case 1: return "monoid";
    case 2: return "hom";
    case 3: return "fan";
    default: return "map";
  }
}

// ---------------------------------------------------------------- lexing

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

// Appends the tokens of one physical line; returns the bracket balance change.
int lex_line(const std::string& s, std::size_t line, std::vector<Token>& out) {
  int depth = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    std::size_t col = i + 1;
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && (ident_char(s[j]) || (s[j] == '-' && j + 1 < s.size() && std::isalpha(static_cast<unsigned char>(s[j + 1])))))
        ++j;
      out.push_back({Token::Ident, s.substr(i, j - i), line, col});
      i = j;
      continue;
    }
    bool neg = c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || neg) {
      std::size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Token::Number, s.substr(i, j - i), line, col});
      i = j;
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Token::Punct, "->", line, col});
      i += 2;
      continue;
    }
    static const std::string punct = "()[]{},;:=.^/|";
    if (punct.find(c) == std::string::npos) throw ParseError(line, col, std::string(1, c), "unexpected character");
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    out.push_back({Token::Punct, std::string(1, c), line, col});
    ++i;
  }
  return depth;
}

// ---------------------------------------------------------------- token cursor

class Cursor {
 public:
  Cursor(const std::vector<Token>& t, const Workspace& w) : t_(t), w_(w) {}

  bool done() const { return i_ >= t_.size(); }
  const Token* peek(std::size_t k = 0) const { return i_ + k < t_.size() ? &t_[i_ + k] : nullptr; }
  bool at(const std::string& s, std::size_t k = 0) const { return peek(k) && peek(k)->text == s; }

  [[noreturn]] void error(const std::string& msg) const {
    if (done()) {
      const Token& last = t_.back();
      throw ParseError(last.line, last.col + last.text.size(), "", msg);
    }
    throw ParseError(t_[i_].line, t_[i_].col, t_[i_].text, msg);
  }
  [[noreturn]] void error_at(const Token& tok, const std::string& msg) const {
    throw ParseError(tok.line, tok.col, tok.text, msg);
  }

  const Token& next() {
    if (done()) error("unexpected end of statement");
    return t_[i_++];
  }
  void expect(const std::string& s) {
    if (!at(s)) error("expected '" + s + "'");
    ++i_;
  }
  bool accept(const std::string& s) {
    if (!at(s)) return false;
    ++i_;
    return true;
  }
  const Token& ident() {
    if (done() || peek()->kind != Token::Ident) error("expected a name");
    return next();
  }
  Int integer() {
    if (done() || peek()->kind != Token::Number) error("expected an integer");
    const Token& t = next();
    try {
      return std::stoll(t.text);
    } catch (const std::exception&) {
      error_at(t, "integer out of range");
    }
  }
  std::size_t index() {
    const Token* t = peek();
    Int v = integer();
    if (v < 0) error_at(*t, "expected a non-negative index");
    return static_cast<std::size_t>(v);
  }
  void finish() {
    if (!done()) error("unexpected trailing input");
  }

  template <class T>
  const T& get(const Token& name, const char* what) const {
    auto it = w_.values.find(name.text);
    if (it == w_.values.end()) error_at(name, "unresolved name");
    if (!std::holds_alternative<T>(it->second))
      error_at(name, std::string("'") + name.text + "' is a " + kind_name(it->second) + ", expected a " + what);
    return std::get<T>(it->second);
  }
  bool bound(const std::string& name) const { return w_.values.count(name) != 0; }
  const Value* lookup(const std::string& name) const {
    auto it = w_.values.find(name);
    return it == w_.values.end() ? nullptr : &it->second;
  }

  AbGroup group() {
    if (at("0")) {
      next();
      return AbGroup();
    }
    const Token& first = ident();
    if (first.text != "Z") return get<AbGroup>(first, "group");
    Vec orders;
    auto factor = [&]() {
      if (accept("^")) {
        Int r = integer();
        if (r < 0) error("negative rank");
        for (Int k = 0; k < r; ++k) orders.push_back(0);
      } else if (accept("/")) {
        const Token* t = peek();
        Int d = integer();
        if (d < 1) error_at(*t, "torsion order must be positive");
        orders.push_back(d);
      } else {
        orders.push_back(0);
      }
    };
    factor();
    while (at("x") && at("Z", 1)) {
      next();
      next();
      factor();
    }
    return AbGroup::from_orders(orders);
  }

  std::vector<Int> int_list(const std::string& close) {
    std::vector<Int> v;
    if (at(close)) return v;
    v.push_back(integer());
    while (accept(",")) v.push_back(integer());
    return v;
  }

  Vec element(const AbGroup& g) {
    const Token* open = peek();
    expect("(");
    Vec free = int_list(")");
    Vec tor;
    if (accept(";")) tor = int_list(")");
    expect(")");
    if (free.size() != g.rank() || tor.size() != g.torsion().size())
      error_at(*open, "element needs " + std::to_string(g.rank()) + " free and " +
                          std::to_string(g.torsion().size()) + " torsion coordinates for " + g.to_string());
    Vec x = free;
    x.insert(x.end(), tor.begin(), tor.end());
    return g.reduce(x);
  }

  Vec plain_vector(std::size_t n) {
    const Token* open = peek();
    expect("(");
    Vec v = int_list(")");
    expect(")");
    if (v.size() != n) error_at(*open, "vector needs " + std::to_string(n) + " coordinates");
    return v;
  }

  std::vector<Vec> element_set(const AbGroup& g) {
    std::vector<Vec> out;
    expect("{");
    if (accept("}")) return out;
    out.push_back(element(g));
    while (accept(",")) out.push_back(element(g));
    expect("}");
    return out;
  }

  // Block of a matrix literal with the given shape.
  Matrix block(std::size_t rows, std::size_t cols) {
    const Token* open = peek();
    expect("[");
    std::vector<Vec> r;
    if (!at("]")) {
      do {
        expect("[");
        r.push_back(int_list("]"));
        expect("]");
      } while (accept(","));
    }
    expect("]");
    if (r.empty()) {
      if (rows * cols != 0) error_at(*open, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
      return Matrix(rows, cols);
    }
    if (r.size() != rows) error_at(*open, "matrix has " + std::to_string(r.size()) + " rows, expected " + std::to_string(rows));
    for (const auto& row : r)
      if (row.size() != cols)
        error_at(*open, "matrix row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    return Matrix::from_rows(r, cols);
  }

  GroupHom hom_blocks(const AbGroup& src, const AbGroup& tgt) {
    const Token* start = peek();
    const std::size_t rs = src.rank(), ks = src.torsion().size(), rt = tgt.rank(), kt = tgt.torsion().size();
    Matrix free = block(rt, rs);
    Matrix mixed(kt, rs), tor(kt, ks);
    if (at(";") && at("mixed", 1)) next();
    if (accept("mixed")) mixed = block(kt, rs);
    if (at(";") && at("tor", 1)) next();
    if (accept("tor")) tor = block(kt, ks);
    Matrix m(rt + kt, rs + ks);
    for (std::size_t i = 0; i < rt; ++i)
      for (std::size_t j = 0; j < rs; ++j) m(i, j) = free(i, j);
    for (std::size_t i = 0; i < kt; ++i) {
      for (std::size_t j = 0; j < rs; ++j) m(rt + i, j) = mixed(i, j);
      for (std::size_t j = 0; j < ks; ++j) m(rt + i, rs + j) = tor(i, j);
    }
    try {
      return GroupHom(src, tgt, m);
    } catch (const std::invalid_argument& e) {
      error_at(*start, e.what());
    }
  }

 private:
  const std::vector<Token>& t_;
  const Workspace& w_;
  std::size_t i_ = 0;
};

FineMonoid whole_group(const AbGroup& g) {
  std::vector<Vec> gens;
  for (std::size_t i = 0; i < g.ngens(); ++i) {
    gens.push_back(unit_vector(g.ngens(), i));
    if (i < g.rank()) gens.push_back(vneg(unit_vector(g.ngens(), i)));
  }
  return FineMonoid(g, gens);
}

template <class F>
auto domain(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw DomainError(line, e.what());
  } catch (const std::overflow_error& e) {
    throw DomainError(line, e.what());
  } catch (const std::logic_error& e) {
    throw DomainError(line, e.what());
  }
}

Value parse_fan(Cursor& c, std::size_t line) {
  if (c.accept("spec")) {
    const FineMonoid& p = c.get<FineMonoid>(c.ident(), "monoid");
    return domain(line, [&] { return spec_fan(p); });
  }
  if (c.accept("classical")) {
    c.expect("lattice");
    const Token* gt = c.peek();
    AbGroup lat = c.group();
    if (!lat.torsion().empty()) c.error_at(*gt, "a classical lattice must be free");
    c.expect("cones");
    c.expect("{");
    ClassicalFanData d;
    d.rank = lat.rank();
    if (!c.at("}")) {
      do {
        c.expect("{");
        std::vector<Vec> gens;
        if (!c.at("}")) {
          gens.push_back(c.plain_vector(d.rank));
          while (c.accept(",")) gens.push_back(c.plain_vector(d.rank));
        }
        c.expect("}");
        d.cones.push_back(RationalCone::from_generators(d.rank, gens));
      } while (c.accept(";"));
    }
    c.expect("}");
    return domain(line, [&] { return from_classical(d); });
  }
  if (c.accept("glue")) {
    std::vector<Fan> pieces;
    pieces.push_back(c.get<Fan>(c.ident(), "fan"));
    while (c.accept(",")) pieces.push_back(c.get<Fan>(c.ident(), "fan"));
    c.expect("along");
    c.expect("{");
    std::vector<Identification> ids;
    auto point = [&](std::size_t& piece, std::size_t& pt) {
      const Token* t = c.peek();
      piece = c.index();
      c.expect(".");
      pt = c.index();
      if (piece >= pieces.size() || pt >= pieces[piece].size()) c.error_at(*t, "no such piece point");
    };
    if (!c.at("}")) {
      do {
        Identification id{};
        point(id.piece_a, id.point_a);
        c.expect("=");
        point(id.piece_b, id.point_b);
        id.iso = c.hom_blocks(pieces[id.piece_a].stalk(id.point_a).ambient(), pieces[id.piece_b].stalk(id.point_b).ambient());
        ids.push_back(id);
      } while (c.accept(";"));
    }
    c.expect("}");
    return domain(line, [&] { return glue(pieces, ids); });
  }
  if (c.accept("open")) {
    const Fan& x = c.get<Fan>(c.ident(), "fan");
    c.expect("{");
    std::vector<std::size_t> pts;
    if (!c.at("}")) {
      do {
        const Token* t = c.peek();
        pts.push_back(c.index());
        if (pts.back() >= x.size()) c.error_at(*t, "no such point");
      } while (c.accept(","));
    }
    c.expect("}");
    return domain(line, [&] { return open_subfan(x, pts); });
  }
  c.error("expected spec, classical, glue or open");
}

Value parse_map(Cursor& c, std::size_t line) {
  if (c.accept("=")) {
    if (c.accept("spec")) {
      const MonoidHom& h = c.get<MonoidHom>(c.ident(), "hom");
      return domain(line, [&] { return spec_of(h); });
    }
    if (c.accept("point")) {
      const Fan& x = c.get<Fan>(c.ident(), "fan");
      return domain(line, [&] { return to_point(x); });
    }
    if (c.accept("identity")) {
      const Fan& x = c.get<Fan>(c.ident(), "fan");
      return domain(line, [&] { return identity_map(x); });
    }
    c.error("expected spec, point or identity");
  }
  c.expect(":");
  const Fan& x = c.get<Fan>(c.ident(), "fan");
  c.expect("->");
  const Fan& y = c.get<Fan>(c.ident(), "fan");
  c.expect("=");
  c.expect("{");
  std::vector<std::optional<std::size_t>> pts(x.size());
  std::vector<std::optional<GroupHom>> maps(x.size());
  if (!c.at("}")) {
    do {
      const Token* t = c.peek();
      std::size_t a = c.index();
      if (a >= x.size()) c.error_at(*t, "no such source point");
      if (pts[a]) c.error_at(*t, "point given twice");
      c.expect("->");
      const Token* u = c.peek();
      std::size_t b = c.index();
      if (b >= y.size()) c.error_at(*u, "no such target point");
      pts[a] = b;
      maps[a] = c.hom_blocks(y.stalk(b).ambient(), x.stalk(a).ambient());
    } while (c.accept(";"));
  }
  c.expect("}");
  std::vector<std::size_t> p;
  std::vector<MonoidHom> m;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (!pts[a]) c.error("source point " + std::to_string(a) + " has no image");
    p.push_back(*pts[a]);
  }
  return domain(line, [&] {
    for (std::size_t a = 0; a < x.size(); ++a) m.emplace_back(y.stalk(p[a]), x.stalk(a), *maps[a]);
    return FanMap(x, y, p, m);
  });
}

std::pair<std::string, Value> parse_binding(Cursor& c) {
  const Token& kw = c.next();
  std::size_t line = kw.line;
  const Token& name = c.ident();
  if (c.bound(name.text)) c.error_at(name, "name already bound");
  if (kw.text == "group") {
    c.expect("=");
    return {name.text, c.group()};
  }
  if (kw.text == "monoid") {
    c.expect(":");
    AbGroup g = c.group();
    c.expect("=");
    std::vector<Vec> gens = c.element_set(g);
    return {name.text, domain(line, [&] { return FineMonoid(g, gens); })};
  }
  if (kw.text == "hom") {
    c.expect(":");
    const FineMonoid& src = c.get<FineMonoid>(c.ident(), "monoid");
    c.expect("->");
    const FineMonoid& tgt = c.get<FineMonoid>(c.ident(), "monoid");
    c.expect("=");
    GroupHom m = c.hom_blocks(src.ambient(), tgt.ambient());
    return {name.text, domain(line, [&] { return MonoidHom(src, tgt, m); })};
  }
  if (kw.text == "fan") {
    c.expect("=");
    return {name.text, parse_fan(c, line)};
  }
  if (kw.text == "map") return {name.text, parse_map(c, line)};
  c.error_at(kw, "unknown statement");
}

Json query_impl(const Workspace& w, const std::vector<Token>& toks, bool dry);

}  // namespace

Workspace parse_document(const std::string& text) {
  Workspace w;
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.pop_back();
  std::size_t i = 0;
  while (i < lines.size()) {
    const std::string& l = lines[i];
    std::size_t first = l.find_first_not_of(" \t");
    if (first == std::string::npos) {
      w.statements.push_back({Statement::Blank, "", {}});
      ++i;
      continue;
    }
    if (l[first] == '#') {
      w.statements.push_back({Statement::Comment, l, {}});
      ++i;
      continue;
    }
    Statement s{Statement::Binding, "", {}};
    int depth = lex_line(l, i + 1, s.tokens);
    std::size_t start = i++;
    while (depth > 0 && i < lines.size()) {
      depth += lex_line(lines[i], i + 1, s.tokens);
      ++i;
    }
    if (depth != 0) throw ParseError(start + 1, 1, s.tokens.front().text, "unbalanced brackets");
    if (s.tokens.front().text == "query") {
      s.kind = Statement::Query;
      query_impl(w, s.tokens, true);
      w.queries.push_back(w.statements.size());
    } else {
      Cursor c(s.tokens, w);
      auto [name, value] = parse_binding(c);
      c.finish();
      w.values.emplace(name, std::move(value));
      w.order.push_back(name);
    }
    w.statements.push_back(std::move(s));
  }
  // trailing blank lines carry no content
  while (!w.statements.empty() && w.statements.back().kind == Statement::Blank) w.statements.pop_back();
  return w;
}

std::string statement_text(const Statement& s) {
  if (s.kind == Statement::Blank) return "";
  if (s.kind == Statement::Comment) return s.raw;
  std::string out;
  int paren = 0, bracket = 0;
  const Token* prev = nullptr;
  for (const auto& t : s.tokens) {
    const std::string& x = t.text;
    bool tight = paren > 0 || bracket > 0;
    bool space = prev != nullptr;
    if (prev) {
      const std::string& p = prev->text;
      if (x == ")" || x == "]" || x == "," || x == "." || x == "^" || x == "/") space = false;
      if (p == "(" || p == "[" || p == "." || p == "^" || p == "/") space = false;
      if (tight && (x == ";" || p == "," || p == ";")) space = false;
      if (x == "[" && bracket > 0) space = false;
    }
    if (space) out += ' ';
    out += x;
    if (x == "(") ++paren;
    if (x == ")") --paren;
    if (x == "[") ++bracket;
    if (x == "]") --bracket;
    prev = &t;
  }
  return out;
}

std::string serialize(const Workspace& w) {
  std::string out;
  for (const auto& s : w.statements) out += statement_text(s) + "\n";
  return out;
}

// ---------------------------------------------------------------- reports

namespace {

std::string elem(const AbGroup& g, const Vec& v) {
  if (g.torsion().empty() && g.rank() == 1) return std::to_string(g.reduce(v)[0]);
  return element_string(g, v);
}

Json elems(const AbGroup& g, const std::vector<Vec>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(elem(g, v));
  return a;
}

Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vec_to_string(m.row(i)));
  return a;
}

Json fan_points(const Fan& x) {
  Json a = Json::array();
  for (std::size_t i = 0; i < x.size(); ++i) {
    Json p;
    p["point"] = x.name(i);
    p["stalk"] = minimize_generators(x.stalk(i)).to_string();
    Json up = Json::array();
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x.covers(i, j)) up.push_back(x.name(j));
    p["generizations"] = up;
    a.push_back(p);
  }
  return a;
}

Json saturation_json(const FineMonoid& p, const IdealSaturation& s) {
  Json j;
  switch (s.kind) {
    case IdealSaturation::Saturated: j["verdict"] = true; break;
    case IdealSaturation::NotSaturated:
      j["verdict"] = false;
      j["witness"] = Json{{"p", elem(p.ambient(), s.witness)}, {"n", s.n}};
      break;
    case IdealSaturation::UnknownAtBound:
      j["verdict"] = "unknown";
      j["bound"] = s.bound;
      break;
  }
  return j;
}

const char* flat_name(FlatCertificate::Kind k) {
  switch (k) {
    case FlatCertificate::Flat: return "flat";
    case FlatCertificate::NotFlat: return "not flat";
    default: return "unknown";
  }
}

std::optional<Int> env_bound() {
  const char* e = std::getenv("FANLIB_DEGREE_BOUND");
  if (!e || !*e) return std::nullopt;
  try {
    Int b = std::stoll(e);
    if (b > 0) return b;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("FANLIB_DEGREE_BOUND must be a positive integer");
}

Json hom_report(const MonoidHom& h) {
  HomProfile pr = classify_hom(h);
  if (auto b = env_bound()) pr.reduced = reducedness(h, b);
  const AbGroup& t = h.target().ambient();
  Json j;
  j["local"] = pr.local;
  j["injective"] = pr.injective;
  j["surjective"] = pr.surjective;
  j["dense"] = pr.dense;
  j["finite"] = pr.finite;
  if (pr.finite) j["module_generators"] = elems(t, pr.module_gens);
  j["quasi_finite"] = pr.quasi_finite;
  j["exact"] = pr.exact;
  j["cartesian"] = is_cartesian(h);
  j["reduced"] = saturation_json(h.target(), pr.reduced);
  j["cze"] = pr.cze;
  if (pr.cze) j["cze_basis"] = elems(t, pr.cze_basis);
  Json f;
  f["verdict"] = flat_name(pr.flat.kind);
  f["reason"] = pr.flat.reason;
  if (!pr.flat.basis.empty()) f["basis"] = elems(t, pr.flat.basis);
  j["flat"] = f;
  return j;
}

Json witness_json(const FanMap& f, const std::optional<ValuativeWitness>& w, bool ok) {
  Json j;
  j["verdict"] = ok;
  if (w) {
    Json x;
    x["torus"] = f.source().name(w->torus_point);
    x["base"] = f.target().name(w->base_point);
    x["functional"] = vec_to_string(w->functional);
    std::string lifts;
    for (auto l : w->lifts) lifts += (lifts.empty() ? "" : " ") + f.source().name(l);
    x["lifts"] = lifts.empty() ? "none" : lifts;
    j["witness"] = x;
  }
  return j;
}

Json equidim_json(const FanMap& f, const MapReport& r) {
  Json e;
  if (r.equidimensional)
    e["verdict"] = *r.equidimensional;
  else
    e["verdict"] = "no";
  if (r.equidim_sufficient_only) e["qualifier"] = "sufficient-only";
  Json fibers = Json::array();
  for (std::size_t y = 0; y < f.target().size(); ++y) {
    FiberDimension fd = fiber_dimension(f, y);
    if (fd.dims.empty()) continue;
    Json d;
    d["point"] = f.target().name(y);
    Json v = Json::array();
    for (const auto& [x, n] : fd.dims) v.push_back(f.source().name(x) + ":" + std::to_string(n));
    d["dimensions"] = v;
    d["pure"] = fd.pure;
    fibers.push_back(d);
  }
  e["fibers"] = fibers;
  return e;
}

Json map_report(const FanMap& f) {
  MapReport r = classify_map(f);
  Json j;
  j["quasi_compact"] = r.quasi_compact;
  j["affine"] = r.affine;
  j["quasi_finite"] = r.quasi_finite;
  j["exact"] = r.exact;
  j["cze"] = r.cze;
  j["equidimensional"] = equidim_json(f, r);
  j["separated"] = witness_json(f, r.separated_witness, r.separated);
  j["proper"] = witness_json(f, r.proper_witness, r.proper);
  j["flat"] = flat_name(r.flat);
  return j;
}

Transform transform_kind(Cursor& c) {
  const Token& t = c.ident();
  static const std::map<std::string, Transform> m{{"gp", Transform::gp},   {"sharp", Transform::sharp},
                                                  {"sat", Transform::sat}, {"tf", Transform::tf},
                                                  {"trc", Transform::trc}};
  auto it = m.find(t.text);
  if (it == m.end()) c.error_at(t, "unknown transform");
  return it->second;
}

Fan fan_expr(Cursor& c) {
  if (c.accept("(")) {
    c.expect("spec");
    Fan x;
    const Token* t = c.peek();
    const Value* v = t && t->kind == Token::Ident ? c.lookup(t->text) : nullptr;
    if (v && std::holds_alternative<FineMonoid>(*v)) {
      c.next();
      x = spec_fan(std::get<FineMonoid>(*v));
    } else {
      x = spec_fan(whole_group(c.group()));
    }
    c.expect(")");
    return x;
  }
  return c.get<Fan>(c.ident(), "fan");
}

// Parses the query arguments; computes only when !dry.
Json query_impl(const Workspace& w, const std::vector<Token>& toks, bool dry) {
  Cursor c(toks, w);
  c.expect("query");
  const Token& kind = c.ident();
  const std::string& k = kind.text;
  std::function<Json()> run;

  if (k == "faces") {
    const FineMonoid& p = c.get<FineMonoid>(c.ident(), "monoid");
    run = [p] {
      Json j;
      j["monoid"] = p.to_string();
      std::vector<Face> fs = faces(p);
      j["count"] = fs.size();
      Json a = Json::array();
      for (std::size_t i = 0; i < fs.size(); ++i) {
        std::vector<Vec> g;
        for (auto idx : fs[i].gen_indices) g.push_back(p.gens()[idx]);
        Json f;
        f["face"] = i;
        f["rank"] = fs[i].rank;
        f["generators"] = elems(p.ambient(), g);
        f["support"] = vec_to_string(fs[i].support);
        a.push_back(f);
      }
      j["faces"] = a;
      return j;
    };
  } else if (k == "transform") {
    const Token& name = c.ident();
    const Value* v = c.lookup(name.text);
    if (!v) c.error_at(name, "unresolved name");
    Transform t = transform_kind(c);
    if (std::holds_alternative<FineMonoid>(*v)) {
      FineMonoid p = std::get<FineMonoid>(*v);
      run = [p, t] {
        Transformed r = transform(p, t);
        Json j;
        j["monoid"] = p.to_string();
        j["transform"] = transform_name(t);
        if (t == Transform::gp) {
          j["result"] = r.monoid.gp().group().to_string();
        } else {
          j["result"] = minimize_generators(r.monoid).to_string();
          j["comparison"] = matrix_json(r.map.matrix());
          j["spec_isomorphism"] = spec_is_isomorphism(MonoidHom(p, r.monoid, r.map));
        }
        return j;
      };
    } else if (std::holds_alternative<Fan>(*v)) {
      Fan x = std::get<Fan>(*v);
      run = [x, t] {
        Json j;
        j["transform"] = transform_name(t);
        if (t == Transform::sharp) {
          j["spec_invariant"] = sharp_invariance(x);
          return j;
        }
        FanTransform r = fan_transform(x, t);
        j["points"] = fan_points(r.fan);
        j["same_poset"] = posets_isomorphic(r.fan, x);
        return j;
      };
    } else {
      c.error_at(name, "expected a monoid or a fan");
    }
  } else if (k == "classify") {
    const Token& name = c.ident();
    const Value* v = c.lookup(name.text);
    if (!v) c.error_at(name, "unresolved name");
    if (std::holds_alternative<MonoidHom>(*v)) {
      MonoidHom h = std::get<MonoidHom>(*v);
      run = [h] { return hom_report(h); };
    } else if (std::holds_alternative<FanMap>(*v)) {
      FanMap f = std::get<FanMap>(*v);
      run = [f] { return map_report(f); };
    } else {
      c.error_at(name, "expected a hom or a map");
    }
  } else if (k == "reduced-primes") {
    MonoidHom h = c.get<MonoidHom>(c.ident(), "hom");
    run = [h] {
      FiberPrimes r = reduced_fiber_primes(h);
      Json j;
      if (r.kind == FiberPrimes::NotReducedAllPrimes) {
        j["verdict"] = "not reduced in any characteristic";
        j["witness"] = Json{{"p", elem(h.target().ambient(), r.witness.witness)}, {"n", r.witness.n}};
      } else if (r.kind == FiberPrimes::Unknown) {
        j["verdict"] = "unknown";
        j["bound"] = r.witness.bound;
      } else {
        j["verdict"] = "bad primes";
        Json p = Json::array();
        for (auto x : r.primes) p.push_back(x);
        j["primes"] = p;
      }
      return j;
    };
  } else if (k == "quotient") {
    FineMonoid p = c.get<FineMonoid>(c.ident(), "monoid");
    AbGroup a = c.group();
    GroupHom ch = c.hom_blocks(p.ambient(), a);
    run = [p, ch] {
      QuotientResult q = quotient_by_character(p, ch);
      Json j;
      j["generators"] = elems(p.ambient(), q.monoid.gens());
      j["spec_isomorphism"] = spec_is_isomorphism(q.inclusion);
      return j;
    };
  } else if (k == "cze-cover") {
    FineMonoid p = c.get<FineMonoid>(c.ident(), "monoid");
    AbGroup a = c.group();
    GroupHom u = c.hom_blocks(p.units().group(), a);
    run = [p, u] {
      MonoidHom h = cze_cover_basic(p, u);
      Json j;
      j["cover"] = h.target().to_string();
      j["map"] = matrix_json(h.map().matrix());
      j["cze"] = cze_basis(h).has_value();
      return j;
    };
  } else if (k == "fiber-product") {
    FanMap f = c.get<FanMap>(c.ident(), "map");
    FanMap g = c.get<FanMap>(c.ident(), "map");
    run = [f, g] {
      FiberProduct r = fiber_product_fine(f, g);
      Json j;
      j["points"] = fan_points(r.fan);
      Json cert = Json::array();
      for (bool b : r.certified) cert.push_back(b ? "certified" : "integralized");
      j["integrality"] = cert;
      j["dropped"] = r.dropped;
      return j;
    };
  } else if (k == "boundary") {
    Fan x = c.get<Fan>(c.ident(), "fan");
    const Token* t = c.peek();
    std::size_t pt = c.index();
    if (pt >= x.size()) c.error_at(*t, "no such point");
    run = [x, pt] {
      Boundary b = boundary(x, pt);
      Json j;
      j["points"] = fan_points(b.fan);
      return j;
    };
  } else if (k == "proper") {
    FanMap f = c.get<FanMap>(c.ident(), "map");
    run = [f] {
      Json j;
      auto s = separatedness_failure(f);
      auto p = properness_failure(f);
      j["separated"] = witness_json(f, s, !s);
      j["proper"] = witness_json(f, p, !p);
      return j;
    };
  } else if (k == "equidim") {
    FanMap f = c.get<FanMap>(c.ident(), "map");
    run = [f] {
      MapReport r;
      std::optional<Int> dim;
      bool equi = true;
      for (std::size_t y = 0; y < f.target().size(); ++y)
        for (const auto& [x, d] : fiber_dimension(f, y).dims) {
          if (!dim) dim = d;
          if (*dim != d) equi = false;
          if (!smith_decompose(units_map(f.stalk_map(x))).is_injective) r.equidim_sufficient_only = true;
        }
      if (equi && dim) r.equidimensional = dim;
      Json j;
      j["equidimensional"] = equidim_json(f, r);
      return j;
    };
  } else if (k == "strata") {
    Fan x = c.get<Fan>(c.ident(), "fan");
    run = [x] {
      Json a = Json::array();
      for (const auto& s : stratification_report(x)) {
        Json e;
        e["point"] = x.name(s.point);
        e["rank"] = s.rank;
        Json t = Json::array();
        for (auto d : s.torsion) t.push_back(d);
        e["torsion"] = t;
        a.push_back(e);
      }
      Json j;
      j["strata"] = a;
      return j;
    };
  } else if (k == "cohomology") {
    Fan x = fan_expr(c);
    AbGroup a = c.group();
    const Token* t = c.peek();
    Int deg = c.integer();
    if (deg < 0) c.error_at(*t, "degree must be non-negative");
    run = [x, a, deg] {
      Json j;
      j["group"] = cohomology_G(x, a, static_cast<std::size_t>(deg)).to_string();
      return j;
    };
  } else if (k == "torus") {
    Fan x = c.get<Fan>(c.ident(), "fan");
    run = [x] {
      Json a = Json::array();
      for (auto p : torus(x)) a.push_back(x.name(p) + " " + x.stalk(p).gp().group().to_string());
      Json j;
      j["torus"] = a;
      return j;
    };
  } else if (k == "to-classical") {
    Fan x = c.get<Fan>(c.ident(), "fan");
    run = [x] {
      ClassicalResult r = to_classical(x);
      Json j;
      j["verdict"] = r.data.has_value();
      if (r.data) {
        Json a = Json::array();
        for (std::size_t i = 0; i < r.data->cones.size(); ++i) {
          std::string s;
          for (const auto& g : r.data->cones[i].rays()) s += (s.empty() ? "" : " ") + vec_to_string(g);
          a.push_back(x.name(i) + ": {" + s + "}");
        }
        j["cones"] = a;
      } else {
        j["reason"] = r.reason;
      }
      return j;
    };
  } else if (k == "dot") {
    Fan x = c.get<Fan>(c.ident(), "fan");
    run = [x] {
      Json j;
      j["dot"] = emit_dot(x);
      return j;
    };
  } else if (k == "ideal") {
    FineMonoid p = c.get<FineMonoid>(c.ident(), "monoid");
    MonoidIdeal i{c.element_set(p.ambient())};
    run = [p, i] {
      Json j;
      j["saturated"] = saturation_json(p, ideal_saturated(p, i, env_bound()));
      return j;
    };
  } else {
    c.error_at(kind, "unknown query");
  }
  c.finish();
  if (dry) return {};
  return run();
}

std::string render_value(const Json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + render_value(v[i]);
    return s + "]";
  }
  return v.dump();
}

bool scalar_array(const Json& v) {
  return v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_primitive(); });
}

void render_object(const Json& obj, const std::string& indent, std::string& out) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    if (v.is_object() && v.contains("verdict")) {
      std::string line = indent + key + ": " + render_value(v["verdict"]);
      if (v.contains("witness") && v["witness"].is_object()) {
        std::string w;
        for (auto jt = v["witness"].begin(); jt != v["witness"].end(); ++jt)
          w += (w.empty() ? "" : ",") + jt.key() + "=" + render_value(jt.value());
        line += " (witness " + w + ")";
      }
      out += line + "\n";
      Json rest = Json::object();
      for (auto jt = v.begin(); jt != v.end(); ++jt)
        if (jt.key() != "verdict" && jt.key() != "witness") rest[jt.key()] = jt.value();
      render_object(rest, indent + "  ", out);
    } else if (v.is_object()) {
      out += indent + key + ":\n";
      render_object(v, indent + "  ", out);
    } else if (v.is_array() && !scalar_array(v)) {
      out += indent + key + ":\n";
      for (const auto& e : v) {
        if (e.is_object()) {
          std::string sub;
          render_object(e, indent + "  ", sub);
          sub.replace(indent.size(), 2, "- ");
          out += sub;
        } else {
          out += indent + "  - " + render_value(e) + "\n";
        }
      }
    } else if (v.is_string() && v.get<std::string>().find('\n') != std::string::npos) {
      out += indent + key + ":\n" + v.get<std::string>();
    } else {
      out += indent + key + ": " + render_value(v) + "\n";
    }
  }
}

}  // namespace

Json run_query(const Workspace& w, const Statement& q) {
  Json r;
  r["query"] = statement_text(q);
  try {
    r["result"] = query_impl(w, q.tokens, false);
  } catch (const ParseError& e) {
    r["error"] = e.what();
  } catch (const std::exception& e) {
    r["error"] = e.what();
  }
  return r;
}

std::vector<Json> run_all(const Workspace& w, unsigned jobs) {
  std::vector<Json> out(w.queries.size());
  if (jobs <= 1 || w.queries.size() <= 1) {
    for (std::size_t i = 0; i < w.queries.size(); ++i) out[i] = run_query(w, w.statements[w.queries[i]]);
    return out;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < out.size(); i = next++) out[i] = run_query(w, w.statements[w.queries[i]]);
    });
  for (auto& t : pool) t.join();
  return out;
}

std::string render_text(const Json& report) {
  std::string out = "== " + report["query"].get<std::string>() + "\n";
  if (report.contains("error")) return out + "error: " + report["error"].get<std::string>() + "\n";
  render_object(report["result"], "", out);
  return out;
}

std::string emit_dot(const Fan& x) {
  std::ostringstream os;
  os << "digraph fan {\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    const FineMonoid& m = x.stalk(i);
    const AbGroup& g = m.gp().group();
    std::string tor;
    for (auto d : g.torsion()) tor += (tor.empty() ? "" : ",") + std::to_string(d);
    std::size_t sharp = minimize_generators(transform(m, Transform::sharp).monoid).ngens();
    os << "  n" << i << " [label=\"" << x.name(i) << "\\nrank " << g.rank() << ", torsion [" << tor
       << "], sharp gens " << sharp << "\"];\n";
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x.covers(i, j)) os << "  n" << i << " -> n" << j << ";\n";
  os << "}\n";
  return os.str();
}

Json export_json(const Workspace& w) {
  Json j;
  Json b = Json::array();
  for (const auto& name : w.order) {
    const Value& v = w.values.at(name);
    Json e;
    e["name"] = name;
    e["kind"] = kind_name(v);
    if (auto g = std::get_if<AbGroup>(&v)) {
      e["group"] = g->to_string();
    } else if (auto p = std::get_if<FineMonoid>(&v)) {
      e["ambient"] = p->ambient().to_string();
      e["generators"] = elems(p->ambient(), p->gens());
    } else if (auto h = std::get_if<MonoidHom>(&v)) {
      e["source"] = h->source().to_string();
      e["target"] = h->target().to_string();
      e["matrix"] = matrix_json(h->map().matrix());
    } else if (auto f = std::get_if<Fan>(&v)) {
      e["points"] = fan_points(*f);
    } else if (auto m = std::get_if<FanMap>(&v)) {
      Json pts = Json::array();
      for (std::size_t x = 0; x < m->source().size(); ++x)
        pts.push_back(m->source().name(x) + " -> " + m->target().name((*m)(x)));
      e["points"] = pts;
    }
    b.push_back(e);
  }
  j["bindings"] = b;
  Json q = Json::array();
  for (auto i : w.queries) q.push_back(statement_text(w.statements[i]));
  j["queries"] = q;
  return j;
}

std::string render_reports(const std::vector<Json>& reports) {
  std::string out;
  for (std::size_t i = 0; i < reports.size(); ++i) out += (i ? "\n" : "") + render_text(reports[i]);
  return out;
}

}  // namespace fanlib::cli
