#include "ultra/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace ultra {

ConfigError::ConfigError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line), column_(column) {}

namespace {

std::string coef_text(const Rational& c) {
  std::string t = to_string(c);
  return is_integer(c) ? t : "(" + t + ")";
}

/// Cursor over one statement; columns are reported 1-based in the source line.
class Cursor {
public:
  Cursor(std::string_view text, std::size_t line, std::size_t column0)
      : s_(text), line_(line), col0_(column0) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(line_, col0_ + pos_ + 1, msg); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& msg) const {
    throw ConfigError(line_, col0_ + pos + 1, msg);
  }

  void ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  char peek() {
    ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  char peek_raw(std::size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }
  bool done() { return peek() == '\0'; }
  std::size_t pos() const { return pos_; }

  bool accept(std::string_view tok) {
    ws();
    if (s_.substr(pos_, tok.size()) != tok)
      return false;
    // keywords must not run into an identifier
    if (std::isalpha(static_cast<unsigned char>(tok.back())) && pos_ + tok.size() < s_.size() &&
        (std::isalnum(static_cast<unsigned char>(s_[pos_ + tok.size()])) || s_[pos_ + tok.size()] == '_'))
      return false;
    pos_ += tok.size();
    return true;
  }
  /// Literal prefix such as the 'e' of "e12"; no word-boundary rule.
  void expect_prefix(std::string_view tok) {
    ws();
    if (s_.substr(pos_, tok.size()) != tok)
      fail("expected '" + std::string(tok) + "'");
    pos_ += tok.size();
  }
  void expect(std::string_view tok) {
    if (!accept(tok))
      fail("expected '" + std::string(tok) + "'");
  }
  void end() {
    if (!done())
      fail("unexpected text '" + std::string(s_.substr(pos_)) + "'");
  }
  std::string_view rest() {
    ws();
    std::string_view r = s_.substr(pos_);
    while (!r.empty() && std::isspace(static_cast<unsigned char>(r.back())))
      r.remove_suffix(1);
    pos_ = s_.size();
    return r;
  }

  std::string word() {
    ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Index integer() {
    ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_)
      fail("expected a positive integer");
    if (pos_ < s_.size() && s_[pos_] == '.')
      fail("decimal literals are not accepted");
    std::string digits(s_.substr(start, pos_ - start));
    if (digits.size() > 18)
      fail_at(start, "integer too large");
    return std::stoull(digits);
  }

  /// digits or digits/digits, unsigned
  Rational literal() {
    ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_)
      fail("expected a number");
    if (pos_ < s_.size() && s_[pos_] == '.')
      fail("decimal literals are not accepted; write p/q");
    if (pos_ < s_.size() && s_[pos_] == '/' && pos_ + 1 < s_.size() &&
        std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '.')
        fail("decimal literals are not accepted; write p/q");
    }
    try {
      return parse_rational(s_.substr(start, pos_ - start));
    } catch (const std::invalid_argument& e) {
      fail_at(start, e.what());
    }
  }

  Rational signed_literal() {
    bool neg = false;
    if (accept("-"))
      neg = true;
    else
      accept("+");
    Rational q = literal();
    return neg ? Rational(-q) : q;
  }

  /// Sum of terms in x and n. Stops before ',', ')', ']', ':', '->' and end.
  AffineExpr expr(bool allow_x, bool allow_n) {
    AffineExpr out;
    bool first = true;
    for (;;) {
      char c = peek();
      int sign = 1;
      if (c == '-' && peek_raw(1) == '>')
        break;
      if (c == '+' || c == '-') {
        sign = c == '-' ? -1 : 1;
        ++pos_;
      } else if (!first) {
        break;
      }
      term(out, sign, allow_x, allow_n);
      first = false;
    }
    return out;
  }

  Rational constant() {
    std::size_t start = (ws(), pos_);
    AffineExpr e = expr(false, false);
    if (!e.intercept.is_constant())
      fail_at(start, "expected a constant");
    return e.intercept.c0;
  }

  FamilyExpr family_expr() { return expr(false, true).intercept; }

private:
  void term(AffineExpr& out, int sign, bool allow_x, bool allow_n) {
    std::size_t start = (ws(), pos_);
    Rational coef = sign;
    enum { Const, N, Geo, X } kind = Const;
    Rational ratio;
    bool any = false;
    for (;;) {
      char c = peek();
      if (c == '*' && any) {
        ++pos_;
        continue;
      }
      std::optional<Rational> number;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        number = literal();
      } else if (c == '(') {
        ++pos_;
        number = signed_literal();
        expect(")");
      } else if (c == 'x' && !std::isalnum(static_cast<unsigned char>(peek_raw(1)))) {
        if (kind != Const)
          fail("a term may contain one of x, n or r^n");
        if (!allow_x)
          fail("x is not allowed here");
        kind = X;
        ++pos_;
        any = true;
        continue;
      } else if (c == 'n' && !std::isalnum(static_cast<unsigned char>(peek_raw(1)))) {
        if (kind != Const)
          fail("a term may contain one of x, n or r^n");
        if (!allow_n)
          fail("n is not allowed here");
        kind = N;
        ++pos_;
        any = true;
        continue;
      } else {
        break;
      }
      any = true;
      if (accept("^")) {
        if (!accept("n"))
          fail("only powers r^n are supported");
        if (kind != Const)
          fail("a term may contain one of x, n or r^n");
        if (!allow_n)
          fail("n is not allowed here");
        kind = Geo;
        ratio = *number;
      } else {
        coef *= *number;
      }
    }
    if (!any)
      fail_at(start, "expected a term");
    switch (kind) {
    case Const:
      out.intercept += FamilyExpr(coef);
      break;
    case N:
      out.intercept += FamilyExpr::linear(0, coef);
      break;
    case Geo:
      try {
        out.intercept += FamilyExpr::geometric(0, coef, ratio);
      } catch (const std::exception& e) {
        fail_at(start, e.what());
      }
      break;
    case X:
      out.slope += coef;
      break;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_, col0_;
};

struct Bounds {
  FamilyExpr lo, hi;
  bool lo_closed = true, hi_closed = true;
  bool hi_inf = false;
};

Bounds bounds(Cursor& c, bool allow_n, bool allow_inf = false) {
  Bounds b;
  char open = c.peek();
  if (open != '[' && open != '(')
    c.fail("expected '[' or '('");
  c.expect(std::string(1, open));
  b.lo_closed = open == '[';
  b.lo = c.expr(false, allow_n).intercept;
  c.expect(",");
  if (allow_inf && c.accept("inf"))
    b.hi_inf = true;
  else
    b.hi = c.expr(false, allow_n).intercept;
  char close = c.peek();
  if (close != ']' && close != ')')
    c.fail("expected ']' or ')'");
  c.expect(std::string(1, close));
  b.hi_closed = close == ']';
  return b;
}

Interval constant_interval(Cursor& c, std::size_t start, const Bounds& b) {
  if (!b.lo.is_constant() || !b.hi.is_constant())
    c.fail_at(start, "interval endpoints must be constants here");
  return {b.lo.c0, b.hi.c0, b.lo_closed, b.hi_closed};
}

std::string bounds_text(const FamilyExpr& lo, const FamilyExpr& hi, bool lc, bool hc) {
  return std::string(lc ? "[" : "(") + lo.to_string() + ", " + hi.to_string() + (hc ? "]" : ")");
}

struct Loc {
  std::size_t line = 0, column = 1;
};

/// Header "n>=K [step S]:".
std::pair<Index, Index> class_header(Cursor& c) {
  c.expect("n");
  c.expect(">=");
  Index first = c.integer();
  Index step = 1;
  if (c.accept("step"))
    step = c.integer();
  if (first == 0 || step == 0)
    c.fail("start and step must be positive");
  c.expect(":");
  return {first, step};
}

VertexSet vertex_set(Cursor& c, std::string_view text, std::size_t start) {
  try {
    return VertexSet::parse(text);
  } catch (const std::exception& e) {
    c.fail_at(start, e.what());
  }
}

} // namespace

std::string AffineExpr::to_string() const {
  std::string s;
  if (slope != 0) {
    Rational m = abs(slope);
    s = std::string(slope < 0 ? "-" : "") + (m == 1 ? "" : coef_text(m)) + "x";
  }
  std::string c = intercept.to_string();
  if (c == "0")
    return s.empty() ? "0" : s;
  if (s.empty())
    return c;
  return s + (c[0] == '-' ? c : "+" + c);
}

AffineExpr parse_affine(std::string_view text) {
  Cursor c(text, 1, 0);
  AffineExpr e = c.expr(true, true);
  c.end();
  return e;
}

Workspace parse_config(std::string_view text) {
  Workspace w;
  enum class Section { None, Map, Graph, Run } section = Section::None;
  std::set<std::string> seen_sections;

  // map data
  bool have_map = false;
  Loc map_loc;
  MarkovMap map;
  bool have_ambient = false;
  std::map<std::pair<Index, Index>, std::size_t> family_slot;
  // graph data
  bool have_graph = false;
  Loc graph_loc;
  std::optional<VertexSet> vertices;
  std::vector<ExplicitEdge> edges;
  std::vector<EdgeFamily> edge_families;
  // run data
  std::set<std::string> seen_keys;
  Loc x_loc;

  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r')
      raw.remove_suffix(1);
    Cursor c(raw, lineno, 0);
    if (c.done()) {
      if (end == text.size())
        break;
      continue;
    }
    Loc here{lineno, c.pos() + 1};

    if (c.peek() == '[') {
      c.expect("[");
      std::string name;
      if (c.accept("map"))
        section = Section::Map, name = "map", have_map = true, map_loc = here;
      else if (c.accept("ultragraph"))
        section = Section::Graph, name = "ultragraph", have_graph = true, graph_loc = here;
      else if (c.accept("run"))
        section = Section::Run, name = "run";
      else
        c.fail("unknown section; expected [map], [ultragraph] or [run]");
      c.expect("]");
      c.end();
      if (!seen_sections.insert(name).second)
        throw ConfigError(here.line, here.column, "section [" + name + "] appears twice");
      continue;
    }

    switch (section) {
    case Section::None:
      c.fail("statement outside a section");

    case Section::Map: {
      if (c.accept("ambient")) {
        c.expect("=");
        std::size_t at = (c.peek(), c.pos());
        Bounds b = bounds(c, false, true);
        c.end();
        if (!b.lo_closed || (!b.hi_inf && b.hi_closed) || !b.lo.is_constant() ||
            (!b.hi_inf && !b.hi.is_constant()))
          c.fail_at(at, "ambient interval must have the form [a, b) or [a, inf)");
        map.ambient_lo = b.lo.c0;
        if (!b.hi_inf)
          map.ambient_hi = b.hi.c0;
        have_ambient = true;
      } else if (c.accept("interval")) {
        std::size_t at = (c.peek(), c.pos());
        Index k = c.integer();
        if (k != map.intervals.size() + 1)
          c.fail_at(at, "intervals must be numbered 1, 2, ... in order; expected " +
                            std::to_string(map.intervals.size() + 1));
        c.expect("=");
        std::size_t ib = (c.peek(), c.pos());
        Interval i = constant_interval(c, ib, bounds(c, false));
        c.end();
        if (!i.lo_closed || !i.hi_closed)
          c.fail_at(ib, "partition intervals are closed");
        map.intervals.push_back(i);
      } else if (c.accept("family")) {
        auto [first, step] = class_header(c);
        if (step != 1)
          c.fail("interval families take every n");
        c.expect("I_n");
        c.expect("=");
        std::size_t ib = (c.peek(), c.pos());
        Bounds b = bounds(c, true);
        c.end();
        if (!b.lo_closed || !b.hi_closed)
          c.fail_at(ib, "partition intervals are closed");
        if (map.family)
          c.fail_at(here.column - 1, "only one interval family is allowed");
        map.family = IntervalFamily{first, b.lo, b.hi};
      } else if (c.accept("on")) {
        std::size_t ib = (c.peek(), c.pos());
        Interval dom = constant_interval(c, ib, bounds(c, false));
        c.expect(":");
        std::size_t eb = (c.peek(), c.pos());
        AffineExpr e = c.expr(true, false);
        c.end();
        if (e.slope == 0)
          c.fail_at(eb, "branches must have a nonzero slope");
        map.pieces.push_back({dom, e.slope, e.intercept.c0});
      } else if (c.accept("at")) {
        Rational p = c.constant();
        c.expect("->");
        Rational v = c.constant();
        c.end();
        map.overrides.push_back({p, v});
      } else if (c.accept("for")) {
        auto [first, step] = class_header(c);
        auto slot = [&]() -> MapFamily& {
          auto it = family_slot.find({first, step});
          if (it == family_slot.end()) {
            it = family_slot.emplace(std::make_pair(first, step), map.map_families.size()).first;
            map.map_families.push_back(MapFamily{first, step, {}, {}});
          }
          return map.map_families[it->second];
        };
        if (c.accept("on")) {
          Bounds b = bounds(c, true);
          c.expect(":");
          std::size_t eb = (c.peek(), c.pos());
          AffineExpr e = c.expr(true, true);
          c.end();
          if (e.slope == 0)
            c.fail_at(eb, "branches must have a nonzero slope");
          slot().pieces.push_back({b.lo, b.hi, b.lo_closed, b.hi_closed, e.slope, e.intercept});
        } else if (c.accept("at")) {
          FamilyExpr p = c.family_expr();
          c.expect("->");
          FamilyExpr v = c.family_expr();
          c.end();
          slot().overrides.push_back({p, v});
        } else if (c.accept("I_n")) {
          c.expect("=");
          std::size_t ib = (c.peek(), c.pos());
          Bounds b = bounds(c, true);
          c.expect(",");
          c.expect("g");
          c.expect("=");
          std::size_t eb = (c.peek(), c.pos());
          AffineExpr e = c.expr(true, true);
          c.end();
          if (!b.lo_closed || !b.hi_closed)
            c.fail_at(ib, "partition intervals are closed");
          if (step != 1)
            c.fail_at(ib, "interval families take every n");
          if (map.family)
            c.fail_at(ib, "only one interval family is allowed");
          if (e.slope == 0)
            c.fail_at(eb, "branches must have a nonzero slope");
          map.family = IntervalFamily{first, b.lo, b.hi};
          slot().pieces.push_back({b.lo, b.hi, true, true, e.slope, e.intercept});
        } else {
          c.fail("expected 'on', 'at' or 'I_n' after the family header");
        }
      } else {
        c.fail("unknown [map] statement");
      }
      break;
    }

    case Section::Graph: {
      if (c.accept("vertices")) {
        c.expect("=");
        std::size_t at = (c.peek(), c.pos());
        vertices = vertex_set(c, c.rest(), at);
      } else if (c.accept("edge")) {
        c.expect_prefix("e");
        Index id = c.integer();
        c.expect(":");
        c.expect_prefix("v");
        Index src = c.integer();
        c.expect("->");
        std::size_t at = (c.peek(), c.pos());
        edges.push_back({id, src, vertex_set(c, c.rest(), at)});
      } else if (c.accept("family")) {
        auto [first, step] = class_header(c);
        c.expect("e_n");
        c.expect(":");
        c.expect("v_n");
        c.expect("->");
        EdgeFamily f{first, step, {}, VertexSet()};
        if (c.accept("offsets")) {
          c.expect("{");
          if (!c.accept("}")) {
            do {
              bool neg = c.accept("-");
              if (!neg)
                c.accept("+");
              Index d = c.integer();
              f.offsets.push_back(neg ? -std::int64_t(d) : std::int64_t(d));
            } while (c.accept(","));
            c.expect("}");
          }
          if (c.accept("|")) {
            std::size_t at = (c.peek(), c.pos());
            f.constant = vertex_set(c, c.rest(), at);
          }
        } else {
          std::size_t at = (c.peek(), c.pos());
          f.constant = vertex_set(c, c.rest(), at);
        }
        c.end();
        edge_families.push_back(f);
      } else {
        c.fail("unknown [ultragraph] statement");
      }
      break;
    }

    case Section::Run: {
      std::size_t at = (c.peek(), c.pos());
      std::string key = c.word();
      if (key.empty())
        c.fail("expected a key");
      static const std::set<std::string> known{"X",       "x",             "depth", "horizon",
                                                "cycles",  "cycle_horizon", "witness_bound",
                                                "scope",   "escape_bound"};
      if (!known.count(key))
        c.fail_at(at, "unknown key '" + key + "'");
      if (!seen_keys.insert(key).second)
        c.fail_at(at, "key '" + key + "' given twice");
      c.expect("=");
      std::size_t vb = (c.peek(), c.pos());
      RunParameters& r = w.run;
      auto positive = [&]() {
        Index v = c.integer();
        c.end();
        if (v == 0 || v > 100000)
          c.fail_at(vb, key + " must be between 1 and 100000");
        return v;
      };
      if (key == "X") {
        r.X = vertex_set(c, c.rest(), vb);
        x_loc = {lineno, vb + 1};
      } else if (key == "x") {
        r.x = c.signed_literal();
        c.end();
      } else if (key == "depth") {
        r.depth = int(positive());
      } else if (key == "horizon") {
        r.horizon = positive();
      } else if (key == "cycles") {
        r.cycles.maxlen = int(positive());
      } else if (key == "cycle_horizon") {
        r.cycles.horizon = positive();
      } else if (key == "witness_bound") {
        r.witness_bound = int(positive());
      } else if (key == "scope") {
        r.scope = positive();
      } else if (key == "escape_bound") {
        r.escape_bound = positive();
      }
      break;
    }
    }
    if (end == text.size())
      break;
  }

  if (have_map) {
    if (!have_ambient)
      throw ConfigError(map_loc.line, map_loc.column, "[map] needs an 'ambient = [a, b)' line");
    try {
      map.finalize();
    } catch (const std::exception& e) {
      throw ConfigError(map_loc.line, map_loc.column, std::string("invalid map: ") + e.what());
    }
    w.map = map;
  }
  if (have_graph) {
    try {
      w.graph = Ultragraph(vertices ? *vertices : VertexSet::tail(1), edges, edge_families);
    } catch (const std::exception& e) {
      throw ConfigError(graph_loc.line, graph_loc.column, std::string("invalid ultragraph: ") + e.what());
    }
  }
  if (w.run.X) {
    if (w.graph) {
      try {
        RelativeUltragraph rg(*w.graph, *w.run.X);
      } catch (const std::exception& e) {
        throw ConfigError(x_loc.line, x_loc.column, e.what());
      }
    } else if (w.map && w.map->count() &&
               !is_subset(*w.run.X, VertexSet::range(1, *w.map->count()))) {
      throw ConfigError(x_loc.line, x_loc.column, "X is not contained in Reg(G): the partition has only " +
                                                      std::to_string(*w.map->count()) + " intervals");
    }
  }
  return w;
}

Workspace load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(0, 0, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit(const Workspace& w) {
  std::ostringstream o;
  if (w.map) {
    const MarkovMap& m = *w.map;
    o << "[map]\n";
    o << "ambient = [" << to_string(m.ambient_lo) << ", "
      << (m.ambient_hi ? to_string(*m.ambient_hi) : std::string("inf")) << ")\n";
    for (std::size_t k = 0; k < m.intervals.size(); ++k)
      o << "interval " << k + 1 << " = " << m.intervals[k].to_string() << "\n";
    if (m.family)
      o << "family n>=" << m.family->first << ": I_n = "
        << bounds_text(m.family->lo, m.family->hi, true, true) << "\n";
    for (const Piece& p : m.pieces)
      o << "on " << p.domain.to_string() << ": " << AffineExpr{p.slope, FamilyExpr(p.intercept)}.to_string()
        << "\n";
    for (const PointOverride& v : m.overrides)
      o << "at " << to_string(v.point) << " -> " << to_string(v.value) << "\n";
    for (const MapFamily& f : m.map_families) {
      std::string head = "for n>=" + std::to_string(f.first) +
                         (f.step == 1 ? std::string() : " step " + std::to_string(f.step)) + ": ";
      for (const PieceTemplate& t : f.pieces)
        o << head << "on " << bounds_text(t.lo, t.hi, t.lo_closed, t.hi_closed) << ": "
          << AffineExpr{t.slope, t.intercept}.to_string() << "\n";
      for (const OverrideTemplate& t : f.overrides)
        o << head << "at " << t.point.to_string() << " -> " << t.value.to_string() << "\n";
    }
  }
  if (w.graph) {
    const Ultragraph& g = *w.graph;
    o << "[ultragraph]\n";
    o << "vertices = " << g.vertices().to_string() << "\n";
    for (const ExplicitEdge& e : g.explicit_edges())
      o << "edge e" << e.id << ": v" << e.source << " -> " << e.range.to_string() << "\n";
    for (const EdgeFamily& f : g.families()) {
      o << "family n>=" << f.first << (f.step == 1 ? std::string() : " step " + std::to_string(f.step))
        << ": e_n: v_n -> offsets{";
      for (std::size_t k = 0; k < f.offsets.size(); ++k)
        o << (k ? "," : "") << f.offsets[k];
      o << "}";
      if (!f.constant.empty())
        o << " | " << f.constant.to_string();
      o << "\n";
    }
  }
  const RunParameters& r = w.run;
  o << "[run]\n";
  if (r.X)
    o << "X = " << r.X->to_string() << "\n";
  if (r.x)
    o << "x = " << to_string(*r.x) << "\n";
  o << "depth = " << r.depth << "\n";
  o << "horizon = " << r.horizon << "\n";
  o << "cycles = " << r.cycles.maxlen << "\n";
  o << "cycle_horizon = " << r.cycles.horizon << "\n";
  o << "witness_bound = " << r.witness_bound << "\n";
  o << "scope = " << r.scope << "\n";
  o << "escape_bound = " << r.escape_bound << "\n";
  return o.str();
}

} // namespace ultra
