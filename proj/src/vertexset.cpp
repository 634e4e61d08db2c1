#include "ultra/vertexset.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ultra {

namespace {

constexpr Index kMaxPeriod = Index(1) << 16;

struct Membership {
  const std::set<Index>& explicit_part;
  Index threshold;
  const std::vector<bool>& pattern;

  bool operator()(Index j) const {
    if (j < threshold)
      return explicit_part.count(j) != 0;
    return pattern[(j - threshold) % pattern.size()];
  }
};

} // namespace

VertexSet VertexSet::canonicalize(const std::set<Index>& explicit_part, Index threshold,
                                  const std::vector<bool>& pattern, bool primed) {
  if (threshold == 0)
    throw std::invalid_argument("threshold must be positive");
  if (pattern.empty())
    throw std::invalid_argument("tail pattern must be nonempty");
  if (!explicit_part.empty() && *explicit_part.begin() == 0)
    throw std::invalid_argument("vertex indices must be positive");
  if (pattern.size() > kMaxPeriod)
    throw std::length_error("tail period too large");

  // explicit members at or beyond the threshold are kept as members; the
  // periodic regime starts after the largest of them
  const Index p = pattern.size();
  auto f = [&](Index j) {
    if (explicit_part.count(j))
      return true;
    return j >= threshold && bool(pattern[(j - threshold) % p]);
  };

  Index t = threshold;
  if (!explicit_part.empty())
    t = std::max(t, *explicit_part.rbegin() + 1);
  std::vector<bool> bits(p);
  for (Index k = 0; k < p; ++k)
    bits[k] = f(t + k);
  // minimal period: smallest divisor d of p with the bits shift-invariant by d
  Index best = p;
  for (Index d = 1; d < p; ++d) {
    if (p % d)
      continue;
    bool ok = true;
    for (Index k = 0; k < p && ok; ++k)
      ok = bits[k] == bits[(k + d) % p];
    if (ok) {
      best = d;
      break;
    }
  }
  while (t > 1 && f(t - 1) == f(t - 1 + best))
    --t;

  VertexSet out;
  out.threshold_ = t;
  out.pattern_.assign(best, false);
  for (Index k = 0; k < best; ++k)
    out.pattern_[k] = f(t + k);
  for (Index j = 1; j < t; ++j)
    if (f(j))
      out.explicit_.insert(j);
  out.primed_ = primed;
  return out;
}

VertexSet VertexSet::finite(const std::set<Index>& members, bool primed) {
  Index t = members.empty() ? 1 : *members.rbegin() + 1;
  return canonicalize(members, t, {false}, primed);
}

VertexSet VertexSet::range(Index lo, Index hi) {
  if (lo == 0)
    throw std::invalid_argument("vertex indices must be positive");
  std::set<Index> m;
  for (Index j = lo; j <= hi; ++j)
    m.insert(j);
  return finite(m);
}

VertexSet VertexSet::tail(Index t) {
  if (t == 0)
    throw std::invalid_argument("vertex indices must be positive");
  return canonicalize({}, t, {true});
}

VertexSet VertexSet::progression(Index first, Index step) {
  if (first == 0 || step == 0)
    throw std::invalid_argument("progression needs positive start and step");
  std::vector<bool> bits(step, false);
  bits[0] = true;
  return canonicalize({}, first, bits);
}

bool VertexSet::contains(Index j) const {
  if (j == 0)
    return false;
  return Membership{explicit_, threshold_, pattern_}(j);
}

bool VertexSet::is_finite() const {
  return std::none_of(pattern_.begin(), pattern_.end(), [](bool b) { return b; });
}

bool VertexSet::empty() const { return explicit_.empty() && is_finite(); }

std::vector<Index> VertexSet::enumerate_up_to(Index n) const {
  std::vector<Index> out;
  for (Index j = 1; j <= n; ++j)
    if (contains(j))
      out.push_back(j);
  return out;
}

std::vector<Index> VertexSet::elements() const {
  if (!is_finite())
    throw std::domain_error("cannot list the members of an infinite set " + to_string());
  return {explicit_.begin(), explicit_.end()};
}

std::optional<Index> VertexSet::min() const {
  if (!explicit_.empty())
    return *explicit_.begin();
  for (Index k = 0; k < pattern_.size(); ++k)
    if (pattern_[k])
      return threshold_ + k;
  return std::nullopt;
}

std::optional<Index> VertexSet::max() const {
  if (!is_finite() || explicit_.empty())
    return std::nullopt;
  return *explicit_.rbegin();
}

Index VertexSet::stable_from() const { return threshold_; }

std::size_t VertexSet::size() const {
  if (!is_finite())
    throw std::domain_error("infinite set has no size");
  return explicit_.size();
}

VertexSet VertexSet::as_primed() const {
  VertexSet out = *this;
  out.primed_ = true;
  return out;
}

VertexSet VertexSet::as_unprimed() const {
  VertexSet out = *this;
  out.primed_ = false;
  return out;
}

VertexSet VertexSet::shifted(std::int64_t d) const {
  std::set<Index> ex;
  for (Index j : explicit_) {
    std::int64_t k = std::int64_t(j) + d;
    if (k >= 1)
      ex.insert(Index(k));
  }
  std::int64_t t = std::int64_t(threshold_) + d;
  std::vector<bool> bits = pattern_;
  const std::int64_t p = std::int64_t(bits.size());
  if (t < 1) {
    // rotate so the pattern starts at index 1
    std::int64_t skip = 1 - t;
    std::vector<bool> rotated(p);
    for (std::int64_t k = 0; k < p; ++k)
      rotated[k] = bits[(k + skip) % p];
    bits = rotated;
    t = 1;
  }
  return canonicalize(ex, Index(t), bits, primed_);
}

std::string VertexSet::to_string() const {
  std::ostringstream os;
  std::vector<std::string> parts;
  if (!explicit_.empty()) {
    std::ostringstream e;
    e << '{';
    bool first = true;
    for (Index j : explicit_) {
      e << (first ? "" : ",") << j;
      first = false;
    }
    e << '}';
    parts.push_back(e.str());
  }
  if (!is_finite()) {
    std::ostringstream t;
    if (pattern_.size() == 1) {
      t << "tail(" << threshold_ << ")";
    } else {
      t << "tail(" << threshold_ << ";period=" << pattern_.size() << ",bits=";
      for (bool b : pattern_)
        t << (b ? '1' : '0');
      t << ")";
    }
    parts.push_back(t.str());
  }
  std::string body;
  if (parts.empty())
    body = "{}";
  for (std::size_t i = 0; i < parts.size(); ++i)
    body += (i ? " | " : "") + parts[i];
  if (primed_)
    return "primed(" + body + ")";
  return body;
}

std::strong_ordering operator<=>(const VertexSet& a, const VertexSet& b) {
  if (auto c = a.primed_ <=> b.primed_; c != 0)
    return c;
  if (auto c = a.threshold_ <=> b.threshold_; c != 0)
    return c;
  if (auto c = a.pattern_ <=> b.pattern_; c != 0)
    return c;
  return a.explicit_ <=> b.explicit_;
}

namespace {

template <class Op>
VertexSet combine(const VertexSet& a, const VertexSet& b, Op op) {
  if (a.primed() != b.primed())
    throw std::invalid_argument("cannot combine primed and unprimed vertex sets");
  Index t = std::max(a.threshold(), b.threshold());
  Index p = std::lcm(a.period(), b.period());
  if (p > kMaxPeriod)
    throw std::length_error("tail period too large");
  std::set<Index> ex;
  for (Index j = 1; j < t; ++j)
    if (op(a.contains(j), b.contains(j)))
      ex.insert(j);
  std::vector<bool> bits(p);
  for (Index k = 0; k < p; ++k)
    bits[k] = op(a.contains(t + k), b.contains(t + k));
  return VertexSet::canonicalize(ex, t, bits, a.primed());
}

} // namespace

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  return combine(a, b, [](bool x, bool y) { return x || y; });
}

VertexSet intersect(const VertexSet& a, const VertexSet& b) {
  return combine(a, b, [](bool x, bool y) { return x && y; });
}

VertexSet difference(const VertexSet& a, const VertexSet& b) {
  return combine(a, b, [](bool x, bool y) { return x && !y; });
}

bool is_subset(const VertexSet& a, const VertexSet& b) { return difference(a, b).empty(); }

bool intersects(const VertexSet& a, const VertexSet& b) { return !intersect(a, b).empty(); }

// ---------------------------------------------------------------- EXSet

EXSet::EXSet(VertexSet a) : unprimed(a.as_unprimed()) {}

EXSet::EXSet(VertexSet a, VertexSet b) : unprimed(a.as_unprimed()), primed(b.as_primed()) {}

std::string EXSet::to_string() const {
  if (primed.empty())
    return unprimed.to_string();
  if (unprimed.empty())
    return primed.to_string();
  return unprimed.to_string() + " | " + primed.to_string();
}

std::strong_ordering operator<=>(const EXSet& a, const EXSet& b) {
  if (auto c = a.unprimed <=> b.unprimed; c != 0)
    return c;
  return a.primed <=> b.primed;
}

EXSet set_union(const EXSet& a, const EXSet& b) {
  return {set_union(a.unprimed, b.unprimed), set_union(a.primed, b.primed)};
}

EXSet intersect(const EXSet& a, const EXSet& b) {
  return {intersect(a.unprimed, b.unprimed), intersect(a.primed, b.primed)};
}

EXSet difference(const EXSet& a, const EXSet& b) {
  return {difference(a.unprimed, b.unprimed), difference(a.primed, b.primed)};
}

// ---------------------------------------------------------------- parsing
//
//   expr := term (('|' | '&' | '\') term)*
//   term := '{' [item (',' item)*] '}' | tail(...) | primed(expr) | '(' expr ')'
//   item := ['v'] int ['..' ['v'] int]

namespace {

class SetParser {
public:
  explicit SetParser(std::string_view s) : s_(s) {}

  EXSet parse_all() {
    EXSet e = expr();
    skip();
    if (pos_ != s_.size())
      fail("unexpected trailing input");
    return e;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("vertex set '" + std::string(s_) + "' at offset " +
                                std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool accept(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok))
      fail("expected '" + std::string(tok) + "'");
  }

  Index integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_)
      fail("expected a positive integer");
    Index v = std::stoull(std::string(s_.substr(start, pos_ - start)));
    return v;
  }

  Index vertex() {
    accept("v");
    Index v = integer();
    if (v == 0)
      fail("vertex indices must be positive");
    return v;
  }

  EXSet expr() {
    EXSet acc = term();
    for (;;) {
      if (accept("|"))
        acc = set_union(acc, term());
      else if (accept("&"))
        acc = intersect(acc, term());
      else if (accept("\\"))
        acc = difference(acc, term());
      else
        return acc;
    }
  }

  EXSet term() {
    if (accept("{")) {
      std::set<Index> m;
      if (accept("}"))
        return EXSet(VertexSet());
      do {
        Index a = vertex();
        Index b = a;
        if (accept(".."))
          b = vertex();
        if (b < a)
          fail("empty range");
        if (b - a > 1000000)
          fail("range too large");
        for (Index j = a; j <= b; ++j)
          m.insert(j);
      } while (accept(","));
      expect("}");
      return EXSet(VertexSet::finite(m));
    }
    if (accept("tail(")) {
      Index t = integer();
      if (t == 0)
        fail("tail threshold must be positive");
      std::vector<bool> bits{true};
      if (accept(";")) {
        expect("period");
        expect("=");
        Index p = integer();
        expect(",");
        expect("bits");
        expect("=");
        skip();
        bits.clear();
        while (pos_ < s_.size() && (s_[pos_] == '0' || s_[pos_] == '1'))
          bits.push_back(s_[pos_++] == '1');
        if (p == 0 || bits.size() != p)
          fail("bit string length must equal the period");
      }
      expect(")");
      return EXSet(VertexSet::canonicalize({}, t, bits));
    }
    if (accept("primed(")) {
      EXSet inner = expr();
      expect(")");
      if (!inner.primed.empty())
        fail("nested primed(...)");
      return EXSet(VertexSet(), inner.unprimed);
    }
    if (accept("(")) {
      EXSet inner = expr();
      expect(")");
      return inner;
    }
    fail("expected '{', 'tail(', 'primed(' or '('");
  }
};

} // namespace

EXSet EXSet::parse(std::string_view text) { return SetParser(text).parse_all(); }

VertexSet VertexSet::parse(std::string_view text) {
  EXSet e = EXSet::parse(text);
  if (!e.primed.empty() && !e.unprimed.empty())
    throw std::invalid_argument("vertex set '" + std::string(text) +
                                "' mixes primed and unprimed members");
  return e.primed.empty() ? e.unprimed : e.primed;
}

} // namespace ultra
