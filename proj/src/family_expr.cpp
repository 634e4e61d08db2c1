#include "ultra/family_expr.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

namespace ultra {

namespace {

constexpr Index kSearchCap = 1000000;

} // namespace

FamilyExpr FamilyExpr::linear(const Rational& c0, const Rational& c1) {
  FamilyExpr e;
  e.c0 = c0;
  e.c1 = c1;
  return e;
}

FamilyExpr FamilyExpr::geometric(const Rational& c0, const Rational& c2, const Rational& ratio) {
  if (ratio <= 0)
    throw std::invalid_argument("geometric ratio must be positive");
  FamilyExpr e;
  e.c0 = c0;
  e.c2 = c2;
  e.ratio = ratio;
  e.normalize();
  return e;
}

void FamilyExpr::normalize() {
  if (c2 == 0 || ratio == 1) {
    c0 += c2; // ratio 1 contributes a constant
    c2 = 0;
    ratio = 1;
  }
}

Rational FamilyExpr::at(std::int64_t n) const {
  Rational v = c0 + c1 * n;
  if (c2 != 0)
    v += c2 * power(ratio, n);
  return v;
}

FamilyExpr FamilyExpr::shifted(std::int64_t d) const {
  FamilyExpr e = *this;
  e.c0 += c1 * d;
  if (c2 != 0)
    e.c2 = c2 * power(ratio, d);
  return e;
}

FamilyExpr& FamilyExpr::operator+=(const FamilyExpr& o) {
  if (c2 != 0 && o.c2 != 0 && ratio != o.ratio)
    throw std::domain_error("cannot combine geometric terms with different ratios");
  c0 += o.c0;
  c1 += o.c1;
  if (o.c2 != 0) {
    if (c2 == 0)
      ratio = o.ratio;
    c2 += o.c2;
  }
  normalize();
  return *this;
}

FamilyExpr& FamilyExpr::operator-=(const FamilyExpr& o) { return *this += Rational(-1) * o; }

FamilyExpr operator*(const Rational& k, const FamilyExpr& a) {
  FamilyExpr e = a;
  e.c0 *= k;
  e.c1 *= k;
  e.c2 *= k;
  e.normalize();
  return e;
}

std::string FamilyExpr::to_string() const {
  // printed in the configuration syntax, e.g. "2n-2" or "3-4*(1/2)^n"
  std::string s;
  auto coef = [](const Rational& c) {
    std::string t = ultra::to_string(c);
    return is_integer(c) ? t : "(" + t + ")";
  };
  auto term = [&](const Rational& c, const std::string& var) {
    if (c == 0)
      return;
    Rational m = abs(c);
    std::string body = m == 1 && !var.empty() ? var
                       : var.empty()          ? coef(m)
                       : var[0] == '('        ? coef(m) + "*" + var
                                              : coef(m) + var;
    if (s.empty())
      s = (c < 0 ? "-" : "") + body;
    else
      s += (c < 0 ? "-" : "+") + body;
  };
  term(c1, "n");
  term(c2, "(" + ultra::to_string(ratio) + ")^n");
  term(c0, "");
  return s.empty() ? "0" : s;
}

// ---------------------------------------------------------------- ranges

IndexRange IndexRange::between(Index lo, Index hi) {
  if (hi < lo)
    return none();
  return {lo, hi, false};
}

bool IndexRange::contains(Index n) const {
  return !empty && n >= lo && (!hi || n <= *hi);
}

IndexRange intersect(const IndexRange& a, const IndexRange& b) {
  if (a.empty || b.empty)
    return IndexRange::none();
  Index lo = std::max(a.lo, b.lo);
  std::optional<Index> hi;
  if (a.hi && b.hi)
    hi = std::min(*a.hi, *b.hi);
  else
    hi = a.hi ? a.hi : b.hi;
  if (hi && *hi < lo)
    return IndexRange::none();
  return {lo, hi, false};
}

VertexSet range_in_class(const IndexRange& r, Index first, Index step) {
  if (r.empty)
    return VertexSet();
  Index start = std::max(r.lo, first);
  Index off = (start - first) % step;
  if (off)
    start += step - off;
  if (!r.hi)
    return VertexSet::progression(start, step);
  if (*r.hi < start)
    return VertexSet();
  if ((*r.hi - start) / step > kSearchCap)
    throw std::length_error("index range too large to enumerate");
  std::set<Index> m;
  for (Index n = start; n <= *r.hi; n += step)
    m.insert(n);
  return VertexSet::finite(m);
}

namespace {

bool holds(const Rational& v, Cmp c) {
  switch (c) {
  case Cmp::Lt:
    return v < 0;
  case Cmp::Le:
    return v <= 0;
  case Cmp::Eq:
    return v == 0;
  }
  return false;
}

/// A \ B for rays B sharing an end with A.
IndexRange ray_difference(const IndexRange& a, const IndexRange& b) {
  if (b.empty)
    return a;
  if (a.empty)
    return a;
  if (b.lo == a.lo) {
    if (!b.hi)
      return IndexRange::none();
    if (a.hi && *a.hi <= *b.hi)
      return IndexRange::none();
    return {*b.hi + 1, a.hi, false};
  }
  if (b.hi == a.hi) {
    if (b.lo <= a.lo)
      return IndexRange::none();
    return IndexRange::between(a.lo, b.lo - 1);
  }
  throw std::logic_error("ray difference is not a range");
}

Index clamp_index(const Rational& q) {
  if (q < 1)
    return 0;
  if (q > Rational(std::numeric_limits<std::int64_t>::max() / 2))
    throw std::overflow_error("index out of range");
  return Index(q.get_num().get_si() / q.get_den().get_si());
}

/// first n in [lo, cap] with pred true, pred monotone false->true
template <class Pred>
std::optional<Index> first_true(Index lo, Pred pred) {
  if (pred(lo))
    return lo;
  Index step = 1, bad = lo;
  for (;;) {
    Index probe = lo + step;
    if (probe - lo > kSearchCap)
      return std::nullopt;
    if (pred(probe)) {
      Index good = probe;
      while (good - bad > 1) {
        Index mid = bad + (good - bad) / 2;
        if (pred(mid))
          good = mid;
        else
          bad = mid;
      }
      return good;
    }
    bad = probe;
    step *= 2;
  }
}

IndexRange solve_ray(const FamilyExpr& e, Cmp cmp, Index lower) {
  auto sat = [&](Index n) { return holds(e.at(std::int64_t(n)), cmp); };
  if (e.is_constant())
    return holds(e.c0, cmp) ? IndexRange::from(lower) : IndexRange::none();

  if (!e.is_geometric()) {
    // c0 + c1 n cmp 0 with root r = -c0/c1
    Rational r = -e.c0 / e.c1;
    if (e.c1 > 0) {
      Rational hi = cmp == Cmp::Le ? floor_of(r) : ceil_of(r) - 1;
      if (hi < Rational(lower))
        return IndexRange::none();
      return IndexRange::between(lower, clamp_index(hi));
    }
    Rational lo = cmp == Cmp::Le ? ceil_of(r) : floor_of(r) + 1;
    Index l = lo < Rational(lower) ? lower : clamp_index(lo);
    return IndexRange::from(std::max(l, lower));
  }

  if (e.c1 != 0)
    throw std::domain_error("mixed linear and geometric family expression");
  if (!(e.ratio > 0 && e.ratio < 1))
    throw std::domain_error("geometric ratio must lie in (0,1)");
  // c0 + c2 rho^n is strictly monotone, tending to c0
  bool eventually = e.c2 > 0 ? e.c0 < 0 : e.c0 <= 0;
  if (e.c2 > 0) {
    // decreasing: satisfied set is upward closed
    if (!eventually)
      return IndexRange::none();
    auto n = first_true(lower, sat);
    if (!n)
      throw std::overflow_error("geometric crossing beyond search cap");
    return IndexRange::from(*n);
  }
  // increasing: satisfied set is downward closed
  if (!sat(lower))
    return IndexRange::none();
  if (eventually)
    return IndexRange::from(lower);
  auto n = first_true(lower, [&](Index k) { return !sat(k); });
  if (!n)
    throw std::overflow_error("geometric crossing beyond search cap");
  return IndexRange::between(lower, *n - 1);
}

} // namespace

IndexRange solve(const FamilyExpr& e, Cmp cmp, Index lower) {
  if (lower == 0)
    lower = 1;
  if (cmp != Cmp::Eq)
    return solve_ray(e, cmp, lower);
  if (e.is_constant())
    return e.c0 == 0 ? IndexRange::from(lower) : IndexRange::none();
  // strictly monotone: the root set is Le \ Lt, or Le \ Lt of -e
  FamilyExpr f = e;
  bool increasing = e.is_geometric() ? e.c2 < 0 : e.c1 > 0;
  if (!increasing)
    f = Rational(-1) * e;
  // f increasing: Le = [lower, a], Lt = [lower, b]
  IndexRange le = solve_ray(f, Cmp::Le, lower);
  IndexRange lt = solve_ray(f, Cmp::Lt, lower);
  return ray_difference(le, lt);
}

} // namespace ultra
