#include "ultra/markov.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ultra {

// ---------------------------------------------------------------- intervals

bool Interval::empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }

bool Interval::contains(const Rational& x) const {
  bool above = lo_closed ? x >= lo : x > lo;
  bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

Rational Interval::sample() const {
  if (lo == hi)
    return lo;
  return (lo + hi) / 2;
}

std::string Interval::to_string() const {
  return std::string(lo_closed ? "[" : "(") + ultra::to_string(lo) + ", " + ultra::to_string(hi) +
         (hi_closed ? "]" : ")");
}

Interval intersect(const Interval& a, const Interval& b) {
  Interval r;
  if (a.lo > b.lo)
    r.lo = a.lo, r.lo_closed = a.lo_closed;
  else if (b.lo > a.lo)
    r.lo = b.lo, r.lo_closed = b.lo_closed;
  else
    r.lo = a.lo, r.lo_closed = a.lo_closed && b.lo_closed;
  if (a.hi < b.hi)
    r.hi = a.hi, r.hi_closed = a.hi_closed;
  else if (b.hi < a.hi)
    r.hi = b.hi, r.hi_closed = b.hi_closed;
  else
    r.hi = a.hi, r.hi_closed = a.hi_closed && b.hi_closed;
  return r;
}

bool contains(const Interval& outer, const Interval& inner) {
  if (inner.empty())
    return true;
  bool lo_ok = inner.lo > outer.lo || (inner.lo == outer.lo && (outer.lo_closed || !inner.lo_closed));
  bool hi_ok = inner.hi < outer.hi || (inner.hi == outer.hi && (outer.hi_closed || !inner.hi_closed));
  return lo_ok && hi_ok;
}

Interval Piece::image() const {
  Rational a = apply(domain.lo), b = apply(domain.hi);
  if (slope > 0)
    return {a, b, domain.lo_closed, domain.hi_closed};
  return {b, a, domain.hi_closed, domain.lo_closed};
}

Piece PieceTemplate::at(Index n) const {
  auto k = std::int64_t(n);
  return {{lo.at(k), hi.at(k), lo_closed, hi_closed}, slope, intercept.at(k)};
}

namespace {

/// Sorted union of intervals as maximal disjoint components.
std::vector<Interval> merge(std::vector<Interval> parts) {
  parts.erase(std::remove_if(parts.begin(), parts.end(), [](const Interval& i) { return i.empty(); }),
              parts.end());
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo)
      return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });
  std::vector<Interval> out;
  for (const Interval& p : parts) {
    if (!out.empty()) {
      Interval& c = out.back();
      bool joins = p.lo < c.hi || (p.lo == c.hi && (p.lo_closed || c.hi_closed));
      if (joins) {
        if (p.hi > c.hi || (p.hi == c.hi && p.hi_closed))
          c.hi = p.hi, c.hi_closed = p.hi_closed || (p.hi == c.hi && c.hi_closed);
        continue;
      }
    }
    out.push_back(p);
  }
  return out;
}

} // namespace

// ---------------------------------------------------------------- MarkovMap

void MarkovMap::finalize() {
  assigned_.clear();
  if (intervals.empty())
    throw std::invalid_argument("the partition needs at least one explicit interval");
  if (family && family->first != intervals.size() + 1)
    throw std::invalid_argument("interval family must start at n=" +
                                std::to_string(intervals.size() + 1));
  for (const MapFamily& f : map_families) {
    if (f.first == 0 || f.step == 0)
      throw std::invalid_argument("map family start and step must be positive");
    if (!family || f.first < family->first)
      throw std::invalid_argument("map family for n>=" + std::to_string(f.first) +
                                  " does not lie inside the interval family");
    if (f.pieces.empty())
      throw std::invalid_argument("map family for n>=" + std::to_string(f.first) + " has no pieces");
  }
  for (std::size_t a = 0; a < map_families.size(); ++a)
    for (std::size_t b = a + 1; b < map_families.size(); ++b) {
      VertexSet sa = VertexSet::progression(map_families[a].first, map_families[a].step);
      VertexSet sb = VertexSet::progression(map_families[b].first, map_families[b].step);
      if (auto c = intersect(sa, sb); !c.empty())
        throw std::invalid_argument("two map families both define I_" + std::to_string(*c.min()));
    }
  for (const Piece& p : pieces) {
    if (p.domain.empty())
      throw std::invalid_argument("empty piece domain " + p.domain.to_string());
    std::optional<Index> home;
    for (Index n : locate(p.domain.sample()))
      if (contains(interval(n), p.domain))
        home = n;
    if (!home)
      throw std::invalid_argument("piece on " + p.domain.to_string() +
                                  " does not lie inside a single interval");
    assigned_[*home].push_back(p);
  }
  for (auto& [n, v] : assigned_)
    std::sort(v.begin(), v.end(),
              [](const Piece& a, const Piece& b) { return a.domain.lo < b.domain.lo; });
}

std::optional<Index> MarkovMap::count() const {
  if (family)
    return std::nullopt;
  return intervals.size();
}

bool MarkovMap::has_interval(Index n) const {
  return n >= 1 && (n <= intervals.size() || (family && n >= family->first));
}

Interval MarkovMap::interval(Index n) const {
  if (n >= 1 && n <= intervals.size())
    return intervals[n - 1];
  if (family && n >= family->first)
    return Interval::closed(family->lo.at(std::int64_t(n)), family->hi.at(std::int64_t(n)));
  throw std::out_of_range("no interval I_" + std::to_string(n));
}

Interval MarkovMap::gap(Index n) const {
  Interval i = interval(n);
  if (has_interval(n + 1))
    return Interval::open(i.hi, interval(n + 1).lo);
  if (!ambient_hi)
    throw std::domain_error("unbounded gap after the last interval");
  return Interval::open(i.hi, *ambient_hi);
}

bool MarkovMap::has_explicit_pieces(Index n) const { return assigned_.count(n) != 0; }

const MapFamily* MarkovMap::family_for(Index n) const {
  for (const MapFamily& f : map_families)
    if (f.covers(n))
      return &f;
  return nullptr;
}

std::vector<Piece> MarkovMap::pieces_of(Index n) const {
  if (auto it = assigned_.find(n); it != assigned_.end())
    return it->second;
  std::vector<Piece> out;
  if (const MapFamily* f = family_for(n))
    for (const PieceTemplate& t : f->pieces)
      out.push_back(t.at(n));
  std::sort(out.begin(), out.end(),
            [](const Piece& a, const Piece& b) { return a.domain.lo < b.domain.lo; });
  return out;
}

std::vector<PointOverride> MarkovMap::overrides_of(Index n) const {
  Interval i = interval(n);
  std::vector<PointOverride> out;
  for (const PointOverride& o : overrides)
    if (i.contains(o.point))
      out.push_back(o);
  if (!has_explicit_pieces(n))
    if (const MapFamily* f = family_for(n))
      for (const OverrideTemplate& t : f->overrides) {
        PointOverride o{t.point.at(std::int64_t(n)), t.value.at(std::int64_t(n))};
        if (i.contains(o.point))
          out.push_back(o);
      }
  return out;
}

std::vector<Piece> MarkovMap::effective_pieces(Index n) const {
  std::vector<PointOverride> ov = overrides_of(n);
  std::vector<Piece> out;
  for (const Piece& p : pieces_of(n)) {
    std::vector<Rational> cuts;
    for (const PointOverride& o : ov)
      if (p.domain.contains(o.point))
        cuts.push_back(o.point);
    std::sort(cuts.begin(), cuts.end());
    Interval rest = p.domain;
    for (const Rational& c : cuts) {
      Interval left{rest.lo, c, rest.lo_closed, false};
      if (!left.empty())
        out.push_back({left, p.slope, p.intercept});
      rest = {c, rest.hi, false, rest.hi_closed};
    }
    if (!rest.empty())
      out.push_back({rest, p.slope, p.intercept});
  }
  return out;
}

std::vector<Index> MarkovMap::locate(const Rational& x) const {
  std::vector<Index> out;
  for (Index n = 1; n <= intervals.size(); ++n)
    if (intervals[n - 1].contains(x))
      out.push_back(n);
  if (family) {
    IndexRange r = intersect(solve(family->lo - FamilyExpr(x), Cmp::Le, family->first),
                             solve(FamilyExpr(x) - family->hi, Cmp::Le, family->first));
    if (!r.bounded())
      throw std::domain_error("point " + to_string(x) + " lies in infinitely many intervals");
    for (Index n : range_in_class(r, family->first, 1).elements())
      out.push_back(n);
  }
  return out;
}

bool MarkovMap::in_ambient(const Rational& x) const {
  return x >= ambient_lo && (!ambient_hi || x < *ambient_hi);
}

std::optional<Index> MarkovMap::gap_index(const Rational& x) const {
  if (!in_ambient(x) || in_domain(x))
    return std::nullopt;
  for (Index n = 1; n <= intervals.size(); ++n)
    if (gap(n).contains(x))
      return n;
  if (family) {
    IndexRange r = intersect(solve(family->hi - FamilyExpr(x), Cmp::Lt, family->first),
                             solve(FamilyExpr(x) - family->lo.shifted(1), Cmp::Lt, family->first));
    if (!r.empty)
      return r.lo;
  }
  return std::nullopt;
}

bool MarkovMap::in_gamma(const Rational& x) const {
  for (Index n : locate(x)) {
    Interval i = interval(n);
    if (x == i.lo || x == i.hi)
      return true;
  }
  return false;
}

Rational MarkovMap::apply(Index n, const Rational& x) const {
  if (!interval(n).contains(x))
    throw std::domain_error(to_string(x) + " is not in I_" + std::to_string(n));
  for (const PointOverride& o : overrides_of(n))
    if (o.point == x)
      return o.value;
  for (const Piece& p : pieces_of(n))
    if (p.domain.contains(x))
      return p.apply(x);
  throw std::domain_error("g_" + std::to_string(n) + " is undefined at " + to_string(x));
}

std::optional<Rational> MarkovMap::eval(const Rational& x) const {
  std::vector<Index> loc = locate(x);
  if (loc.empty())
    return std::nullopt;
  return apply(loc.front(), x);
}

bool operator==(const MarkovMap& a, const MarkovMap& b) {
  return a.ambient_lo == b.ambient_lo && a.ambient_hi == b.ambient_hi &&
         a.intervals == b.intervals && a.family == b.family && a.pieces == b.pieces &&
         a.overrides == b.overrides && a.map_families == b.map_families;
}

// ---------------------------------------------------------------- validation

namespace {

struct Checker {
  const MarkovMap& m;
  Certification& cert;

  void violate(int cond, Index n, const Rational& w, const std::string& msg) {
    cert.certified = false;
    cert.violations.push_back({cond, n, w, msg});
  }

  bool in_I(const Rational& x) const { return m.in_ambient(x); }

  void geometry() {
    const Rational& a = m.ambient_lo;
    if (m.ambient_hi && *m.ambient_hi <= a)
      violate(1, 0, a, "ambient interval is empty");
    for (Index n = 1; n <= m.intervals.size(); ++n) {
      const Interval& i = m.intervals[n - 1];
      if (!(i.lo_closed && i.hi_closed) || i.lo >= i.hi)
        violate(1, n, i.lo, "I_n must be a nondegenerate closed interval");
      if (n == 1 && i.lo != a)
        violate(1, 1, i.lo, "min I_1 differs from min I");
      if (n > 1 && m.intervals[n - 2].hi > i.lo)
        violate(1, n, i.lo, "max I_{n-1} > min I_n");
      if (m.ambient_hi && i.hi >= *m.ambient_hi)
        violate(1, n, i.hi, "I_n is not inside I");
    }
    if (!m.family) {
      if (!m.ambient_hi)
        violate(1, m.intervals.size(), m.intervals.back().hi,
                "a finite partition needs a bounded ambient interval");
      cert.notes.push_back("finite partition with " + std::to_string(m.intervals.size()) +
                           " intervals");
      return;
    }
    const IntervalFamily& f = *m.family;
    Index k0 = f.first;
    try {
      IndexRange bad = solve(f.hi - f.lo, Cmp::Le, k0);
      if (!bad.empty)
        violate(1, bad.lo, f.lo.at(bad.lo), "I_n degenerate or reversed");
      bad = solve(f.lo.shifted(1) - f.hi, Cmp::Lt, k0);
      if (!bad.empty)
        violate(1, bad.lo + 1, f.lo.at(bad.lo + 1), "max I_n > min I_{n+1}");
      if (m.intervals.back().hi > f.lo.at(k0))
        violate(1, k0, f.lo.at(k0), "max I_{n-1} > min I_n");
      if (m.ambient_hi) {
        bad = solve(FamilyExpr(*m.ambient_hi) - f.hi, Cmp::Le, k0);
        if (!bad.empty)
          violate(1, bad.lo, f.hi.at(bad.lo), "I_n is not inside I");
      }
    } catch (const std::exception& e) {
      violate(1, k0, f.lo.at(k0), std::string("cannot decide the family geometry: ") + e.what());
    }
    bool shift = !f.lo.is_geometric() && !f.hi.is_geometric();
    if (shift) {
      if (!(f.lo.c1 > 0 && f.hi.c1 > 0) || m.ambient_hi)
        violate(1, k0, f.lo.at(k0), "sup I_n does not tend to sup I");
      else
        cert.notes.push_back("arithmetic family, sup I_n -> infinity");
    } else {
      bool ok = f.lo.c1 == 0 && f.hi.c1 == 0 && m.ambient_hi && f.lo.c0 == *m.ambient_hi &&
                f.hi.c0 == *m.ambient_hi && f.lo.c2 < 0 && f.hi.c2 < 0 && f.lo.ratio > 0 &&
                f.lo.ratio < 1;
      if (!ok)
        violate(1, k0, f.lo.at(k0), "sup I_n does not tend to sup I");
      else
        cert.notes.push_back("geometric family, sup I_n -> " + to_string(*m.ambient_hi));
    }
  }

  // one interval, concretely
  void branches(Index n) {
    Interval I = m.interval(n);
    std::vector<Piece> ps = m.pieces_of(n);
    std::vector<PointOverride> ov = m.overrides_of(n);
    if (ps.empty()) {
      violate(2, n, I.lo, "no branch data for I_n");
      return;
    }
    auto covered = [&](const Rational& x) {
      for (const PointOverride& o : ov)
        if (o.point == x)
          return true;
      for (const Piece& p : ps)
        if (p.domain.contains(x))
          return true;
      return false;
    };
    for (const Piece& p : ps) {
      if (p.slope == 0)
        violate(2, n, p.domain.lo, "constant branch");
      if (!contains(I, p.domain))
        violate(2, n, p.domain.lo, "piece leaves I_n");
    }
    for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
      const Interval &a = ps[k].domain, &b = ps[k + 1].domain;
      if (a.hi > b.lo)
        violate(2, n, b.lo, "pieces overlap");
      else if (a.hi < b.lo)
        violate(2, n, (a.hi + b.lo) / 2, "pieces leave a hole");
    }
    if (ps.front().domain.lo != I.lo)
      violate(2, n, I.lo, "pieces do not reach min I_n");
    if (ps.back().domain.hi != I.hi)
      violate(2, n, I.hi, "pieces do not reach max I_n");
    std::set<Rational> marks{I.lo, I.hi};
    for (const Piece& p : ps) {
      marks.insert(p.domain.lo);
      marks.insert(p.domain.hi);
    }
    for (const Rational& x : marks)
      if (I.contains(x) && !covered(x))
        violate(2, n, x, "g is undefined at this point");
    // two closed pieces meeting at a point must agree there
    for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
      const Piece &a = ps[k], &b = ps[k + 1];
      if (a.domain.hi == b.domain.lo && a.domain.hi_closed && b.domain.lo_closed) {
        bool ovr = std::any_of(ov.begin(), ov.end(),
                               [&](const PointOverride& o) { return o.point == a.domain.hi; });
        if (!ovr && a.apply(a.domain.hi) != b.apply(b.domain.lo))
          violate(2, n, a.domain.hi, "two branch values at one point");
      }
    }

    std::vector<Piece> eff = m.effective_pieces(n);
    // injectivity on the interior
    for (std::size_t a = 0; a < eff.size(); ++a)
      for (std::size_t b = a + 1; b < eff.size(); ++b) {
        Interval ia = eff[a].image(), ib = eff[b].image();
        Interval oa{ia.lo, ia.hi, false, false}, ob{ib.lo, ib.hi, false, false};
        Interval both = intersect(oa, ob);
        if (!both.empty())
          violate(2, n, both.sample(), "g is not injective on the interior of I_n");
      }
    Interval interior{I.lo, I.hi, false, false};
    for (const PointOverride& o : ov) {
      if (!interior.contains(o.point))
        continue;
      for (const Piece& p : eff) {
        Interval im = p.image();
        if (Interval{im.lo, im.hi, false, false}.contains(o.value))
          violate(2, n, o.value, "override value repeats a branch value");
      }
    }
    // Gamma invariance on the boundary and at closed piece endpoints
    std::set<Rational> gpts{I.lo, I.hi};
    for (const Piece& p : ps) {
      if (p.domain.lo_closed)
        gpts.insert(p.domain.lo);
      if (p.domain.hi_closed)
        gpts.insert(p.domain.hi);
    }
    for (const Rational& x : gpts) {
      if (!covered(x))
        continue;
      Rational v = m.apply(n, x);
      if (!in_I(v))
        violate(2, n, v, "g leaves I");
      else if (!m.in_gamma(v))
        violate(2, n, v, "image of an endpoint is not in Gamma");
    }
    // image inside I
    for (const Piece& p : eff) {
      Interval im = p.image();
      if (im.lo < m.ambient_lo)
        violate(2, n, im.lo, "g leaves I");
      if (m.ambient_hi && (im.hi > *m.ambient_hi || (im.hi == *m.ambient_hi && im.hi_closed)))
        violate(2, n, im.hi, "g leaves I");
    }
    for (const PointOverride& o : ov)
      if (!in_I(o.value))
        violate(2, n, o.value, "g leaves I");
  }

  void families(Index horizon) {
    if (!m.family)
      return;
    const IntervalFamily& f = *m.family;
    // every family interval needs branch data
    VertexSet have;
    for (const MapFamily& mf : m.map_families)
      have = set_union(have, VertexSet::progression(mf.first, mf.step));
    for (Index n = f.first; n <= horizon; ++n)
      if (m.has_explicit_pieces(n))
        have = set_union(have, VertexSet::singleton(n));
    VertexSet missing = difference(VertexSet::tail(f.first), have);
    if (!missing.empty() && *missing.min() > horizon)
      violate(2, *missing.min(), f.lo.at(*missing.min()), "no branch data for I_n");

    for (const MapFamily& mf : m.map_families)
      family_templates(mf, horizon);
  }

  void family_templates(const MapFamily& mf, Index horizon) {
    const IntervalFamily& f = *m.family;
    const Index n0 = mf.first;
    std::vector<PieceTemplate> ts = mf.pieces;
    std::sort(ts.begin(), ts.end(), [&](const PieceTemplate& a, const PieceTemplate& b) {
      return a.lo.at(n0) < b.lo.at(n0);
    });
    auto override_at = [&](const FamilyExpr& p) -> const OverrideTemplate* {
      for (const OverrideTemplate& o : mf.overrides)
        if (o.point == p)
          return &o;
      return nullptr;
    };
    std::string label = "branch family n>=" + std::to_string(n0);
    // tiling, identically in n
    bool tiles = ts.front().lo == f.lo && ts.back().hi == f.hi;
    if (tiles && !(ts.front().lo_closed || override_at(f.lo)))
      tiles = false;
    if (tiles && !(ts.back().hi_closed || override_at(f.hi)))
      tiles = false;
    for (std::size_t k = 0; tiles && k + 1 < ts.size(); ++k) {
      if (ts[k].hi != ts[k + 1].lo)
        tiles = false;
      else if (!(ts[k].hi_closed || ts[k + 1].lo_closed || override_at(ts[k].hi)))
        tiles = false;
    }
    if (!tiles) {
      violate(2, n0, f.lo.at(n0), label + ": pieces do not tile I_n for every n");
      return;
    }
    for (const PieceTemplate& t : ts)
      if (t.slope == 0)
        violate(2, n0, t.lo.at(n0), label + ": constant branch");

    VertexSet cls = VertexSet::progression(mf.first, mf.step);
    auto in_class = [&](const IndexRange& r) { return intersect(range_in_class(r, mf.first, mf.step), cls); };
    auto image_ends = [](const PieceTemplate& t) {
      FamilyExpr u = t.slope * t.lo + t.intercept, w = t.slope * t.hi + t.intercept;
      if (t.slope < 0)
        std::swap(u, w);
      return std::make_pair(u, w);
    };
    try {
      for (std::size_t a = 0; a < ts.size(); ++a)
        for (std::size_t b = a + 1; b < ts.size(); ++b) {
          auto [ua, wa] = image_ends(ts[a]);
          auto [ub, wb] = image_ends(ts[b]);
          IndexRange r = intersect(solve(ub - wa, Cmp::Lt, n0), solve(ua - wb, Cmp::Lt, n0));
          VertexSet bad = in_class(r);
          if (!bad.empty()) {
            Index n = *bad.min();
            violate(2, n, ub.at(std::int64_t(n)), label + ": g is not injective on the interior of I_n");
          }
        }
      for (const PieceTemplate& t : ts) {
        auto [u, w] = image_ends(t);
        VertexSet bad = in_class(solve(u - FamilyExpr(m.ambient_lo), Cmp::Lt, n0));
        if (!bad.empty())
          violate(2, *bad.min(), u.at(std::int64_t(*bad.min())), label + ": g leaves I");
        if (m.ambient_hi) {
          bad = in_class(solve(FamilyExpr(*m.ambient_hi) - w, Cmp::Lt, n0));
          if (!bad.empty())
            violate(2, *bad.min(), w.at(std::int64_t(*bad.min())), label + ": g leaves I");
        }
      }
      gamma_symbolic(mf, ts, horizon);
    } catch (const std::domain_error& e) {
      cert.notes.push_back(label + ": symbolic checks skipped (" + e.what() + ")");
    }
  }

  void gamma_symbolic(const MapFamily& mf, const std::vector<PieceTemplate>& ts, Index horizon) {
    const IntervalFamily& f = *m.family;
    const Index n0 = mf.first;
    constexpr int kWindow = 8;
    VertexSet cls = VertexSet::progression(mf.first, mf.step);
    std::vector<FamilyExpr> pts{f.lo, f.hi};
    for (const PieceTemplate& t : ts) {
      if (t.lo_closed)
        pts.push_back(t.lo);
      if (t.hi_closed)
        pts.push_back(t.hi);
    }
    std::vector<Rational> fixed_gamma;
    for (const Interval& i : m.intervals) {
      fixed_gamma.push_back(i.lo);
      fixed_gamma.push_back(i.hi);
    }
    for (const FamilyExpr& p : pts) {
      std::optional<FamilyExpr> v;
      for (const OverrideTemplate& o : mf.overrides)
        if (o.point == p)
          v = o.value;
      for (const PieceTemplate& t : ts)
        if (!v && ((t.lo == p && t.lo_closed) || (t.hi == p && t.hi_closed)))
          v = t.slope * p + t.intercept;
      if (!v)
        continue;
      VertexSet covered;
      for (int d = -kWindow; d <= kWindow; ++d) {
        std::int64_t start = std::max<std::int64_t>(std::int64_t(n0), std::int64_t(f.first) - d);
        if (start < 1)
          start = 1;
        for (const FamilyExpr* e : {&f.lo, &f.hi}) {
          IndexRange r = solve(*v - e->shifted(d), Cmp::Eq, Index(start));
          covered = set_union(covered, range_in_class(r, 1, 1));
        }
      }
      for (const Rational& q : fixed_gamma)
        covered = set_union(covered, range_in_class(solve(*v - FamilyExpr(q), Cmp::Eq, n0), 1, 1));
      VertexSet open = difference(cls, covered);
      if (open.empty())
        continue;
      Index n = *open.min();
      if (n <= horizon)
        continue; // decided concretely
      Rational val = v->at(std::int64_t(n));
      if (!m.in_gamma(val))
        violate(2, n, val, "image of an endpoint is not in Gamma");
      else
        cert.notes.push_back("Gamma invariance beyond the horizon only checked concretely at n=" +
                             std::to_string(n));
    }
  }
};

} // namespace

Certification validate_markov(const MarkovMap& m, Index horizon) {
  Certification cert;
  cert.horizon = horizon;
  Checker c{m, cert};
  c.geometry();
  Index upto = m.count() ? *m.count() : horizon;
  for (Index n = 1; n <= upto; ++n) {
    c.branches(n);
    RowResult r = transition_row(m, n);
    for (const Violation& v : r.violations) {
      cert.certified = false;
      cert.violations.push_back(v);
    }
  }
  c.families(horizon);
  if (m.infinite())
    cert.notes.push_back("conditions (2) and (3) checked concretely for n <= " +
                         std::to_string(horizon) + ", family branches symbolically");
  std::stable_sort(cert.violations.begin(), cert.violations.end(),
                   [](const Violation& a, const Violation& b) {
                     return std::tie(a.condition, a.interval) < std::tie(b.condition, b.interval);
                   });
  return cert;
}

// ---------------------------------------------------------------- rows

namespace {

/// g(I_i) as disjoint components, override values included.
std::vector<Interval> image_components(const MarkovMap& m, Index i) {
  std::vector<Interval> parts;
  for (const Piece& p : m.effective_pieces(i))
    parts.push_back(p.image());
  for (const PointOverride& o : m.overrides_of(i))
    parts.push_back(Interval::point(o.value));
  return merge(parts);
}

} // namespace

RowResult transition_row(const MarkovMap& m, Index i) {
  RowResult out;
  std::vector<Interval> comps = image_components(m, i);
  std::set<Index> candidates;
  VertexSet whole;

  for (Index j = 1; j <= m.intervals.size(); ++j) {
    Interval I = m.intervals[j - 1];
    for (const Interval& c : comps) {
      if (contains(c, I))
        whole = set_union(whole, VertexSet::singleton(j));
      else if (!intersect(c, I).empty())
        candidates.insert(j);
    }
  }
  if (m.family) {
    const IntervalFamily& f = *m.family;
    for (const Interval& c : comps) {
      IndexRange touch = intersect(solve(f.lo - FamilyExpr(c.hi), Cmp::Le, f.first),
                                   solve(FamilyExpr(c.lo) - f.hi, Cmp::Le, f.first));
      IndexRange inside =
          intersect(solve(FamilyExpr(c.lo) - f.lo, c.lo_closed ? Cmp::Le : Cmp::Lt, f.first),
                    solve(f.hi - FamilyExpr(c.hi), c.hi_closed ? Cmp::Le : Cmp::Lt, f.first));
      inside = intersect(inside, touch);
      whole = set_union(whole, range_in_class(inside, f.first, 1));
      VertexSet partial;
      if (touch.bounded())
        partial = difference(range_in_class(touch, f.first, 1), range_in_class(inside, f.first, 1));
      else if (!inside.empty && !inside.hi)
        partial = range_in_class(IndexRange::between(touch.lo, inside.lo - 1), f.first, 1);
      else
        throw std::domain_error("row of I_" + std::to_string(i) + " is not eventually periodic");
      for (Index j : partial.elements())
        candidates.insert(j);
    }
  }
  for (Index j : candidates) {
    if (whole.contains(j))
      continue;
    Interval I = m.interval(j);
    std::vector<Interval> bits;
    for (const Interval& c : comps)
      if (Interval x = intersect(c, I); !x.empty())
        bits.push_back(x);
    if (bits.empty()) // touched only at an open end
      continue;
    // contact in isolated Gamma points shared with a neighbour in the row is allowed
    bool absorbed = true;
    for (const Interval& b : bits) {
      bool ok = false;
      if (b.is_point())
        for (Index k : {j - 1, j + 1})
          if (k >= 1 && whole.contains(k) && m.interval(k).contains(b.lo))
            ok = true;
      absorbed = absorbed && ok;
    }
    if (absorbed)
      continue;
    // witness: an image endpoint strictly inside I_j if there is one
    Rational w = bits.front().lo;
    for (const Interval& c : comps)
      for (const Rational& e : {c.lo, c.hi})
        if (e > I.lo && e < I.hi)
          w = e;
    out.violations.push_back({3, i, w,
                              "g(I_" + std::to_string(i) + ") meets I_" + std::to_string(j) +
                                  " without containing it"});
  }
  if (whole.empty())
    out.violations.push_back({3, i, comps.empty() ? m.interval(i).lo : comps.front().sample(),
                              "g(I_" + std::to_string(i) + ") contains no interval"});
  out.row = whole;
  return out;
}

TransitionMatrix transition_matrix(const MarkovMap& m, Index horizon) {
  TransitionMatrix t;
  t.horizon = horizon;
  Index upto = m.count() ? *m.count() : horizon;
  for (Index i = 1; i <= upto; ++i) {
    RowResult r = transition_row(m, i);
    if (!r.violations.empty())
      throw std::invalid_argument("map is not in the Markov class: " + r.violations.front().message);
    t.rows.push_back(r.row);
  }
  auto row = [&](Index i) -> VertexSet {
    if (i <= t.rows.size())
      return t.rows[i - 1];
    RowResult r = transition_row(m, i);
    if (!r.violations.empty())
      throw std::invalid_argument("map is not in the Markov class: " + r.violations.front().message);
    return r.row;
  };
  if (!m.infinite()) {
    for (Index i = 1; i <= upto; ++i)
      t.explicit_rows[i] = t.rows[i - 1];
    return t;
  }

  std::vector<EdgeFamily> rules;
  for (const MapFamily& mf : m.map_families) {
    std::vector<Index> members;
    for (Index n = mf.first; n <= horizon; n += mf.step)
      members.push_back(n);
    std::string label = "rows of the branch family n>=" + std::to_string(mf.first);
    if (members.size() < 3)
      throw std::domain_error(label + ": horizon too small to infer the offset rule");
    VertexSet common = row(members.front());
    for (Index n : members)
      common = intersect(common, row(n));
    Index last = members.back();
    VertexSet moving = difference(row(last), common);
    if (!moving.is_finite())
      throw std::domain_error(label + " are not in offset form");
    EdgeFamily rule{mf.first, mf.step, {}, common};
    for (Index j : moving.elements())
      rule.offsets.push_back(std::int64_t(j) - std::int64_t(last));
    for (Index n : members)
      if (row(n) != rule.range_at(n))
        throw std::domain_error(label + " are not in offset form (row " + std::to_string(n) + ")");
    rules.push_back(rule);
  }
  // classes of one step with the same rule and consecutive starts merge
  std::vector<EdgeFamily> merged;
  std::vector<bool> used(rules.size(), false);
  for (std::size_t a = 0; a < rules.size(); ++a) {
    if (used[a])
      continue;
    std::vector<std::size_t> group{a};
    for (std::size_t b = a + 1; b < rules.size(); ++b)
      if (!used[b] && rules[b].step == rules[a].step && rules[b].offsets == rules[a].offsets &&
          rules[b].constant == rules[a].constant)
        group.push_back(b);
    std::set<Index> starts;
    for (std::size_t g : group)
      starts.insert(rules[g].first);
    Index s = rules[a].step;
    bool full = starts.size() == s && *starts.rbegin() - *starts.begin() == s - 1;
    if (full && s > 1) {
      for (std::size_t g : group)
        used[g] = true;
      EdgeFamily e = rules[a];
      e.first = *starts.begin();
      e.step = 1;
      merged.push_back(e);
    } else {
      used[a] = true;
      merged.push_back(rules[a]);
    }
  }
  // extend a single rule downwards while earlier rows follow it
  if (merged.size() == 1 && merged[0].step == 1) {
    EdgeFamily& e = merged[0];
    while (e.first > 1) {
      Index n = e.first - 1;
      bool nonempty = !e.constant.empty() ||
                      std::any_of(e.offsets.begin(), e.offsets.end(),
                                  [&](std::int64_t d) { return std::int64_t(n) + d >= 1; });
      if (!nonempty || row(n) != e.range_at(n))
        break;
      e.first = n;
    }
  }
  VertexSet covered;
  for (const EdgeFamily& e : merged)
    covered = set_union(covered, e.indices());
  VertexSet rest = difference(VertexSet::tail(1), covered);
  if (!rest.is_finite())
    throw std::domain_error("rows outside the branch families are not finitely many");
  for (Index i : rest.elements())
    t.explicit_rows[i] = row(i);
  t.family_rules = merged;
  return t;
}

Ultragraph induced_ultragraph(const TransitionMatrix& t, const MarkovMap& m) {
  VertexSet verts = m.count() ? VertexSet::range(1, *m.count()) : VertexSet::tail(1);
  std::vector<ExplicitEdge> edges;
  for (const auto& [i, r] : t.explicit_rows)
    edges.push_back({i, i, r});
  return Ultragraph(verts, edges, t.family_rules);
}

} // namespace ultra
