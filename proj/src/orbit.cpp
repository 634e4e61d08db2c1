#include "ultra/markov.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace ultra {

namespace {

Index last_concrete(const MarkovMap& m, Index horizon) {
  return m.count() ? std::min(*m.count(), horizon) : horizon;
}

/// Preimage of target under one affine piece, clipped to its domain.
Interval pull_back(const Piece& p, const Interval& target) {
  Interval pre{p.inverse(target.lo), p.inverse(target.hi), target.lo_closed, target.hi_closed};
  if (p.slope < 0)
    pre = {pre.hi, pre.lo, pre.hi_closed, pre.lo_closed};
  return intersect(p.domain, pre);
}

/// Indices in the class of mf, beyond `after`, where template t hits y.
VertexSet template_hits(const MapFamily& mf, const PieceTemplate& t, const Rational& y, Index after) {
  FamilyExpr pre = (1 / t.slope) * (FamilyExpr(y) - t.intercept);
  Index from = std::max(after + 1, mf.first);
  IndexRange r = intersect(solve(t.lo - pre, t.lo_closed ? Cmp::Le : Cmp::Lt, from),
                           solve(pre - t.hi, t.hi_closed ? Cmp::Le : Cmp::Lt, from));
  return range_in_class(r, mf.first, mf.step);
}

} // namespace

EscapeResult escape_data(const MarkovMap& m, const Rational& x, Index bound) {
  EscapeResult out;
  out.bound = bound;
  if (!m.in_ambient(x))
    throw std::domain_error(to_string(x) + " is outside the ambient interval");
  Rational y = x;
  for (Index t = 0; t <= bound; ++t) {
    if (!m.in_domain(y)) {
      auto j = m.gap_index(y);
      if (!j)
        throw std::domain_error("orbit of " + to_string(x) + " leaves the ambient interval at " +
                                to_string(y));
      out.data = EscapeData{x, t, *j, y};
      return out;
    }
    y = *m.eval(y);
  }
  return out;
}

PreimagePoints preimage_set(const MarkovMap& m, const Rational& target, Index horizon) {
  PreimagePoints out;
  auto scan = [&](Index n, std::vector<PreimagePoint>& sink) {
    std::set<Rational> seen;
    for (const Piece& p : m.effective_pieces(n)) {
      Rational y = p.inverse(target);
      if (p.domain.contains(y))
        seen.insert(y);
    }
    for (const PointOverride& o : m.overrides_of(n))
      if (o.value == target)
        seen.insert(o.point);
    for (const Rational& y : seen)
      if (m.locate(y).front() == n) // lowest-index convention at shared endpoints
        sink.push_back({y, n});
  };
  Index upto = last_concrete(m, horizon);
  for (Index n = 1; n <= upto; ++n)
    scan(n, out.points);
  std::sort(out.points.begin(), out.points.end(),
            [](const PreimagePoint& a, const PreimagePoint& b) { return a.point < b.point; });

  if (m.count()) {
    for (Index n = upto + 1; n <= *m.count() && !out.overflow; ++n) {
      std::vector<PreimagePoint> extra;
      scan(n, extra);
      if (!extra.empty())
        out.overflow = extra.front();
    }
    return out;
  }
  std::optional<Index> first;
  auto consider = [&](const VertexSet& s) {
    if (!s.empty() && (!first || *s.min() < *first))
      first = *s.min();
  };
  for (const MapFamily& mf : m.map_families) {
    for (const PieceTemplate& t : mf.pieces)
      consider(template_hits(mf, t, target, horizon));
    for (const OverrideTemplate& o : mf.overrides)
      consider(intersect(range_in_class(solve(o.value - FamilyExpr(target), Cmp::Eq,
                                              std::max(horizon + 1, mf.first)),
                                        mf.first, mf.step),
                         VertexSet::tail(horizon + 1)));
  }
  for (const Piece& p : m.pieces)
    for (Index n : m.locate(p.domain.sample()))
      if (n > horizon && p.domain.contains(p.inverse(target)))
        consider(VertexSet::singleton(n));
  if (first) {
    std::vector<PreimagePoint> extra;
    scan(*first, extra);
    if (!extra.empty())
      out.overflow = extra.front();
  }
  return out;
}

std::vector<Interval> preimage_in(const MarkovMap& m, const Interval& target, Index n) {
  std::vector<Interval> out;
  for (const Piece& p : m.effective_pieces(n))
    if (Interval pre = pull_back(p, target); !pre.empty())
      out.push_back(pre);
  for (const PointOverride& o : m.overrides_of(n))
    if (target.contains(o.value))
      out.push_back(Interval::point(o.point));
  std::sort(out.begin(), out.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return out;
}

PreimageIntervals preimage_set(const MarkovMap& m, const Interval& target, Index horizon) {
  PreimageIntervals out;
  Index upto = last_concrete(m, horizon);
  for (Index n = 1; n <= upto; ++n)
    for (const Interval& i : preimage_in(m, target, n))
      out.parts.push_back({n, i});
  if (m.count()) {
    for (Index n = upto + 1; n <= *m.count(); ++n)
      if (!preimage_in(m, target, n).empty())
        out.beyond = set_union(out.beyond, VertexSet::singleton(n));
    return out;
  }
  VertexSet explicit_beyond;
  for (const Piece& p : m.pieces)
    for (Index n : m.locate(p.domain.sample()))
      if (n > horizon)
        explicit_beyond = set_union(explicit_beyond, VertexSet::singleton(n));
  for (const MapFamily& mf : m.map_families) {
    Index from = std::max(horizon + 1, mf.first);
    for (const PieceTemplate& t : mf.pieces) {
      FamilyExpr u = t.slope * t.lo + t.intercept, w = t.slope * t.hi + t.intercept;
      if (t.slope < 0)
        std::swap(u, w);
      IndexRange r = intersect(solve(u - FamilyExpr(target.hi), Cmp::Lt, from),
                               solve(FamilyExpr(target.lo) - w, Cmp::Lt, from));
      out.beyond = set_union(out.beyond, range_in_class(r, mf.first, mf.step));
    }
    for (const OverrideTemplate& o : mf.overrides) {
      IndexRange r = intersect(
          solve(FamilyExpr(target.lo) - o.value, target.lo_closed ? Cmp::Le : Cmp::Lt, from),
          solve(o.value - FamilyExpr(target.hi), target.hi_closed ? Cmp::Le : Cmp::Lt, from));
      out.beyond = set_union(out.beyond, range_in_class(r, mf.first, mf.step));
    }
  }
  // explicitly specified intervals beyond the horizon are decided concretely
  out.beyond = difference(out.beyond, explicit_beyond);
  if (explicit_beyond.is_finite())
    for (Index n : explicit_beyond.elements())
      if (!preimage_in(m, target, n).empty())
        out.beyond = set_union(out.beyond, VertexSet::singleton(n));
  return out;
}

const OrbitNode* OrbitTree::find(const Rational& y) const {
  for (const OrbitNode& n : nodes)
    if (n.point == y)
      return &n;
  return nullptr;
}

OrbitTree backward_orbit(const MarkovMap& m, const Rational& target, int depth, Index horizon) {
  OrbitTree t;
  t.target = target;
  t.depth_bound = depth;
  t.horizon = horizon;
  t.complete_depth = depth;
  std::set<Rational> seen{target};
  std::vector<Rational> frontier{target};
  for (int d = 1; d <= depth; ++d) {
    std::vector<OrbitNode> level;
    for (const Rational& y : frontier) {
      PreimagePoints pre = preimage_set(m, y, horizon);
      if (pre.overflow)
        t.overflows.push_back({d, *pre.overflow});
      for (const PreimagePoint& p : pre.points) {
        if (!seen.insert(p.point).second) {
          t.recurrences.push_back(p.point);
          continue;
        }
        level.push_back({p.point, d, p.interval, y});
      }
    }
    std::sort(level.begin(), level.end(),
              [](const OrbitNode& a, const OrbitNode& b) { return a.point < b.point; });
    frontier.clear();
    for (const OrbitNode& n : level) {
      frontier.push_back(n.point);
      t.nodes.push_back(n);
    }
  }
  return t;
}

std::vector<std::string> orbit_invariant_failures(const MarkovMap& m, const OrbitTree& t) {
  std::vector<std::string> out;
  for (const OrbitNode& n : t.nodes) {
    std::string at = to_string(n.point) + " (depth " + std::to_string(n.depth) + ")";
    Interval I = m.interval(n.interval);
    if (!(n.point > I.lo && n.point < I.hi))
      out.push_back(at + " is not interior to I_" + std::to_string(n.interval));
    if (m.in_gamma(n.point))
      out.push_back(at + " lies in Gamma");
    auto g = m.eval(n.point);
    if (!g || *g != n.image)
      out.push_back(at + " has the wrong image");
    Rational y = n.point;
    for (int k = 0; k < n.depth; ++k) {
      auto next = m.eval(y);
      if (!next) {
        out.push_back(at + " leaves the domain too early");
        break;
      }
      y = *next;
    }
    if (y != t.target)
      out.push_back(at + " does not reach the target in depth steps");
  }
  return out;
}

bool HypothesisResult::holds() const {
  return beyond_holds &&
         std::all_of(entries.begin(), entries.end(), [](const HypothesisEntry& e) { return e.holds; });
}

HypothesisResult x_hypothesis_check(const MarkovMap& m, const EscapeData& ed, const VertexSet& X,
                                    Index horizon) {
  HypothesisResult out;
  Interval E = m.gap(ed.J);
  auto check = [&](Index i) {
    HypothesisEntry e{i, true, std::nullopt};
    Interval I = m.interval(i);
    Interval interior{I.lo, I.hi, false, false};
    for (const Interval& part : preimage_in(m, E, i))
      if (Interval hit = intersect(part, interior); !hit.empty()) {
        e.holds = false;
        e.witness = hit.sample();
        break;
      }
    return e;
  };
  Index upto = last_concrete(m, horizon);
  for (Index i : X.enumerate_up_to(upto))
    out.entries.push_back(check(i));
  VertexSet beyond = intersect(preimage_set(m, E, horizon).beyond, X);
  beyond = difference(beyond, VertexSet::range(1, upto));
  if (!beyond.empty()) {
    HypothesisEntry e = check(*beyond.min());
    if (!e.holds) {
      out.beyond_holds = false;
      out.beyond_failure = e;
    }
  }
  return out;
}

} // namespace ultra
