#include "ultra/ultragraph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ultra {

std::string Cycle::to_string() const {
  std::string s;
  for (const EdgeId& e : edges)
    s += (s.empty() ? "" : " ") + e.name();
  return "(" + s + ")";
}

std::string CycleScope::to_string() const {
  return "cycles of length <= " + std::to_string(maxlen) + " through vertices <= " +
         std::to_string(horizon);
}

namespace {

std::vector<EdgeId> min_rotation(const std::vector<EdgeId>& c) {
  std::vector<EdgeId> best = c;
  for (std::size_t r = 1; r < c.size(); ++r) {
    std::vector<EdgeId> rot(c.begin() + r, c.end());
    rot.insert(rot.end(), c.begin(), c.begin() + r);
    best = std::min(best, rot);
  }
  return best;
}

struct CycleSearch {
  const GraphView& g;
  CycleScope scope;
  std::set<std::vector<EdgeId>> found;
  std::vector<EdgeId> path;

  void extend(const EdgeId& start) {
    const EdgeId& last = path.back();
    VertexSet r = g.range(last).unprimed;
    if (r.contains(g.source(start)))
      found.insert(min_rotation(path));
    if (int(path.size()) >= scope.maxlen)
      return;
    for (Index w : r.enumerate_up_to(scope.horizon))
      for (const EdgeId& f : g.edges_from(w)) {
        if (f < start)
          continue;
        path.push_back(f);
        extend(start);
        path.pop_back();
      }
  }
};

} // namespace

std::vector<Cycle> find_cycles(const GraphView& g, const CycleScope& scope) {
  CycleSearch search{g, scope, {}, {}};
  VertexSet verts = g.vertex_set().unprimed;
  for (Index v : verts.enumerate_up_to(scope.horizon))
    for (const EdgeId& e : g.edges_from(v)) {
      search.path = {e};
      search.extend(e);
    }
  std::vector<Cycle> out;
  for (const auto& edges : search.found) {
    std::set<Index> sources;
    for (const EdgeId& e : edges)
      sources.insert(g.source(e));
    out.push_back({edges, sources.size() == edges.size()});
  }
  return out;
}

std::optional<ExitWitness> has_exit(const GraphView& g, const Cycle& c) {
  const std::size_t n = c.edges.size();
  const VertexSet emitters = g.emitters();
  const EXSet verts = g.vertex_set();
  for (std::size_t i = 0; i < n; ++i) {
    EXSet r = g.range(c.edges[i]);
    const EdgeId& next = c.edges[(i + 1) % n];
    VertexSet sinks = difference(intersect(r.unprimed, verts.unprimed), emitters);
    if (!sinks.empty())
      return ExitWitness{i, "sink v" + std::to_string(*sinks.min()) + " in r(" +
                                c.edges[i].name() + ")"};
    if (!r.primed.empty())
      return ExitWitness{i, "sink v" + std::to_string(*r.primed.min()) + "' in r(" +
                                c.edges[i].name() + ")"};
    Index s_next = g.source(next);
    VertexSet others = difference(intersect(r.unprimed, emitters), VertexSet::singleton(s_next));
    if (!others.empty()) {
      Index w = *others.min();
      return ExitWitness{i, "edge " + g.edges_from(w).front().name() + " leaves v" +
                                std::to_string(w) + " in r(" + c.edges[i].name() + ")"};
    }
    for (const EdgeId& f : g.edges_from(s_next))
      if (f != next)
        return ExitWitness{i, "edge " + f.name() + " leaves v" + std::to_string(s_next) +
                                  " in r(" + c.edges[i].name() + ")"};
  }
  return std::nullopt;
}

ConditionLVerdict condition_L(const GraphView& g, const CycleScope& scope) {
  ConditionLVerdict v;
  v.scope = scope;
  for (const Cycle& c : find_cycles(g, scope))
    if (!has_exit(g, c))
      v.exitless.push_back(c);
  v.holds = v.exitless.empty();
  return v;
}

ConditionLVerdict relative_condition_L(const RelativeUltragraph& rg, const CycleScope& scope) {
  ConditionLVerdict v = condition_L(rg.graph(), scope);
  v.holds = true;
  for (const Cycle& c : v.exitless) {
    bool meets = std::any_of(c.edges.begin(), c.edges.end(), [&](const EdgeId& e) {
      return intersects(rg.graph().range(e).unprimed, rg.Y());
    });
    v.meets_Y.push_back(meets);
    v.holds = v.holds && meets;
  }
  return v;
}

EquivalenceVerdict lift_condition_L_equivalence_check(const RelativeUltragraph& rg,
                                                      const CycleScope& scope) {
  EquivalenceVerdict out;
  out.scope = scope;
  LiftedUltragraph gx(rg);
  ConditionLVerdict rel = relative_condition_L(rg, scope);
  ConditionLVerdict abs = condition_L(gx, scope);
  out.relative_holds = rel.holds;
  out.lifted_holds = abs.holds;
  out.agree = rel.holds == abs.holds;
  if (!out.agree)
    out.disagreements.push_back("relative condition (L) and condition (L) on G_X differ");

  std::vector<Cycle> cg = find_cycles(rg.graph(), scope);
  std::vector<Cycle> cx = find_cycles(gx, scope);
  out.same_cycles = cg == cx;
  if (!out.same_cycles)
    out.disagreements.push_back("cycle sets of G and G_X differ");

  for (const Cycle& c : cg) {
    bool exitless_x = !has_exit(gx, c);
    bool misses_Y = std::none_of(c.edges.begin(), c.edges.end(), [&](const EdgeId& e) {
      return intersects(rg.graph().range(e).unprimed, rg.Y());
    });
    bool expected = !has_exit(rg.graph(), c) && misses_Y;
    if (exitless_x != expected) {
      out.item_one_agrees = false;
      out.disagreements.push_back("exit characterisation differs on " + c.to_string());
    }
  }
  return out;
}

} // namespace ultra
