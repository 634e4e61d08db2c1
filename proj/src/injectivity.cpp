#include "ultra/rep.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace ultra {

namespace {

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Fails || b == Verdict::Fails)
    return Verdict::Fails;
  if (a == Verdict::Undetermined || b == Verdict::Undetermined)
    return Verdict::Undetermined;
  return Verdict::Holds;
}

struct Emitter {
  InjectivityVerdict& v;
  std::string key, name, anchor;
  bool any = false;

  void add(const std::string& subject, Verdict verdict,
           std::vector<std::pair<std::string, std::string>> witnesses, std::string note) {
    any = true;
    CheckRecord r{name, anchor, subject, 0, v.scope, verdict, std::move(witnesses), std::move(note)};
    r.index = index_of(subject);
    v.report.add(r);
    auto it = v.conditions.find(key);
    v.conditions[key] = it == v.conditions.end() ? verdict : combine(it->second, verdict);
  }
  void vacuous(const std::string& why) {
    if (!any)
      add("none", Verdict::Holds, {}, "vacuous: " + why);
  }
  static std::uint64_t index_of(const std::string& subject) {
    std::uint64_t n = 0;
    for (char c : subject)
      if (c >= '0' && c <= '9')
        n = n * 10 + std::uint64_t(c - '0');
      else if (n)
        break;
    return n;
  }
};

std::string pt(const Rational& q) { return to_string(q); }

bool ranges_avoid_Y(const GraphView& g, const Cycle& c, const VertexSet& Y) {
  for (const EdgeId& e : c.edges)
    if (intersects(g.range(e).unprimed, Y))
      return false;
  return true;
}

std::string cycle_subject(const Cycle& c) { return c.to_string(); }

} // namespace

Verdict InjectivityVerdict::overall() const {
  Verdict v = Verdict::Holds;
  for (const auto& [k, c] : conditions)
    v = combine(v, c);
  return v;
}

InjectivityVerdict injectivity_markov(const MarkovMap& m, const EscapeData& ed, const VertexSet& X,
                                      int depth, Index horizon, const InjectivityScope& scope) {
  InjectivityVerdict out;
  MarkovSetting s = markov_setting(m, ed, depth, horizon);
  RelativeUltragraph rg(s.graph, X);
  const VertexSet& Y = rg.Y();
  Index V = scope.vertices ? std::min(scope.vertices, horizon) : horizon;
  if (m.count())
    V = std::min(V, *m.count());
  out.scope = "vertices <= " + std::to_string(V) + ", depth " + std::to_string(depth) + ", horizon " +
              std::to_string(horizon) + ", " + scope.cycles.to_string() + ", F = {1.." +
              std::to_string(scope.witness_bound) + "}";

  if (!ranges_meet_Y_finitely(rg)) {
    Emitter e{out, "pre", "injectivity.finite_ranges", "r(e) n Y finite for every edge"};
    e.add("all", Verdict::Undetermined, {}, "some r(e) n Y is infinite; the criterion does not apply");
    return out;
  }
  HypothesisResult hyp = x_hypothesis_check(m, ed, X, horizon);
  if (!hyp.holds()) {
    Emitter e{out, "pre", "injectivity.hypothesis", "interior of I_i misses g^-1(E_J) for v_i in X"};
    for (const HypothesisEntry& h : hyp.entries)
      if (!h.holds)
        e.add("v" + std::to_string(h.vertex), Verdict::Fails, {{"y", pt(*h.witness)}},
              "the representation is not defined for this X");
    if (hyp.beyond_failure)
      e.add("v" + std::to_string(hyp.beyond_failure->vertex), Verdict::Fails,
            {{"y", pt(*hyp.beyond_failure->witness)}}, "the representation is not defined for this X");
    return out;
  }

  std::map<Index, std::vector<const OrbitNode*>> by_interval;
  for (const OrbitNode& n : s.tree.nodes)
    by_interval[n.interval].push_back(&n);
  for (auto& [i, v] : by_interval)
    std::sort(v.begin(), v.end(), [](const OrbitNode* a, const OrbitNode* b) {
      return std::tie(a->depth, a->point) < std::tie(b->depth, b->point);
    });

  // point of I_i n R_g(x), reached by pulling a tree node back along a graph
  // path of length >= min_len; returns (point, depth, first step vertex)
  struct Found {
    Rational point;
    int depth;
    std::optional<Rational> image;
  };
  auto search = [&](Index i, int min_len) -> std::optional<Found> {
    if (min_len == 0 && by_interval.count(i)) {
      const OrbitNode* n = by_interval[i].front();
      return Found{n->point, n->depth, n->image};
    }
    if (min_len == 1 && by_interval.count(i))
      for (const OrbitNode* n : by_interval[i])
        if (n->depth >= 2)
          return Found{n->point, n->depth, n->image};
    // BFS over (vertex, steps capped at min_len)
    std::map<std::pair<Index, int>, std::pair<Index, int>> parent;
    std::deque<std::pair<Index, int>> queue{{i, 0}};
    parent[{i, 0}] = {0, -1};
    while (!queue.empty()) {
      auto [v, len] = queue.front();
      queue.pop_front();
      if (len >= min_len && by_interval.count(v)) {
        std::vector<Index> path{v};
        auto cur = std::make_pair(v, len);
        while (parent[cur].second >= 0) {
          cur = parent[cur];
          path.push_back(cur.first);
        }
        std::reverse(path.begin(), path.end()); // i ... v
        const OrbitNode* n = by_interval[v].front();
        Rational p = n->point;
        std::optional<Rational> image;
        int d = n->depth;
        for (std::size_t k = path.size() - 1; k-- > 0;) {
          auto q = inverse_branch(m, path[k], p);
          if (!q)
            return std::nullopt;
          image = p;
          p = *q;
          ++d;
        }
        return Found{p, d, image};
      }
      for (Index w : s.graph.edge_range(v).enumerate_up_to(horizon)) {
        auto next = std::make_pair(w, std::min(len + 1, min_len));
        if (parent.emplace(next, std::make_pair(v, len)).second)
          queue.push_back(next);
      }
    }
    return std::nullopt;
  };

  {
    Emitter e{out, "1", "injectivity.cond1", "I_i n R_g(x) nonempty for v_i in X"};
    for (Index i : X.enumerate_up_to(V)) {
      if (auto f = search(i, 0))
        e.add("v" + std::to_string(i), Verdict::Holds, {{"y", pt(f->point)}, {"depth", std::to_string(f->depth)}}, "");
      else
        e.add("v" + std::to_string(i), Verdict::Undetermined, {}, "no point of I_i n R_g(x) found at scope");
    }
    e.vacuous("X has no vertex in scope");
  }
  {
    Emitter e{out, "2", "injectivity.cond2", "some y_i in I_i has g(y_i) in I_j n R_g(x), v_j in r(e_i), for v_i in Y"};
    for (Index i : Y.enumerate_up_to(V)) {
      auto f = search(i, 1);
      if (f && f->image)
        e.add("v" + std::to_string(i), Verdict::Holds, {{"y", pt(f->point)}, {"g(y)", pt(*f->image)}}, "");
      else
        e.add("v" + std::to_string(i), Verdict::Undetermined, {}, "no preimage chain found at scope");
    }
    e.vacuous("Y has no vertex in scope");
  }
  {
    Emitter e{out, "3", "injectivity.cond3", "I_i n R_g(x) n g^-1(E_J) nonempty for v_i in Y"};
    Interval E = m.gap(ed.J);
    for (Index i : Y.enumerate_up_to(V)) {
      std::string sub = "v" + std::to_string(i);
      const OrbitNode* hit = nullptr;
      if (by_interval.count(i))
        for (const OrbitNode* n : by_interval[i])
          if (n->depth == 1) {
            hit = n;
            break;
          }
      if (hit) {
        e.add(sub, Verdict::Holds, {{"y", pt(hit->point)}, {"g(y)", pt(hit->image)}}, "");
        continue;
      }
      Interval I = m.interval(i);
      Interval interior{I.lo, I.hi, false, false};
      bool meets = false;
      for (const Interval& part : preimage_in(m, E, i))
        if (!intersect(part, interior).empty())
          meets = true;
      e.add(sub, Verdict::Fails, {{"E_J", E.to_string()}},
            meets ? "no point of I_i maps onto the escape target"
                  : "I_i n g^-1(E_" + std::to_string(ed.J) + ") is empty");
    }
    e.vacuous("Y has no vertex in scope");
  }
  {
    Emitter e{out, "4", "injectivity.cond4", "exitless cycles avoiding Y have non-periodic points"};
    for (const Cycle& c : find_cycles(s.graph, scope.cycles)) {
      if (has_exit(s.graph, c) || !ranges_avoid_Y(s.graph, c, Y))
        continue;
      Index start = s.graph.source(c.edges.front());
      auto f = search(start, 0);
      bool ok = false;
      if (f) {
        ok = true;
        Rational y = f->point;
        for (int n = 1; n <= scope.witness_bound && ok; ++n) {
          for (auto it = c.edges.rbegin(); it != c.edges.rend() && ok; ++it) {
            auto q = inverse_branch(m, it->index, y);
            if (!q)
              ok = false;
            else
              y = *q;
          }
          if (ok && y == f->point)
            ok = false;
        }
      }
      if (ok)
        e.add(cycle_subject(c), Verdict::Holds, {{"x", pt(f->point)}}, "");
      else
        e.add(cycle_subject(c), Verdict::Undetermined, {}, "no non-periodic witness found at scope");
    }
    e.vacuous("no exitless cycle avoiding Y at scope");
  }
  return out;
}

InjectivityVerdict injectivity_counting(const BranchingSystem& bs, const RelativeUltragraph& rg,
                                        const InjectivityScope& scope) {
  InjectivityVerdict out;
  const Ultragraph& g = rg.graph();
  const VertexSet& Y = rg.Y();
  Index V = scope.vertices ? std::min(scope.vertices, bs.horizon) : bs.horizon;
  out.scope = "vertices <= " + std::to_string(V) + ", " + std::to_string(bs.points.size()) +
              " points, " + scope.cycles.to_string() + ", F = {1.." +
              std::to_string(scope.witness_bound) + "}";
  auto first_point = [&](const PointSet& ps) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t p : ps)
      if (!best || std::tie(bs.points[p].depth, bs.points[p].point) <
                       std::tie(bs.points[*best].depth, bs.points[*best].point))
        best = p;
    return best;
  };
  auto residual = [&](Index v) {
    PointSet r = bs.D_of(VertexSet::singleton(v));
    for (const EdgeId& e : g.edges_from(v))
      for (std::size_t p : bs.R_of(e.index))
        r.erase(p);
    return r;
  };
  {
    Emitter e{out, "a", "injectivity.a", "D_v nonempty for v not in Y"};
    for (Index v : difference(g.vertices(), Y).enumerate_up_to(V)) {
      if (auto p = first_point(bs.D_of(VertexSet::singleton(v))))
        e.add("v" + std::to_string(v), Verdict::Holds, {{"y", pt(bs.points[*p].point)}}, "");
      else
        e.add("v" + std::to_string(v), Verdict::Undetermined, {}, "D_v has no point in the truncation");
    }
    e.vacuous("no vertex outside Y in scope");
  }
  {
    Emitter e{out, "b", "injectivity.b", "R_e nonempty for s(e) in Y"};
    for (Index id : g.edges_up_to(V)) {
      if (!Y.contains(g.source({id, false})))
        continue;
      if (auto p = first_point(bs.R_of(id)))
        e.add("e" + std::to_string(id), Verdict::Holds, {{"y", pt(bs.points[*p].point)}}, "");
      else
        e.add("e" + std::to_string(id), Verdict::Undetermined, {}, "R_e has no point in the truncation");
    }
    e.vacuous("no edge leaves Y in scope");
  }
  {
    Emitter e{out, "c", "injectivity.c", "D_v minus the union of R_e nonempty for v in Y"};
    for (Index v : Y.enumerate_up_to(V)) {
      if (auto p = first_point(residual(v)))
        e.add("v" + std::to_string(v), Verdict::Holds, {{"y", pt(bs.points[*p].point)}}, "");
      else if (bs.residual_complete)
        e.add("v" + std::to_string(v), Verdict::Fails, {}, "D_v is covered by the ranges of its edges");
      else
        e.add("v" + std::to_string(v), Verdict::Undetermined, {}, "no residual point in the truncation");
    }
    e.vacuous("Y has no vertex in scope");
  }
  {
    Emitter e{out, "d", "injectivity.d", "exitless simple cycles avoiding Y have non-periodic points"};
    for (const Cycle& c : find_cycles(g, scope.cycles)) {
      if (!c.simple || has_exit(g, c) || !ranges_avoid_Y(g, c, Y))
        continue;
      auto f_alpha = [&](std::size_t y) -> std::optional<std::size_t> {
        for (auto it = c.edges.rbegin(); it != c.edges.rend(); ++it) {
          auto m = bs.f.find(it->index);
          if (m == bs.f.end())
            return std::nullopt;
          auto z = m->second.find(y);
          if (z == m->second.end())
            return std::nullopt;
          y = z->second;
        }
        return y;
      };
      PointSet dom = bs.D_of(VertexSet::singleton(g.source(c.edges.front())));
      std::optional<std::size_t> witness;
      bool identity = !dom.empty();
      for (std::size_t x : dom) {
        auto once = f_alpha(x);
        if (!once || *once != x)
          identity = false;
        std::size_t y = x;
        bool ok = true;
        for (int n = 1; n <= scope.witness_bound && ok; ++n) {
          auto z = f_alpha(y);
          if (!z || *z == x)
            ok = false;
          else
            y = *z;
        }
        if (ok && !witness)
          witness = x;
      }
      if (witness)
        e.add(cycle_subject(c), Verdict::Holds, {{"x", pt(bs.points[*witness].point)}}, "");
      else if (identity)
        e.add(cycle_subject(c), Verdict::Fails, {}, "f_alpha is the identity on D_{s(alpha)}");
      else
        e.add(cycle_subject(c), Verdict::Undetermined, {}, "no non-periodic witness found at scope");
    }
    e.vacuous("no exitless simple cycle avoiding Y at scope");
  }
  return out;
}

} // namespace ultra
