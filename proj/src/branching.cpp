#include "ultra/rep.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace ultra {

using G = GeneratorSymbol;

PointSet BranchingSystem::D_of(const VertexSet& a) const {
  PointSet out;
  for (const auto& [v, pts] : D)
    if (a.contains(v))
      out.insert(pts.begin(), pts.end());
  return out;
}

PointSet BranchingSystem::R_of(Index e) const {
  auto it = R.find(e);
  return it == R.end() ? PointSet{} : it->second;
}

BranchingSystem branching_from_markov(const MarkovMap& m, const EscapeData& ed, int depth,
                                      Index horizon) {
  MarkovSetting s = markov_setting(m, ed, depth, horizon);
  BranchingSystem bs;
  bs.points = s.basis;
  bs.complete_depth = s.tree.complete_depth;
  bs.horizon = horizon;
  // points outside every R_e are exactly the depth-1 nodes, present once depth 1 is complete
  bs.residual_complete = bs.complete_depth >= 1;
  std::map<Rational, std::size_t> lookup;
  for (std::size_t k = 0; k < bs.points.size(); ++k)
    lookup[bs.points[k].point] = k;
  for (Index v = 1; v <= horizon && m.has_interval(v); ++v) {
    bs.D[v];
    bs.R[v];
    bs.f[v];
  }
  for (std::size_t k = 0; k < bs.points.size(); ++k) {
    const BasisPoint& z = bs.points[k];
    bs.D[z.interval].insert(k);
    auto gz = m.eval(z.point);
    if (!gz)
      continue;
    auto it = lookup.find(*gz);
    if (it == lookup.end())
      continue;
    if (!s.graph.edge_range(z.interval).contains(bs.points[it->second].interval))
      continue;
    bs.R[z.interval].insert(k);
    bs.f[z.interval][it->second] = k;
  }
  return bs;
}

namespace {

std::string label(const BasisPoint& b) { return to_string(b.point) + "@" + std::to_string(b.depth); }

/// One holds record per family, or the failures.
class Axiom {
public:
  Axiom(Report& out, std::string name, std::string anchor, std::string scope)
      : out_(out), name_(std::move(name)), anchor_(std::move(anchor)), scope_(std::move(scope)) {}
  ~Axiom() {
    if (fails_.empty())
      out_.add({name_, anchor_, "all", 0, scope_, Verdict::Holds, {}, std::to_string(n_) + " instances"});
    for (auto& r : fails_)
      out_.add(r);
  }
  void ok() { ++n_; }
  void fail(const std::string& subject, const std::string& witness, const std::string& note) {
    ++n_;
    CheckRecord r{name_, anchor_, subject, fails_.size() + 1, scope_, Verdict::Fails, {}, note};
    if (!witness.empty())
      r.witnesses.push_back({"point", witness});
    fails_.push_back(r);
  }

private:
  Report& out_;
  std::string name_, anchor_, scope_;
  std::size_t n_ = 0;
  std::vector<CheckRecord> fails_;
};

std::vector<Index> edges_from(const Ultragraph& g, Index v) {
  std::vector<Index> out;
  for (const EdgeId& e : g.edges_from(v))
    out.push_back(e.index);
  return out;
}

} // namespace

Report validate_branching(const BranchingSystem& bs, const RelativeUltragraph& rg) {
  Report out;
  const Ultragraph& g = rg.graph();
  std::string sc = "vertices and edges <= " + std::to_string(bs.horizon) + ", " +
                   std::to_string(bs.points.size()) + " points, complete depth " +
                   std::to_string(bs.complete_depth);
  {
    Axiom a(out, "branching.R_disjoint", "R_e n R_f empty for e != f", sc);
    std::map<std::size_t, Index> owner;
    for (const auto& [e, pts] : bs.R)
      for (std::size_t p : pts) {
        auto [it, fresh] = owner.emplace(p, e);
        if (fresh)
          a.ok();
        else
          a.fail("e" + std::to_string(it->second) + ",e" + std::to_string(e), label(bs.points[p]),
                 "point lies in two ranges");
      }
  }
  {
    Axiom a(out, "branching.D_boolean", "D_{A n B} = D_A n D_B, D_{A u B} = D_A u D_B", sc);
    std::map<std::size_t, Index> owner;
    for (const auto& [v, pts] : bs.D)
      for (std::size_t p : pts)
        if (!owner.emplace(p, v).second)
          a.fail("v" + std::to_string(v), label(bs.points[p]), "point lies in two vertex sets");
    RelationScope scope = default_scope(rg, std::min<Index>(bs.horizon, 6));
    for (const VertexSet& x : scope.sets)
      for (const VertexSet& y : scope.sets) {
        PointSet dx = bs.D_of(x), dy = bs.D_of(y), meet, join;
        std::set_intersection(dx.begin(), dx.end(), dy.begin(), dy.end(), std::inserter(meet, meet.end()));
        std::set_union(dx.begin(), dx.end(), dy.begin(), dy.end(), std::inserter(join, join.end()));
        if (meet == bs.D_of(intersect(x, y)) && join == bs.D_of(set_union(x, y)))
          a.ok();
        else
          a.fail(x.to_string() + "," + y.to_string(), "", "Boolean law fails");
      }
    if (!bs.D_of(VertexSet()).empty())
      a.fail("{}", "", "D of the empty set is nonempty");
  }
  {
    Axiom a(out, "branching.R_in_source", "R_e contained in D_{s(e)}", sc);
    for (const auto& [e, pts] : bs.R) {
      PointSet src = bs.D_of(VertexSet::singleton(g.source({e, false})));
      for (std::size_t p : pts)
        if (src.count(p))
          a.ok();
        else
          a.fail("e" + std::to_string(e), label(bs.points[p]), "range point outside D_{s(e)}");
    }
  }
  {
    Axiom a(out, "branching.ck_X", "D_v = union of R_e over s(e)=v, v in X",
            sc + ", points of depth < " + std::to_string(bs.complete_depth));
    for (const auto& [v, pts] : bs.D) {
      if (!rg.X().contains(v))
        continue;
      PointSet cover;
      for (Index e : edges_from(g, v)) {
        PointSet r = bs.R_of(e);
        cover.insert(r.begin(), r.end());
      }
      for (std::size_t p : pts) {
        if (bs.points[p].depth >= bs.complete_depth)
          continue;
        if (cover.count(p))
          a.ok();
        else
          a.fail("v" + std::to_string(v), label(bs.points[p]), "point of D_v outside every R_e");
      }
      for (std::size_t p : cover)
        if (!pts.count(p))
          a.fail("v" + std::to_string(v), label(bs.points[p]), "range point outside D_v");
    }
  }
  {
    Axiom a(out, "branching.f_bijective", "f_e : D_{r(e)} -> R_e bijective",
            sc + ", domain points of depth < " + std::to_string(bs.complete_depth));
    for (const auto& [e, pairs] : bs.f) {
      std::string sub = "e" + std::to_string(e);
      PointSet dom = bs.D_of(g.edge_range(e)), rng = bs.R_of(e), image;
      for (const auto& [y, z] : pairs) {
        if (!dom.count(y))
          a.fail(sub, label(bs.points[y]), "f_e defined outside D_{r(e)}");
        else if (!rng.count(z))
          a.fail(sub, label(bs.points[z]), "f_e leaves R_e");
        else if (!image.insert(z).second)
          a.fail(sub, label(bs.points[z]), "f_e is not injective");
        else
          a.ok();
      }
      for (std::size_t y : dom)
        if (bs.points[y].depth < bs.complete_depth && !pairs.count(y))
          a.fail(sub, label(bs.points[y]), "f_e undefined inside the truncation");
      for (std::size_t z : rng)
        if (!image.count(z))
          a.fail(sub, label(bs.points[z]), "range point not hit by f_e");
    }
  }
  return out;
}

// ---------------------------------------------------------------- lift

LiftedBranchingSystem::LiftedBranchingSystem(BranchingSystem base, RelativeUltragraph rg)
    : base_(std::move(base)), rg_(std::move(rg)) {
  for (Index e : rg_.graph().edges_up_to(base_.horizon)) {
    VertexSet meet = intersect(rg_.graph().edge_range(e), rg_.Y());
    if (!meet.is_finite())
      throw std::domain_error("r(e" + std::to_string(e) + ") n Y = " + meet.to_string() + " is infinite");
  }
}

LiftedBranchingSystem lift_branching(const BranchingSystem& bs, const RelativeUltragraph& rg) {
  return LiftedBranchingSystem(bs, rg);
}

PointSet LiftedBranchingSystem::sources_R(const VertexSet& w) const {
  PointSet out;
  for (const auto& [e, pts] : base_.R)
    if (rg_.graph().has_edge({e, false}) && w.contains(rg_.graph().source({e, false})))
      out.insert(pts.begin(), pts.end());
  return out;
}

PointSet LiftedBranchingSystem::residual(Index v) const {
  PointSet out = base_.D_of(VertexSet::singleton(v));
  for (std::size_t p : sources_R(VertexSet::singleton(v)))
    out.erase(p);
  return out;
}

PointSet LiftedBranchingSystem::B(const EXSet& z) const {
  Decomposition d = decompose(z, rg_);
  VertexSet AY = intersect(d.A, rg_.Y());
  PointSet out = base_.D_of(d.A);
  for (std::size_t p : base_.D_of(AY))
    out.erase(p);
  PointSet r = sources_R(AY);
  out.insert(r.begin(), r.end());
  for (const auto& [v, pts] : base_.D) {
    (void)pts;
    if (d.BcapY.contains(v)) {
      PointSet res = residual(v);
      out.insert(res.begin(), res.end());
    }
  }
  return out;
}

std::map<std::size_t, std::size_t> LiftedBranchingSystem::g(EdgeId f) const {
  std::map<std::size_t, std::size_t> out;
  auto it = base_.f.find(f.index);
  if (it == base_.f.end())
    return out;
  LiftedUltragraph lifted(rg_);
  if (!lifted.has_edge(f))
    return out;
  PointSet dom = B(lifted.range(f));
  for (const auto& [y, z] : it->second)
    if (dom.count(y))
      out[y] = z;
  return out;
}

PointSet LiftedBranchingSystem::Q(EdgeId f) const {
  PointSet out;
  for (const auto& [y, z] : g(f)) {
    (void)y;
    out.insert(z);
  }
  return out;
}

Report LiftedBranchingSystem::disjointness_checks(const std::vector<VertexSet>& sets) const {
  Report out;
  const VertexSet& Y = rg_.Y();
  std::string sc = std::to_string(sets.size()) + " sets, " + std::to_string(base_.points.size()) + " points";
  auto diffD = [&](const VertexSet& a) {
    PointSet s = base_.D_of(a);
    for (std::size_t p : base_.D_of(intersect(a, Y)))
      s.erase(p);
    return s;
  };
  auto Rpart = [&](const VertexSet& a) { return sources_R(intersect(a, Y)); };
  auto Qpart = [&](const VertexSet& b) {
    PointSet s;
    for (const auto& [v, pts] : base_.D) {
      (void)pts;
      if (b.contains(v) && Y.contains(v)) {
        PointSet r = residual(v);
        s.insert(r.begin(), r.end());
      }
    }
    return s;
  };
  auto meet = [](const PointSet& a, const PointSet& b) -> std::optional<std::size_t> {
    for (std::size_t p : a)
      if (b.count(p))
        return p;
    return std::nullopt;
  };
  const char* anchors[6] = {"(D_A1 \\ D_{A1 n Y}) n R(A2) = empty", "R(A1) n (D_A2 \\ D_{A2 n Y}) = empty",
                            "(D_A1 \\ D_{A1 n Y}) n Res(B2) = empty", "Res(B1) n (D_A2 \\ D_{A2 n Y}) = empty",
                            "R(A1) n Res(B2) = empty", "Res(B1) n R(A2) = empty"};
  std::vector<std::unique_ptr<Axiom>> items;
  for (int k = 0; k < 6; ++k)
    items.push_back(std::make_unique<Axiom>(out, "lift.disjointness.item" + std::to_string(k + 1), anchors[k], sc));
  for (const VertexSet& a : sets)
    for (const VertexSet& b : sets) {
      std::string sub = "A1=" + a.to_string() + ", A2=" + b.to_string();
      std::optional<std::size_t> hits[6] = {meet(diffD(a), Rpart(b)), meet(Rpart(a), diffD(b)),
                                            meet(diffD(a), Qpart(b)), meet(Qpart(a), diffD(b)),
                                            meet(Rpart(a), Qpart(b)), meet(Qpart(a), Rpart(b))};
      for (int k = 0; k < 6; ++k) {
        if (hits[k])
          items[k]->fail(sub, label(base_.points[*hits[k]]), "sets intersect");
        else
          items[k]->ok();
      }
    }
  return out;
}

// ---------------------------------------------------------------- reps

MatrixRep rep_from_branching(const BranchingSystem& bs, const Ultragraph& graph) {
  auto sys = std::make_shared<BranchingSystem>(bs);
  (void)graph;
  auto assign = [sys](const G& g) {
    SparseMatrix out(sys->points.size());
    if (g.algebra != Algebra::Rel || g.edge.primed)
      throw std::invalid_argument(g.to_string() + " is not a generator of the relative algebra");
    if (g.kind == SymbolKind::Projection) {
      for (std::size_t p : sys->D_of(g.set.unprimed))
        out.set(p, p, 1);
      return out;
    }
    auto it = sys->f.find(g.edge.index);
    if (it != sys->f.end())
      for (const auto& [y, z] : it->second)
        out.set(z, y, 1);
    return g.kind == SymbolKind::Isometry ? out : out.transpose();
  };
  return MatrixRep(Algebra::Rel, bs.points, bs.complete_depth, assign);
}

MatrixRep rep_from_branching(const LiftedBranchingSystem& lbs) {
  auto sys = std::make_shared<LiftedBranchingSystem>(lbs);
  auto assign = [sys](const G& g) {
    SparseMatrix out(sys->base().points.size());
    if (g.algebra != Algebra::Abs)
      throw std::invalid_argument(g.to_string() + " is not a generator of the algebra of G_X");
    if (g.kind == SymbolKind::Projection) {
      for (std::size_t p : sys->B(g.set))
        out.set(p, p, 1);
      return out;
    }
    for (const auto& [y, z] : sys->g(g.edge))
      out.set(z, y, 1);
    return g.kind == SymbolKind::Isometry ? out : out.transpose();
  };
  return MatrixRep(Algebra::Abs, lbs.base().points, lbs.base().complete_depth, assign);
}

Report check_diagram(const LiftedBranchingSystem& lbs, const RelationScope& scope) {
  const RelativeUltragraph& rg = lbs.relative();
  const VertexSet& Y = rg.Y();
  MatrixRep eta = rep_from_branching(lbs.base(), rg.graph());
  MatrixRep pi = rep_from_branching(lbs);
  LiftedUltragraph lifted(rg);

  std::set<G> gens;
  for (const VertexSet& a : scope.sets) {
    gens.insert(G::P(EXSet(a)));
    VertexSet aY = intersect(a, Y);
    if (!aY.empty() && aY.is_finite()) {
      gens.insert(G::P(EXSet(VertexSet(), aY.as_primed())));
      gens.insert(G::P(EXSet(a, aY.as_primed())));
    }
  }
  for (Index e : scope.edges)
    for (EdgeId f : {EdgeId{e, false}, EdgeId{e, true}})
      if (lifted.has_edge(f)) {
        gens.insert(G::S(f));
        gens.insert(G::S_star(f));
      }

  Report out;
  std::string sc = scope.label + ", basis depth <= " + std::to_string(eta.complete_depth());
  std::uint64_t idx = 0;
  std::size_t held = 0;
  int min_safe = eta.complete_depth();
  for (const G& g : gens) {
    CheckRecord r{"diagram.pi_eta_psi", "pi = eta o psi", g.to_string(), ++idx, sc, Verdict::Holds, {}, ""};
    try {
      Evaluation ev = evaluate(psi(StarPolynomial(g), rg), eta);
      SparseMatrix diff = ev.matrix - pi.matrix(g);
      auto hit = diff.first_nonzero([&](std::size_t c) { return eta.basis()[c].depth <= ev.safe_depth; });
      if (hit) {
        r.verdict = Verdict::Fails;
        const BasisPoint& w = eta.basis()[hit->second];
        r.witnesses.push_back({"basis", label(w)});
      } else {
        ++held;
        min_safe = std::min(min_safe, ev.safe_depth);
        continue;
      }
    } catch (const GuardBandError& e) {
      r.verdict = Verdict::Undetermined;
      r.note = e.what();
    } catch (const std::domain_error& e) {
      r.verdict = Verdict::Undetermined;
      r.note = e.what();
    }
    out.add(r);
  }
  if (held == gens.size())
    out.add({"diagram.pi_eta_psi", "pi = eta o psi", "all", 0, sc, Verdict::Holds, {},
             std::to_string(held) + " generators, checked on depth <= " + std::to_string(min_safe)});
  return out;
}

} // namespace ultra
