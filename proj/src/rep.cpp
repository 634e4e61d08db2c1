#include "ultra/rep.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace ultra {

using G = GeneratorSymbol;

MarkovSetting markov_setting(const MarkovMap& m, const EscapeData& ed, int depth, Index horizon) {
  if (depth < 1)
    throw std::invalid_argument("depth must be positive");
  MarkovSetting s{ed, backward_orbit(m, ed.target, depth, horizon), Ultragraph(), {}};
  if (s.tree.complete_depth < 1)
    throw std::invalid_argument("orbit tree is incomplete already at depth 1; raise the horizon");
  s.graph = induced_ultragraph(transition_matrix(m, horizon), m);
  for (const OrbitNode& n : s.tree.nodes)
    s.basis.push_back({n.point, n.depth, n.interval});
  return s;
}

std::optional<Rational> inverse_branch(const MarkovMap& m, Index i, const Rational& target) {
  if (!m.has_interval(i))
    return std::nullopt;
  for (const PointOverride& o : m.overrides_of(i))
    if (o.value == target)
      return o.point;
  for (const Piece& p : m.effective_pieces(i)) {
    Rational z = p.inverse(target);
    if (p.domain.contains(z))
      return z;
  }
  return std::nullopt;
}

MatrixRep build_markov_rep(const MarkovMap& m, const EscapeData& ed, const VertexSet& X, int depth,
                           Index horizon) {
  HypothesisResult h = x_hypothesis_check(m, ed, X, horizon);
  if (!h.holds()) {
    HypothesisEntry bad = h.beyond_failure ? *h.beyond_failure : HypothesisEntry{};
    for (const HypothesisEntry& e : h.entries)
      if (!e.holds) {
        bad = e;
        break;
      }
    throw std::invalid_argument("interior of I_" + std::to_string(bad.vertex) + " meets g^-1(E_" +
                                std::to_string(ed.J) + ") at " +
                                (bad.witness ? to_string(*bad.witness) : std::string("?")) +
                                ", so v" + std::to_string(bad.vertex) + " cannot be in X");
  }
  auto s = std::make_shared<MarkovSetting>(markov_setting(m, ed, depth, horizon));
  auto map = std::make_shared<MarkovMap>(m);
  auto lookup = std::make_shared<std::map<Rational, std::size_t>>();
  for (std::size_t k = 0; k < s->basis.size(); ++k)
    (*lookup)[s->basis[k].point] = k;

  auto assign = [s, map, lookup](const G& g) {
    const std::vector<BasisPoint>& basis = s->basis;
    SparseMatrix out(basis.size());
    if (g.algebra != Algebra::Rel || g.edge.primed)
      throw std::invalid_argument(g.to_string() + " is not a generator of the relative algebra");
    switch (g.kind) {
    case SymbolKind::Projection:
      for (std::size_t c = 0; c < basis.size(); ++c)
        if (g.set.unprimed.contains(basis[c].interval))
          out.set(c, c, 1);
      break;
    case SymbolKind::Isometry: {
      Index i = g.edge.index;
      VertexSet row = s->graph.edge_range(i);
      for (std::size_t c = 0; c < basis.size(); ++c) {
        if (!row.contains(basis[c].interval))
          continue;
        auto z = inverse_branch(*map, i, basis[c].point);
        if (!z)
          continue;
        if (auto it = lookup->find(*z); it != lookup->end())
          out.set(it->second, c, 1);
      }
      break;
    }
    case SymbolKind::Adjoint: {
      Index i = g.edge.index;
      VertexSet row = s->graph.edge_range(i);
      for (std::size_t c = 0; c < basis.size(); ++c) {
        if (basis[c].interval != i)
          continue;
        auto gy = map->eval(basis[c].point);
        if (!gy)
          continue;
        auto it = lookup->find(*gy);
        if (it != lookup->end() && row.contains(basis[it->second].interval))
          out.set(it->second, c, 1);
      }
      break;
    }
    }
    return out;
  };
  return MatrixRep(Algebra::Rel, s->basis, s->tree.complete_depth, assign);
}

Report check_nu_equals_pi(const MarkovMap& m, const EscapeData& ed, const VertexSet& X, int depth,
                          Index horizon, Index k) {
  MatrixRep nu = build_markov_rep(m, ed, X, depth, horizon);
  MarkovSetting s = markov_setting(m, ed, depth, horizon);
  BranchingSystem bs = branching_from_markov(m, ed, depth, horizon);
  MatrixRep pi = rep_from_branching(bs, s.graph);

  std::vector<G> gens;
  std::set<VertexSet> sets;
  for (Index mask = 0; mask < (Index(1) << k); ++mask) {
    std::set<Index> a;
    for (Index b = 0; b < k; ++b)
      if (mask >> b & 1)
        a.insert(b + 1);
    sets.insert(VertexSet::finite(a));
  }
  for (Index t = 1; t <= k; ++t)
    sets.insert(VertexSet::tail(t));
  std::vector<Index> edges = s.graph.edge_ids().enumerate_up_to(k);
  for (Index e : edges)
    sets.insert(s.graph.edge_range(e));
  for (const VertexSet& a : sets)
    gens.push_back(G::p(a));
  for (Index e : edges) {
    gens.push_back(G::s(e));
    gens.push_back(G::s_star(e));
  }

  Report out;
  std::string scope = "p_A for A in {1.." + std::to_string(k) + "}, tails and ranges; s_e, s_e* for e <= " +
                      std::to_string(k) + "; depth " + std::to_string(depth) + ", horizon " +
                      std::to_string(horizon);
  std::size_t checked = 0;
  std::uint64_t idx = 0;
  for (const G& g : gens) {
    SparseMatrix a = nu.matrix(g), b = pi.matrix(g);
    ++checked;
    if (a == b)
      continue;
    CheckRecord r{"equivalence.nu_pi", "pi_x = nu_x", g.to_string(), ++idx, scope, Verdict::Fails, {}, ""};
    auto hit = (a - b).first_nonzero([](std::size_t) { return true; });
    const BasisPoint& w = nu.basis()[hit->second];
    r.witnesses.push_back({"basis", to_string(w.point) + "@" + std::to_string(w.depth)});
    out.add(r);
  }
  if (idx == 0)
    out.add({"equivalence.nu_pi", "pi_x = nu_x", "all", 0, scope, Verdict::Holds, {},
             std::to_string(checked) + " generators, " + std::to_string(nu.size()) +
                 " basis points, exact matrix equality"});
  return out;
}

} // namespace ultra
