#include "ultra/relations.hpp"

#include <algorithm>
#include <set>

namespace ultra {

using G = GeneratorSymbol;

namespace {

StarPolynomial rel_zero() { return StarPolynomial(Algebra::Rel); }

StarPolynomial s_ss(Index e) { return StarPolynomial(G::s(e)) * StarPolynomial(G::s_star(e)); }

void need_finite(const VertexSet& s, const std::string& what) {
  if (!s.is_finite())
    throw std::domain_error(what + " = " + s.to_string() + " is infinite");
}

} // namespace

StarPolynomial range_sum(const VertexSet& w, const Ultragraph& g) {
  need_finite(w, "source set");
  StarPolynomial out = rel_zero();
  for (Index v : w.elements())
    for (const EdgeId& e : g.edges_from(v))
      out += s_ss(e.index);
  return out;
}

StarPolynomial q_of(Index v, const Ultragraph& g) {
  if (!g.regular_vertices().contains(v))
    throw std::invalid_argument("q_v needs a regular vertex, v" + std::to_string(v) + " is not");
  return StarPolynomial(G::p(VertexSet::singleton(v))) - range_sum(VertexSet::singleton(v), g);
}

StarPolynomial q_sum(const VertexSet& w, const Ultragraph& g) {
  need_finite(w, "vertex set");
  StarPolynomial out = rel_zero();
  for (Index v : w.elements())
    out += q_of(v, g);
  return out;
}

StarPolynomial phi_image(const GeneratorSymbol& g, const RelativeUltragraph& rg) {
  if (g.algebra != Algebra::Rel)
    throw std::invalid_argument("phi is defined on the relative algebra");
  const VertexSet& Y = rg.Y();
  switch (g.kind) {
  case SymbolKind::Projection: {
    StarPolynomial out(G::P(EXSet(g.set.unprimed)));
    out += StarPolynomial(G::P(EXSet(VertexSet(), intersect(g.set.unprimed, Y))));
    return out;
  }
  case SymbolKind::Isometry: {
    StarPolynomial out(G::S(g.edge));
    if (intersects(rg.graph().edge_range(g.edge.index), Y))
      out += StarPolynomial(G::S({g.edge.index, true}));
    return out;
  }
  case SymbolKind::Adjoint:
    return phi_image(g.adjoint(), rg).adjoint();
  }
  return StarPolynomial(Algebra::Abs);
}

StarPolynomial psi_image(const GeneratorSymbol& g, const RelativeUltragraph& rg) {
  if (g.algebra != Algebra::Abs)
    throw std::invalid_argument("psi is defined on the algebra of G_X");
  const Ultragraph& graph = rg.graph();
  const VertexSet& Y = rg.Y();
  switch (g.kind) {
  case SymbolKind::Projection: {
    Decomposition d = decompose(g.set, rg);
    VertexSet AY = intersect(d.A, Y);
    need_finite(AY, "A n Y");
    need_finite(d.BcapY, "B n Y");
    StarPolynomial out(G::p(d.A));
    out -= StarPolynomial(G::p(AY));
    out += range_sum(AY, graph);
    out += q_sum(d.BcapY, graph);
    return out;
  }
  case SymbolKind::Isometry: {
    Index e = g.edge.index;
    VertexSet r = graph.edge_range(e);
    VertexSet rY = intersect(r, Y);
    need_finite(rY, "r(e" + std::to_string(e) + ") n Y");
    StarPolynomial inner = rel_zero();
    if (!g.edge.primed) {
      inner += StarPolynomial(G::p(r));
      inner -= StarPolynomial(G::p(rY));
      inner += range_sum(rY, graph);
    } else {
      if (rY.empty())
        throw std::invalid_argument("edge " + g.edge.name() + " does not exist in G_X");
      inner += StarPolynomial(G::p(rY));
      inner -= range_sum(rY, graph);
    }
    return StarPolynomial(G::s(e)) * inner;
  }
  case SymbolKind::Adjoint:
    return psi_image(g.adjoint(), rg).adjoint();
  }
  return rel_zero();
}

StarPolynomial phi(const StarPolynomial& p, const RelativeUltragraph& rg) {
  return p.substitute(Algebra::Abs, [&](const G& g) { return phi_image(g, rg); });
}

StarPolynomial psi(const StarPolynomial& p, const RelativeUltragraph& rg) {
  return p.substitute(Algebra::Rel, [&](const G& g) { return psi_image(g, rg); });
}

// ---------------------------------------------------------------- MatrixRep

MatrixRep::MatrixRep(Algebra algebra, std::vector<BasisPoint> basis, int complete_depth,
                     Assigner assign)
    : algebra_(algebra), basis_(std::move(basis)), complete_depth_(complete_depth),
      assign_(std::move(assign)) {
  for (std::size_t i = 0; i < basis_.size(); ++i)
    lookup_.emplace(basis_[i].point, i);
}

int MatrixRep::min_depth() const {
  int m = complete_depth_;
  for (const BasisPoint& b : basis_)
    m = std::min(m, b.depth);
  return m;
}

SparseMatrix MatrixRep::matrix(const GeneratorSymbol& g) const {
  if (g.algebra != algebra_)
    throw std::invalid_argument("symbol " + g.to_string() + " is not assigned in this representation");
  if (auto it = overrides_.find(g); it != overrides_.end())
    return it->second;
  return assign_(g);
}

void MatrixRep::override_symbol(const GeneratorSymbol& g, SparseMatrix m) {
  if (m.size() != basis_.size())
    throw std::invalid_argument("override has the wrong dimension");
  overrides_[g] = std::move(m);
}

std::optional<std::size_t> MatrixRep::index_of(const Rational& point) const {
  auto it = lookup_.find(point);
  if (it == lookup_.end())
    return std::nullopt;
  return it->second;
}

SparseMatrix evaluate_word(const Word& w, const MatrixRep& rep) {
  SparseMatrix m = SparseMatrix::identity(rep.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    m = rep.matrix(*it) * m;
  return m;
}

Evaluation evaluate(const StarPolynomial& p, const MatrixRep& rep) {
  Evaluation out{SparseMatrix(rep.size()), rep.complete_depth() - p.max_excursion()};
  if (out.safe_depth < rep.min_depth())
    throw GuardBandError("truncation at depth " + std::to_string(rep.complete_depth()) +
                         " leaves no room for excursion " + std::to_string(p.max_excursion()));
  for (const auto& [w, c] : p.terms())
    out.matrix = out.matrix + evaluate_word(w, rep).scaled(c);
  return out;
}

ZeroCheck check_zero(const StarPolynomial& p, const MatrixRep& rep) {
  Evaluation ev = evaluate(p, rep);
  ZeroCheck z;
  z.safe_depth = ev.safe_depth;
  auto hit = ev.matrix.first_nonzero(
      [&](std::size_t c) { return rep.basis()[c].depth <= ev.safe_depth; });
  if (hit) {
    z.zero = false;
    z.witness = rep.basis()[hit->second];
  }
  return z;
}

// ---------------------------------------------------------------- suites

RelationScope default_scope(const RelativeUltragraph& rg, Index k) {
  const Ultragraph& g = rg.graph();
  std::set<VertexSet> sets{VertexSet()};
  for (Index v : g.vertices().enumerate_up_to(k))
    sets.insert(VertexSet::singleton(v));
  std::vector<Index> edges;
  for (Index e : g.edge_ids().enumerate_up_to(k)) {
    edges.push_back(e);
    sets.insert(g.edge_range(e));
  }
  sets.insert(rg.X());
  sets.insert(rg.Y());
  sets.insert(g.vertices());
  RelationScope s;
  for (const VertexSet& a : sets)
    if (intersect(a, rg.Y()).is_finite())
      s.sets.push_back(a);
  s.edges = edges;
  s.vertices = g.vertices().enumerate_up_to(k);
  s.label = "sets, edges and vertices with index <= " + std::to_string(k);
  return s;
}

namespace {

std::string point_label(const BasisPoint& b) {
  return to_string(b.point) + "@" + std::to_string(b.depth);
}

/// Collects one identity family; a single holds record when every instance
/// passes, otherwise one record per failing instance.
class Tally {
public:
  Tally(Report& out, std::string name, std::string anchor, std::string scope)
      : out_(out), name_(std::move(name)), anchor_(std::move(anchor)), scope_(std::move(scope)) {}

  ~Tally() {
    if (failures_.empty() && undetermined_.empty()) {
      CheckRecord r{name_, anchor_, "all", 0, scope_, Verdict::Holds, {}, ""};
      r.note = std::to_string(checked_) + " instances" +
               (min_safe_ >= 0 ? ", checked on depth <= " + std::to_string(min_safe_) : "");
      out_.add(r);
    }
    for (auto& r : failures_)
      out_.add(r);
    for (auto& r : undetermined_)
      out_.add(r);
  }

  void check(const std::string& subject, const StarPolynomial& diff, const MatrixRep& rep) {
    ++checked_;
    try {
      ZeroCheck z = check_zero(diff, rep);
      min_safe_ = min_safe_ < 0 ? z.safe_depth : std::min(min_safe_, z.safe_depth);
      if (!z.zero) {
        CheckRecord r{name_, anchor_, subject, index_++, scope_, Verdict::Fails, {}, ""};
        r.witnesses.push_back({"basis", point_label(*z.witness)});
        r.note = "nonzero on the basis vector of " + to_string(z.witness->point);
        failures_.push_back(r);
      }
    } catch (const GuardBandError& e) {
      undetermined_.push_back(
          {name_, anchor_, subject, index_++, scope_, Verdict::Undetermined, {}, e.what()});
    } catch (const std::domain_error& e) {
      undetermined_.push_back(
          {name_, anchor_, subject, index_++, scope_, Verdict::Undetermined, {}, e.what()});
    }
  }

  void fail_matrix(const std::string& subject, const std::string& note) {
    ++checked_;
    failures_.push_back({name_, anchor_, subject, index_++, scope_, Verdict::Fails, {}, note});
  }

  void count() { ++checked_; }

private:
  Report& out_;
  std::string name_, anchor_, scope_;
  std::size_t checked_ = 0;
  std::uint64_t index_ = 1;
  int min_safe_ = -1;
  std::vector<CheckRecord> failures_, undetermined_;
};

StarPolynomial P(const VertexSet& a) { return StarPolynomial(G::p(a)); }

std::string pair_label(const VertexSet& a, const VertexSet& b) {
  return "A=" + a.to_string() + ", B=" + b.to_string();
}

} // namespace

Report relation_suite(const MatrixRep& rep, const RelativeUltragraph& rg, const RelationScope& scope) {
  Report out;
  const Ultragraph& g = rg.graph();
  const VertexSet& Y = rg.Y();
  const std::string sc = scope.label + ", basis depth <= " + std::to_string(rep.complete_depth());

  {
    Tally t(out, "projection.diagonal_idempotent", "p_A diagonal 0/1", sc);
    for (const VertexSet& a : scope.sets) {
      if (rep.matrix(G::p(a)).is_diagonal_01())
        t.count();
      else
        t.fail_matrix(a.to_string(), "matrix of p_A is not a diagonal 0/1 matrix");
    }
  }
  {
    Tally t(out, "isometry.partial_permutation", "s_e partial permutation", sc);
    for (Index e : scope.edges) {
      if (rep.matrix(G::s(e)).is_partial_permutation() &&
          rep.matrix(G::s_star(e)) == rep.matrix(G::s(e)).transpose())
        t.count();
      else
        t.fail_matrix("e" + std::to_string(e), "s_e is not a partial permutation with s_e* its transpose");
    }
  }
  {
    Tally t(out, "relation.p_empty", "p_{} = 0", sc);
    if (rep.matrix(G::p(VertexSet())).is_zero())
      t.count();
    else
      t.fail_matrix("{}", "p of the empty set is nonzero");
  }
  {
    Tally meet(out, "relation.p_meet", "p_A p_B = p_{A n B}", sc);
    Tally join(out, "relation.p_join", "p_{A u B} = p_A + p_B - p_{A n B}", sc);
    for (const VertexSet& a : scope.sets)
      for (const VertexSet& b : scope.sets) {
        meet.check(pair_label(a, b), P(a) * P(b) - P(intersect(a, b)), rep);
        join.check(pair_label(a, b), P(set_union(a, b)) - P(a) - P(b) + P(intersect(a, b)), rep);
      }
  }
  {
    Tally ss(out, "relation.s_star_s", "s_e* s_e = p_{r(e)}", sc);
    Tally below(out, "relation.range_below_source", "p_{s(e)} s_e s_e* = s_e s_e*", sc);
    Tally orth(out, "relation.orthogonal_ranges", "s_e* s_f = 0 for e != f", sc);
    for (Index e : scope.edges) {
      std::string sub = "e" + std::to_string(e);
      StarPolynomial se(G::s(e)), sse(G::s_star(e));
      ss.check(sub, sse * se - P(g.edge_range(e)), rep);
      below.check(sub, P(VertexSet::singleton(g.source({e, false}))) * s_ss(e) - s_ss(e), rep);
      for (Index f : scope.edges)
        if (f != e)
          orth.check(sub + ",e" + std::to_string(f), sse * StarPolynomial(G::s(f)), rep);
    }
  }
  {
    // one record per vertex, the CK relation is the headline check
    std::uint64_t idx = 0;
    for (Index v : scope.vertices) {
      if (!rg.X().contains(v))
        continue;
      Report tmp;
      {
        Tally t(tmp, "relation.ck", "p_v = sum_{s(e)=v} s_e s_e* for v in X", sc);
        t.check("v" + std::to_string(v), q_of(v, g), rep);
      }
      for (CheckRecord r : tmp.records()) {
        r.subject = "v" + std::to_string(v);
        r.index = ++idx;
        out.add(r);
      }
    }
  }

  // the six computational identities
  std::vector<VertexSet> finite_Y;
  for (const VertexSet& a : scope.sets)
    if (intersect(a, Y).is_finite())
      finite_Y.push_back(a);
  {
    Tally i1(out, "q_identity.item1", "p_A1 S(A2) = p_{A1 n Y} S(A2)", sc);
    Tally i2(out, "q_identity.item2", "S(A1) p_A2 = S(A1) p_{A2 n Y}", sc);
    Tally i3(out, "q_identity.item3", "p_A1 Q(B2) = p_{A1 n Y} Q(B2)", sc);
    Tally i4(out, "q_identity.item4", "Q(B1) p_A2 = Q(B1) p_{A2 n Y}", sc);
    Tally i5(out, "q_identity.item5", "S(A1) Q(B2) = 0 = Q(B1) S(A2)", sc);
    Tally i6(out, "q_identity.item6", "Q(B1) Q(B2) = Q(B1 n B2)", sc);
    for (const VertexSet& a : finite_Y)
      for (const VertexSet& b : finite_Y) {
        std::string sub = pair_label(a, b);
        VertexSet aY = intersect(a, Y), bY = intersect(b, Y);
        StarPolynomial Sa = range_sum(aY, g), Sb = range_sum(bY, g);
        StarPolynomial Qa = q_sum(aY, g), Qb = q_sum(bY, g);
        i1.check(sub, P(a) * Sb - P(aY) * Sb, rep);
        i2.check(sub, Sa * P(b) - Sa * P(bY), rep);
        i3.check(sub, P(a) * Qb - P(aY) * Qb, rep);
        i4.check(sub, Qa * P(b) - Qa * P(bY), rep);
        i5.check(sub, Sa * Qb, rep);
        i5.check(sub + " (reversed)", Qa * Sb, rep);
        i6.check(sub, Qa * Qb - q_sum(intersect(aY, bY), g), rep);
      }
    Tally iq(out, "q_identity.pointwise", "q_w q_v = delta_{wv} q_w", sc);
    std::vector<Index> yv;
    for (Index v : scope.vertices)
      if (Y.contains(v))
        yv.push_back(v);
    for (Index w : yv)
      for (Index v : yv) {
        StarPolynomial lhs = q_of(w, g) * q_of(v, g);
        if (w == v)
          lhs -= q_of(w, g);
        iq.check("w=v" + std::to_string(w) + ", v=v" + std::to_string(v), lhs, rep);
      }
  }
  {
    Tally proj(out, "orthogonality.projections", "each member is a self-adjoint idempotent", sc);
    Tally pair(out, "orthogonality.pairwise", "distinct members multiply to 0", sc);
    for (const VertexSet& a : finite_Y)
      for (const VertexSet& b : finite_Y) {
        std::string sub = pair_label(a, b);
        VertexSet aY = intersect(a, Y), bY = intersect(b, Y);
        std::vector<std::pair<std::string, StarPolynomial>> members;
        members.push_back({"p_A - p_{A n Y}", P(a) - P(aY)});
        for (Index w : aY.elements())
          for (const EdgeId& e : g.edges_from(w))
            members.push_back({"s_" + e.name() + " s_" + e.name() + "*", s_ss(e.index)});
        for (Index v : bY.elements())
          members.push_back({"q_v" + std::to_string(v), q_of(v, g)});
        for (std::size_t i = 0; i < members.size(); ++i) {
          const auto& [ni, pi] = members[i];
          proj.check(sub + ": " + ni, pi * pi - pi, rep);
          proj.check(sub + ": " + ni + " adjoint", pi.adjoint() - pi, rep);
          for (std::size_t j = 0; j < members.size(); ++j)
            if (i != j)
              pair.check(sub + ": " + ni + " * " + members[j].first, pi * members[j].second, rep);
        }
      }
  }
  return out;
}

Report psi_phi_identity_check(const MatrixRep& rep, const RelativeUltragraph& rg,
                              const RelationScope& scope) {
  Report out;
  const std::string sc = scope.label + ", basis depth <= " + std::to_string(rep.complete_depth());
  std::vector<G> gens;
  for (const VertexSet& a : scope.sets)
    gens.push_back(G::p(a));
  for (Index e : scope.edges) {
    gens.push_back(G::s(e));
    gens.push_back(G::s_star(e));
  }
  std::uint64_t idx = 0;
  for (const G& gen : gens) {
    CheckRecord r{"iso.psi_phi", "psi(phi(g)) = g", gen.to_string(), ++idx, sc, Verdict::Holds, {}, ""};
    try {
      StarPolynomial round = psi(phi(StarPolynomial(gen), rg), rg);
      ZeroCheck z = check_zero(round - StarPolynomial(gen), rep);
      if (!z.zero) {
        r.verdict = Verdict::Fails;
        r.witnesses.push_back({"basis", point_label(*z.witness)});
      } else {
        r.note = "checked on depth <= " + std::to_string(z.safe_depth);
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
  return out;
}

} // namespace ultra
