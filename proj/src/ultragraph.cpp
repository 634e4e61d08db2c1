#include "ultra/ultragraph.hpp"

#include <algorithm>
#include <stdexcept>

namespace ultra {

std::string EdgeId::name() const { return "e" + std::to_string(index) + (primed ? "'" : ""); }

VertexSet EdgeFamily::range_at(Index n) const {
  std::set<Index> m;
  for (std::int64_t d : offsets) {
    std::int64_t k = std::int64_t(n) + d;
    if (k >= 1)
      m.insert(Index(k));
  }
  return set_union(VertexSet::finite(m), constant);
}

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw std::invalid_argument(msg); }

std::string family_label(const EdgeFamily& f) {
  std::string s = "e_n (n>=" + std::to_string(f.first);
  if (f.step != 1)
    s += " step " + std::to_string(f.step);
  return s + ")";
}

} // namespace

Ultragraph::Ultragraph(VertexSet vertices, std::vector<ExplicitEdge> edges,
                       std::vector<EdgeFamily> families)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), families_(std::move(families)) {
  if (vertices_.primed())
    invalid("vertex set of an ultragraph must be unprimed");
  std::sort(edges_.begin(), edges_.end(),
            [](const ExplicitEdge& a, const ExplicitEdge& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const ExplicitEdge& e = edges_[i];
    std::string name = "e" + std::to_string(e.id);
    if (e.id == 0)
      invalid("edge ids must be positive");
    if (i > 0 && edges_[i - 1].id == e.id)
      invalid("duplicate edge id " + name);
    if (!vertices_.contains(e.source))
      invalid("source of " + name + " is not a vertex");
    if (e.range.primed() || e.range.empty())
      invalid("range of " + name + " must be a nonempty unprimed set");
    if (!is_subset(e.range, vertices_))
      invalid("range of " + name + " leaves the vertex set");
  }
  VertexSet taken;
  for (const ExplicitEdge& e : edges_)
    taken = set_union(taken, VertexSet::singleton(e.id));
  for (EdgeFamily& f : families_) {
    if (f.first == 0 || f.step == 0)
      invalid("family start and step must be positive");
    std::sort(f.offsets.begin(), f.offsets.end());
    f.offsets.erase(std::unique(f.offsets.begin(), f.offsets.end()), f.offsets.end());
    if (f.constant.primed())
      invalid("family constant range must be unprimed");
    std::string label = family_label(f);
    VertexSet ids = f.indices();
    if (auto clash = intersect(ids, taken); !clash.empty())
      invalid("edge id e" + std::to_string(*clash.min()) + " of " + label +
              " collides with another edge");
    taken = set_union(taken, ids);
    if (!is_subset(ids, vertices_))
      invalid("sources of " + label + " are not all vertices");
    bool nonempty = !f.constant.empty() ||
                    std::any_of(f.offsets.begin(), f.offsets.end(), [&](std::int64_t d) {
                      return std::int64_t(f.first) + d >= 1;
                    });
    if (!nonempty)
      invalid("range of " + label + " is empty at n=" + std::to_string(f.first));
    for (std::int64_t d : f.offsets)
      if (!is_subset(ids.shifted(d), vertices_))
        invalid("range of " + label + " leaves the vertex set");
    if (!is_subset(f.constant, vertices_))
      invalid("range of " + label + " leaves the vertex set");
  }
}

const ExplicitEdge* Ultragraph::find_explicit(Index id) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), id,
                             [](const ExplicitEdge& e, Index k) { return e.id < k; });
  return it != edges_.end() && it->id == id ? &*it : nullptr;
}

const EdgeFamily* Ultragraph::find_family(Index id) const {
  for (const EdgeFamily& f : families_)
    if (id >= f.first && (id - f.first) % f.step == 0)
      return &f;
  return nullptr;
}

VertexSet Ultragraph::edge_ids() const {
  VertexSet ids;
  for (const ExplicitEdge& e : edges_)
    ids = set_union(ids, VertexSet::singleton(e.id));
  for (const EdgeFamily& f : families_)
    ids = set_union(ids, f.indices());
  return ids;
}

VertexSet Ultragraph::regular_vertices() const {
  // explicit sources emit finitely many edges, family sources one more each
  VertexSet reg;
  for (const ExplicitEdge& e : edges_)
    reg = set_union(reg, VertexSet::singleton(e.source));
  for (const EdgeFamily& f : families_)
    reg = set_union(reg, f.indices());
  return intersect(reg, vertices_);
}

std::vector<EdgeId> Ultragraph::edges_from(Index v) const {
  std::vector<EdgeId> out;
  for (const ExplicitEdge& e : edges_)
    if (e.source == v)
      out.push_back({e.id, false});
  if (find_family(v))
    out.push_back({v, false});
  std::sort(out.begin(), out.end());
  return out;
}

EXSet Ultragraph::range(EdgeId e) const {
  if (!e.primed) {
    if (const ExplicitEdge* x = find_explicit(e.index))
      return EXSet(x->range);
    if (const EdgeFamily* f = find_family(e.index))
      return EXSet(f->range_at(e.index));
  }
  throw std::out_of_range("no edge " + e.name());
}

Index Ultragraph::source(EdgeId e) const {
  if (!e.primed) {
    if (const ExplicitEdge* x = find_explicit(e.index))
      return x->source;
    if (find_family(e.index))
      return e.index;
  }
  throw std::out_of_range("no edge " + e.name());
}

bool Ultragraph::has_edge(EdgeId e) const {
  return !e.primed && (find_explicit(e.index) || find_family(e.index));
}

std::vector<Index> Ultragraph::edges_up_to(Index horizon) const {
  std::vector<Index> out;
  for (const ExplicitEdge& e : edges_)
    if (e.source <= horizon)
      out.push_back(e.id);
  for (const EdgeFamily& f : families_)
    for (Index n : f.indices().enumerate_up_to(horizon))
      out.push_back(n);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- relative, lifted

RelativeUltragraph::RelativeUltragraph(Ultragraph graph, VertexSet x)
    : graph_(std::move(graph)), x_(std::move(x)) {
  VertexSet reg = graph_.regular_vertices();
  if (x_.primed())
    invalid("X must be an unprimed vertex set");
  if (!is_subset(x_, reg))
    invalid("X is not contained in Reg(G): v" + std::to_string(*difference(x_, reg).min()) +
            " is not regular");
  y_ = difference(reg, x_);
}

LiftedUltragraph::LiftedUltragraph(const RelativeUltragraph& base) : base_(base) {}

bool LiftedUltragraph::has_primed_edge(Index e) const {
  return intersects(base_.graph().edge_range(e), base_.Y());
}

std::vector<EdgeId> LiftedUltragraph::added_edges_up_to(Index horizon) const {
  std::vector<EdgeId> out;
  for (Index e : base_.graph().edges_up_to(horizon))
    if (has_primed_edge(e))
      out.push_back({e, true});
  return out;
}

VertexSet LiftedUltragraph::regular_vertices() const { return base_.graph().regular_vertices(); }

std::vector<EdgeId> LiftedUltragraph::edges_from(Index v) const {
  std::vector<EdgeId> out;
  for (EdgeId e : base_.graph().edges_from(v)) {
    out.push_back(e);
    if (has_primed_edge(e.index))
      out.push_back({e.index, true});
  }
  return out;
}

EXSet LiftedUltragraph::range(EdgeId e) const {
  if (!e.primed)
    return base_.graph().range(e);
  if (!has_edge(e))
    throw std::out_of_range("no edge " + e.name());
  return EXSet(VertexSet(), intersect(base_.graph().edge_range(e.index), base_.Y()));
}

Index LiftedUltragraph::source(EdgeId e) const {
  if (!has_edge(e))
    throw std::out_of_range("no edge " + e.name());
  return base_.graph().source({e.index, false});
}

bool LiftedUltragraph::has_edge(EdgeId e) const {
  if (!base_.graph().has_edge({e.index, false}))
    return false;
  return !e.primed || has_primed_edge(e.index);
}

EXSet LiftedUltragraph::vertex_set() const {
  return EXSet(base_.graph().vertices(), base_.Y());
}

// ---------------------------------------------------------------- decomposition

Decomposition decompose(const EXSet& z, const RelativeUltragraph& rg) {
  Decomposition d{z.unprimed, z.primed.as_unprimed()};
  if (!is_subset(d.BcapY, rg.Y()))
    throw std::invalid_argument("primed part " + z.primed.to_string() + " is not contained in Y'");
  if (!d.BcapY.is_finite() && ranges_meet_Y_finitely(rg))
    throw std::invalid_argument("primed part " + z.primed.to_string() +
                                " is infinite although every r(e) n Y is finite");
  return d;
}

EXSet recompose(const Decomposition& d) { return EXSet(d.A, d.BcapY); }

std::vector<EdgeFiniteness> range_Y_finiteness(const RelativeUltragraph& rg) {
  std::vector<EdgeFiniteness> out;
  const Ultragraph& g = rg.graph();
  for (const ExplicitEdge& e : g.explicit_edges()) {
    VertexSet m = intersect(e.range, rg.Y());
    out.push_back({"e" + std::to_string(e.id), m.is_finite(), m});
  }
  for (const EdgeFamily& f : g.families()) {
    // the offset part is finite for every n, only the constant part can be infinite
    VertexSet m = intersect(f.constant, rg.Y());
    out.push_back({family_label(f), m.is_finite(), m});
  }
  return out;
}

bool ranges_meet_Y_finitely(const RelativeUltragraph& rg) {
  auto v = range_Y_finiteness(rg);
  return std::all_of(v.begin(), v.end(), [](const EdgeFiniteness& e) { return e.finite; });
}

} // namespace ultra
