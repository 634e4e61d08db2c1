#pragma once

#include "ultra/vertexset.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ultra {

/// Edge identifier; primed edges e' live only in the lifted graph.
struct EdgeId {
  Index index = 0;
  bool primed = false;

  std::string name() const;
  friend bool operator==(const EdgeId&, const EdgeId&) = default;
  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

struct ExplicitEdge {
  Index id = 0;
  Index source = 0;
  VertexSet range;

  friend bool operator==(const ExplicitEdge&, const ExplicitEdge&) = default;
};

/// Edges e_n : v_n -> {v_{n+d} : d in offsets, n+d >= 1} u constant,
/// for n in {first, first+step, ...}.
struct EdgeFamily {
  Index first = 1;
  Index step = 1;
  std::vector<std::int64_t> offsets;
  VertexSet constant;

  VertexSet indices() const { return VertexSet::progression(first, step); }
  VertexSet range_at(Index n) const;

  friend bool operator==(const EdgeFamily&, const EdgeFamily&) = default;
};

/// Read-only view shared by G and G_X; sources are unprimed vertices.
class GraphView {
public:
  virtual ~GraphView() = default;
  virtual std::vector<EdgeId> edges_from(Index v) const = 0;
  virtual EXSet range(EdgeId e) const = 0;
  virtual Index source(EdgeId e) const = 0;
  virtual bool has_edge(EdgeId e) const = 0;
  /// Unprimed vertices that emit at least one edge.
  virtual VertexSet emitters() const = 0;
  virtual EXSet vertex_set() const = 0;

  std::size_t out_degree(Index v) const { return edges_from(v).size(); }
};

class Ultragraph : public GraphView {
public:
  Ultragraph() = default;
  /// Throws std::invalid_argument when an invariant is violated.
  Ultragraph(VertexSet vertices, std::vector<ExplicitEdge> edges, std::vector<EdgeFamily> families);

  const VertexSet& vertices() const { return vertices_; }
  const std::vector<ExplicitEdge>& explicit_edges() const { return edges_; }
  const std::vector<EdgeFamily>& families() const { return families_; }

  /// Set of all edge ids.
  VertexSet edge_ids() const;
  VertexSet regular_vertices() const;

  std::vector<EdgeId> edges_from(Index v) const override;
  EXSet range(EdgeId e) const override;
  Index source(EdgeId e) const override;
  bool has_edge(EdgeId e) const override;
  VertexSet emitters() const override { return regular_vertices(); }
  EXSet vertex_set() const override { return EXSet(vertices_); }

  VertexSet edge_range(Index id) const { return range(EdgeId{id, false}).unprimed; }
  /// Edge ids whose source lies in {1..horizon}, ascending.
  std::vector<Index> edges_up_to(Index horizon) const;

  friend bool operator==(const Ultragraph& a, const Ultragraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_ && a.families_ == b.families_;
  }

private:
  VertexSet vertices_;
  std::vector<ExplicitEdge> edges_;
  std::vector<EdgeFamily> families_;

  const ExplicitEdge* find_explicit(Index id) const;
  const EdgeFamily* find_family(Index id) const;
};

class RelativeUltragraph {
public:
  RelativeUltragraph(Ultragraph graph, VertexSet x);

  const Ultragraph& graph() const { return graph_; }
  const VertexSet& X() const { return x_; }
  const VertexSet& Y() const { return y_; }

private:
  Ultragraph graph_;
  VertexSet x_;
  VertexSet y_;
};

class LiftedUltragraph : public GraphView {
public:
  explicit LiftedUltragraph(const RelativeUltragraph& base);

  const RelativeUltragraph& base() const { return base_; }
  /// Y' as a primed set.
  VertexSet added_vertices() const { return base_.Y().as_primed(); }
  /// e' exists iff r(e) n Y is nonempty.
  bool has_primed_edge(Index e) const;
  /// Primed edges with source <= horizon.
  std::vector<EdgeId> added_edges_up_to(Index horizon) const;
  VertexSet regular_vertices() const;

  std::vector<EdgeId> edges_from(Index v) const override;
  EXSet range(EdgeId e) const override;
  Index source(EdgeId e) const override;
  bool has_edge(EdgeId e) const override;
  VertexSet emitters() const override { return regular_vertices(); }
  EXSet vertex_set() const override;

private:
  RelativeUltragraph base_;
};

inline LiftedUltragraph lift(const RelativeUltragraph& rg) { return LiftedUltragraph(rg); }

struct Decomposition {
  VertexSet A;
  VertexSet BcapY;
  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

/// Splits Z = A u (B n Y)'. Throws if the primed part leaves Y', or if it is
/// infinite although every r(e) n Y is finite.
Decomposition decompose(const EXSet& z, const RelativeUltragraph& rg);
EXSet recompose(const Decomposition& d);

struct EdgeFiniteness {
  std::string edge; ///< "e3" or "e_n (n>=2)"
  bool finite = true;
  VertexSet intersection; ///< r(e) n Y for explicit edges, constant n Y for families
};

std::vector<EdgeFiniteness> range_Y_finiteness(const RelativeUltragraph& rg);
bool ranges_meet_Y_finitely(const RelativeUltragraph& rg);

// ---------------------------------------------------------------- cycles

struct Cycle {
  std::vector<EdgeId> edges;
  bool simple = true; ///< no repeated source vertex

  std::string to_string() const;
  friend bool operator==(const Cycle&, const Cycle&) = default;
};

struct CycleScope {
  int maxlen = 4;
  Index horizon = 10;
  std::string to_string() const;
  friend bool operator==(const CycleScope&, const CycleScope&) = default;
};

/// Which exit a cycle has, if any.
struct ExitWitness {
  std::size_t position = 0; ///< i such that the exit hangs off r(alpha_i)
  std::string description;
};

std::vector<Cycle> find_cycles(const GraphView& g, const CycleScope& scope);
std::optional<ExitWitness> has_exit(const GraphView& g, const Cycle& c);

struct ConditionLVerdict {
  bool holds = true;
  CycleScope scope;
  std::vector<Cycle> exitless;
  /// relative version: for each exitless cycle, whether some range meets Y
  std::vector<bool> meets_Y;
};

ConditionLVerdict condition_L(const GraphView& g, const CycleScope& scope);
ConditionLVerdict relative_condition_L(const RelativeUltragraph& rg, const CycleScope& scope);

struct EquivalenceVerdict {
  bool relative_holds = false;
  bool lifted_holds = false;
  bool agree = false;
  bool same_cycles = false;
  /// per cycle of G: exitless in G_X  <=>  exitless in G and every r(alpha_i) n Y empty
  bool item_one_agrees = true;
  std::vector<std::string> disagreements;
  CycleScope scope;
};

EquivalenceVerdict lift_condition_L_equivalence_check(const RelativeUltragraph& rg,
                                                      const CycleScope& scope);

} // namespace ultra
